#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/observables.hpp"
#include "cascade/sweep.hpp"

using namespace cascade;

namespace {

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        lines.push_back(text.substr(pos, nl - pos));
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return fields;
}

SweepSpec point_spec(const SystemParams& p, const std::string& parameter, double value,
                     SweepOutputs outputs) {
    SweepSpec s;
    s.parameter = parameter;
    s.start = value;
    s.stop = value;
    s.count = 1;
    s.fixed = p;
    s.outputs = outputs;
    return s;
}

}  // namespace

TEST_CASE("sweep_csv_header matches the output selection") {
    CHECK(sweep_csv_header(SweepOutputs::variances) ==
          "kappa,gain_A,eta,epsilon,dc_plus,dc_minus,dd_plus,dd_minus,source,status");
    CHECK(sweep_csv_header(SweepOutputs::duan) ==
          "kappa,gain_A,eta,epsilon,duan_sum,duan_bound,entangled,source,status");
    CHECK(sweep_csv_header(SweepOutputs::mean_photon) ==
          "kappa,gain_A,eta,epsilon,mean_photon,source,status");
    CHECK(sweep_csv_header(SweepOutputs::all) == report_csv_header() + ",status");
}

TEST_CASE("single-point sweep of an empty cavity reproduces the driven-oscillator photon number") {
    // A = 0: two decoupled driven cavities, <N> = 8 eps^2 / kappa^2
    const SystemParams p{2.0, 0.0, 0.5, 3.0};
    const std::string csv = run_sweep(point_spec(p, "epsilon", 3.0, SweepOutputs::mean_photon));
    const auto lines = csv_lines(csv);
    REQUIRE(lines.size() == 2);
    const auto f = csv_fields(lines[1]);
    REQUIRE(f.size() == 7);
    CHECK(f[0] == "2");
    CHECK(f[3] == "3");
    const double expected = 8.0 * 3.0 * 3.0 / (2.0 * 2.0);
    CHECK(std::stod(f[4]) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(f[5] == "closed_form");
    CHECK(f[6] == "ok");
}

TEST_CASE("a grid crossing eta = 0 keeps the boundary row with a telling status") {
    SweepSpec s;
    s.parameter = "eta";
    s.start = 0.0;
    s.stop = 1.0;
    s.count = 3;
    s.fixed = {1.0, 10.0, 0.5, 2.0};
    s.outputs = SweepOutputs::variances;
    const auto lines = csv_lines(run_sweep(s));
    REQUIRE(lines.size() == 4);

    const auto first = csv_fields(lines[1]);
    REQUIRE(first.size() == 10);
    CHECK(first[2] == "0");
    CHECK(first[8] == "from_moments");
    CHECK(first[9] == "eta_zero_boundary");
    CHECK(std::isfinite(std::stod(first[5])));  // values present, not dropped

    const auto second = csv_fields(lines[2]);
    CHECK(second[8] == "closed_form");
    CHECK(second[9] == "ok");
    const auto third = csv_fields(lines[3]);
    CHECK(third[2] == "1");
    CHECK(third[9] == "ok");
}

TEST_CASE("oracle-enabled sweep labels rows with the oracle source") {
    SweepSpec s;
    s.parameter = "epsilon";
    s.start = 0.0;
    s.stop = 0.05;
    s.count = 2;
    s.fixed = {1.0, 0.4, 0.5, 0.0};
    s.outputs = SweepOutputs::all;
    s.oracle_enabled = true;
    s.trunc.n_max = 8;
    const auto lines = csv_lines(run_sweep(s));
    REQUIRE(lines.size() == 3);
    for (int i = 1; i <= 2; ++i) {
        const auto f = csv_fields(lines[std::size_t(i)]);
        REQUIRE(f.size() == 14);
        CHECK(f[12] == "fock_oracle");
        CHECK(f[13] == "ok");
        CHECK(std::stod(f[11]) >= 0.0);  // mean photon number
    }
    // closed-form cross-check on the driven endpoint, at truncation accuracy
    const auto driven = csv_fields(lines[2]);
    const SystemParams p{1.0, 0.4, 0.5, 0.05};
    const ObservablesReport exact = observables_closed_form(p);
    CHECK(std::stod(driven[8]) == doctest::Approx(exact.duan.sum_uv).epsilon(1e-4));
}

TEST_CASE("oracle requests beyond the truncation budget fall back to the moment route") {
    const SystemParams p{1.0, 100.0, 0.1, 0.0};  // ~23 photons per mode, far beyond n_max/3
    SweepSpec s = point_spec(p, "eta", 0.1, SweepOutputs::duan);
    s.oracle_enabled = true;
    s.trunc.n_max = 6;
    const auto lines = csv_lines(run_sweep(s));
    REQUIRE(lines.size() == 2);
    const auto f = csv_fields(lines[1]);
    REQUIRE(f.size() == 9);
    CHECK(f[7] == "closed_form");
    CHECK(f[8] == "excitation_exceeds_truncation");
    const ObservablesReport exact = observables_closed_form(p);
    CHECK(std::stod(f[4]) == doctest::Approx(exact.duan.sum_uv).epsilon(1e-12));
}

TEST_CASE("duan output carries the witness verdict as a flag column") {
    const SystemParams strong{1.0, 100.0, 0.1, 0.0};
    const auto entangled = csv_fields(csv_lines(run_sweep(
        point_spec(strong, "epsilon", 0.0, SweepOutputs::duan)))[1]);
    REQUIRE(entangled.size() == 9);
    CHECK(std::stod(entangled[4]) < 2.0);
    CHECK(entangled[5] == "2");
    CHECK(entangled[6] == "1");

    const SystemParams separable{1.0, 0.0, 0.5, 0.0};
    const auto vacuum = csv_fields(csv_lines(run_sweep(
        point_spec(separable, "epsilon", 0.0, SweepOutputs::duan)))[1]);
    CHECK(vacuum[4] == "2");
    CHECK(vacuum[6] == "0");
}

TEST_CASE("figure job catalog") {
    CHECK_THROWS_AS(make_figure_job("fig1"), std::invalid_argument);
    CHECK_THROWS_AS(make_figure_job(""), std::invalid_argument);

    const FigureJob fig2 = make_figure_job("fig2");
    REQUIRE(fig2.sweeps.size() == 1);
    CHECK(fig2.sweeps[0].parameter == "kappa");
    CHECK(fig2.sweeps[0].count == 500);
    CHECK(fig2.sweeps[0].fixed.gain_A == 100.0);
    CHECK(fig2.sweeps[0].fixed.eta == 0.1);

    const FigureJob fig3 = make_figure_job("fig3");
    REQUIRE(fig3.sweeps.size() == 3);
    for (const SweepSpec& s : fig3.sweeps) {
        CHECK(s.parameter == "eta");
        CHECK(s.log_scale);
        CHECK(s.fixed.kappa == 0.15);
        CHECK(s.fixed.epsilon == 0.0);
    }
    CHECK(fig3.sweeps[0].fixed.gain_A == 25.0);
    CHECK(fig3.sweeps[2].fixed.gain_A == 100.0);

    const FigureJob fig5 = make_figure_job("fig5");
    REQUIRE(fig5.sweeps.size() == 101);
    CHECK(fig5.sweeps.front().parameter == "epsilon");
    CHECK(fig5.sweeps.front().fixed.eta == 1e-3);
    CHECK(fig5.sweeps.back().fixed.eta == 1.0);
    for (const SweepSpec& s : fig5.sweeps) CHECK(s.count == 51);

    const FigureJob fig6 = make_figure_job("fig6");
    REQUIRE(fig6.sweeps.size() == 2);
    CHECK(fig6.sweeps[0].fixed.epsilon == 0.0);
    CHECK(fig6.sweeps[1].fixed.epsilon == 50.0);
}

TEST_CASE("figure CSV concatenates sweeps under a single header") {
    const auto lines = csv_lines(run_figure_csv(make_figure_job("fig6")));
    REQUIRE(lines.size() == 1 + 2 * 500);
    CHECK(lines[0] == sweep_csv_header(SweepOutputs::all));
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(lines[i].find("kappa") == std::string::npos);
    // block boundary: drive column switches from 0 to 50
    CHECK(csv_fields(lines[500])[3] == "0");
    CHECK(csv_fields(lines[501])[3] == "50");
}

TEST_CASE("noise-reduction figure grows monotonically with cavity loss") {
    const auto lines = csv_lines(run_figure_csv(make_figure_job("fig2")));
    REQUIRE(lines.size() == 501);
    double prev = -1.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const double dc_minus = std::stod(csv_fields(lines[i])[5]);
        CHECK(dc_minus > prev);
        prev = dc_minus;
    }
}

TEST_CASE("figure runs are deterministic") {
    const std::string first = run_figure_csv(make_figure_job("fig4"));
    const std::string second = run_figure_csv(make_figure_job("fig4"));
    CHECK(first == second);
    CHECK(first.size() > 100000);  // 1500 fully populated rows
}
