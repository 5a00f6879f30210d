#include "cascade/sweep.hpp"

#include <stdexcept>

#include "cascade/csv.hpp"
#include "cascade/fock.hpp"
#include "cascade/moments.hpp"
#include "cascade/observables.hpp"

namespace cascade {

namespace {

SystemParams with_value(SystemParams p, const std::string& name, double value) {
    if (name == "kappa")
        p.kappa = value;
    else if (name == "gain_A")
        p.gain_A = value;
    else if (name == "eta")
        p.eta = value;
    else if (name == "epsilon")
        p.epsilon = value;
    else
        throw std::invalid_argument("unknown sweep parameter \"" + name + '"');
    return p;
}

struct PointRow {
    ObservablesReport report{};
    bool has_values = false;
    std::string status;
};

// never throws: every failure mode becomes a status token for the CSV row
PointRow evaluate_point(const SweepSpec& spec, const SystemParams& p) {
    PointRow row;
    try {
        check_params(p);
    } catch (const std::exception&) {
        row.status = "invalid_parameters";
        return row;
    }
    try {
        if (!check_stability(p).stable) {
            row.status = "unstable";
            return row;
        }
        if (spec.oracle_enabled) {
            try {
                const TruncatedDensityMatrix rho = oracle_steady_state(p, spec.trunc);
                row.report = observables_from_moments(extract_moments(rho), p,
                                                      ReportSource::fock_oracle);
                row.has_values = true;
                row.status = "ok";
                return row;
            } catch (const std::invalid_argument&) {
                // excitation gate: keep the point, fall back to the moment
                // route below and let the status say why the oracle is absent
                row.status = "excitation_exceeds_truncation";
            }
        }
        if (p.eta > 0.0) {
            row.report = observables_closed_form(p);
        } else {
            // the closed forms lose meaning without atomic coherence; the
            // direct moment solve still applies
            row.report = observables_from_moments(steady_state_linear_solve(p).state, p);
            if (row.status.empty()) row.status = "eta_zero_boundary";
        }
        row.has_values = true;
        if (row.status.empty()) row.status = "ok";
    } catch (const std::exception&) {
        row.has_values = false;
        if (row.status.empty()) row.status = "failed";
    }
    return row;
}

void append_value_columns(std::string& out, const SweepSpec& spec, const PointRow& row) {
    const auto val = [&](double x) { return row.has_values ? fmt_double(x) : std::string("nan"); };
    const auto flag = [&](bool b) {
        return row.has_values ? std::string(b ? "1" : "0") : std::string("nan");
    };
    const ObservablesReport& r = row.report;
    switch (spec.outputs) {
        case SweepOutputs::variances:
            for (double x : {r.variances.dc_plus, r.variances.dc_minus, r.variances.dd_plus,
                             r.variances.dd_minus}) {
                out += ',';
                out += val(x);
            }
            break;
        case SweepOutputs::duan:
            out += ',';
            out += val(r.duan.sum_uv);
            out += ',';
            out += val(r.duan.threshold);
            out += ',';
            out += flag(r.duan.entangled);
            break;
        case SweepOutputs::mean_photon:
            out += ',';
            out += val(r.mean_photon);
            break;
        case SweepOutputs::all:
            for (double x : {r.variances.dc_plus, r.variances.dc_minus, r.variances.dd_plus,
                             r.variances.dd_minus, r.duan.sum_uv, r.duan.threshold}) {
                out += ',';
                out += val(x);
            }
            out += ',';
            out += flag(r.duan.entangled);
            out += ',';
            out += val(r.mean_photon);
            break;
    }
    out += ',';
    out += row.has_values ? to_string(r.source) : "none";
    out += ',';
    out += row.status;
    out += '\n';
}

void append_row(std::string& out, const SweepSpec& spec, const SystemParams& p,
                const PointRow& row) {
    out += fmt_double(p.kappa);
    out += ',';
    out += fmt_double(p.gain_A);
    out += ',';
    out += fmt_double(p.eta);
    out += ',';
    out += fmt_double(p.epsilon);
    append_value_columns(out, spec, row);
}

}  // namespace

std::string sweep_csv_header(SweepOutputs outputs) {
    switch (outputs) {
        case SweepOutputs::variances:
            return "kappa,gain_A,eta,epsilon,dc_plus,dc_minus,dd_plus,dd_minus,source,status";
        case SweepOutputs::duan:
            return "kappa,gain_A,eta,epsilon,duan_sum,duan_bound,entangled,source,status";
        case SweepOutputs::mean_photon:
            return "kappa,gain_A,eta,epsilon,mean_photon,source,status";
        case SweepOutputs::all:
            break;
    }
    return report_csv_header() + ",status";
}

std::string run_sweep(const SweepSpec& spec) {
    check_sweep(spec);
    const std::vector<double> grid = sweep_grid(spec);
    const int n = int(grid.size());
    std::vector<SystemParams> points(grid.size());
    for (int i = 0; i < n; ++i)
        points[std::size_t(i)] = with_value(spec.fixed, spec.parameter, grid[std::size_t(i)]);

    std::vector<PointRow> rows(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        rows[std::size_t(i)] = evaluate_point(spec, points[std::size_t(i)]);

    int usable = 0;
    for (const PointRow& r : rows) usable += r.has_values ? 1 : 0;
    if (usable == 0)
        throw std::runtime_error("sweep produced no usable points (all " + std::to_string(n) +
                                 " failed validation or solving)");

    std::string out = sweep_csv_header(spec.outputs);
    out += '\n';
    for (int i = 0; i < n; ++i)
        append_row(out, spec, points[std::size_t(i)], rows[std::size_t(i)]);
    return out;
}

std::string run_figure_csv(const FigureJob& job) {
    if (job.sweeps.empty()) throw std::invalid_argument("figure job has no sweeps");
    std::string out = sweep_csv_header(job.sweeps.front().outputs);
    out += '\n';
    for (const SweepSpec& spec : job.sweeps) {
        if (spec.outputs != job.sweeps.front().outputs)
            throw std::invalid_argument("figure sweeps disagree on the output schema");
        const std::string csv = run_sweep(spec);
        out.append(csv, csv.find('\n') + 1, std::string::npos);
    }
    return out;
}

FigureJob make_figure_job(const std::string& id) {
    const auto eta_sweep = [](double kappa, double gain, double eps, int count) {
        SweepSpec s;
        s.parameter = "eta";
        s.start = 1e-3;
        s.stop = 1.0;
        s.count = count;
        s.log_scale = true;
        s.fixed = {kappa, gain, 0.5, eps};
        return s;
    };

    FigureJob job;
    job.id = id;
    if (id == "fig2") {
        SweepSpec s;
        s.parameter = "kappa";
        s.start = 0.01;
        s.stop = 1.0;
        s.count = 500;
        s.fixed = {1.0, 100.0, 0.1, 0.0};
        job.sweeps.push_back(s);
    } else if (id == "fig3" || id == "fig4") {
        for (double gain : {25.0, 50.0, 100.0}) job.sweeps.push_back(eta_sweep(0.15, gain, 0.0, 500));
    } else if (id == "fig5") {
        // brightness surface: asymmetry outer (log), drive inner (linear), so
        // each CSV block is one eta slice swept in epsilon
        SweepSpec eta_axis = eta_sweep(1.0, 100.0, 0.0, 101);
        for (double eta : sweep_grid(eta_axis)) {
            SweepSpec s;
            s.parameter = "epsilon";
            s.start = 0.0;
            s.stop = 50.0;
            s.count = 51;
            s.fixed = {1.0, 100.0, eta, 0.0};
            job.sweeps.push_back(s);
        }
    } else if (id == "fig6") {
        for (double eps : {0.0, 50.0}) job.sweeps.push_back(eta_sweep(1.0, 100.0, eps, 500));
    } else {
        throw std::invalid_argument("unknown figure id \"" + id +
                                    "\" (expected fig2, fig3, fig4, fig5 or fig6)");
    }
    return job;
}

}  // namespace cascade
