#include "cascade/config.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cascade {

namespace {

using nlohmann::json;

json parse_object(const std::string& text, const char* what) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string(what) + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
    return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    for (const auto& item : j.items())
        if (allowed.find(item.key()) == allowed.end()) {
            std::ostringstream msg;
            msg << where << ": unknown key \"" << item.key() << '"';
            throw std::invalid_argument(msg.str());
        }
}

double require_number(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        std::ostringstream msg;
        msg << where << ": missing required key \"" << key << '"';
        throw std::invalid_argument(msg.str());
    }
    if (!j.at(key).is_number()) {
        std::ostringstream msg;
        msg << where << ": \"" << key << "\" must be a number";
        throw std::invalid_argument(msg.str());
    }
    return j.at(key).get<double>();
}

double optional_number(const json& j, const char* key, double fallback, const char* where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
        std::ostringstream msg;
        msg << where << ": \"" << key << "\" must be a number";
        throw std::invalid_argument(msg.str());
    }
    return j.at(key).get<double>();
}

// shared by params_from_json and the sweep "fixed" block; when `swept` names a
// parameter, that key may be absent (the sweep fills it in per point)
SystemParams params_from_object(const json& j, const char* where, const std::string& swept = "") {
    reject_unknown_keys(j, {"kappa", "gain_A", "eta", "epsilon", "g", "r_a", "gamma"}, where);

    const bool has_direct = j.contains("gain_A");
    const bool has_micro = j.contains("g") || j.contains("r_a") || j.contains("gamma");
    if (has_direct && has_micro)
        throw std::invalid_argument(std::string(where) +
                                    ": give either \"gain_A\" or the g/r_a/gamma trio, not both");

    SystemParams p;
    p.kappa = swept == "kappa" && !j.contains("kappa") ? 1.0 : require_number(j, "kappa", where);
    p.eta = swept == "eta" && !j.contains("eta") ? 0.5 : require_number(j, "eta", where);
    p.epsilon = optional_number(j, "epsilon", 0.0, where);

    if (has_micro) {
        MicroscopicParams m;
        m.g = require_number(j, "g", where);
        m.r_a = require_number(j, "r_a", where);
        m.gamma = require_number(j, "gamma", where);
        p.gain_A = linear_gain(m);
    } else if (has_direct) {
        p.gain_A = require_number(j, "gain_A", where);
    } else if (swept == "gain_A") {
        p.gain_A = 0.0;
    } else {
        throw std::invalid_argument(std::string(where) +
                                    ": missing gain (\"gain_A\" or g/r_a/gamma)");
    }
    return p;
}

void check_swept_value(const std::string& name, double value, const char* where) {
    const bool ok = name == "kappa"    ? value > 0.0
                    : name == "gain_A" ? value >= 0.0
                    : name == "eta"    ? value >= 0.0 && value <= 1.0
                                       : /* epsilon */ value >= 0.0;
    if (!ok || std::isnan(value)) {
        std::ostringstream msg;
        msg << where << ": " << name << " = " << value << " is outside its domain";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

static SweepSpec sweep_from_json_checked(const std::string& text);

SystemParams params_from_json(const std::string& text) {
    try {
        const json j = parse_object(text, "config");
        SystemParams p = params_from_object(j, "config");
        check_params(p);
        return p;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

SweepSpec sweep_from_json(const std::string& text) {
    try {
        return sweep_from_json_checked(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sweep spec: ") + e.what());
    }
}

static SweepSpec sweep_from_json_checked(const std::string& text) {
    const json j = parse_object(text, "sweep spec");
    reject_unknown_keys(j, {"sweep", "fixed", "outputs", "oracle"}, "sweep spec");
    if (!j.contains("sweep") || !j.at("sweep").is_object())
        throw std::invalid_argument("sweep spec: missing \"sweep\" object");
    if (!j.contains("fixed") || !j.at("fixed").is_object())
        throw std::invalid_argument("sweep spec: missing \"fixed\" object");

    const json& sw = j.at("sweep");
    reject_unknown_keys(sw, {"parameter", "start", "stop", "count", "scale"}, "sweep");

    SweepSpec spec;
    if (!sw.contains("parameter") || !sw.at("parameter").is_string())
        throw std::invalid_argument("sweep: missing \"parameter\" string");
    spec.parameter = sw.at("parameter").get<std::string>();
    spec.start = require_number(sw, "start", "sweep");
    spec.stop = require_number(sw, "stop", "sweep");
    if (!sw.contains("count") || !sw.at("count").is_number_integer())
        throw std::invalid_argument("sweep: \"count\" must be an integer");
    spec.count = sw.at("count").get<int>();
    if (sw.contains("scale")) {
        const std::string scale = sw.at("scale").get<std::string>();
        if (scale == "log")
            spec.log_scale = true;
        else if (scale != "linear")
            throw std::invalid_argument("sweep: \"scale\" must be \"linear\" or \"log\"");
    }

    spec.fixed = params_from_object(j.at("fixed"), "fixed", spec.parameter);

    if (j.contains("outputs")) {
        const std::string o = j.at("outputs").get<std::string>();
        if (o == "variances")
            spec.outputs = SweepOutputs::variances;
        else if (o == "duan")
            spec.outputs = SweepOutputs::duan;
        else if (o == "mean_photon")
            spec.outputs = SweepOutputs::mean_photon;
        else if (o == "all")
            spec.outputs = SweepOutputs::all;
        else
            throw std::invalid_argument("sweep spec: unknown outputs \"" + o + '"');
    }

    if (j.contains("oracle")) {
        const json& orc = j.at("oracle");
        if (!orc.is_object()) throw std::invalid_argument("sweep spec: \"oracle\" must be an object");
        reject_unknown_keys(orc, {"enabled", "n_max", "max_hilbert_dim"}, "oracle");
        if (orc.contains("enabled")) {
            if (!orc.at("enabled").is_boolean())
                throw std::invalid_argument("oracle: \"enabled\" must be a boolean");
            spec.oracle_enabled = orc.at("enabled").get<bool>();
        }
        if (orc.contains("n_max")) spec.trunc.n_max = orc.at("n_max").get<int>();
        if (orc.contains("max_hilbert_dim"))
            spec.trunc.max_hilbert_dim = orc.at("max_hilbert_dim").get<int>();
    }

    check_sweep(spec);
    return spec;
}

void check_sweep(const SweepSpec& spec) {
    static const std::set<std::string> names = {"kappa", "gain_A", "eta", "epsilon"};
    if (names.find(spec.parameter) == names.end())
        throw std::invalid_argument("sweep: unknown parameter \"" + spec.parameter + '"');
    if (spec.count < 1) throw std::invalid_argument("sweep: count must be >= 1");
    if (!std::isfinite(spec.start) || !std::isfinite(spec.stop))
        throw std::invalid_argument("sweep: range must be finite");
    check_swept_value(spec.parameter, spec.start, "sweep");
    check_swept_value(spec.parameter, spec.stop, "sweep");
    if (spec.log_scale && !(spec.start > 0.0 && spec.stop > 0.0))
        throw std::invalid_argument("sweep: log scale needs a strictly positive range");
    if (spec.oracle_enabled) check_truncation(spec.trunc);
    SystemParams at_start = spec.fixed;  // the non-swept components must be valid on their own
    if (spec.parameter == "kappa") at_start.kappa = spec.start;
    else if (spec.parameter == "gain_A") at_start.gain_A = spec.start;
    else if (spec.parameter == "eta") at_start.eta = spec.start;
    else at_start.epsilon = spec.start;
    check_params(at_start);
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    check_sweep(spec);
    std::vector<double> grid(std::size_t(spec.count));
    if (spec.count == 1) {
        grid[0] = spec.start;
        return grid;
    }
    const double n1 = spec.count - 1.0;
    for (int i = 0; i < spec.count; ++i)
        grid[std::size_t(i)] = spec.log_scale
                                   ? spec.start * std::pow(spec.stop / spec.start, i / n1)
                                   : spec.start + (spec.stop - spec.start) * (i / n1);
    grid.front() = spec.start;  // pin the endpoints bit-exactly
    grid.back() = spec.stop;
    return grid;
}

}  // namespace cascade
