#include "cast/config.hpp"

#include <fstream>
#include <sstream>

namespace cast {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& field, const std::string& what) {
    throw ConfigError(source + ": field '" + field + "': " + what);
}

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class Reader {
public:
    Reader(const json& j, std::string source, std::string prefix = "")
        : j_(j), source_(std::move(source)), prefix_(std::move(prefix)) {}

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    std::string path(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    long long integer(const char* key, long long fallback) const {
        if (!has(key)) return fallback;
        return as_integer(j_.at(key), path(key));
    }

    double number(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) fail(source_, path(key), "expected a number");
        return v.get<double>();
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) fail(source_, path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) fail(source_, path(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<int> int_list(const char* key, const std::vector<int>& fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        std::vector<int> out;
        if (v.is_number()) {
            out.push_back(static_cast<int>(as_integer(v, path(key))));
        } else if (v.is_array()) {
            for (const auto& e : v) out.push_back(static_cast<int>(as_integer(e, path(key))));
        } else if (v.is_object()) {
            Reader r(v, source_, path(key));
            const long long start = r.integer("start", 0), stop = r.integer("stop", 0),
                            step = r.integer("step", 1);
            if (step <= 0) fail(source_, path(key), "range step must be positive");
            for (long long x = start; x <= stop; x += step) out.push_back(static_cast<int>(x));
        } else {
            fail(source_, path(key), "expected an integer, a list or a {start, stop, step} range");
        }
        if (out.empty()) fail(source_, path(key), "sweep list is empty");
        return out;
    }

    std::vector<double> number_list(const char* key, const std::vector<double>& fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        std::vector<double> out;
        if (v.is_number()) {
            out.push_back(v.get<double>());
        } else if (v.is_array()) {
            for (const auto& e : v) {
                if (!e.is_number()) fail(source_, path(key), "list entries must be numbers");
                out.push_back(e.get<double>());
            }
        } else if (v.is_object()) {
            Reader r(v, source_, path(key));
            const double start = r.number("start", 0), stop = r.number("stop", 0),
                         step = r.number("step", 1);
            if (!(step > 0)) fail(source_, path(key), "range step must be positive");
            for (int i = 0; start + i * step <= stop + 1e-9; ++i) out.push_back(start + i * step);
        } else {
            fail(source_, path(key), "expected a number, a list or a {start, stop, step} range");
        }
        if (out.empty()) fail(source_, path(key), "sweep list is empty");
        return out;
    }

    std::vector<std::string> string_list(const char* key,
                                         const std::vector<std::string>& fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        std::vector<std::string> out;
        if (v.is_string()) {
            out.push_back(v.get<std::string>());
        } else if (v.is_array()) {
            for (const auto& e : v) {
                if (!e.is_string()) fail(source_, path(key), "list entries must be strings");
                out.push_back(e.get<std::string>());
            }
        } else {
            fail(source_, path(key), "expected a string or a list of strings");
        }
        if (out.empty()) fail(source_, path(key), "list is empty");
        return out;
    }

    const json& child(const char* key) const {
        static const json empty = json::object();
        if (!has(key)) return empty;
        if (!j_.at(key).is_object()) fail(source_, path(key), "expected an object");
        return j_.at(key);
    }

    const std::string& source() const { return source_; }

private:
    long long as_integer(const json& v, const std::string& where) const {
        if (v.is_number_integer()) return v.get<long long>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
        }
        fail(source_, where, "expected an integer");
    }

    const json& j_;
    std::string source_;
    std::string prefix_;
};

template <class F>
auto convert(const std::string& source, const std::string& field, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        fail(source, field, e.what());
    }
}

LatencyCalibration read_calibration(const Reader& r, const LatencyCalibration& base) {
    LatencyCalibration c = base;
    c.t_prop_ms = r.number("t_prop_us", base.t_prop_ms * 1e3) / 1e3;
    c.arrival_period_sf = static_cast<int>(r.integer("arrival_period_subframes", base.arrival_period_sf));
    c.arrival_phase_sf = static_cast<int>(r.integer("arrival_phase_subframes", base.arrival_phase_sf));
    c.lte_grant_offset_ms = r.number("lte_grant_offset_us", base.lte_grant_offset_ms * 1e3) / 1e3;
    c.lte_t_dec_ms = r.number("lte_t_dec_us", base.lte_t_dec_ms * 1e3) / 1e3;
    c.minislot_symbols = static_cast<int>(r.integer("minislot_symbols", base.minislot_symbols));
    c.minislot_t_dec_ms = r.number("minislot_t_dec_us", base.minislot_t_dec_ms * 1e3) / 1e3;
    c.cast_t_dec_fixed_ms = r.number("cast_t_dec_fixed_us", base.cast_t_dec_fixed_ms * 1e3) / 1e3;
    c.cast_t_dec_per_sample_ms =
        r.number("cast_t_dec_per_sample_ns", base.cast_t_dec_per_sample_ms * 1e6) / 1e6;
    c.table_m = static_cast<int>(r.integer("table_m", base.table_m));
    if (c.t_prop_ms < 0 || c.lte_grant_offset_ms < 0 || c.lte_t_dec_ms < 0 ||
        c.minislot_t_dec_ms < 0 || c.cast_t_dec_fixed_ms < 0 || c.cast_t_dec_per_sample_ms < 0)
        fail(r.source(), "latency", "durations must be non-negative");
    if (c.arrival_period_sf < 1) fail(r.source(), "latency.arrival_period_subframes", "must be >= 1");
    if (c.arrival_phase_sf < 0 || c.arrival_phase_sf >= c.arrival_period_sf)
        fail(r.source(), "latency.arrival_phase_subframes", "must lie in [0, period)");
    if (c.minislot_symbols != 2 && c.minislot_symbols != 4 && c.minislot_symbols != 7)
        fail(r.source(), "latency.minislot_symbols", "must be 2, 4 or 7");
    return c;
}

}  // namespace

LatencyCalibration parse_latency_calibration(const json& j, const LatencyCalibration& base) {
    return read_calibration(Reader(j, "latency", "latency"), base);
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": parse error at " + line_col(text, e.byte) + ": " + e.what());
    }
    if (root.is_object() && root.contains("config") && root.contains("tool")) root = root.at("config");
    if (!root.is_object()) throw ConfigError(source + ": top level must be an object");

    RunConfig rc;
    rc.snapshot = root;
    const Reader r(root, source);
    ExperimentConfig& e = rc.experiment;

    e.experiment_id = r.string("experiment_id", e.experiment_id);
    if (e.experiment_id.empty() ||
        e.experiment_id.find_first_of(",/\\ \t\n") != std::string::npos)
        fail(source, "experiment_id", "must be non-empty and free of separators");
    e.n = static_cast<int>(r.integer("n", e.n));
    e.k = r.int_list("k", e.k);
    e.m = r.int_list("m", e.m);
    e.snr_db = r.number_list("snr_db", e.snr_db);
    e.tau = static_cast<int>(r.integer("tau", e.tau));
    e.trials = static_cast<int>(r.integer("trials", e.trials));
    const long long seed = r.integer("seed", static_cast<long long>(e.seed));
    if (seed < 0) fail(source, "seed", "must be non-negative");
    e.seed = static_cast<std::uint64_t>(seed);

    const auto rules = r.string_list("selection_rule", {"channel_aware"});
    e.rules.clear();
    for (const auto& s : rules)
        e.rules.push_back(convert(source, "selection_rule", [&] { return selection_rule_from_string(s); }));

    const std::string ortho = r.string("orthogonality", "auto");
    if (ortho == "auto") {
        e.orthogonality = OrthoChoice{true, OrthoMode::strict};
    } else {
        e.orthogonality = OrthoChoice{false, convert(source, "orthogonality", [&] { return ortho_mode_from_string(ortho); })};
    }
    e.channel_error_variance = r.number("channel_error_variance", e.channel_error_variance);
    e.reciprocity_mismatch_variance =
        r.number("reciprocity_mismatch_variance", e.reciprocity_mismatch_variance);
    const std::string mod = r.string("modulation", "qpsk");
    e.modulation = convert(source, "modulation", [&] { return modulation_from_string(mod); });
    const std::string est = r.string("estimator", "ls");
    e.estimator = convert(source, "estimator", [&] { return estimator_from_string(est); });
    e.noiseless = r.boolean("noiseless", e.noiseless);

    const Reader b(r.child("bound"), source, "bound");
    e.bound.enabled = b.boolean("enabled", e.bound.enabled);
    e.bound.trials = static_cast<int>(b.integer("trials", e.bound.trials));
    const std::string rv = b.string("rho_variant", to_string(e.bound.rho_variant));
    e.bound.rho_variant = convert(source, "bound.rho_variant", [&] { return rho_variant_from_string(rv); });
    const std::string zc = b.string("zeta_convention", to_string(e.bound.zeta_convention));
    e.bound.zeta_convention = convert(source, "bound.zeta_convention", [&] { return zeta_convention_from_string(zc); });
    const std::string pc = b.string("pdf_convention", to_string(e.bound.pdf));
    e.bound.pdf = convert(source, "bound.pdf_convention", [&] { return pdf_convention_from_string(pc); });

    const Reader l(r.child("latency"), source, "latency");
    e.latency = read_calibration(l, e.latency);
    e.tdd_pattern = l.string("tdd_pattern", e.tdd_pattern);
    const double retry_us = l.number("retry_period_us", -1.0);
    e.retry_period_ms = retry_us < 0 ? -1.0 : retry_us / 1e3;

    rc.latency.patterns = l.string_list("tdd_patterns", rc.latency.patterns);
    rc.latency.m = l.int_list("m", {e.latency.table_m});
    rc.latency.calibrate = l.boolean("calibrate", false);
    const Reader t(l.child("targets"), source, "latency.targets");
    rc.latency.targets.patterns = rc.latency.patterns;
    rc.latency.targets.lte_ms = t.number_list("lte_ms", rc.latency.targets.lte_ms);
    rc.latency.targets.minislot_ms = t.number_list("minislot_ms", rc.latency.targets.minislot_ms);
    rc.latency.targets.cast_ms = t.number_list("cast_ms", rc.latency.targets.cast_ms);
    rc.latency.targets.ratio_m_lo = static_cast<int>(t.integer("ratio_m_lo", rc.latency.targets.ratio_m_lo));
    rc.latency.targets.ratio_m_hi = static_cast<int>(t.integer("ratio_m_hi", rc.latency.targets.ratio_m_hi));
    rc.latency.targets.ratio = t.number("ratio", rc.latency.targets.ratio);

    for (const auto& p : rc.latency.patterns)
        convert(source, "latency.tdd_patterns", [&] { return make_frame(p, e.n); });
    convert(source, "latency.tdd_pattern", [&] { return make_frame(e.tdd_pattern, e.n); });
    convert(source, "(experiment)", [&] {
        validate(e);
        return 0;
    });
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace cast
