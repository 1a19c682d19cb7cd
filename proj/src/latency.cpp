#include "cast/latency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cast/spectrum.hpp"

namespace cast {

TddFrameConfig make_frame(const std::string& pattern, int n) {
    if (pattern.size() != 10)
        throw DomainError("TDD pattern '" + pattern + "' must have 10 subframes");
    for (char c : pattern)
        if (c != 'D' && c != 'S' && c != 'U')
            throw DomainError("TDD pattern '" + pattern + "' has a symbol outside {D,S,U}");
    if (pattern.find('U') == std::string::npos)
        throw DomainError("TDD pattern '" + pattern + "' has no uplink subframe");
    if (n < 1) throw DomainError("subcarrier count must be >= 1");
    TddFrameConfig cfg;
    cfg.pattern = pattern;
    cfg.n = n;
    return cfg;
}

LatencyBreakdown assemble(double t_prop, double t_buff, double t_dec, double t_wait) {
    if (t_prop < 0 || t_buff < 0 || t_dec < 0 || t_wait < 0)
        throw DomainError("latency components must be non-negative");
    return {t_prop, t_buff, t_dec, t_wait, t_prop + (t_buff + t_dec) + t_wait};
}

double wait_to_uplink(const TddFrameConfig& cfg, double t_ms) {
    if (cfg.pattern.find('U') == std::string::npos)
        throw DomainError("TDD pattern '" + cfg.pattern + "' has no uplink subframe");
    if (t_ms < 0) throw DomainError("wait_to_uplink: time must be >= 0");
    const double sf = cfg.subframe_ms;
    const auto len = static_cast<long>(cfg.pattern.size());
    const double eps = 1e-9;
    const long idx = static_cast<long>(std::floor(t_ms / sf + eps));
    if (cfg.pattern[static_cast<std::size_t>(idx % len)] == 'U') return 0.0;
    for (long j = idx + 1; j <= idx + len; ++j)
        if (cfg.pattern[static_cast<std::size_t>(j % len)] == 'U')
            return std::max(0.0, j * sf - t_ms);
    return std::numeric_limits<double>::infinity();
}

LatencyBreakdown cast_access_latency(int m, const TddFrameConfig& cfg, double t_dec_ms,
                                     double t_prop_ms) {
    if (m < 1 || m > cfg.n) throw DomainError("cast_access_latency: need 1 <= m <= n");
    const double t_buff = 1e3 * m / cfg.sample_rate_hz();
    return assemble(t_prop_ms, t_buff, t_dec_ms, 0.0);
}

LatencyBreakdown minislot_access_latency(const TddFrameConfig& cfg, double t_dec_ms,
                                         double t_prop_ms, int minislot_symbols) {
    if (minislot_symbols != 2 && minislot_symbols != 4 && minislot_symbols != 7)
        throw DomainError("mini-slot length must be 2, 4 or 7 symbols");
    // The whole grant-bearing mini-slot is buffered before decoding.
    const double t_buff = minislot_symbols * cfg.symbol_ms();
    return assemble(t_prop_ms, t_buff, t_dec_ms, 0.0);
}

LatencyBreakdown conventional_access_latency(const TddFrameConfig& cfg, double arrival_ms,
                                             const LatencyCalibration& cal) {
    const double grant = arrival_ms + cal.lte_grant_offset_ms;
    const double t_buff = cfg.symbol_ms();
    const double ready = grant + cal.t_prop_ms + t_buff + cal.lte_t_dec_ms;
    const double sf = cfg.subframe_ms;
    const double boundary = std::ceil(ready / sf - 1e-9) * sf;
    const double start = boundary + wait_to_uplink(cfg, boundary);
    return assemble(cal.t_prop_ms, t_buff, cal.lte_t_dec_ms, start - ready);
}

double mean_conventional_latency(const TddFrameConfig& cfg, const LatencyCalibration& cal) {
    if (cal.arrival_period_sf < 1) throw DomainError("arrival period must be >= 1 subframe");
    const int len = static_cast<int>(cfg.pattern.size());
    double sum = 0.0;
    int count = 0;
    for (int s = cal.arrival_phase_sf; s < len; s += cal.arrival_period_sf) {
        sum += conventional_access_latency(cfg, s * cfg.subframe_ms, cal).t_up;
        ++count;
    }
    return sum / count;
}

double cast_decode_time(int m, const LatencyCalibration& cal) {
    return cal.cast_t_dec_fixed_ms + cal.cast_t_dec_per_sample_ms * m;
}

LatencyBreakdown cast_latency(int m, const TddFrameConfig& cfg, const LatencyCalibration& cal) {
    return cast_access_latency(m, cfg, cast_decode_time(m, cal), cal.t_prop_ms);
}

double expected_latency_with_retry(double p_success, const LatencyBreakdown& single_attempt,
                                   double retry_period_ms) {
    if (!(p_success >= 0.0 && p_success <= 1.0))
        throw DomainError("expected_latency_with_retry: p_success outside [0, 1]");
    if (retry_period_ms < 0) throw DomainError("retry period must be >= 0");
    if (p_success == 0.0) return std::numeric_limits<double>::infinity();
    return single_attempt.t_up + retry_period_ms * (1.0 / p_success - 1.0);
}

std::string dl_ul_ratio(const std::string& pattern) {
    const auto ul = std::count(pattern.begin(), pattern.end(), 'U');
    const auto dl = static_cast<long>(pattern.size()) - ul;
    return std::to_string(dl) + ":" + std::to_string(ul);
}

std::vector<Table1Row> latency_table(const std::vector<std::string>& patterns,
                                     const LatencyCalibration& cal, int m, int n) {
    std::vector<Table1Row> rows;
    for (const auto& p : patterns) {
        const TddFrameConfig cfg = make_frame(p, n);
        Table1Row r;
        r.pattern = p;
        r.ratio = dl_ul_ratio(p);
        r.lte_ms = mean_conventional_latency(cfg, cal);
        r.minislot_ms =
            minislot_access_latency(cfg, cal.minislot_t_dec_ms, cal.t_prop_ms, cal.minislot_symbols).t_up;
        r.cast_ms = cast_latency(m, cfg, cal).t_up;
        rows.push_back(r);
    }
    return rows;
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

CalibrationReport calibrate_table1(const CalibrationTargets& t, const LatencyCalibration& base) {
    const std::size_t nc = t.patterns.size();
    if (nc == 0 || t.lte_ms.size() != nc || t.minislot_ms.size() != nc || t.cast_ms.size() != nc)
        throw DomainError("calibrate_table1: target vectors must match the pattern list");
    std::vector<TddFrameConfig> frames;
    for (const auto& p : t.patterns) frames.push_back(make_frame(p));

    LatencyCalibration cal = base;

    // Conventional system: arrival phase and grant offset on a 10 us grid.
    double best_err = std::numeric_limits<double>::infinity();
    for (int phase = 0; phase < cal.arrival_period_sf; ++phase) {
        for (int step = 0; step < 100; ++step) {
            LatencyCalibration trial = cal;
            trial.arrival_phase_sf = phase;
            trial.lte_grant_offset_ms = step * 0.01;
            double err = 0.0;
            for (std::size_t i = 0; i < nc; ++i)
                err = std::max(err, std::abs(mean_conventional_latency(frames[i], trial) - t.lte_ms[i]));
            if (err < best_err - 1e-12) {
                best_err = err;
                cal.arrival_phase_sf = phase;
                cal.lte_grant_offset_ms = trial.lte_grant_offset_ms;
            }
        }
    }

    // Mini-slot: the decoding time absorbs the mean target.
    const double sym = frames.front().symbol_ms();
    cal.minislot_t_dec_ms = mean_of(t.minislot_ms) - cal.t_prop_ms - cal.minislot_symbols * sym;

    // CAST: t_dec(m) = d0 + d1 m from the mean target at table_m and the
    // buffering-ratio anchor.
    const double fs_ms = frames.front().sample_rate_hz() / 1e3;
    const double tp = cal.t_prop_ms;
    const double mt = cal.table_m, lo = t.ratio_m_lo, hi = t.ratio_m_hi, r = t.ratio;
    // d0 + mt d1 = c1
    const double c1 = mean_of(t.cast_ms) - tp - mt / fs_ms;
    // (1 - r) d0 + (lo - r hi) d1 = c2
    const double c2 = r * (tp + hi / fs_ms) - tp - lo / fs_ms;
    const double a21 = 1.0 - r, a22 = lo - r * hi;
    const double det = 1.0 * a22 - mt * a21;
    if (std::abs(det) < 1e-15) throw DomainError("calibrate_table1: singular CAST system");
    cal.cast_t_dec_fixed_ms = (c1 * a22 - mt * c2) / det;
    cal.cast_t_dec_per_sample_ms = (1.0 * c2 - a21 * c1) / det;
    if (cal.minislot_t_dec_ms < 0 || cal.cast_t_dec_fixed_ms < 0 || cal.cast_t_dec_per_sample_ms < 0)
        throw DomainError("calibrate_table1: targets imply a negative decoding time");

    CalibrationReport rep;
    rep.cal = cal;
    for (std::size_t i = 0; i < nc; ++i) {
        const auto row = latency_table({t.patterns[i]}, cal, cal.table_m).front();
        rep.max_abs_error_ms = std::max({rep.max_abs_error_ms, std::abs(row.lte_ms - t.lte_ms[i]),
                                         std::abs(row.minislot_ms - t.minislot_ms[i]),
                                         std::abs(row.cast_ms - t.cast_ms[i])});
    }
    return rep;
}

}  // namespace cast
