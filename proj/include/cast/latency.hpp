#pragma once

#include <string>
#include <vector>

namespace cast {

struct TddFrameConfig {
    std::string pattern = "DSUDDDDDDD";
    double subframe_ms = 1.0;
    int symbols_per_subframe = 14;
    int n = 1024;

    double sample_rate_hz() const { return n * 15000.0; }
    double symbol_ms() const { return 1.0 / 15.0; }  // 66.7 us
};

// Checks length 10, alphabet {D,S,U}, at least one U.
TddFrameConfig make_frame(const std::string& pattern, int n = 1024);

struct LatencyBreakdown {
    double t_prop = 0.0;
    double t_buff = 0.0;
    double t_dec = 0.0;
    double t_wait = 0.0;
    double t_up = 0.0;
};

LatencyBreakdown assemble(double t_prop, double t_buff, double t_dec, double t_wait);

// Time from t_ms to the start of the next U subframe; 0 inside a U subframe.
double wait_to_uplink(const TddFrameConfig& cfg, double t_ms);

LatencyBreakdown cast_access_latency(int m, const TddFrameConfig& cfg, double t_dec_ms,
                                     double t_prop_ms);

LatencyBreakdown minislot_access_latency(const TddFrameConfig& cfg, double t_dec_ms,
                                         double t_prop_ms, int minislot_symbols = 2);

struct LatencyCalibration {
    double t_prop_ms = 0.0033;  // ~1 km

    int arrival_period_sf = 2;
    int arrival_phase_sf = 0;
    double lte_grant_offset_ms = 0.41;
    double lte_t_dec_ms = 0.30;

    int minislot_symbols = 2;
    double minislot_t_dec_ms = 1.0383666666666664;

    double cast_t_dec_fixed_ms = 0.6231788732394367;
    double cast_t_dec_per_sample_ms = 4.7021713615023474e-4;
    int table_m = 128;
};

// Conventional LTE-TDD access for one packet arriving at arrival_ms: grant
// sent grant_offset later, uplink starts at the first U subframe boundary
// after the device finishes decoding. t_up is measured from the grant.
LatencyBreakdown conventional_access_latency(const TddFrameConfig& cfg, double arrival_ms,
                                             const LatencyCalibration& cal);

// Averaged over one frame of periodic arrivals.
double mean_conventional_latency(const TddFrameConfig& cfg, const LatencyCalibration& cal);

double cast_decode_time(int m, const LatencyCalibration& cal);

LatencyBreakdown cast_latency(int m, const TddFrameConfig& cfg, const LatencyCalibration& cal);

// Infinity when p_success == 0.
double expected_latency_with_retry(double p_success, const LatencyBreakdown& single_attempt,
                                   double retry_period_ms);

struct Table1Row {
    std::string pattern;
    std::string ratio;
    double lte_ms = 0.0;
    double minislot_ms = 0.0;
    double cast_ms = 0.0;
};

std::vector<Table1Row> latency_table(const std::vector<std::string>& patterns,
                                     const LatencyCalibration& cal, int m, int n = 1024);

struct CalibrationTargets {
    std::vector<std::string> patterns{"DSUDDDDDDD", "DSUUDDDDDD"};
    std::vector<double> lte_ms{5.56, 3.82};
    std::vector<double> minislot_ms{1.19, 1.16};
    std::vector<double> cast_ms{0.71, 0.68};
    // CAST t_up(m_lo) / t_up(m_hi) at certain decoding.
    int ratio_m_lo = 256;
    int ratio_m_hi = 1024;
    double ratio = 0.65;
};

struct CalibrationReport {
    LatencyCalibration cal;
    double max_abs_error_ms = 0.0;
};

// Fits offsets and decoding times; t_prop, arrival period, mini-slot length
// and table_m are taken from `base`.
CalibrationReport calibrate_table1(const CalibrationTargets& targets,
                                   const LatencyCalibration& base = {});

std::string dl_ul_ratio(const std::string& pattern);

}  // namespace cast
