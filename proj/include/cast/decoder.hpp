#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cast/channel.hpp"
#include "cast/encoder.hpp"
#include "cast/spectrum.hpp"

namespace cast {

enum class FilterPath { direct, transform };

enum class Estimator { ls, lmmse };

Estimator estimator_from_string(const std::string& s);
std::string to_string(Estimator e);

class RankDeficient : public Error {
public:
    using Error::Error;
};

// |<a_w, y>| for each candidate w.
std::vector<double> matched_filter(const MeasurementVector& y, const SensingDims& dims,
                                   const std::vector<int>& candidates,
                                   FilterPath path = FilterPath::direct);

// Full sweep over all n columns through one length-n transform.
std::vector<double> matched_filter_all(const MeasurementVector& y, const SensingDims& dims);

struct IdentifyTrace {
    int sweeps = 0;
    int first_pick = 0;
};

SupportSet identify_support(const MeasurementVector& y, int k, const SensingDims& dims,
                            IdentifyTrace* trace = nullptr);

// Ascending pairing, each pair within tau - 1 (circular distance). A cyclic
// re-pairing is tried so that supports straddling index n/1 still pair up.
bool tau_close_match(const SupportSet& decoded, const SupportSet& own, int tau, int n);

SupportSet snap_support(const SupportSet& decoded, const SupportSet& own, int tau, int n);

struct EstimateOptions {
    Estimator estimator = Estimator::ls;
    double symbol_power = 1.0;  // prior E|s|^2, LMMSE only
};

CVec estimate_symbols(const MeasurementVector& y, const SupportSet& support,
                      const CVec& gains, const SensingDims& dims, const NoiseSpec& noise,
                      const EstimateOptions& opts = {});

Bits slice_symbols(const CVec& symbols, Modulation mod);

enum class DecodeStatus { granted, not_granted, identification_failed, symbol_error };

std::string to_string(DecodeStatus s);

struct DecodeOutcome {
    DecodeStatus status = DecodeStatus::not_granted;
    SupportSet decoded_support;
    std::optional<Bits> decoded_bits;
};

struct DecodeOptions {
    int tau = 2;
    Modulation modulation = Modulation::qpsk;
    EstimateOptions estimate;
};

DecodeOutcome decode(const MeasurementVector& y, const SupportSet& own_support,
                     const ChannelRealization& ch_view, const SensingDims& dims, int k,
                     const NoiseSpec& noise, const DecodeOptions& opts = {});

}  // namespace cast
