#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "cast/spectrum.hpp"

namespace cast {

using Rng = std::mt19937_64;

// Independent stream for one (seed, cell, trial) triple.
Rng make_stream(std::uint64_t seed, std::uint64_t cell, std::uint64_t trial);

struct ChannelRealization {
    int n = 0;
    CVec h;
    std::optional<CVec> estimate;

    // What a receiver actually works with: the estimate when present.
    const CVec& view() const { return estimate ? *estimate : h; }
};

struct NoiseSpec {
    double variance = 1.0;
};

using MeasurementVector = CVec;

// Draws one CN(0, variance) sample.
cd complex_gaussian(Rng& rng, double variance);

ChannelRealization sample_channel(int n, Rng& rng);

MeasurementVector transmit(const SparseFreqVector& grant, const ChannelRealization& ch,
                           const NoiseSpec& noise, const SensingDims& dims, Rng& rng);

ChannelRealization degrade_estimate(const ChannelRealization& ch, double error_variance,
                                    Rng& rng);

// Base-station view of the downlink channel under imperfect reciprocity.
ChannelRealization reciprocity_perturb(const ChannelRealization& ch,
                                       double mismatch_variance, Rng& rng);

}  // namespace cast
