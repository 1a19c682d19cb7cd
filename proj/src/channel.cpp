#include "cast/channel.hpp"

#include <cmath>

namespace cast {

Rng make_stream(std::uint64_t seed, std::uint64_t cell, std::uint64_t trial) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32),
        static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return Rng(seq);
}

cd complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> g(0.0, 1.0);
    const double s = std::sqrt(variance / 2.0);
    const double re = g(rng);
    const double im = g(rng);
    return {s * re, s * im};
}

ChannelRealization sample_channel(int n, Rng& rng) {
    if (n < 1) throw DomainError("channel length must be >= 1");
    ChannelRealization ch;
    ch.n = n;
    ch.h.resize(static_cast<std::size_t>(n));
    for (auto& x : ch.h) x = complex_gaussian(rng, 1.0);
    return ch;
}

MeasurementVector transmit(const SparseFreqVector& grant, const ChannelRealization& ch,
                           const NoiseSpec& noise, const SensingDims& dims, Rng& rng) {
    if (grant.n != dims.n || ch.n != dims.n ||
        ch.h.size() != static_cast<std::size_t>(dims.n))
        throw DomainError("transmit: dimension mismatch between grant, channel and sensing dims");
    if (grant.support.size() != grant.values.size())
        throw DomainError("transmit: support and value lengths differ");
    if (noise.variance < 0) throw DomainError("noise variance must be >= 0");

    MeasurementVector y(static_cast<std::size_t>(dims.m), cd{0.0, 0.0});
    for (std::size_t i = 0; i < grant.support.size(); ++i) {
        const int w = grant.support[i];
        const cd x = ch.h[static_cast<std::size_t>(w - 1)] * grant.values[i];
        if (x == cd{0.0, 0.0}) continue;
        const CVec a = idft_column(dims, w);
        for (int l = 0; l < dims.m; ++l)
            y[static_cast<std::size_t>(l)] += a[static_cast<std::size_t>(l)] * x;
    }
    if (noise.variance > 0)
        for (auto& v : y) v += complex_gaussian(rng, noise.variance);
    return y;
}

namespace {

CVec perturbed(const CVec& h, double variance, Rng& rng) {
    if (variance < 0) throw DomainError("perturbation variance must be >= 0");
    CVec out = h;
    if (variance > 0)
        for (auto& x : out) x += complex_gaussian(rng, variance);
    return out;
}

}  // namespace

ChannelRealization degrade_estimate(const ChannelRealization& ch, double error_variance,
                                    Rng& rng) {
    ChannelRealization out = ch;
    out.estimate = perturbed(ch.h, error_variance, rng);
    return out;
}

ChannelRealization reciprocity_perturb(const ChannelRealization& ch,
                                       double mismatch_variance, Rng& rng) {
    ChannelRealization out;
    out.n = ch.n;
    out.h = perturbed(ch.h, mismatch_variance, rng);
    return out;
}

}  // namespace cast
