#include "cast/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cast {

Modulation modulation_from_string(const std::string& s) {
    if (s == "qpsk" || s == "QPSK") return Modulation::qpsk;
    throw DomainError("unsupported modulation '" + s + "'");
}

std::string to_string(Modulation) { return "qpsk"; }

int bits_per_symbol(Modulation) { return 2; }

SupportSet select_support(const CVec& gains, int k, const SensingDims& dims) {
    if (gains.size() != static_cast<std::size_t>(dims.n))
        throw DomainError("select_support: gain vector length != n");
    if (k < 1) throw DomainError("select_support: k must be >= 1");

    std::vector<double> mag(gains.size());
    for (std::size_t i = 0; i < gains.size(); ++i) mag[i] = std::abs(gains[i]);

    // Strict '>' keeps the lowest index on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < mag.size(); ++i)
        if (mag[i] > mag[best]) best = i;
    const int anchor = static_cast<int>(best) + 1;

    std::vector<int> gamma = orthogonal_index_set(dims, anchor);
    if (static_cast<std::size_t>(k) > gamma.size())
        throw DomainError("select_support: k = " + std::to_string(k) + " exceeds |Gamma| = " +
                          std::to_string(gamma.size()));

    std::partial_sort(gamma.begin(), gamma.begin() + k, gamma.end(), [&](int a, int b) {
        const double ma = mag[static_cast<std::size_t>(a - 1)];
        const double mb = mag[static_cast<std::size_t>(b - 1)];
        if (ma != mb) return ma > mb;
        return a < b;
    });
    SupportSet out(gamma.begin(), gamma.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

SupportSet select_support(const ChannelRealization& ch, int k, const SensingDims& dims) {
    return select_support(ch.view(), k, dims);
}

CVec map_bits_to_symbols(const Bits& bits, Modulation mod, double beta) {
    const auto bps = static_cast<std::size_t>(bits_per_symbol(mod));
    if (bits.size() % bps != 0)
        throw DomainError("bit length " + std::to_string(bits.size()) +
                          " not divisible by bits per symbol");
    const double a = beta / std::sqrt(2.0);
    CVec out;
    out.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) {
        const double re = bits[i] ? -a : a;
        const double im = bits[i + 1] ? -a : a;
        out.emplace_back(re, im);
    }
    return out;
}

SparseFreqVector build_grant_vector(const SupportSet& support, const CVec& symbols, int n) {
    if (support.size() != symbols.size())
        throw DomainError("build_grant_vector: |support| != number of symbols");
    SupportSet sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("build_grant_vector: duplicate support index");
    for (int w : sorted)
        if (w < 1 || w > n) throw DomainError("build_grant_vector: index out of range");
    return SparseFreqVector{n, sorted, symbols};
}

BigUInt binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigUInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

BigUInt support_rank(const SupportSet& support, int n, int k) {
    if (static_cast<int>(support.size()) != k) throw DomainError("support_rank: |support| != k");
    SupportSet s = support;
    std::sort(s.begin(), s.end());
    BigUInt r = 0;
    for (int i = 0; i < k; ++i) {
        if (s[static_cast<std::size_t>(i)] < 1 || s[static_cast<std::size_t>(i)] > n)
            throw DomainError("support_rank: index out of range");
        r += binomial(s[static_cast<std::size_t>(i)] - 1, i + 1);
    }
    return r;
}

SupportSet support_unrank(const BigUInt& rank, int n, int k) {
    if (rank >= binomial(n, k)) throw DomainError("support_unrank: rank out of range");
    SupportSet out(static_cast<std::size_t>(k));
    BigUInt r = rank;
    int c = n - 1;
    for (int i = k; i >= 1; --i) {
        while (binomial(c, i) > r) --c;
        out[static_cast<std::size_t>(i - 1)] = c + 1;
        r -= binomial(c, i);
        --c;
    }
    return out;
}

}  // namespace cast
