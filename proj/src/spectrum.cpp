#include "cast/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cast {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t mod_n(std::int64_t d, std::int64_t n) {
    std::int64_t r = d % n;
    return r < 0 ? r + n : r;
}

}  // namespace

OrthoMode ortho_mode_from_string(const std::string& s) {
    if (s == "strict") return OrthoMode::strict;
    if (s == "relaxed") return OrthoMode::relaxed;
    if (s == "nearest_grid") return OrthoMode::nearest_grid;
    throw DomainError("unknown orthogonality mode '" + s + "'");
}

std::string to_string(OrthoMode mode) {
    switch (mode) {
        case OrthoMode::strict: return "strict";
        case OrthoMode::relaxed: return "relaxed";
        case OrthoMode::nearest_grid: return "nearest_grid";
    }
    return "strict";
}

SensingDims make_dims(int n, int m, OrthoMode mode, double eps_orth) {
    if (n < 1 || m < 1 || m > n)
        throw DomainError("need 1 <= m <= n (got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
    if (mode == OrthoMode::strict && n % m != 0)
        throw DomainError("strict mode needs n % m == 0 (n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
    if (!(eps_orth >= 0.0)) throw DomainError("eps_orth must be >= 0");
    return SensingDims{n, m, mode, eps_orth};
}

CVec idft_column(const SensingDims& dims, int omega) {
    if (omega < 1 || omega > dims.n)
        throw DomainError("column index " + std::to_string(omega) + " outside [1, " +
                          std::to_string(dims.n) + "]");
    // Unit roots e^{j 2 pi r / n}, phase reduced exactly before conversion.
    thread_local CVec roots;
    if (roots.size() != static_cast<std::size_t>(dims.n)) {
        roots.resize(static_cast<std::size_t>(dims.n));
        for (int r = 0; r < dims.n; ++r) {
            const double ph = 2.0 * kPi * static_cast<double>(r) / dims.n;
            roots[static_cast<std::size_t>(r)] = cd(std::cos(ph), std::sin(ph));
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(dims.m));
    CVec col(static_cast<std::size_t>(dims.m));
    const std::int64_t w = omega - 1;
    for (int l = 0; l < dims.m; ++l)
        col[static_cast<std::size_t>(l)] = scale * roots[static_cast<std::size_t>((w * l) % dims.n)];
    return col;
}

double column_correlation(const SensingDims& dims, std::int64_t delta) {
    const std::int64_t d = mod_n(delta, dims.n);
    if (d == 0) return 1.0;
    const double x = kPi * static_cast<double>(d) / dims.n;
    // sin(m x) with m*d reduced mod 2n keeps exact zeros exact.
    const std::int64_t md = mod_n(static_cast<std::int64_t>(dims.m) * d, 2LL * dims.n);
    const double num = std::sin(kPi * static_cast<double>(md) / dims.n);
    return std::abs(num / std::sin(x)) / dims.m;
}

int interval_index(const SensingDims& dims, std::int64_t delta) {
    // The correlation is n-periodic and even, so work with the circular distance.
    std::int64_t d = (delta < 0 ? -delta : delta) % dims.n;
    d = std::min<std::int64_t>(d, dims.n - d);
    // |d| >= n/(2m)  <=>  2 m |d| >= n
    if (2 * static_cast<std::int64_t>(dims.m) * d < dims.n)
        throw DomainError("|delta| = " + std::to_string(d) + " lies inside the main lobe (< n/2m)");
    // smallest i with d*m <= (i+1)*n, i.e. ceil(d*m/n) - 1
    const std::int64_t dm = d * dims.m;
    const std::int64_t c = (dm + dims.n - 1) / dims.n;
    return static_cast<int>(std::max<std::int64_t>(0, c - 1));
}

double correlation_upper_bound(const SensingDims& dims, std::int64_t delta) {
    const int i = interval_index(dims, delta);
    const double s = std::sin(kPi * (2.0 * i + 1.0) / (2.0 * dims.m));
    return 1.0 / (dims.m * std::abs(s));
}

std::vector<int> orthogonal_index_set(const SensingDims& dims, int anchor) {
    if (anchor < 1 || anchor > dims.n)
        throw DomainError("anchor " + std::to_string(anchor) + " outside [1, " +
                          std::to_string(dims.n) + "]");
    const int n = dims.n;
    const int a0 = anchor - 1;
    std::vector<int> out;
    switch (dims.mode) {
        case OrthoMode::strict: {
            if (n % dims.m != 0) throw DomainError("strict mode needs n % m == 0");
            const int step = n / dims.m;
            out.reserve(static_cast<std::size_t>(dims.m));
            for (int c = 0; c < dims.m; ++c) out.push_back((a0 + c * step) % n + 1);
            break;
        }
        case OrthoMode::relaxed: {
            out.push_back(anchor);
            for (int off = 1; off < n; ++off)
                if (column_correlation(dims, off) <= dims.eps_orth)
                    out.push_back((a0 + off) % n + 1);
            break;
        }
        case OrthoMode::nearest_grid: {
            std::vector<char> seen(static_cast<std::size_t>(n), 0);
            for (int c = 0; c < dims.m; ++c) {
                const auto off = static_cast<int>(
                    std::llround(static_cast<double>(c) * n / dims.m)) % n;
                if (seen[static_cast<std::size_t>(off)]) continue;
                seen[static_cast<std::size_t>(off)] = 1;
                out.push_back((a0 + off) % n + 1);
            }
            break;
        }
    }
    return out;
}

int circular_distance(int a, int b, int n) {
    int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

}  // namespace cast
