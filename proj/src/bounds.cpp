#include "cast/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cast/channel.hpp"
#include "cast/encoder.hpp"

namespace cast {

double reg_lower_gamma(double a, double x) {
    if (!(a > 0)) throw DomainError("reg_lower_gamma: a must be > 0");
    if (std::isnan(x) || x < 0) throw DomainError("reg_lower_gamma: x must be >= 0");
    if (x == 0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(a, x);
}

double reg_incomplete_beta(double x, double a, double b) {
    if (!(a > 0) || !(b > 0)) throw DomainError("reg_incomplete_beta: a, b must be > 0");
    if (!(x >= 0 && x <= 1)) throw DomainError("reg_incomplete_beta: x outside [0, 1]");
    return boost::math::ibeta(a, b, x);
}

SeriesResult noncentral_f_cdf_series(double x, double n1, double n2, double lambda) {
    if (!(lambda >= 0)) throw DomainError("noncentral_f_cdf: lambda must be >= 0");
    if (!(n1 > 0) || !(n2 > 0)) throw DomainError("noncentral_f_cdf: dof must be > 0");
    if (std::isnan(x)) throw DomainError("noncentral_f_cdf: x is NaN");
    SeriesResult r;
    if (x <= 0) return r;
    const double z = n1 * x / (n2 + n1 * x);
    const double half = lambda / 2.0;
    if (half == 0.0) {
        r.value = reg_incomplete_beta(z, n1 / 2.0, n2 / 2.0);
        r.terms = 1;
        return r;
    }
    constexpr int kMaxTerms = 10000;
    constexpr double kTail = 1e-14;
    const double log_half = std::log(half);
    double sum = 0.0;
    for (int j = 0; j < kMaxTerms; ++j) {
        const double lw = -half + j * log_half - std::lgamma(j + 1.0);
        const double w = std::exp(lw);
        if (w > 0) sum += w * reg_incomplete_beta(z, n1 / 2.0 + j, n2 / 2.0);
        r.terms = j + 1;
        if (j >= half) {
            // Poisson mass above j.
            r.tail = boost::math::gamma_p(j + 1.0, half);
            if (r.tail < kTail) break;
        }
    }
    if (r.tail >= kTail)
        throw Error("noncentral_f_cdf: series did not converge in " +
                    std::to_string(kMaxTerms) + " terms (tail " + std::to_string(r.tail) + ")");
    r.value = std::clamp(sum, 0.0, 1.0);
    return r;
}

double noncentral_f_cdf(double x, double n1, double n2, double lambda) {
    return noncentral_f_cdf_series(x, n1, n2, lambda).value;
}

RhoVariant rho_variant_from_string(const std::string& s) {
    if (s == "all_terms") return RhoVariant::all_terms;
    if (s == "exclude_anchor") return RhoVariant::exclude_anchor;
    throw DomainError("unknown rho variant '" + s + "'");
}

ZetaConvention zeta_convention_from_string(const std::string& s) {
    if (s == "beta") return ZetaConvention::beta;
    if (s == "beta_squared") return ZetaConvention::beta_squared;
    throw DomainError("unknown zeta convention '" + s + "'");
}

PdfConvention pdf_convention_from_string(const std::string& s) {
    if (s == "variance_two") return PdfConvention::variance_two;
    if (s == "unit_power") return PdfConvention::unit_power;
    throw DomainError("unknown pdf convention '" + s + "'");
}

std::string to_string(RhoVariant v) {
    return v == RhoVariant::all_terms ? "all_terms" : "exclude_anchor";
}

std::string to_string(ZetaConvention z) {
    return z == ZetaConvention::beta ? "beta" : "beta_squared";
}

std::string to_string(PdfConvention p) {
    return p == PdfConvention::variance_two ? "variance_two" : "unit_power";
}

double rho_of_support(int anchor, const SupportSet& support, const SensingDims& dims,
                      RhoVariant variant) {
    double rho = 0.0;
    for (int w : support) {
        if (variant == RhoVariant::exclude_anchor && w == anchor) continue;
        const std::int64_t d = std::abs(static_cast<std::int64_t>(anchor) - w) % dims.n;
        rho += correlation_upper_bound(dims, d);
    }
    return rho;
}

double beta_amplitude(int m, int k, double alpha) {
    return std::sqrt(2.0 * m * alpha / k);
}

double zeta_of(double beta, double gain_sq, ZetaConvention conv) {
    return (conv == ZetaConvention::beta ? beta : beta * beta) * gain_sq;
}

QuadResult p1_lower_bound_detail(const BoundInputs& in, PdfConvention pdf) {
    if (in.m < in.k || in.k < 1) throw DomainError("p1_lower_bound: need m >= k >= 1");
    if (!(in.alpha >= 0) || !(in.rho >= 0)) throw DomainError("p1_lower_bound: bad alpha/rho");
    QuadResult res;
    if (in.rho >= 1.0) return res;

    const double N = in.n;
    const double c = in.alpha * in.m / (2.0 * in.k) * (1.0 - in.rho) * (1.0 - in.rho);
    // Variance-two pdf in r corresponds to the unit-power one in r / sqrt(2).
    const double s = pdf == PdfConvention::variance_two ? 0.5 : 1.0;
    const double r_max = std::sqrt((std::log(N) + 12.0 * std::log(10.0) + 2.0) / s);

    auto integrand = [&](double r) {
        if (r <= 0) return 0.0;
        const double t = s * r * r;
        const double e = std::exp(-t);
        const double pw = std::exp((N - 1.0) * std::log1p(-e));
        const double dens = 2.0 * s * N * r * e * pw;
        return reg_lower_gamma(in.m, c * r * r) * dens;
    };
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(integrand, 0.0, r_max, 20, 1e-13, &err);
    if (err > 1e-8)
        throw Error("p1_lower_bound: quadrature did not converge (achieved " +
                    std::to_string(err) + ")");
    res.value = std::clamp(v, 0.0, 1.0);
    res.abs_error = err;
    return res;
}

double p1_lower_bound(const BoundInputs& in, PdfConvention pdf) {
    return p1_lower_bound_detail(in, pdf).value;
}

double p2_lower_bound(int k, int m, double zeta) {
    if (k < 1 || m <= k) throw DomainError("p2_lower_bound: need m > k >= 1");
    if (!(zeta >= 0)) throw DomainError("p2_lower_bound: zeta must be >= 0");
    if (k == 1) return 1.0;
    const double f = noncentral_f_cdf(1.0, 2.0, 2.0, zeta);
    const double e = static_cast<double>(k - 1) * (m - k);
    return std::pow(1.0 - f, e);
}

BoundEstimate total_bound(const BoundConfig& cfg, std::uint64_t seed, int trials,
                          std::uint64_t stream_id) {
    if (trials < 1) throw DomainError("total_bound: trials must be >= 1");
    const SensingDims dims = make_dims(cfg.n, cfg.m, cfg.mode);
    const double beta = beta_amplitude(cfg.m, cfg.k, cfg.alpha);
    std::map<double, double> p1_cache;

    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_stream(seed, stream_id, static_cast<std::uint64_t>(t));
        const ChannelRealization ch = sample_channel(cfg.n, rng);
        const SupportSet omega = select_support(ch, cfg.k, dims);

        std::size_t best = 0;
        for (std::size_t i = 1; i < ch.h.size(); ++i)
            if (std::abs(ch.h[i]) > std::abs(ch.h[best])) best = i;
        const int anchor = static_cast<int>(best) + 1;

        double value = 0.0;
        const double rho = rho_of_support(anchor, omega, dims, cfg.rho_variant);
        if (rho < 1.0) {
            auto it = p1_cache.find(rho);
            if (it == p1_cache.end()) {
                BoundInputs in{cfg.n, cfg.m, cfg.k, cfg.alpha, rho, 0.0};
                it = p1_cache.emplace(rho, p1_lower_bound(in, cfg.pdf)).first;
            }
            double weakest = std::numeric_limits<double>::infinity();
            for (int w : omega)
                if (w != anchor) weakest = std::min(weakest, std::norm(ch.h[static_cast<std::size_t>(w - 1)]));
            const double zeta =
                cfg.k > 1 ? zeta_of(beta, weakest, cfg.zeta_convention) : 0.0;
            value = it->second * p2_lower_bound(cfg.k, cfg.m, zeta);
        }
        sum += value;
        sum_sq += value * value;
    }
    BoundEstimate est;
    est.trials = trials;
    est.mean = sum / trials;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - trials * est.mean * est.mean) / (trials - 1)) : 0.0;
    est.se = std::sqrt(var / trials);
    return est;
}

}  // namespace cast
