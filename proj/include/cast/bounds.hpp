#pragma once

#include <cstdint>
#include <string>

#include "cast/spectrum.hpp"

namespace cast {

// gamma(a, x) / Gamma(a)
double reg_lower_gamma(double a, double x);

// I(x | a, b)
double reg_incomplete_beta(double x, double a, double b);

struct SeriesResult {
    double value = 0.0;
    int terms = 0;
    double tail = 0.0;  // Poisson mass not summed
};

// Poisson-mixture series for the noncentral F CDF (noncentral numerator).
SeriesResult noncentral_f_cdf_series(double x, double n1, double n2, double lambda);
double noncentral_f_cdf(double x, double n1, double n2, double lambda);

enum class RhoVariant {
    all_terms,      // every p, including omega_p == anchor
    exclude_anchor  // omega_p == anchor skipped (k - 1 terms for channel-aware supports)
};

enum class ZetaConvention { beta, beta_squared };

enum class PdfConvention {
    variance_two,  // N r e^{-r^2/2} (1 - e^{-r^2/2})^{N-1}
    unit_power     // 2N r e^{-r^2} (1 - e^{-r^2})^{N-1}
};

RhoVariant rho_variant_from_string(const std::string& s);
ZetaConvention zeta_convention_from_string(const std::string& s);
PdfConvention pdf_convention_from_string(const std::string& s);
std::string to_string(RhoVariant v);
std::string to_string(ZetaConvention z);
std::string to_string(PdfConvention p);

double rho_of_support(int anchor, const SupportSet& support, const SensingDims& dims,
                      RhoVariant variant = RhoVariant::exclude_anchor);

double beta_amplitude(int m, int k, double alpha);

double zeta_of(double beta, double gain_sq, ZetaConvention conv);

struct BoundInputs {
    int n = 0;
    int m = 0;
    int k = 1;
    double alpha = 1.0;  // linear SNR
    double rho = 0.0;
    double zeta = 0.0;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
};

QuadResult p1_lower_bound_detail(const BoundInputs& in,
                                 PdfConvention pdf = PdfConvention::variance_two);
double p1_lower_bound(const BoundInputs& in, PdfConvention pdf = PdfConvention::variance_two);

double p2_lower_bound(int k, int m, double zeta);

struct BoundConfig {
    int n = 1024;
    int m = 128;
    int k = 2;
    double alpha = 1.0;
    OrthoMode mode = OrthoMode::strict;
    RhoVariant rho_variant = RhoVariant::exclude_anchor;
    ZetaConvention zeta_convention = ZetaConvention::beta;
    PdfConvention pdf = PdfConvention::variance_two;
};

struct BoundEstimate {
    double mean = 0.0;
    double se = 0.0;
    int trials = 0;
};

// Channel-averaged product of the two stage bounds.
BoundEstimate total_bound(const BoundConfig& cfg, std::uint64_t seed, int trials,
                          std::uint64_t stream_id = 0);

}  // namespace cast
