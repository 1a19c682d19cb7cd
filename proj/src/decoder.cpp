#include "cast/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include <Eigen/Dense>
#include <fftw3.h>

namespace cast {

Estimator estimator_from_string(const std::string& s) {
    if (s == "ls") return Estimator::ls;
    if (s == "lmmse") return Estimator::lmmse;
    throw DomainError("unknown estimator '" + s + "'");
}

std::string to_string(Estimator e) { return e == Estimator::ls ? "ls" : "lmmse"; }

std::string to_string(DecodeStatus s) {
    switch (s) {
        case DecodeStatus::granted: return "granted";
        case DecodeStatus::not_granted: return "not_granted";
        case DecodeStatus::identification_failed: return "identification_failed";
        case DecodeStatus::symbol_error: return "symbol_error";
    }
    return "not_granted";
}

namespace {

std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}

// One forward plan per transform length, owned by the calling thread.
class FftWorkspace {
public:
    explicit FftWorkspace(int n) : n_(n) {
        buf_ = fftw_alloc_complex(static_cast<std::size_t>(n));
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~FftWorkspace() {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(buf_);
    }
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    int size() const { return n_; }
    fftw_complex* data() { return buf_; }
    void run() { fftw_execute(plan_); }

private:
    int n_;
    fftw_complex* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

FftWorkspace& workspace(int n) {
    thread_local std::unique_ptr<FftWorkspace> ws;
    if (!ws || ws->size() != n) {
        ws.reset();
        ws = std::make_unique<FftWorkspace>(n);
    }
    return *ws;
}

cd direct_inner(const MeasurementVector& y, const SensingDims& dims, int omega) {
    const CVec a = idft_column(dims, omega);
    cd acc{0.0, 0.0};
    for (std::size_t l = 0; l < a.size(); ++l) acc += std::conj(a[l]) * y[l];
    return acc;
}

void check_measurement(const MeasurementVector& y, const SensingDims& dims) {
    if (y.size() != static_cast<std::size_t>(dims.m))
        throw DomainError("measurement length " + std::to_string(y.size()) + " != m = " +
                          std::to_string(dims.m));
}

}  // namespace

std::vector<double> matched_filter_all(const MeasurementVector& y, const SensingDims& dims) {
    check_measurement(y, dims);
    FftWorkspace& ws = workspace(dims.n);
    fftw_complex* buf = ws.data();
    for (int l = 0; l < dims.n; ++l) {
        const cd v = l < dims.m ? y[static_cast<std::size_t>(l)] : cd{0.0, 0.0};
        buf[l][0] = v.real();
        buf[l][1] = v.imag();
    }
    ws.run();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dims.m));
    std::vector<double> out(static_cast<std::size_t>(dims.n));
    for (int w = 0; w < dims.n; ++w)
        out[static_cast<std::size_t>(w)] = scale * std::hypot(buf[w][0], buf[w][1]);
    return out;
}

std::vector<double> matched_filter(const MeasurementVector& y, const SensingDims& dims,
                                   const std::vector<int>& candidates, FilterPath path) {
    if (candidates.empty()) throw DomainError("matched_filter: empty candidate set");
    for (int w : candidates)
        if (w < 1 || w > dims.n) throw DomainError("matched_filter: candidate out of range");
    check_measurement(y, dims);
    std::vector<double> out;
    out.reserve(candidates.size());
    if (path == FilterPath::transform) {
        const std::vector<double> all = matched_filter_all(y, dims);
        for (int w : candidates) out.push_back(all[static_cast<std::size_t>(w - 1)]);
    } else {
        for (int w : candidates) out.push_back(std::abs(direct_inner(y, dims, w)));
    }
    return out;
}

SupportSet identify_support(const MeasurementVector& y, int k, const SensingDims& dims,
                            IdentifyTrace* trace) {
    if (k < 1 || k > dims.m) throw DomainError("identify_support: need 1 <= k <= m");

    // First sweep: every column.
    const std::vector<double> full = matched_filter_all(y, dims);
    std::size_t best = 0;
    for (std::size_t i = 1; i < full.size(); ++i)
        if (full[i] > full[best]) best = i;
    const int first = static_cast<int>(best) + 1;
    if (trace) {
        trace->sweeps = 1;
        trace->first_pick = first;
    }

    SupportSet out{first};
    if (k > 1) {
        std::vector<int> gamma = orthogonal_index_set(dims, first);
        gamma.erase(std::remove(gamma.begin(), gamma.end(), first), gamma.end());
        if (static_cast<std::size_t>(k - 1) > gamma.size())
            throw DomainError("identify_support: k - 1 exceeds |Gamma|");

        // Second sweep: the orthogonal set only, read off the transform.
        std::vector<double> mag;
        mag.reserve(gamma.size());
        for (int w : gamma) mag.push_back(full[static_cast<std::size_t>(w - 1)]);
        if (trace) trace->sweeps = 2;
        std::vector<std::size_t> order(gamma.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::partial_sort(order.begin(), order.begin() + (k - 1), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (mag[a] != mag[b]) return mag[a] > mag[b];
                              return gamma[a] < gamma[b];
                          });
        for (int i = 0; i < k - 1; ++i) out.push_back(gamma[order[static_cast<std::size_t>(i)]]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool tau_close_match(const SupportSet& decoded, const SupportSet& own, int tau, int n) {
    if (decoded.size() != own.size()) throw DomainError("tau_close_match: size mismatch");
    if (tau < 1) throw DomainError("tau_close_match: tau must be >= 1");
    SupportSet d = decoded, o = own;
    std::sort(d.begin(), d.end());
    std::sort(o.begin(), o.end());
    const std::size_t k = d.size();
    for (std::size_t shift = 0; shift < std::max<std::size_t>(k, 1); ++shift) {
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i)
            ok = circular_distance(d[(i + shift) % k], o[i], n) < tau;
        if (ok) return true;
    }
    return false;
}

SupportSet snap_support(const SupportSet& decoded, const SupportSet& own, int tau, int n) {
    if (!tau_close_match(decoded, own, tau, n))
        throw DomainError("snap_support: decoded support is not tau-close to own support");
    SupportSet out = own;
    std::sort(out.begin(), out.end());
    return out;
}

CVec estimate_symbols(const MeasurementVector& y, const SupportSet& support,
                      const CVec& gains, const SensingDims& dims, const NoiseSpec& noise,
                      const EstimateOptions& opts) {
    check_measurement(y, dims);
    const auto k = static_cast<Eigen::Index>(support.size());
    const auto m = static_cast<Eigen::Index>(dims.m);
    if (k == 0) return {};
    if (m <= k) throw DomainError("estimate_symbols: need m > k");
    if (gains.size() != static_cast<std::size_t>(dims.n))
        throw DomainError("estimate_symbols: gain vector length != n");

    double gmax = 0.0;
    for (int w : support) gmax = std::max(gmax, std::abs(gains[static_cast<std::size_t>(w - 1)]));

    Eigen::MatrixXcd B(m, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const int w = support[static_cast<std::size_t>(i)];
        const cd g = gains[static_cast<std::size_t>(w - 1)];
        if (std::abs(g) <= 1e-12 * std::max(gmax, 1e-300))
            throw RankDeficient("estimate_symbols: channel gain at index " +
                                std::to_string(w) + " is numerically zero");
        const CVec a = idft_column(dims, w);
        for (Eigen::Index l = 0; l < m; ++l) B(l, i) = a[static_cast<std::size_t>(l)] * g;
    }
    const Eigen::Map<const Eigen::VectorXcd> yv(y.data(), m);

    Eigen::MatrixXcd G = B.adjoint() * B;
    if (opts.estimator == Estimator::lmmse) {
        if (!(opts.symbol_power > 0)) throw DomainError("LMMSE needs a positive symbol power");
        G.diagonal().array() += noise.variance / opts.symbol_power;
    }
    const Eigen::VectorXcd rhs = B.adjoint() * yv;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(G);
    const Eigen::VectorXd D = ldlt.vectorD().real();
    if (ldlt.info() != Eigen::Success || D.minCoeff() <= 1e-12 * std::max(D.maxCoeff(), 1e-300))
        throw RankDeficient("estimate_symbols: reduced system is rank deficient");
    const Eigen::VectorXcd u = ldlt.solve(rhs);
    return CVec(u.data(), u.data() + k);
}

Bits slice_symbols(const CVec& symbols, Modulation) {
    Bits out;
    out.reserve(2 * symbols.size());
    for (const cd& s : symbols) {
        out.push_back(s.real() >= 0.0 ? 0 : 1);
        out.push_back(s.imag() >= 0.0 ? 0 : 1);
    }
    return out;
}

DecodeOutcome decode(const MeasurementVector& y, const SupportSet& own_support,
                     const ChannelRealization& ch_view, const SensingDims& dims, int k,
                     const NoiseSpec& noise, const DecodeOptions& opts) {
    if (static_cast<int>(own_support.size()) != k)
        throw DomainError("decode: |own support| != k");
    DecodeOutcome out;
    try {
        out.decoded_support = identify_support(y, k, dims);
    } catch (const DomainError&) {
        out.status = DecodeStatus::identification_failed;
        return out;
    }
    if (!tau_close_match(out.decoded_support, own_support, opts.tau, dims.n)) {
        out.status = DecodeStatus::not_granted;
        return out;
    }
    const SupportSet snapped = snap_support(out.decoded_support, own_support, opts.tau, dims.n);
    try {
        const CVec est = estimate_symbols(y, snapped, ch_view.view(), dims, noise, opts.estimate);
        out.decoded_bits = slice_symbols(est, opts.modulation);
        out.status = DecodeStatus::granted;
    } catch (const RankDeficient&) {
        out.status = DecodeStatus::symbol_error;
    }
    return out;
}

}  // namespace cast
