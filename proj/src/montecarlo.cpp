#include "cast/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>
#include <unordered_set>

namespace cast {

SelectionRule selection_rule_from_string(const std::string& s) {
    if (s == "channel_aware") return SelectionRule::channel_aware;
    if (s == "uniform_random") return SelectionRule::uniform_random;
    throw DomainError("unknown selection rule '" + s + "'");
}

std::string to_string(SelectionRule r) {
    return r == SelectionRule::channel_aware ? "channel_aware" : "uniform_random";
}

OrthoMode resolve_mode(const OrthoChoice& choice, int n, int m) {
    if (!choice.automatic) return choice.mode;
    return n % m == 0 ? OrthoMode::strict : OrthoMode::relaxed;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw DomainError("n must be >= 1");
    if (cfg.trials < 1) throw DomainError("trials must be >= 1");
    if (cfg.k.empty() || cfg.m.empty() || cfg.snr_db.empty() || cfg.rules.empty())
        throw DomainError("sweep lists must be non-empty");
    if (cfg.tau < 1) throw DomainError("tau must be >= 1");
    if (cfg.channel_error_variance < 0 || cfg.reciprocity_mismatch_variance < 0)
        throw DomainError("error variances must be >= 0");
    const int kmax = *std::max_element(cfg.k.begin(), cfg.k.end());
    const int kmin = *std::min_element(cfg.k.begin(), cfg.k.end());
    const int mmin = *std::min_element(cfg.m.begin(), cfg.m.end());
    if (kmin < 1) throw DomainError("k must be >= 1");
    if (kmax >= mmin)
        throw DomainError("every k must be smaller than every m (k=" + std::to_string(kmax) +
                          ", m=" + std::to_string(mmin) + ")");
    for (int m : cfg.m) {
        if (m > cfg.n) throw DomainError("m = " + std::to_string(m) + " exceeds n");
        make_dims(cfg.n, m, resolve_mode(cfg.orthogonality, cfg.n, m));
    }
    for (double s : cfg.snr_db)
        if (!std::isfinite(s)) throw DomainError("snr_db values must be finite");
    if (cfg.bound.enabled && cfg.bound.trials < 1) throw DomainError("bound trials must be >= 1");
    make_frame(cfg.tdd_pattern, cfg.n);
}

std::uint64_t cell_id(const CellSpec& cell) {
    // Rule is left out on purpose: both rules see the same streams.
    const auto snr_milli = static_cast<std::int64_t>(std::llround(cell.snr_db * 1000.0));
    std::uint64_t x = static_cast<std::uint64_t>(cell.k);
    x = x * 1000003ULL + static_cast<std::uint64_t>(cell.m);
    x = x * 1000003ULL + static_cast<std::uint64_t>(cell.n);
    x = x * 1000003ULL + static_cast<std::uint64_t>(snr_milli + (1LL << 40));
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

SupportSet uniform_subset(int n, int k, Rng& rng) {
    // Floyd's algorithm.
    std::unordered_set<int> chosen;
    SupportSet out;
    for (int j = n - k + 1; j <= n; ++j) {
        std::uniform_int_distribution<int> pick(1, j);
        int t = pick(rng);
        if (chosen.count(t)) t = j;
        chosen.insert(t);
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, const CellSpec& cell,
                      std::uint64_t trial_index) {
    const SensingDims dims =
        make_dims(cell.n, cell.m, resolve_mode(cfg.orthogonality, cell.n, cell.m));
    Rng rng = make_stream(cfg.seed, cell_id(cell), trial_index);

    // Every draw happens regardless of configuration so that streams stay
    // aligned across rules and error settings.
    const ChannelRealization ch = sample_channel(cell.n, rng);
    const ChannelRealization device = degrade_estimate(ch, cfg.channel_error_variance, rng);
    const ChannelRealization base_view = reciprocity_perturb(ch, cfg.reciprocity_mismatch_variance, rng);
    const SupportSet random_support = uniform_subset(cell.n, cell.k, rng);

    Bits bits(static_cast<std::size_t>(cell.k * bits_per_symbol(cfg.modulation)));
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& b : bits) b = static_cast<std::uint8_t>(coin(rng));

    TrialRecord rec;
    SupportSet bs_support, own_support;
    try {
        if (cell.rule == SelectionRule::channel_aware) {
            bs_support = select_support(base_view.view(), cell.k, dims);
            own_support = select_support(device.view(), cell.k, dims);
        } else {
            bs_support = own_support = random_support;
        }
    } catch (const DomainError&) {
        rec.status = DecodeStatus::identification_failed;
        return rec;
    }

    const double alpha = std::pow(10.0, cell.snr_db / 10.0);
    const double beta = beta_amplitude(cell.m, cell.k, alpha);
    const CVec symbols = map_bits_to_symbols(bits, cfg.modulation, beta);
    const SparseFreqVector grant = build_grant_vector(bs_support, symbols, cell.n);
    const NoiseSpec noise{cfg.noiseless ? 0.0 : 1.0};
    const MeasurementVector y = transmit(grant, ch, noise, dims, rng);

    DecodeOptions opts;
    opts.tau = cfg.tau;
    opts.modulation = cfg.modulation;
    opts.estimate.estimator = cfg.estimator;
    opts.estimate.symbol_power = beta * beta;
    // A zero noise variance would make LMMSE degenerate to LS anyway.
    const NoiseSpec decoder_noise{1.0};
    const DecodeOutcome out = decode(y, own_support, device, dims, cell.k, decoder_noise, opts);

    rec.status = out.status;
    if (out.decoded_support.size() == own_support.size()) {
        rec.support_success = tau_close_match(out.decoded_support, own_support, cfg.tau, cell.n);
        rec.exact_success = out.decoded_support == own_support;
    }
    if (out.status == DecodeStatus::granted) {
        // Bits are compared against what the base station actually sent.
        const Bits& got = *out.decoded_bits;
        rec.symbols = cell.k;
        for (int i = 0; i < cell.k; ++i) {
            const auto b = static_cast<std::size_t>(2 * i);
            if (got[b] != bits[b] || got[b + 1] != bits[b + 1]) ++rec.symbol_errors;
        }
        rec.block_error = rec.symbol_errors > 0;
    }
    return rec;
}

void CellCounts::add(const TrialRecord& r) {
    ++trials;
    support_success += r.support_success;
    exact_success += r.exact_success;
    block_errors += r.block_error;
    symbol_errors += r.symbol_errors;
    symbols += r.symbols;
}

void CellCounts::merge(const CellCounts& o) {
    trials += o.trials;
    support_success += o.support_success;
    exact_success += o.exact_success;
    block_errors += o.block_errors;
    symbol_errors += o.symbol_errors;
    symbols += o.symbols;
}

int effective_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CAST_SIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

CellCounts run_cell_counts(const ExperimentConfig& cfg, const CellSpec& cell, int threads) {
    constexpr std::int64_t kChunk = 256;
    const std::int64_t total = cfg.trials;
    const std::int64_t chunks = (total + kChunk - 1) / kChunk;
    std::vector<CellCounts> partial(static_cast<std::size_t>(chunks));
    std::atomic<std::int64_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            CellCounts& acc = partial[static_cast<std::size_t>(c)];
            const std::int64_t end = std::min(total, (c + 1) * kChunk);
            for (std::int64_t t = c * kChunk; t < end; ++t)
                acc.add(run_trial(cfg, cell, static_cast<std::uint64_t>(t)));
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    CellCounts sum;
    for (const auto& p : partial) sum.merge(p);
    return sum;
}

namespace {

void rate(std::int64_t hits, std::int64_t n, double& p, double& se) {
    if (n <= 0) {
        p = se = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    p = static_cast<double>(hits) / static_cast<double>(n);
    se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

CellResult summarize(const ExperimentConfig& cfg, const CellSpec& cell, const CellCounts& c) {
    CellResult r;
    r.experiment_id = cfg.experiment_id;
    r.cell = cell;
    r.tau = cfg.tau;
    r.trials = c.trials;
    r.seed = cfg.seed;
    rate(c.support_success, c.trials, r.success_rate, r.success_se);
    rate(c.exact_success, c.trials, r.exact_rate, r.exact_se);
    rate(c.symbol_errors, c.symbols, r.ser, r.ser_se);
    rate(c.block_errors, c.trials, r.bler, r.bler_se);

    const TddFrameConfig frame = make_frame(cfg.tdd_pattern, cell.n);
    const LatencyBreakdown once = cast_latency(cell.m, frame, cfg.latency);
    const double retry = cfg.retry_period_ms < 0 ? once.t_up : cfg.retry_period_ms;
    r.mean_latency_ms = expected_latency_with_retry(1.0 - r.bler, once, retry);

    r.bound_lower = r.bound_se = std::numeric_limits<double>::quiet_NaN();
    return r;
}

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& cfg) {
    std::vector<CellSpec> cells;
    for (int k : cfg.k)
        for (int m : cfg.m)
            for (double s : cfg.snr_db)
                for (SelectionRule rule : cfg.rules) cells.push_back({cfg.n, k, m, s, rule});
    return cells;
}

std::vector<CellResult> run_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    const int threads = effective_threads(cfg.threads);
    std::vector<CellResult> out;
    for (const CellSpec& cell : enumerate_cells(cfg)) {
        CellResult r = summarize(cfg, cell, run_cell_counts(cfg, cell, threads));
        if (cfg.bound.enabled && cell.rule == SelectionRule::channel_aware) {
            BoundConfig bc;
            bc.n = cell.n;
            bc.m = cell.m;
            bc.k = cell.k;
            bc.alpha = std::pow(10.0, cell.snr_db / 10.0);
            bc.mode = resolve_mode(cfg.orthogonality, cell.n, cell.m);
            bc.rho_variant = cfg.bound.rho_variant;
            bc.zeta_convention = cfg.bound.zeta_convention;
            bc.pdf = cfg.bound.pdf;
            const BoundEstimate b = total_bound(bc, cfg.seed, cfg.bound.trials, cell_id(cell));
            r.bound_lower = b.mean;
            r.bound_se = b.se;
        }
        out.push_back(r);
    }
    return out;
}

std::vector<RulePair> compare_rules(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.rules = {SelectionRule::channel_aware, SelectionRule::uniform_random};
    const std::vector<CellResult> all = run_sweep(c);
    std::vector<RulePair> pairs;
    for (std::size_t i = 0; i + 1 < all.size(); i += 2) pairs.push_back({all[i], all[i + 1]});
    return pairs;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{
        "experiment_id", "n", "k", "m", "snr_db", "tau", "selection_rule", "trials",
        "success_rate", "success_se", "ser", "ser_se", "bler", "bler_se",
        "mean_latency_ms", "bound_lower", "bound_se", "seed"};
    return cols;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv_header(std::ostream& os, const std::vector<std::string>& extra) {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    for (const auto& e : extra) os << "," << e;
    os << "\n";
}

void write_csv_row(std::ostream& os, const CellResult& r, const std::vector<std::string>& extra) {
    os << r.experiment_id << "," << r.cell.n << "," << r.cell.k << "," << r.cell.m << ","
       << format_number(r.cell.snr_db) << "," << r.tau << "," << to_string(r.cell.rule) << ","
       << r.trials << "," << format_number(r.success_rate) << "," << format_number(r.success_se)
       << "," << format_number(r.ser) << "," << format_number(r.ser_se) << ","
       << format_number(r.bler) << "," << format_number(r.bler_se) << ","
       << format_number(r.mean_latency_ms) << "," << format_number(r.bound_lower) << ","
       << format_number(r.bound_se) << "," << r.seed;
    for (const auto& e : extra) os << "," << e;
    os << "\n";
}

}  // namespace cast
