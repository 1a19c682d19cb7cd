#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cast/bounds.hpp"
#include "cast/decoder.hpp"
#include "cast/encoder.hpp"
#include "cast/latency.hpp"

namespace cast {

enum class SelectionRule { channel_aware, uniform_random };

SelectionRule selection_rule_from_string(const std::string& s);
std::string to_string(SelectionRule r);

// "auto" resolves per m: strict when n % m == 0, relaxed otherwise.
struct OrthoChoice {
    bool automatic = true;
    OrthoMode mode = OrthoMode::strict;
};

OrthoMode resolve_mode(const OrthoChoice& choice, int n, int m);

struct BoundOptions {
    bool enabled = false;
    int trials = 2000;
    RhoVariant rho_variant = RhoVariant::exclude_anchor;
    ZetaConvention zeta_convention = ZetaConvention::beta;
    PdfConvention pdf = PdfConvention::variance_two;
};

struct ExperimentConfig {
    std::string experiment_id = "experiment";
    int n = 1024;
    std::vector<int> k{6};
    std::vector<int> m{128};
    std::vector<double> snr_db{5.0};
    int tau = 2;
    int trials = 10000;
    std::uint64_t seed = 1;
    std::vector<SelectionRule> rules{SelectionRule::channel_aware};
    OrthoChoice orthogonality;
    double channel_error_variance = 0.0;
    double reciprocity_mismatch_variance = 0.0;
    Modulation modulation = Modulation::qpsk;
    Estimator estimator = Estimator::ls;
    bool noiseless = false;
    BoundOptions bound;
    LatencyCalibration latency;
    std::string tdd_pattern = "DSUDDDDDDD";
    double retry_period_ms = -1.0;  // < 0: repeat the whole attempt
    int threads = 0;                // 0: hardware concurrency
};

// Throws DomainError describing the first violated constraint.
void validate(const ExperimentConfig& cfg);

struct CellSpec {
    int n = 0;
    int k = 0;
    int m = 0;
    double snr_db = 0.0;
    SelectionRule rule = SelectionRule::channel_aware;
};

std::uint64_t cell_id(const CellSpec& cell);

struct TrialRecord {
    bool support_success = false;  // tau-close
    bool exact_success = false;
    bool block_error = true;
    int symbol_errors = 0;
    int symbols = 0;  // symbols sliced (granted blocks only)
    DecodeStatus status = DecodeStatus::not_granted;

    bool operator==(const TrialRecord&) const = default;
};

TrialRecord run_trial(const ExperimentConfig& cfg, const CellSpec& cell,
                      std::uint64_t trial_index);

struct CellCounts {
    std::int64_t trials = 0;
    std::int64_t support_success = 0;
    std::int64_t exact_success = 0;
    std::int64_t block_errors = 0;
    std::int64_t symbol_errors = 0;
    std::int64_t symbols = 0;

    void add(const TrialRecord& r);
    void merge(const CellCounts& o);
};

struct CellResult {
    std::string experiment_id;
    CellSpec cell;
    int tau = 2;
    std::int64_t trials = 0;
    double success_rate = 0.0, success_se = 0.0;
    double exact_rate = 0.0, exact_se = 0.0;
    double ser = 0.0, ser_se = 0.0;  // over symbols of granted blocks
    double bler = 0.0, bler_se = 0.0;
    double mean_latency_ms = 0.0;
    double bound_lower = 0.0, bound_se = 0.0;  // NaN when not evaluated
    std::uint64_t seed = 0;
};

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& cfg);

CellCounts run_cell_counts(const ExperimentConfig& cfg, const CellSpec& cell, int threads);

CellResult summarize(const ExperimentConfig& cfg, const CellSpec& cell, const CellCounts& c);

std::vector<CellResult> run_sweep(const ExperimentConfig& cfg);

struct RulePair {
    CellResult channel_aware;
    CellResult uniform_random;
};

std::vector<RulePair> compare_rules(const ExperimentConfig& cfg);

int effective_threads(int requested);

const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& os, const std::vector<std::string>& extra = {});
void write_csv_row(std::ostream& os, const CellResult& r,
                   const std::vector<std::string>& extra = {});
std::string format_number(double v);

}  // namespace cast
