#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"
#include "sbmlab/theory.hpp"

namespace sbmlab {

/// One experiment description: model, gamma grid, seeding, estimator
/// choice, and output destination. Flat on purpose so it maps 1:1 onto
/// the JSON config format.
struct ExperimentConfig {
  ModelParams params;
  std::vector<double> gamma_grid;    // empty: just params.gamma
  std::uint64_t base_seed = 1;
  int trials = 5;
  std::string estimator = "naive";   // "naive" | "davis_kahan"
  std::optional<double> known_mean;  // davis_kahan default: (p1+p2)/2
  double epsilon = 0.5;              // recovery threshold
  bool with_resolvent = true;        // secular-equation predictions per trial
  double certificate_epsilon = 0.05;
  int bins = 100;                    // histogram resolution
  int threads = 1;
  std::string out_dir;               // empty: no files written
};

/// Canonical flat JSON of the effective config (deterministic key order
/// and number formatting) and its FNV-1a fingerprint.
std::string config_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

/// Everything measured on one (gamma, stream) cell. Fields that a run
/// legitimately skips stay NaN (serialized as null) with a reason code
/// in the matching note; a failed cell keeps the stage and message.
struct TrialRecord {
  static constexpr double kNull = std::numeric_limits<double>::quiet_NaN();

  double gamma = kNull;
  std::uint64_t seed_value = 0;
  std::uint64_t stream = 0;
  bool failed = false;
  std::string fail_stage;
  std::string fail_reason;

  double rho1 = kNull, rho2 = kNull, rho3 = kNull;   // top of spec(A)
  double gap21 = kNull, gap32 = kNull;
  double mu1 = kNull;                                // top of spec(kappa P)

  double overlap = kNull, rounded_overlap = kNull, hamming = kNull;
  std::string classification;
  bool ambiguous = false;
  double subspace_overlap = kNull;

  int detached_count = -1;  // -1 while resolvent predictions are off
  double theta1 = kNull, theta2 = kNull;
  double predicted_correlation = kNull;  // at theta2
  std::string resolvent_note;  // "disabled" | "no_roots" | "one_root" | ""

  bool certificate = false;
  double lambda2_over_mu1 = kNull;
  bool regime_growth = false, regime_signal = false, regime_easy = false;

  double wall_time_s = 0.0;
};

/// One line of JSON for the record. Wall time is the only
/// run-dependent field, so determinism comparisons drop it.
std::string trial_record_json(const TrialRecord& record,
                              const std::string& config_fingerprint,
                              bool include_wall_time = true);

struct SweepSummaryRow {
  double gamma = 0.0;
  int trials_ok = 0;
  double median_overlap = 0.0, q1_overlap = 0.0, q3_overlap = 0.0;
  double median_rounded_overlap = 0.0;
  double median_hamming = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> records;       // sorted by (gamma, stream)
  std::vector<SweepSummaryRow> summary;   // per gamma, ascending
};

/// Full pipeline on a single cell (params.gamma, stream 0):
/// latents -> kernel -> conditional mean -> adjacency -> spectra ->
/// estimate -> metrics -> secular predictions. Errors carry the
/// pipeline stage in the message.
TrialRecord run_single(const ExperimentConfig& config);

/// Grid of (gamma, trial) cells with per-trial streams
/// stream = gamma_index*trials + trial. Failed cells are recorded, not
/// fatal. Writes records JSONL, a summary CSV, and the effective config
/// when out_dir is set. Results are independent of the thread count.
SweepResult run_sweep(const ExperimentConfig& config);

/// Median and Tukey-hinge quartiles (median of the lower/upper half,
/// middle element excluded when the count is odd). Exactly recomputable
/// from the per-trial records.
double median(std::vector<double> values);
double lower_quartile(std::vector<double> values);
double upper_quartile(std::vector<double> values);

/// Eigenvalue histograms of the perturbed adjacency, the kappa = 0
/// adjacency sampled with the same seed, and the conditional mean Q,
/// over one shared binning; writes three histogram CSVs plus raw
/// eigenvalue lists into out_dir.
void dump_spectra(const ExperimentConfig& config);

struct MomentRow {
  int l = 0;
  double exact_value = 0.0;
  double mc_mean = TrialRecord::kNull;
  double mc_se = TrialRecord::kNull;
  double z = TrialRecord::kNull;  // (mc_mean - exact)/mc_se
  double normalized_value = 0.0;
  double normalized_limit = 0.0;
  double normalized_rel_error = 0.0;
};
struct MomentReport {
  int n = 0;
  double gamma = 0.0;
  int trials = 0;
  std::vector<MomentRow> rows;  // l = 2..l_max
};

/// Exact trace-moment oracle vs Monte Carlo for l = 2..l_max; trials=0
/// runs the oracle only. Writes a quotient table CSV and a report JSON
/// when out_dir is set.
MomentReport run_moments(int n, double gamma, int l_max, int trials,
                         Seed seed, const std::string& out_dir = "");

struct IsolatedReport {
  int n = 0;
  double gamma = 0.0;
  int trials = 0;
  double quadrature = 0.0;
  double mc_mean = TrialRecord::kNull;
  double mc_se = TrialRecord::kNull;
  double z = TrialRecord::kNull;
};

/// Expected isolated vertices of the pure-kernel graph: quadrature
/// oracle vs sampled graphs. Writes a report JSON when out_dir is set.
IsolatedReport run_isolated(int n, double gamma, int trials, Seed seed,
                            const std::string& out_dir = "");

/// Regime report serialization shared by the CLI and tests.
std::string regime_report_json(const RegimeReport& report);

}  // namespace sbmlab
