#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kmf/process.hpp"

namespace kmf {

// One experiment block: `trials` independent runs at the same (n, k).
struct ExperimentConfig {
  int n = 0;
  std::string k_spec;  // "sqrt", "linear:<c>", "clique:<f>" or an integer
  int trials = 1;
  std::uint64_t base_seed = 1;
  std::string mode = "summary";  // summary | trace | charges
  double h = 1.0;  // half-width of the isolation-time window, in (ln n)/n units
  std::uint64_t independence_node_budget = kDefaultIndependenceNodeBudget;
};

// k schedules: "sqrt" -> floor(sqrt(n)); "linear:c" -> floor(c*n);
// "clique:f" -> floor((n-f)/2); plain integers pass through.
int resolve_k(int n, const std::string& k_spec);

// Per-trial seed derivation; injective in trial_index for a fixed base, so
// trials stay independent of scheduling and thread count.
std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t trial_index);

void validate_config(const ExperimentConfig& cfg);

// Trial i always runs with seed mix_seed(base_seed, i); the two runners
// return identical vectors, the parallel one merely computes them on
// OpenMP threads.
std::vector<TrialRecord> run_trials_serial(const ExperimentConfig& cfg);
std::vector<TrialRecord> run_trials_parallel(const ExperimentConfig& cfg,
                                             int threads);

// Per-config aggregate; one CSV row. Means and deviations of the hitting
// times are over the trials where the time is defined; fractions are over
// all trials. Undefined fields are NaN (printed as nan, omitted from JSON).
struct AggregateRow {
  int n = 0;
  int k = 0;
  int trials = 0;
  std::uint64_t base_seed = 0;
  std::string mode;
  double h = 0.0;
  double frac_g_star = 0.0;
  double frac_g_clique = 0.0;
  double frac_other = 0.0;
  double mean_tau_nu = 0.0, std_tau_nu = 0.0;
  double mean_tau_iso = 0.0, std_tau_iso = 0.0;
  int tau_iso_set_count = 0;
  double mean_final_edges = 0.0, std_final_edges = 0.0;
  double mean_isolated = 0.0, std_isolated = 0.0;
  double mean_deg_n_minus_1 = 0.0, std_deg_n_minus_1 = 0.0;
  double mean_independence = 0.0, std_independence = 0.0;
  int independence_exact_count = 0;
  double frac_tau_nu_le_2k = 0.0;
  double frac_tau_iso_in_window = 0.0;
  std::int64_t t_minus = -1;
  std::int64_t t_plus = -1;
  double frac_lemma24_hyp = 0.0;
  std::int64_t invariant_violations = 0;
};

AggregateRow aggregate_trials(const ExperimentConfig& cfg,
                              const std::vector<TrialRecord>& records);

// NaN-tolerant field-by-field comparison (NaN matches NaN).
bool reports_equivalent(const AggregateRow& a, const AggregateRow& b);
bool reports_equivalent(const std::vector<AggregateRow>& a,
                        const std::vector<AggregateRow>& b);

// CSV: fixed header, one row per config, doubles rendered with %.6g.
std::string csv_header();
std::string to_csv(const std::vector<AggregateRow>& rows);
// JSON: array of objects, full double precision, NaN fields omitted.
std::string to_json(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> parse_json_report(const std::string& text);

// Config files: flat key=value lines ('#' comments), one experiment block
// per blank-line-separated paragraph. Keys: n, k, trials, seed, mode, h,
// independence_budget. n and k are required per block.
std::vector<ExperimentConfig> parse_config_stream(std::istream& in,
                                                  const std::string& origin);
std::vector<ExperimentConfig> parse_config_file(const std::string& path);

// Relative output paths are placed under $KMF_OUTPUT_DIR when it is set.
std::string resolve_output_path(const std::string& path);

}  // namespace kmf
