#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kmf/errors.hpp"
#include "kmf/harness.hpp"

namespace {

std::string fmt_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

int cmd_run(int n, const std::string& k_spec, std::uint64_t seed,
            bool charges, const std::string& trace_path,
            const std::string& dump_path, std::uint64_t budget) {
  int k = kmf::resolve_k(n, k_spec);
  kmf::ProcessOptions opts;
  opts.record_trace = !trace_path.empty();
  opts.charges = charges || !dump_path.empty();
  opts.independence_node_budget = budget;
  kmf::TrialRecord rec = kmf::run_process(n, k, seed, opts);

  std::ostringstream out;
  out << "classification " << kmf::to_string(rec.classification) << '\n';
  out << "n " << rec.n << '\n';
  out << "k " << rec.k << '\n';
  out << "seed " << rec.seed << '\n';
  out << "steps " << rec.steps << '\n';
  for (const auto& [key, value] : rec.diagnostics_map())
    out << key << ' ' << fmt_number(value) << '\n';
  if (rec.charges) {
    const kmf::ChargeSummary& cs = *rec.charges;
    out << "lemma24_hypothesis " << (cs.lemma24_hypothesis ? 1 : 0) << '\n';
    out << "csub_refines_c " << (cs.csub_refines_c ? 1 : 0) << '\n';
    out << "c_prime_refines_f_prime " << (cs.c_prime_refines_f_prime ? 1 : 0)
        << '\n';
    out << "d_bar_refines_f_prime " << (cs.d_bar_refines_f_prime ? 1 : 0)
        << '\n';
    out << "neg_neg_cross_root_accepts " << cs.neg_neg_cross_root_accepts
        << '\n';
    out << "tau_c_gt_tau_b " << cs.tau_c_gt_tau_b << '\n';
  }
  std::cout << out.str();

  if (!trace_path.empty()) {
    kmf::EdgePermutation perm = kmf::random_edge_permutation(n, seed);
    kmf::TraceData td;
    td.n = n;
    td.k = k;
    td.seed = seed;
    td.order = perm.order;
    td.accepted = rec.trace;
    std::ostringstream ts;
    kmf::write_trace(ts, td);
    write_text_file(kmf::resolve_output_path(trace_path), ts.str());
  }
  if (!dump_path.empty()) {
    if (!rec.charges)
      throw std::runtime_error(
          "charge dump unavailable: the matching never reached k-1");
    const kmf::ChargeSummary& cs = *rec.charges;
    std::ostringstream ds;
    for (int v = 0; v < rec.n; ++v)
      ds << v << ' ' << cs.charge[v] << ' ' << cs.root[v] << '\n';
    write_text_file(kmf::resolve_output_path(dump_path), ds.str());
  }
  return rec.invariant_violations == 0 ? 0 : 1;
}

int cmd_batch(const std::string& config_path, const kmf::ExperimentConfig& inline_cfg,
              bool inline_given, int threads, const std::string& output,
              const std::string& format) {
  if (format != "csv" && format != "json")
    throw std::invalid_argument("format must be csv or json");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  std::vector<kmf::ExperimentConfig> configs;
  if (!config_path.empty()) {
    if (inline_given)
      throw std::invalid_argument(
          "--config cannot be combined with inline experiment flags");
    configs = kmf::parse_config_file(config_path);
  } else {
    if (!inline_given)
      throw std::invalid_argument("either --config or --n/--k is required");
    configs.push_back(inline_cfg);
  }

  std::vector<kmf::AggregateRow> rows;
  for (const kmf::ExperimentConfig& cfg : configs) {
    std::vector<kmf::TrialRecord> records =
        threads > 1 ? kmf::run_trials_parallel(cfg, threads)
                    : kmf::run_trials_serial(cfg);
    rows.push_back(kmf::aggregate_trials(cfg, records));
  }

  std::string text = format == "csv" ? kmf::to_csv(rows) : kmf::to_json(rows);
  if (output.empty())
    std::cout << text;
  else
    write_text_file(kmf::resolve_output_path(output), text);

  std::int64_t violations = 0;
  for (const kmf::AggregateRow& r : rows) violations += r.invariant_violations;
  return violations == 0 ? 0 : 1;
}

int cmd_classify(const std::string& input, const std::string& k_spec) {
  kmf::Graph g = kmf::read_edge_list_file(input);
  int k = kmf::resolve_k(g.vertex_count(), k_spec);
  kmf::Classification cls = kmf::classify_extremal(g, k);
  std::cout << kmf::to_string(cls.label) << '\n';
  if (!cls.witness.empty()) {
    for (std::size_t i = 0; i < cls.witness.size(); ++i)
      std::cout << (i ? " " : "") << cls.witness[i];
    std::cout << '\n';
  }
  return 0;
}

// Replays a trace, re-deciding each offer with a from-scratch maximum
// matching on the candidate graph. Independent of the incremental engine;
// quadratic, intended for small traces.
int cmd_oracle_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  kmf::TraceData td = kmf::read_trace(in, path);
  kmf::Graph g(td.n);
  std::int64_t accepted = 0;
  for (std::size_t i = 0; i < td.order.size(); ++i) {
    kmf::Graph candidate = g;
    candidate.add_edge(td.order[i].u, td.order[i].v);
    bool expect = kmf::max_matching(candidate).size() <= td.k - 1;
    if (expect != (td.accepted[i] != 0)) {
      std::cout << "mismatch at step " << (i + 1) << ": trace says "
                << int(td.accepted[i]) << ", recomputation says "
                << (expect ? 1 : 0) << '\n';
      return 1;
    }
    if (expect) {
      g.add_edge(td.order[i].u, td.order[i].v);
      ++accepted;
    }
  }
  std::cout << "ok steps " << td.order.size() << " accepted " << accepted
            << '\n';
  return 0;
}

int cmd_oracle_graph(const std::string& input, const std::string& k_spec) {
  kmf::Graph g = kmf::read_edge_list_file(input);
  int k = kmf::resolve_k(g.vertex_count(), k_spec);
  int nu = kmf::max_matching(g).size();
  bool free_of_k = nu <= k - 1;
  bool saturated = false;
  if (free_of_k) saturated = kmf::is_saturated(g, k);
  std::cout << "n " << g.vertex_count() << '\n'
            << "m " << g.edge_count() << '\n'
            << "nu " << nu << '\n'
            << "k " << k << '\n'
            << "eg_bound " << kmf::erdos_gallai_bound(g.vertex_count(), k)
            << '\n'
            << "k_matching_free " << (free_of_k ? 1 : 0) << '\n'
            << "saturated " << (saturated ? 1 : 0) << '\n'
            << "classification "
            << kmf::to_string(kmf::classify_extremal(g, k).label) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random greedy k-matching-free graph process toolkit"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run one trial and print diagnostics");
  int run_n = 0;
  std::string run_k, run_trace, run_dump;
  std::uint64_t run_seed = 1, run_budget = kmf::kDefaultIndependenceNodeBudget;
  bool run_charges = false;
  run->add_option("--n", run_n, "vertex count")->required();
  run->add_option("--k", run_k, "k or schedule (sqrt, linear:c, clique:f)")
      ->required();
  run->add_option("--seed", run_seed, "random seed");
  run->add_flag("--charges", run_charges, "track charges after the freeze");
  run->add_option("--trace", run_trace, "write the offer trace to this file");
  run->add_option("--dump-charges", run_dump,
                  "write the final charge table to this file");
  run->add_option("--independence-budget", run_budget,
                  "search-node budget for the independence number");

  // batch
  auto* batch = app.add_subcommand("batch", "run experiment blocks and report");
  std::string batch_config, batch_output, batch_format = "csv";
  int batch_threads = 1;
  kmf::ExperimentConfig inline_cfg;
  auto* bn = batch->add_option("--n", inline_cfg.n, "vertex count");
  auto* bk = batch->add_option("--k", inline_cfg.k_spec, "k or schedule");
  batch->add_option("--trials", inline_cfg.trials, "trials per block");
  batch->add_option("--seed", inline_cfg.base_seed, "base seed");
  batch->add_option("--mode", inline_cfg.mode, "summary, trace or charges");
  batch->add_option("--window-h", inline_cfg.h, "isolation-window half-width");
  batch->add_option("--independence-budget",
                    inline_cfg.independence_node_budget,
                    "search-node budget for the independence number");
  batch->add_option("--config", batch_config, "config file of blocks");
  batch->add_option("--threads", batch_threads, "worker threads");
  batch->add_option("--output", batch_output, "output file (default stdout)");
  batch->add_option("--format", batch_format, "csv or json");

  // classify
  auto* classify = app.add_subcommand("classify", "label an edge-list graph");
  std::string cls_input, cls_k;
  classify->add_option("--input", cls_input, "edge-list file")->required();
  classify->add_option("--k", cls_k, "k or schedule")->required();

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "independent recomputation checks (small inputs)");
  std::string or_trace, or_input, or_k;
  oracle->add_option("--trace", or_trace, "replay and recheck a trace file");
  oracle->add_option("--input", or_input, "edge-list file to analyse");
  oracle->add_option("--k", or_k, "k or schedule (with --input)");

  // eg-bound
  auto* bound = app.add_subcommand(
      "eg-bound", "edge ceiling for graphs with no k disjoint edges");
  int bound_n = 0;
  std::string bound_k;
  bound->add_option("--n", bound_n, "vertex count")->required();
  bound->add_option("--k", bound_k, "k or schedule")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run)
      return cmd_run(run_n, run_k, run_seed, run_charges, run_trace, run_dump,
                     run_budget);
    if (*batch)
      return cmd_batch(batch_config, inline_cfg, *bn || *bk, batch_threads,
                       batch_output, batch_format);
    if (*classify) return cmd_classify(cls_input, cls_k);
    if (*oracle) {
      if (!or_trace.empty() && or_input.empty()) return cmd_oracle_trace(or_trace);
      if (or_trace.empty() && !or_input.empty() && !or_k.empty())
        return cmd_oracle_graph(or_input, or_k);
      throw std::invalid_argument(
          "oracle needs either --trace or --input with --k");
    }
    if (*bound) {
      std::cout << kmf::erdos_gallai_bound(
                       bound_n, kmf::resolve_k(bound_n, bound_k))
                << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
