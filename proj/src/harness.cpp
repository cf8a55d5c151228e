#include "kmf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "kmf/errors.hpp"

namespace kmf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool parse_full_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_full_int64(const std::string& s, std::int64_t& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_full_uint64(const std::string& s, std::uint64_t& out) {
  try {
    std::size_t pos = 0;
    out = std::stoull(s, &pos);
    return pos == s.size() && s.find('-') == std::string::npos;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int resolve_k(int n, const std::string& k_spec) {
  if (n < 2) throw std::invalid_argument("resolve_k: n must be >= 2");
  auto fail = [&](const std::string& why) -> int {
    throw std::invalid_argument("k spec '" + k_spec + "': " + why);
  };
  std::int64_t k;
  if (k_spec == "sqrt") {
    k = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(n))));
  } else if (k_spec.rfind("linear:", 0) == 0) {
    double c;
    if (!parse_full_double(k_spec.substr(7), c) || !(c > 0))
      return fail("linear slope must be a number > 0");
    k = static_cast<std::int64_t>(std::floor(c * n));
  } else if (k_spec.rfind("clique:", 0) == 0) {
    std::int64_t f;
    if (!parse_full_int64(k_spec.substr(7), f) || f < 0)
      return fail("clique excess must be an integer >= 0");
    k = static_cast<std::int64_t>(
        std::floor((n - static_cast<double>(f)) / 2.0));
  } else {
    if (!parse_full_int64(k_spec, k))
      return fail("must be sqrt, linear:<c>, clique:<f> or an integer");
  }
  if (k < 1) return fail("resolves to k < 1");
  if (k > n + 1) return fail("resolves to k > n + 1");
  return static_cast<int>(k);
}

std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
  // splitmix64 step: injective in trial_index for any fixed base.
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (trial_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 2 || cfg.n > kMaxPermutationVertices)
    throw std::invalid_argument("config: n out of range");
  resolve_k(cfg.n, cfg.k_spec);
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.mode != "summary" && cfg.mode != "trace" && cfg.mode != "charges")
    throw std::invalid_argument(
        "config: mode must be summary, trace or charges");
  if (!(cfg.h > 0)) throw std::invalid_argument("config: h must be > 0");
}

namespace {

ProcessOptions options_for(const ExperimentConfig& cfg) {
  ProcessOptions opts;
  opts.record_trace = cfg.mode == "trace";
  opts.charges = cfg.mode == "charges";
  opts.independence_node_budget = cfg.independence_node_budget;
  return opts;
}

}  // namespace

std::vector<TrialRecord> run_trials_serial(const ExperimentConfig& cfg) {
  validate_config(cfg);
  int k = resolve_k(cfg.n, cfg.k_spec);
  ProcessOptions opts = options_for(cfg);
  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
  for (int i = 0; i < cfg.trials; ++i)
    records[static_cast<std::size_t>(i)] = run_process(
        cfg.n, k, mix_seed(cfg.base_seed, static_cast<std::uint64_t>(i)), opts);
  return records;
}

std::vector<TrialRecord> run_trials_parallel(const ExperimentConfig& cfg,
                                             int threads) {
  validate_config(cfg);
  if (threads < 1)
    throw std::invalid_argument("run_trials_parallel: threads must be >= 1");
  int k = resolve_k(cfg.n, cfg.k_spec);
  ProcessOptions opts = options_for(cfg);
  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
  std::exception_ptr error = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int i = 0; i < cfg.trials; ++i) {
    try {
      records[static_cast<std::size_t>(i)] =
          run_process(cfg.n, k,
                      mix_seed(cfg.base_seed, static_cast<std::uint64_t>(i)),
                      opts);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return records;
}

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return kNaN;
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.empty()) return kNaN;
  if (xs.size() == 1) return 0.0;
  double mu = mean_of(xs);
  double acc = 0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

AggregateRow aggregate_trials(const ExperimentConfig& cfg,
                              const std::vector<TrialRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("aggregate_trials: no records");
  AggregateRow row;
  row.n = cfg.n;
  row.k = resolve_k(cfg.n, cfg.k_spec);
  row.trials = static_cast<int>(records.size());
  row.base_seed = cfg.base_seed;
  row.mode = cfg.mode;
  row.h = cfg.h;

  double trials = static_cast<double>(records.size());
  int g_star = 0, g_clique = 0, other = 0;
  std::vector<double> tau_nu, tau_iso, edges, isolated, full_deg, indep;
  int exact = 0, tau_nu_le_2k = 0, charges_present = 0, hyp = 0;
  for (const TrialRecord& r : records) {
    switch (r.classification) {
      case ClassLabel::kGStar:
        ++g_star;
        break;
      case ClassLabel::kGClique:
        ++g_clique;
        break;
      default:
        ++other;
    }
    if (r.tau_nu >= 0) {
      tau_nu.push_back(static_cast<double>(r.tau_nu));
      if (r.tau_nu <= 2 * static_cast<std::int64_t>(row.k)) ++tau_nu_le_2k;
    }
    if (r.tau_iso >= 0) tau_iso.push_back(static_cast<double>(r.tau_iso));
    edges.push_back(static_cast<double>(r.final_edges));
    isolated.push_back(static_cast<double>(r.isolated_final));
    full_deg.push_back(static_cast<double>(r.deg_n_minus_1_final));
    indep.push_back(r.independence_value);
    if (r.independence_exact) ++exact;
    if (r.charges) {
      ++charges_present;
      if (r.charges->lemma24_hypothesis) ++hyp;
    }
    row.invariant_violations += r.invariant_violations;
  }
  row.frac_g_star = g_star / trials;
  row.frac_g_clique = g_clique / trials;
  row.frac_other = other / trials;
  row.mean_tau_nu = mean_of(tau_nu);
  row.std_tau_nu = std_of(tau_nu);
  row.mean_tau_iso = mean_of(tau_iso);
  row.std_tau_iso = std_of(tau_iso);
  row.tau_iso_set_count = static_cast<int>(tau_iso.size());
  row.mean_final_edges = mean_of(edges);
  row.std_final_edges = std_of(edges);
  row.mean_isolated = mean_of(isolated);
  row.std_isolated = std_of(isolated);
  row.mean_deg_n_minus_1 = mean_of(full_deg);
  row.std_deg_n_minus_1 = std_of(full_deg);
  row.mean_independence = mean_of(indep);
  row.std_independence = std_of(indep);
  row.independence_exact_count = exact;
  row.frac_tau_nu_le_2k = tau_nu_le_2k / trials;

  int f = cfg.n - 2 * row.k;
  if (f >= 0) {
    HittingWindow w = hitting_prediction(cfg.n, f, cfg.h);
    row.t_minus = w.t_minus;
    row.t_plus = w.t_plus;
    int inside = 0;
    for (const TrialRecord& r : records)
      if (r.tau_iso >= w.t_minus && r.tau_iso <= w.t_plus) ++inside;
    row.frac_tau_iso_in_window = inside / trials;
  } else {
    row.t_minus = -1;
    row.t_plus = -1;
    row.frac_tau_iso_in_window = kNaN;
  }

  row.frac_lemma24_hyp = charges_present > 0 ? hyp / trials : kNaN;
  return row;
}

namespace {

bool same_double(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

}  // namespace

bool reports_equivalent(const AggregateRow& a, const AggregateRow& b) {
  return a.n == b.n && a.k == b.k && a.trials == b.trials &&
         a.base_seed == b.base_seed && a.mode == b.mode &&
         same_double(a.h, b.h) && same_double(a.frac_g_star, b.frac_g_star) &&
         same_double(a.frac_g_clique, b.frac_g_clique) &&
         same_double(a.frac_other, b.frac_other) &&
         same_double(a.mean_tau_nu, b.mean_tau_nu) &&
         same_double(a.std_tau_nu, b.std_tau_nu) &&
         same_double(a.mean_tau_iso, b.mean_tau_iso) &&
         same_double(a.std_tau_iso, b.std_tau_iso) &&
         a.tau_iso_set_count == b.tau_iso_set_count &&
         same_double(a.mean_final_edges, b.mean_final_edges) &&
         same_double(a.std_final_edges, b.std_final_edges) &&
         same_double(a.mean_isolated, b.mean_isolated) &&
         same_double(a.std_isolated, b.std_isolated) &&
         same_double(a.mean_deg_n_minus_1, b.mean_deg_n_minus_1) &&
         same_double(a.std_deg_n_minus_1, b.std_deg_n_minus_1) &&
         same_double(a.mean_independence, b.mean_independence) &&
         same_double(a.std_independence, b.std_independence) &&
         a.independence_exact_count == b.independence_exact_count &&
         same_double(a.frac_tau_nu_le_2k, b.frac_tau_nu_le_2k) &&
         same_double(a.frac_tau_iso_in_window, b.frac_tau_iso_in_window) &&
         a.t_minus == b.t_minus && a.t_plus == b.t_plus &&
         same_double(a.frac_lemma24_hyp, b.frac_lemma24_hyp) &&
         a.invariant_violations == b.invariant_violations;
}

bool reports_equivalent(const std::vector<AggregateRow>& a,
                        const std::vector<AggregateRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!reports_equivalent(a[i], b[i])) return false;
  return true;
}

namespace {

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "n,k,trials,base_seed,mode,h,frac_g_star,frac_g_clique,frac_other,"
         "mean_tau_nu,std_tau_nu,mean_tau_iso,std_tau_iso,tau_iso_set_count,"
         "mean_final_edges,std_final_edges,mean_isolated,std_isolated,"
         "mean_deg_n_minus_1,std_deg_n_minus_1,mean_independence,"
         "std_independence,independence_exact_count,frac_tau_nu_le_2k,"
         "frac_tau_iso_in_window,t_minus,t_plus,frac_lemma24_hyp,"
         "invariant_violations";
}

std::string to_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << csv_header() << '\n';
  for (const AggregateRow& r : rows) {
    out << r.n << ',' << r.k << ',' << r.trials << ',' << r.base_seed << ','
        << r.mode << ',' << fmt_g(r.h) << ',' << fmt_g(r.frac_g_star) << ','
        << fmt_g(r.frac_g_clique) << ',' << fmt_g(r.frac_other) << ','
        << fmt_g(r.mean_tau_nu) << ',' << fmt_g(r.std_tau_nu) << ','
        << fmt_g(r.mean_tau_iso) << ',' << fmt_g(r.std_tau_iso) << ','
        << r.tau_iso_set_count << ',' << fmt_g(r.mean_final_edges) << ','
        << fmt_g(r.std_final_edges) << ',' << fmt_g(r.mean_isolated) << ','
        << fmt_g(r.std_isolated) << ',' << fmt_g(r.mean_deg_n_minus_1) << ','
        << fmt_g(r.std_deg_n_minus_1) << ',' << fmt_g(r.mean_independence)
        << ',' << fmt_g(r.std_independence) << ','
        << r.independence_exact_count << ',' << fmt_g(r.frac_tau_nu_le_2k)
        << ',' << fmt_g(r.frac_tau_iso_in_window) << ',' << r.t_minus << ','
        << r.t_plus << ',' << fmt_g(r.frac_lemma24_hyp) << ','
        << r.invariant_violations << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<AggregateRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const AggregateRow& r : rows) {
    nlohmann::json o;
    o["n"] = r.n;
    o["k"] = r.k;
    o["trials"] = r.trials;
    o["base_seed"] = r.base_seed;
    o["mode"] = r.mode;
    auto put = [&](const char* key, double x) {
      if (!std::isnan(x)) o[key] = x;
    };
    put("h", r.h);
    put("frac_g_star", r.frac_g_star);
    put("frac_g_clique", r.frac_g_clique);
    put("frac_other", r.frac_other);
    put("mean_tau_nu", r.mean_tau_nu);
    put("std_tau_nu", r.std_tau_nu);
    put("mean_tau_iso", r.mean_tau_iso);
    put("std_tau_iso", r.std_tau_iso);
    o["tau_iso_set_count"] = r.tau_iso_set_count;
    put("mean_final_edges", r.mean_final_edges);
    put("std_final_edges", r.std_final_edges);
    put("mean_isolated", r.mean_isolated);
    put("std_isolated", r.std_isolated);
    put("mean_deg_n_minus_1", r.mean_deg_n_minus_1);
    put("std_deg_n_minus_1", r.std_deg_n_minus_1);
    put("mean_independence", r.mean_independence);
    put("std_independence", r.std_independence);
    o["independence_exact_count"] = r.independence_exact_count;
    put("frac_tau_nu_le_2k", r.frac_tau_nu_le_2k);
    put("frac_tau_iso_in_window", r.frac_tau_iso_in_window);
    o["t_minus"] = r.t_minus;
    o["t_plus"] = r.t_plus;
    put("frac_lemma24_hyp", r.frac_lemma24_hyp);
    o["invariant_violations"] = r.invariant_violations;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<AggregateRow> parse_json_report(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("json report: ") + e.what());
  }
  if (!arr.is_array()) throw std::runtime_error("json report: expected array");
  std::vector<AggregateRow> rows;
  for (const nlohmann::json& o : arr) {
    AggregateRow r;
    auto num = [&](const char* key) -> double {
      return o.contains(key) ? o.at(key).get<double>() : kNaN;
    };
    r.n = o.at("n").get<int>();
    r.k = o.at("k").get<int>();
    r.trials = o.at("trials").get<int>();
    r.base_seed = o.at("base_seed").get<std::uint64_t>();
    r.mode = o.at("mode").get<std::string>();
    r.h = num("h");
    r.frac_g_star = num("frac_g_star");
    r.frac_g_clique = num("frac_g_clique");
    r.frac_other = num("frac_other");
    r.mean_tau_nu = num("mean_tau_nu");
    r.std_tau_nu = num("std_tau_nu");
    r.mean_tau_iso = num("mean_tau_iso");
    r.std_tau_iso = num("std_tau_iso");
    r.tau_iso_set_count = o.at("tau_iso_set_count").get<int>();
    r.mean_final_edges = num("mean_final_edges");
    r.std_final_edges = num("std_final_edges");
    r.mean_isolated = num("mean_isolated");
    r.std_isolated = num("std_isolated");
    r.mean_deg_n_minus_1 = num("mean_deg_n_minus_1");
    r.std_deg_n_minus_1 = num("std_deg_n_minus_1");
    r.mean_independence = num("mean_independence");
    r.std_independence = num("std_independence");
    r.independence_exact_count = o.at("independence_exact_count").get<int>();
    r.frac_tau_nu_le_2k = num("frac_tau_nu_le_2k");
    r.frac_tau_iso_in_window = num("frac_tau_iso_in_window");
    r.t_minus = o.at("t_minus").get<std::int64_t>();
    r.t_plus = o.at("t_plus").get<std::int64_t>();
    r.frac_lemma24_hyp = num("frac_lemma24_hyp");
    r.invariant_violations = o.at("invariant_violations").get<std::int64_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void config_error(const std::string& origin, int line,
                               const std::string& msg) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " +
                              msg);
}

}  // namespace

std::vector<ExperimentConfig> parse_config_stream(std::istream& in,
                                                  const std::string& origin) {
  std::vector<ExperimentConfig> out;
  ExperimentConfig cur;
  bool any_key = false, n_set = false, k_set = false;
  int lineno = 0;

  auto flush = [&](int at_line) {
    if (!any_key) return;
    if (!n_set || !k_set)
      config_error(origin, at_line, "block needs both n and k");
    try {
      validate_config(cur);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ": " + e.what());
    }
    out.push_back(cur);
    cur = ExperimentConfig{};
    any_key = n_set = k_set = false;
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) {
      flush(lineno);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      config_error(origin, lineno, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      config_error(origin, lineno, "expected key=value");
    std::int64_t iv;
    std::uint64_t uv;
    double dv;
    if (key == "n") {
      if (!parse_full_int64(value, iv) || iv < 2)
        config_error(origin, lineno, "invalid value for n");
      cur.n = static_cast<int>(iv);
      n_set = true;
    } else if (key == "k") {
      cur.k_spec = value;
      k_set = true;
    } else if (key == "trials") {
      if (!parse_full_int64(value, iv) || iv < 1)
        config_error(origin, lineno, "invalid value for trials");
      cur.trials = static_cast<int>(iv);
    } else if (key == "seed") {
      if (!parse_full_uint64(value, uv))
        config_error(origin, lineno, "invalid value for seed");
      cur.base_seed = uv;
    } else if (key == "mode") {
      cur.mode = value;
    } else if (key == "h") {
      if (!parse_full_double(value, dv))
        config_error(origin, lineno, "invalid value for h");
      cur.h = dv;
    } else if (key == "independence_budget") {
      if (!parse_full_uint64(value, uv))
        config_error(origin, lineno, "invalid value for independence_budget");
      cur.independence_node_budget = uv;
    } else {
      config_error(origin, lineno, "unknown key '" + key + "'");
    }
    any_key = true;
  }
  flush(lineno + 1);
  return out;
}

std::vector<ExperimentConfig> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return parse_config_stream(in, path);
}

std::string resolve_output_path(const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  const char* dir = std::getenv("KMF_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  return (std::filesystem::path(dir) / p).string();
}

}  // namespace kmf
