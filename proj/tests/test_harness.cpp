#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "kmf/harness.hpp"

using namespace kmf;

TEST_CASE("k schedules resolve as documented") {
  CHECK(resolve_k(100, "sqrt") == 10);
  CHECK(resolve_k(99, "sqrt") == 9);
  CHECK(resolve_k(2, "sqrt") == 1);
  CHECK(resolve_k(10, "linear:0.5") == 5);
  CHECK(resolve_k(100, "linear:0.47") == 47);
  CHECK(resolve_k(1000, "clique:4") == 498);
  CHECK(resolve_k(1000, "clique:5") == 497);
  CHECK(resolve_k(9, "clique:0") == 4);
  CHECK(resolve_k(50, "7") == 7);
  CHECK(resolve_k(2, "3") == 3);  // k = n + 1 is the last sensible value

  CHECK_THROWS_AS(resolve_k(1, "sqrt"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(10, "linear:0"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(10, "linear:x"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(10, "clique:-1"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(10, "clique:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(10, "clique:20"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(10, "foo"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(10, "0"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_k(2, "4"), std::invalid_argument);
}

TEST_CASE("trial seeds never collide") {
  for (std::uint64_t base : {0ull, 1ull, 0xDEADBEEFull}) {
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100000; ++i)
      CHECK(seen.insert(mix_seed(base, i)).second);
  }
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.n = 20;
  cfg.k_spec = "4";
  validate_config(cfg);
  cfg.mode = "charges";
  validate_config(cfg);

  auto bad = cfg;
  bad.n = 1;
  CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
  bad = cfg;
  bad.n = kMaxPermutationVertices + 1;
  CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
  bad = cfg;
  bad.k_spec = "0";
  CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
  bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
  bad = cfg;
  bad.mode = "verbose";
  CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
  bad = cfg;
  bad.h = 0.0;
  CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
}

TEST_CASE("parallel runs reproduce the serial records exactly") {
  ExperimentConfig cfg;
  cfg.n = 24;
  cfg.k_spec = "sqrt";
  cfg.trials = 6;
  cfg.base_seed = 5;
  for (const char* mode : {"summary", "charges", "trace"}) {
    cfg.mode = mode;
    auto serial = run_trials_serial(cfg);
    REQUIRE(serial.size() == 6);
    for (int threads : {1, 4}) {
      auto parallel = run_trials_parallel(cfg, threads);
      CHECK(serial == parallel);
      CHECK(reports_equivalent(aggregate_trials(cfg, serial),
                               aggregate_trials(cfg, parallel)));
    }
  }
  CHECK_THROWS_AS(run_trials_parallel(cfg, 0), std::invalid_argument);
}

namespace {

ExperimentConfig sample_cfg() {
  ExperimentConfig cfg;
  cfg.n = 20;
  cfg.k_spec = "4";
  cfg.trials = 3;
  cfg.base_seed = 9;
  cfg.h = 2.0;
  return cfg;
}

std::vector<TrialRecord> sample_records(bool with_charges) {
  TrialRecord r1, r2, r3;
  r1.tau_nu = 7;
  r1.tau_iso = 10;
  r1.final_edges = 50;
  r1.isolated_final = 13;
  r1.deg_n_minus_1_final = 3;
  r1.classification = ClassLabel::kGStar;
  r1.independence_value = 16;
  r1.independence_exact = true;

  r2.tau_nu = 9;
  r2.tau_iso = -1;
  r2.final_edges = 52;
  r2.isolated_final = 12;
  r2.deg_n_minus_1_final = 3;
  r2.classification = ClassLabel::kGClique;
  r2.independence_value = 15;
  r2.independence_exact = false;

  r3.tau_nu = -1;
  r3.tau_iso = 30;
  r3.final_edges = 54;
  r3.isolated_final = 11;
  r3.deg_n_minus_1_final = 4;
  r3.classification = ClassLabel::kOther;
  r3.independence_value = 14;
  r3.independence_exact = true;
  r3.invariant_violations = 2;

  if (with_charges) {
    r1.charges.emplace();
    r1.charges->lemma24_hypothesis = true;
    r2.charges.emplace();
    r2.charges->lemma24_hypothesis = false;
  }
  return {r1, r2, r3};
}

}  // namespace

TEST_CASE("aggregation arithmetic on handcrafted records") {
  ExperimentConfig cfg = sample_cfg();
  AggregateRow row = aggregate_trials(cfg, sample_records(true));

  CHECK(row.n == 20);
  CHECK(row.k == 4);
  CHECK(row.trials == 3);
  CHECK(row.frac_g_star == doctest::Approx(1.0 / 3));
  CHECK(row.frac_g_clique == doctest::Approx(1.0 / 3));
  CHECK(row.frac_other == doctest::Approx(1.0 / 3));
  CHECK(row.mean_tau_nu == doctest::Approx(8.0));
  CHECK(row.std_tau_nu == doctest::Approx(std::sqrt(2.0)));
  CHECK(row.mean_tau_iso == doctest::Approx(20.0));
  CHECK(row.std_tau_iso == doctest::Approx(std::sqrt(200.0)));
  CHECK(row.tau_iso_set_count == 2);
  CHECK(row.mean_final_edges == doctest::Approx(52.0));
  CHECK(row.std_final_edges == doctest::Approx(2.0));
  CHECK(row.mean_isolated == doctest::Approx(12.0));
  CHECK(row.std_isolated == doctest::Approx(1.0));
  CHECK(row.mean_deg_n_minus_1 == doctest::Approx(10.0 / 3));
  CHECK(row.std_deg_n_minus_1 == doctest::Approx(std::sqrt(1.0 / 3)));
  CHECK(row.mean_independence == doctest::Approx(15.0));
  CHECK(row.std_independence == doctest::Approx(1.0));
  CHECK(row.independence_exact_count == 2);
  // 2k = 8: only the tau_nu = 7 run qualifies, over all three trials.
  CHECK(row.frac_tau_nu_le_2k == doctest::Approx(1.0 / 3));
  // Window for f = 12, h = 2 is [0, 25]: hit by 10, missed by -1 and 30.
  CHECK(row.t_minus == 0);
  CHECK(row.t_plus == 25);
  CHECK(row.frac_tau_iso_in_window == doctest::Approx(1.0 / 3));
  CHECK(row.frac_lemma24_hyp == doctest::Approx(1.0 / 3));
  CHECK(row.invariant_violations == 2);

  // Without charge summaries the hypothesis fraction is undefined.
  AggregateRow plain = aggregate_trials(cfg, sample_records(false));
  CHECK(std::isnan(plain.frac_lemma24_hyp));

  // A single record with no hitting times.
  TrialRecord lone;
  lone.tau_nu = -1;
  lone.tau_iso = -1;
  AggregateRow single = aggregate_trials(cfg, {lone});
  CHECK(std::isnan(single.mean_tau_nu));
  CHECK(std::isnan(single.std_tau_nu));
  CHECK(single.tau_iso_set_count == 0);
  CHECK(single.frac_tau_nu_le_2k == 0.0);

  // 2k > n: no isolation target, so no window either.
  ExperimentConfig tight = cfg;
  tight.n = 10;
  tight.k_spec = "6";
  AggregateRow no_window = aggregate_trials(tight, {lone});
  CHECK(no_window.t_minus == -1);
  CHECK(no_window.t_plus == -1);
  CHECK(std::isnan(no_window.frac_tau_iso_in_window));

  CHECK_THROWS_AS(aggregate_trials(cfg, {}), std::invalid_argument);
}

TEST_CASE("csv output is stable") {
  AggregateRow row = aggregate_trials(sample_cfg(), sample_records(true));
  std::string csv = to_csv({row});
  std::string expect_header =
      "n,k,trials,base_seed,mode,h,frac_g_star,frac_g_clique,frac_other,"
      "mean_tau_nu,std_tau_nu,mean_tau_iso,std_tau_iso,tau_iso_set_count,"
      "mean_final_edges,std_final_edges,mean_isolated,std_isolated,"
      "mean_deg_n_minus_1,std_deg_n_minus_1,mean_independence,"
      "std_independence,independence_exact_count,frac_tau_nu_le_2k,"
      "frac_tau_iso_in_window,t_minus,t_plus,frac_lemma24_hyp,"
      "invariant_violations";
  CHECK(csv_header() == expect_header);
  std::string expect_row =
      "20,4,3,9,summary,2,0.333333,0.333333,0.333333,8,1.41421,20,14.1421,2,"
      "52,2,12,1,3.33333,0.57735,15,1,2,0.333333,0.333333,0,25,0.333333,2";
  CHECK(csv == expect_header + "\n" + expect_row + "\n");

  // Undefined fields render as nan.
  AggregateRow plain = aggregate_trials(sample_cfg(), sample_records(false));
  CHECK(to_csv({plain}).find(",nan,") != std::string::npos);
}

TEST_CASE("json reports round trip, omitting undefined fields") {
  std::vector<AggregateRow> rows = {
      aggregate_trials(sample_cfg(), sample_records(true)),
      aggregate_trials(sample_cfg(), sample_records(false))};
  std::string text = to_json(rows);
  CHECK(text.find("nan") == std::string::npos);
  CHECK(text.find("frac_lemma24_hyp") != std::string::npos);  // first row only

  std::vector<AggregateRow> back = parse_json_report(text);
  CHECK(reports_equivalent(rows, back));

  CHECK_THROWS_AS(parse_json_report("not json"), std::runtime_error);
  CHECK_THROWS_AS(parse_json_report("{}"), std::runtime_error);
}

TEST_CASE("config files parse into experiment blocks") {
  std::istringstream in(
      "# comment only\n"
      "n = 20\n"
      "k = sqrt\n"
      "trials= 3\n"
      "seed =9\n"
      "\n"
      "n=10  # inline comment\n"
      "k=linear:0.3\n"
      "mode=charges\n"
      "h=2.5\n"
      "independence_budget=1000\n");
  auto configs = parse_config_stream(in, "cfg");
  REQUIRE(configs.size() == 2);
  CHECK(configs[0].n == 20);
  CHECK(configs[0].k_spec == "sqrt");
  CHECK(configs[0].trials == 3);
  CHECK(configs[0].base_seed == 9);
  CHECK(configs[0].mode == "summary");
  CHECK(configs[0].h == doctest::Approx(1.0));
  CHECK(configs[1].n == 10);
  CHECK(configs[1].k_spec == "linear:0.3");
  CHECK(configs[1].trials == 1);
  CHECK(configs[1].mode == "charges");
  CHECK(configs[1].h == doctest::Approx(2.5));
  CHECK(configs[1].independence_node_budget == 1000);

  std::istringstream empty("# nothing here\n\n");
  CHECK(parse_config_stream(empty, "cfg").empty());
}

TEST_CASE("config parsing errors carry file positions") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_config_stream(in, "cfg");
      FAIL_CHECK("expected a config error for: " << text);
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
    }
  };
  fails_with("n=5\nbogus=1\n", "cfg:2: unknown key 'bogus'");
  fails_with("n=5\n", "block needs both n and k");
  fails_with("hello\n", "cfg:1: expected key=value");
  fails_with("n=abc\nk=2\n", "cfg:1: invalid value for n");
  fails_with("n=5\nk=2\ntrials=0\n", "invalid value for trials");
  fails_with("n=5\nk=2\nmode=verbose\n", "mode must be");
  fails_with("n=5\nk=linear:0\n", "k spec");
  fails_with("n=5\nk=2\nh=zero\n", "invalid value for h");

  CHECK_THROWS_AS(parse_config_file("/nonexistent/kmf.cfg"),
                  std::runtime_error);
}

TEST_CASE("relative output paths honor the output directory variable") {
  unsetenv("KMF_OUTPUT_DIR");
  CHECK(resolve_output_path("out.csv") == "out.csv");
  CHECK(resolve_output_path("") == "");
  setenv("KMF_OUTPUT_DIR", "/tmp/kmf-out", 1);
  CHECK(resolve_output_path("out.csv") == "/tmp/kmf-out/out.csv");
  CHECK(resolve_output_path("a/b.json") == "/tmp/kmf-out/a/b.json");
  CHECK(resolve_output_path("/abs/path.csv") == "/abs/path.csv");
  unsetenv("KMF_OUTPUT_DIR");
  CHECK(resolve_output_path("out.csv") == "out.csv");
}
