#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "kmf/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"compare the serial and OpenMP batch runners"};
  kmf::ExperimentConfig cfg;
  cfg.n = 300;
  cfg.k_spec = "sqrt";
  cfg.trials = 40;
  cfg.base_seed = 1;
#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  app.add_option("--n", cfg.n, "vertex count");
  app.add_option("--k", cfg.k_spec, "k or schedule");
  app.add_option("--trials", cfg.trials, "trial count");
  app.add_option("--seed", cfg.base_seed, "base seed");
  app.add_option("--mode", cfg.mode, "summary, trace or charges");
  app.add_option("--threads", threads, "parallel worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    std::vector<kmf::TrialRecord> serial = kmf::run_trials_serial(cfg);
    auto t1 = clock::now();
    std::vector<kmf::TrialRecord> parallel =
        kmf::run_trials_parallel(cfg, threads);
    auto t2 = clock::now();

    double serial_s = std::chrono::duration<double>(t1 - t0).count();
    double parallel_s = std::chrono::duration<double>(t2 - t1).count();
    bool identical =
        serial == parallel &&
        kmf::reports_equivalent(kmf::aggregate_trials(cfg, serial),
                                kmf::aggregate_trials(cfg, parallel));

    std::cout << "n " << cfg.n << " k " << cfg.k_spec << " trials "
              << cfg.trials << " mode " << cfg.mode << '\n';
    std::cout << "serial_seconds " << serial_s << '\n';
    std::cout << "parallel_seconds " << parallel_s << " (threads " << threads
              << ")\n";
    if (parallel_s > 0)
      std::cout << "speedup " << serial_s / parallel_s << '\n';
    std::cout << "identical " << (identical ? "yes" : "no") << '\n';
    return identical ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
