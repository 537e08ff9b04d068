// Times the serial reference replication loop against the OpenMP fan-out on
// the same configuration and checks that both produce the same table.
#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "matchlab/experiments.hpp"

int main(int argc, char** argv) {
  using namespace matchlab;
  CLI::App app{"Serial vs parallel replication benchmark", "bench_replications"};
  int reps = 200;
  int threads = 0;
  std::string mode = "poly";
  app.add_option("--reps", reps, "Replications")->capture_default_str();
  app.add_option("--threads", threads, "Threads for the parallel run (0 = all)")->capture_default_str();
  app.add_option("--mode", mode, "mono | poly")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  exp::ExperimentConfig config;
  config.id = "bench";
  config.n = 1000;
  config.m = {25};
  config.capacity = 500;
  config.modes = {parse_mode(mode)};
  config.kappa = access::AccessDistribution::uniform(25);
  config.reps = reps;
  config.threads = threads;
  config.seed = 7;

  auto time = [&](exp::Execution execution) {
    const auto t0 = std::chrono::steady_clock::now();
    auto table = exp::run_experiment(config, execution);
    const auto t1 = std::chrono::steady_clock::now();
    return std::make_pair(std::move(table), std::chrono::duration<double>(t1 - t0).count());
  };

  const auto [serial, serial_s] = time(exp::Execution::serial);
  const auto [parallel, parallel_s] = time(exp::Execution::parallel);
  std::cout << "replications " << reps << "\n"
            << "serial   " << serial_s << " s\n"
            << "parallel " << parallel_s << " s\n"
            << "speedup  " << serial_s / parallel_s << "\n"
            << "tables " << (serial == parallel ? "identical" : "DIFFER") << "\n";
  return serial == parallel ? 0 : 1;
}
