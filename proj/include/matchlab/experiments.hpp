#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "matchlab/config.hpp"
#include "matchlab/market_sim.hpp"
#include "matchlab/results.hpp"

namespace matchlab::exp {

/// serial is the reference path; parallel fans replications out over
/// OpenMP threads and must produce the identical table.
enum class Execution { serial, parallel };

/// Sweeps m x beta x gamma; each (cell, replication) task runs every mode
/// from the same random stream so mono and poly share values and
/// preferences. Rows come out in task order, independent of scheduling.
/// Dispatches to run_correlated_suite when config.suite is correlated.
ResultTable run_experiment(const ExperimentConfig& config, Execution execution = Execution::parallel);

/// beta x gamma grid under random-utility preferences. Per task and mode it
/// runs full access (rows labelled `<id>`) and kappa-limited access under
/// both strategies (`<id>/topk`, `<id>/randomk`), plus per-replication
/// `welfare_drop` and `access_gap` rows for the limited variants.
ResultTable run_correlated_suite(const ExperimentConfig& config, Execution execution = Execution::parallel);

/// Metric rows for one simulated market, appended to `out`.
struct RowContext {
  std::string experiment;
  int replication = 0;
  Mode mode = Mode::mono;
  int m = 0;
  double beta = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};
void append_metric_rows(const RowContext& ctx, const sim::MatchMetrics& metrics, bool per_k, ResultTable& out);

/// Match rate of applicants with k > K/2 minus those with k <= K/2; NaN if
/// either half is empty.
double access_gap(const sim::MatchMetrics& metrics, int max_k);

struct RunArtifacts {
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::size_t rows = 0;
  std::string csv_hash;
};

/// Writes `<id>.csv` and `<id>.manifest.json` under out_dir (created if
/// needed). Throws std::runtime_error on I/O failure.
RunArtifacts write_run(const ExperimentConfig& config, const ResultTable& table,
                       const std::filesystem::path& out_dir);

/// Resolves the output directory: config.out, else $MATCHLAB_OUT, else "results".
std::filesystem::path output_directory(const ExperimentConfig& config);

const char* library_version();

}  // namespace matchlab::exp
