#include "matchlab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include <omp.h>

#include <json.hpp>

#ifndef MATCHLAB_VERSION
#define MATCHLAB_VERSION "0.0.0"
#endif

namespace matchlab::exp {

namespace {

// Runs count independent tasks, each returning its own rows, and
// concatenates the rows in task order.
template <typename Task, typename Describe>
ResultTable run_tasks(std::size_t count, Execution execution, int threads, Task&& task, Describe&& describe) {
  std::vector<ResultTable> parts(count);
  std::vector<std::exception_ptr> errors(count);
  auto run_one = [&](std::size_t i) {
    try {
      parts[i] = task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (execution == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) run_one(i);
  } else {
    const int workers = threads > 0 ? threads : omp_get_max_threads();
    const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::int64_t i = 0; i < total; ++i) run_one(static_cast<std::size_t>(i));
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error(describe(i) + ": " + e.what());
    }
  }

  ResultTable table;
  std::size_t rows = 0;
  for (const auto& p : parts) rows += p.size();
  table.reserve(rows);
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(table));
  return table;
}

prefs::PreferenceModel preference_model(const ExperimentConfig& c, double beta, double gamma) {
  if (c.preferences == prefs::PreferenceKind::uniform) return prefs::PreferenceModel::uniform();
  return prefs::PreferenceModel::random_utility(beta, gamma);
}

sim::MatchMetrics simulate_once(const sim::FiniteMarketSpec& spec, int n, const prefs::PreferenceModel& model,
                                Rng rng, int bins) {
  const auto market = sim::generate_market(spec, n, model, rng);
  const auto matching = sim::deferred_acceptance(market);
  return sim::compute_metrics(market, matching, bins);
}

struct Cell {
  int m;
  double beta;
  double gamma;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

const char* library_version() { return MATCHLAB_VERSION; }

double access_gap(const sim::MatchMetrics& metrics, int max_k) {
  int lo_n = 0, lo_matched = 0, hi_n = 0, hi_matched = 0;
  for (int k = 1; k <= max_k && k <= static_cast<int>(metrics.by_k.size()); ++k) {
    const auto& b = metrics.by_k[k - 1];
    if (2 * k > max_k) {
      hi_n += b.applicants;
      hi_matched += b.matched;
    } else {
      lo_n += b.applicants;
      lo_matched += b.matched;
    }
  }
  if (lo_n == 0 || hi_n == 0) return std::numeric_limits<double>::quiet_NaN();
  return double(hi_matched) / hi_n - double(lo_matched) / lo_n;
}

void append_metric_rows(const RowContext& ctx, const sim::MatchMetrics& metrics, bool per_k, ResultTable& out) {
  auto emit = [&](const char* metric, double value, std::optional<int> k_bin = {}, std::optional<int> value_bin = {}) {
    if (std::isnan(value)) return;
    out.push_back({ctx.experiment, ctx.replication, ctx.mode, ctx.m, ctx.beta, ctx.gamma, k_bin, value_bin, metric,
                   value, ctx.seed});
  };
  emit("match_rate", metrics.match_rate);
  emit("top_choice_rate", metrics.top_choice_rate);
  emit("avg_rank", metrics.avg_rank_conditional_on_match);
  emit("matched_value_percentile", metrics.avg_matched_value_percentile);
  emit("not_top_choice_given_match", metrics.not_top_choice_given_match);
  for (int b = 0; b < static_cast<int>(metrics.by_value_bin.size()); ++b) {
    const auto& bin = metrics.by_value_bin[b];
    if (!bin.applicants) continue;
    emit("match_rate_by_value", bin.match_rate(), {}, b);
    emit("top_choice_by_value", bin.top_choice_rate(), {}, b);
  }
  if (!per_k) return;
  int max_k = 0;
  for (int k = 1; k <= static_cast<int>(metrics.by_k.size()); ++k) {
    const auto& bin = metrics.by_k[k - 1];
    if (!bin.applicants) continue;
    max_k = k;
    emit("match_rate_by_k", bin.match_rate(), k);
  }
  emit("access_gap", access_gap(metrics, max_k));
}

ResultTable run_experiment(const ExperimentConfig& config, Execution execution) {
  config.validate();
  if (config.suite == Suite::correlated) return run_correlated_suite(config, execution);

  std::vector<Cell> cells;
  for (int m : config.m)
    for (double b : config.beta)
      for (double g : config.gamma) cells.push_back({m, b, g});
  const int reps = config.effective_reps();
  const Rng root(config.seed);

  auto task = [&](std::size_t i) {
    const auto cell_index = i / reps;
    const int rep = static_cast<int>(i % reps);
    const Cell& cell = cells[cell_index];
    const Rng stream = root.split(cell_index).split(rep);
    const auto model = preference_model(config, cell.beta, cell.gamma);

    ResultTable rows;
    for (Mode mode : config.modes) {
      const sim::FiniteMarketSpec spec{cell.m,     config.capacity, config.values,  config.noise,
                                       mode,       config.kappa,    config.strategy};
      const auto metrics = simulate_once(spec, config.n, model, stream, config.bins);
      append_metric_rows({config.id, rep, mode, cell.m, cell.beta, cell.gamma, stream.key()}, metrics,
                         config.kappa.has_value(), rows);
    }
    return rows;
  };
  auto describe = [&](std::size_t i) {
    const Cell& c = cells[i / reps];
    std::ostringstream s;
    s << "cell (m=" << c.m << ", beta=" << c.beta << ", gamma=" << c.gamma << ") replication " << i % reps;
    return s.str();
  };
  return run_tasks(cells.size() * reps, execution, config.threads, task, describe);
}

ResultTable run_correlated_suite(const ExperimentConfig& config, Execution execution) {
  config.validate();
  if (config.suite != Suite::correlated) throw ConfigError("run_correlated_suite needs suite = correlated");

  const int m = config.m.front();
  std::vector<Cell> cells;
  for (double b : config.beta)
    for (double g : config.gamma) cells.push_back({m, b, g});
  const int reps = config.effective_reps();
  const Rng root(config.seed);
  const access::Strategy strategies[] = {{access::StrategyKind::top_k}, {access::StrategyKind::random_k}};

  auto task = [&](std::size_t i) {
    const auto cell_index = i / reps;
    const int rep = static_cast<int>(i % reps);
    const Cell& cell = cells[cell_index];
    const Rng stream = root.split(cell_index).split(rep);
    const auto model = preference_model(config, cell.beta, cell.gamma);

    ResultTable rows;
    for (Mode mode : config.modes) {
      RowContext ctx{config.id, rep, mode, m, cell.beta, cell.gamma, stream.key()};
      const sim::FiniteMarketSpec full{m, config.capacity, config.values, config.noise, mode, std::nullopt, {}};
      const auto base = simulate_once(full, config.n, model, stream, config.bins);
      append_metric_rows(ctx, base, false, rows);

      for (const auto strategy : strategies) {
        const sim::FiniteMarketSpec limited{m, config.capacity, config.values, config.noise, mode, config.kappa, strategy};
        const auto metrics = simulate_once(limited, config.n, model, stream, config.bins);
        RowContext vctx = ctx;
        vctx.experiment = config.id + "/" + access::to_string(strategy);
        append_metric_rows(vctx, metrics, true, rows);
        rows.push_back({vctx.experiment, rep, mode, m, cell.beta, cell.gamma, std::nullopt, std::nullopt,
                        "welfare_drop", base.avg_matched_value_percentile - metrics.avg_matched_value_percentile,
                        stream.key()});
      }
    }
    return rows;
  };
  auto describe = [&](std::size_t i) {
    const Cell& c = cells[i / reps];
    std::ostringstream s;
    s << "cell (beta=" << c.beta << ", gamma=" << c.gamma << ") replication " << i % reps;
    return s.str();
  };
  return run_tasks(cells.size() * reps, execution, config.threads, task, describe);
}

std::filesystem::path output_directory(const ExperimentConfig& config) {
  if (!config.out.empty()) return config.out;
  if (const char* env = std::getenv("MATCHLAB_OUT"); env && *env) return env;
  return "results";
}

RunArtifacts write_run(const ExperimentConfig& config, const ResultTable& table, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  RunArtifacts art;
  art.csv = out_dir / (config.id + ".csv");
  art.manifest = out_dir / (config.id + ".manifest.json");
  art.rows = table.size();

  const std::string csv = to_csv(table);
  art.csv_hash = hex64(fnv1a64(csv));
  {
    std::ofstream f(art.csv, std::ios::binary);
    f << csv;
    if (!f) throw std::runtime_error("failed writing '" + art.csv.string() + "'");
  }

  std::set<std::tuple<std::string, std::string, int, double, double>> series;
  std::set<std::string> metrics;
  for (const auto& r : table) {
    series.emplace(r.experiment, to_string(r.mode), r.m, r.beta, r.gamma);
    metrics.insert(r.metric);
  }

  nlohmann::ordered_json j;
  j["experiment"] = config.id;
  j["suite"] = to_string(config.suite);
  j["library_version"] = library_version();
  j["seed"] = config.seed;
  j["config_hash"] = hex64(fnv1a64(config.canonical()));
  j["replications"] = config.effective_reps();
  j["rows"] = table.size();
  j["csv"] = art.csv.filename().string();
  j["csv_fnv1a64"] = art.csv_hash;
  auto modes = nlohmann::ordered_json::array();
  for (Mode mode : config.modes) modes.push_back(to_string(mode));
  j["sweep"] = {{"mode", modes}, {"m", config.m}, {"beta", config.beta}, {"gamma", config.gamma}};
  j["series_count"] = series.size();
  j["metrics"] = metrics;
  j["created_utc"] = utc_timestamp();
  {
    std::ofstream f(art.manifest, std::ios::binary);
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("failed writing '" + art.manifest.string() + "'");
  }
  return art;
}

}  // namespace matchlab::exp
