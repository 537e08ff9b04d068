#include "matchlab/cli.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "matchlab/config.hpp"
#include "matchlab/continuum.hpp"
#include "matchlab/experiments.hpp"
#include "matchlab/market_sim.hpp"
#include "matchlab/results.hpp"

namespace matchlab::cli {

namespace {

struct FlagHelp {
  const char* key;
  const char* help;
};

constexpr FlagHelp kFlagHelp[] = {
    {"experiment", "Experiment id; names the output files"},
    {"suite", "standard | correlated"},
    {"mode", "mono | poly, or a list: mono,poly"},
    {"m", "Number of firms, or a sweep list: 2,5,25,125"},
    {"S", "Total capacity as a share of applicants, in (0,1)"},
    {"capacity", "Total seats across firms (finite markets)"},
    {"n", "Number of applicants"},
    {"values", "Value law: uniform(a,b) | gaussian(mu,var)"},
    {"noise", "Noise law: uniform(a,b) | gaussian(mu,var)"},
    {"kappa", "Application access law: uniform(1..K) | pointmass(k) | weights [w1,...] | none"},
    {"strategy", "topk | randomk"},
    {"preferences", "uniform | rum"},
    {"beta", "Random-utility quality weight(s)"},
    {"gamma", "Random-utility proximity weight(s)"},
    {"reps", "Replications per sweep cell"},
    {"reps_full", "Replications used under --full"},
    {"seed", "Master seed (unsigned 64-bit)"},
    {"threads", "Worker threads; 0 uses all available"},
    {"bins", "Equal-probability value bins"},
    {"out", "Output directory (default $MATCHLAB_OUT, else ./results)"},
};

const char* help_for(const std::string& key) {
  for (const auto& f : kFlagHelp)
    if (key == f.key) return f.help;
  return "";
}

// String-valued `--key` options that feed the same builder as config files.
class Overrides {
 public:
  void add(CLI::App* app, std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
      auto& slot = slots_.emplace_back(key, std::make_unique<std::string>());
      options_.push_back(app->add_option(std::string("--") + key, *slot.second, help_for(key)));
    }
  }

  [[nodiscard]] exp::ConfigMap collect() const {
    exp::ConfigMap map;
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (options_[i]->count() > 0) map[slots_[i].first] = {*slots_[i].second, "command line", 0};
    return map;
  }

 private:
  std::vector<std::pair<std::string, std::unique_ptr<std::string>>> slots_;
  std::vector<CLI::Option*> options_;
};

exp::ExperimentConfig resolve(const std::string& config_path, const Overrides& overrides, bool full) {
  exp::ConfigMap entries;
  if (!config_path.empty()) entries = exp::load_config_file(config_path);
  exp::merge_overrides(entries, overrides.collect());
  auto config = exp::build_config(entries);
  if (full) config.full = true;
  return config;
}

int do_solve(const exp::ExperimentConfig& config, double tolerance, std::ostream& out) {
  for (int m : config.m) {
    for (Mode mode : config.modes) {
      continuum::MarketSpec spec{m, config.capacity_share(), config.values, config.noise, mode, config.kappa};
      const auto solution = continuum::solve_cutoff(spec, tolerance);
      out << continuum::solution_json(spec, solution) << '\n';
    }
  }
  return kExitOk;
}

int do_simulate(const exp::ExperimentConfig& config, std::ostream& out) {
  const prefs::PreferenceModel model =
      config.preferences == prefs::PreferenceKind::uniform
          ? prefs::PreferenceModel::uniform()
          : prefs::PreferenceModel::random_utility(config.beta.front(), config.gamma.front());
  for (Mode mode : config.modes) {
    const sim::FiniteMarketSpec spec{config.m.front(), config.capacity, config.values, config.noise,
                                     mode,             config.kappa,    config.strategy};
    Rng rng(config.seed);
    const auto market = sim::generate_market(spec, config.n, model, rng);
    const auto matching = sim::deferred_acceptance(market);
    const auto metrics = sim::compute_metrics(market, matching, config.bins);
    nlohmann::ordered_json j;
    j["mode"] = to_string(mode);
    j["m"] = spec.num_firms;
    j["n"] = config.n;
    j["capacity"] = config.capacity;
    j["seed"] = config.seed;
    j["metrics"] = nlohmann::ordered_json::parse(sim::metrics_json(metrics));
    out << j.dump() << '\n';
  }
  return kExitOk;
}

int do_experiment(const exp::ExperimentConfig& config, std::ostream& out) {
  const auto table = exp::run_experiment(config, exp::Execution::parallel);
  const auto art = exp::write_run(config, table, exp::output_directory(config));
  out << "wrote " << art.rows << " rows to " << art.csv.string() << " (fnv1a64 " << art.csv_hash << ")\n"
      << "manifest " << art.manifest.string() << '\n';
  return kExitOk;
}

int do_report(const std::string& path, const std::vector<std::string>& by, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const auto table = exp::read_csv(in);
  if (table.empty()) throw std::runtime_error("'" + path + "' has no data rows");
  std::vector<exp::Column> keys;
  if (by.empty()) {
    keys = exp::default_group_keys();
  } else {
    for (const auto& name : by) keys.push_back(exp::parse_column(name));
  }
  exp::write_summary_csv(out, keys, exp::summarize(table, keys));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stable-matching outcomes under algorithmic monoculture and polyculture.", "matchlab"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", exp::library_version());

  std::string config_path;
  bool full = false;
  double tolerance = continuum::kDefaultTolerance;
  std::string csv_path;
  std::vector<std::string> group_by;

  auto* solve = app.add_subcommand("solve", "Solve the continuum market-clearing cutoff; prints JSON");
  Overrides solve_flags;
  solve->add_option("--config", config_path, "Config file (key = value lines)");
  solve_flags.add(solve, {"mode", "m", "S", "values", "noise", "kappa"});
  solve->add_option("--tol", tolerance, "Residual tolerance for bisection")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Run one finite market; prints match metrics as JSON");
  Overrides simulate_flags;
  simulate->add_option("--config", config_path, "Config file (key = value lines)");
  simulate_flags.add(simulate, {"mode", "m", "n", "S", "capacity", "values", "noise", "kappa", "strategy",
                                "preferences", "beta", "gamma", "seed", "bins"});

  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment; writes CSV and manifest");
  Overrides experiment_flags;
  experiment->add_option("--config", config_path, "Config file (key = value lines)");
  experiment_flags.add(experiment, {"experiment", "suite", "mode", "m", "n", "S", "capacity", "values", "noise",
                                    "kappa", "strategy", "preferences", "beta", "gamma", "reps", "reps_full", "seed",
                                    "threads", "bins", "out"});
  experiment->add_flag("--full", full, "Use full-scale replication counts (reps_full)");

  auto* report = app.add_subcommand("report", "Summarize an experiment CSV: mean and standard error per group");
  report->add_option("csv", csv_path, "Result CSV written by `experiment`")->required();
  report->add_option("--by", group_by, "Group-by columns (default: all but replication and seed)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kExitConfigError;
  }

  try {
    if (solve->parsed()) return do_solve(resolve(config_path, solve_flags, false), tolerance, out);
    if (simulate->parsed()) return do_simulate(resolve(config_path, simulate_flags, false), out);
    if (experiment->parsed()) return do_experiment(resolve(config_path, experiment_flags, full), out);
    if (report->parsed()) return do_report(csv_path, group_by, out);
  } catch (const exp::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitConfigError;
}

}  // namespace matchlab::cli
