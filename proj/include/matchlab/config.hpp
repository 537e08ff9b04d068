#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matchlab/access_law.hpp"
#include "matchlab/continuum.hpp"
#include "matchlab/distributions.hpp"
#include "matchlab/preferences.hpp"

namespace matchlab::exp {

/// Malformed or inconsistent configuration. what() carries "source:line: "
/// when the offending key came from a file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string value;
  std::string source;  // file name or "command line"
  int line = 0;        // 0 for command-line overrides
};

using ConfigMap = std::map<std::string, ConfigEntry>;

/// Keys accepted in config files and as `--key` flags.
const std::vector<std::string>& known_config_keys();

/// `key = value` per line; `#` starts a comment; blank lines ignored.
/// Unknown or repeated keys and lines without '=' are errors.
ConfigMap parse_config_text(std::string_view text, const std::string& source);
ConfigMap load_config_file(const std::filesystem::path& path);

/// Applies overrides on top of base; overrides win.
void merge_overrides(ConfigMap& base, const ConfigMap& overrides);

enum class Suite { standard, correlated };

struct ExperimentConfig {
  std::string id = "experiment";
  Suite suite = Suite::standard;
  int n = 1000;
  std::vector<int> m{10};
  int capacity = 500;
  /// Capacity as a fraction of applicants, when given as `S`.
  std::optional<double> share;
  dist::Distribution values = dist::Distribution::uniform(0.0, 1.0);
  dist::Distribution noise = dist::Distribution::uniform(-0.5, 0.5);
  std::vector<Mode> modes{Mode::mono, Mode::poly};
  prefs::PreferenceKind preferences = prefs::PreferenceKind::uniform;
  std::vector<double> beta{0.0};
  std::vector<double> gamma{0.0};
  std::optional<access::AccessDistribution> kappa;
  access::Strategy strategy;
  int reps = 100;
  std::optional<int> reps_full;
  bool full = false;
  std::uint64_t seed = 1;
  int threads = 1;
  int bins = 20;
  std::string out;

  /// reps_full under --full when set, reps otherwise.
  [[nodiscard]] int effective_reps() const { return full && reps_full ? *reps_full : reps; }
  /// S for the continuum: `S` if given, capacity / n otherwise.
  [[nodiscard]] double capacity_share() const { return share ? *share : double(capacity) / n; }

  /// Cross-key consistency. Throws ConfigError.
  void validate() const;

  /// Stable `key=value` listing of every result-affecting field (threads and
  /// out excluded), used for the manifest hash.
  [[nodiscard]] std::string canonical() const;
};

ExperimentConfig build_config(const ConfigMap& entries);

std::string to_string(Suite suite);

}  // namespace matchlab::exp
