#include "matchlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "matchlab/format.hpp"

namespace matchlab::exp {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string where(const ConfigEntry& e, const std::string& key) {
  if (e.line > 0) return e.source + ":" + std::to_string(e.line) + ": key '" + key + "'";
  return e.source + ": --" + key;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    items.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

class Reader {
 public:
  explicit Reader(const ConfigMap& entries) : entries_(entries) {}

  template <typename Fn>
  void with(const std::string& key, Fn&& fn) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    try {
      fn(it->second.value);
    } catch (const ConfigError& e) {
      throw ConfigError(where(it->second, key) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where(it->second, key) + ": " + e.what());
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) > 0; }

 private:
  const ConfigMap& entries_;
};

int to_int(const std::string& s) {
  int v = 0;
  if (!parse_int(s, v)) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  double v = 0.0;
  if (!parse_double(s, v)) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

template <typename T, typename Fn>
std::vector<T> to_list(const std::string& s, Fn&& convert) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) out.push_back(convert(item));
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_double(xs[i]);
  return s;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "experiment", "suite", "n",     "m",         "capacity", "S",    "values", "noise",
      "mode",       "preferences", "beta", "gamma", "kappa", "strategy", "reps", "reps_full",
      "full",       "seed",  "threads", "bins",  "out"};
  return keys;
}

ConfigMap parse_config_text(std::string_view text, const std::string& source) {
  ConfigMap map;
  const auto& keys = known_config_keys();
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string prefix = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(prefix + "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(prefix + "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(prefix + "key '" + key + "' has no value");
    if (map.count(key)) throw ConfigError(prefix + "key '" + key + "' repeated");
    map[key] = {value, source, line_no};
  }
  return map;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string());
}

void merge_overrides(ConfigMap& base, const ConfigMap& overrides) {
  for (const auto& [key, entry] : overrides) base[key] = entry;
}

std::string to_string(Suite suite) { return suite == Suite::standard ? "standard" : "correlated"; }

ExperimentConfig build_config(const ConfigMap& entries) {
  ExperimentConfig c;
  const Reader r(entries);

  r.with("experiment", [&](const std::string& s) { c.id = s; });
  r.with("suite", [&](const std::string& s) {
    if (s == "standard") c.suite = Suite::standard;
    else if (s == "correlated") c.suite = Suite::correlated;
    else throw ConfigError("suite must be 'standard' or 'correlated'");
  });
  r.with("n", [&](const std::string& s) { c.n = to_int(s); });
  r.with("m", [&](const std::string& s) { c.m = to_list<int>(s, to_int); });
  r.with("S", [&](const std::string& s) { c.share = to_double(s); });
  if (r.has("capacity")) {
    r.with("capacity", [&](const std::string& s) { c.capacity = to_int(s); });
  } else if (c.share) {
    c.capacity = static_cast<int>(std::llround(*c.share * c.n));
  } else {
    c.capacity = c.n / 2;
  }
  r.with("values", [&](const std::string& s) { c.values = dist::parse_distribution(s); });
  r.with("noise", [&](const std::string& s) { c.noise = dist::parse_distribution(s); });
  r.with("mode", [&](const std::string& s) { c.modes = to_list<Mode>(s, [](const std::string& x) { return parse_mode(x); }); });
  r.with("preferences", [&](const std::string& s) { c.preferences = prefs::parse_preference_kind(s); });
  r.with("beta", [&](const std::string& s) { c.beta = to_list<double>(s, to_double); });
  r.with("gamma", [&](const std::string& s) { c.gamma = to_list<double>(s, to_double); });
  r.with("kappa", [&](const std::string& s) {
    if (s == "none") c.kappa.reset();
    else c.kappa = access::parse_access(s);
  });
  r.with("strategy", [&](const std::string& s) { c.strategy = access::parse_strategy(s); });
  r.with("reps", [&](const std::string& s) { c.reps = to_int(s); });
  r.with("reps_full", [&](const std::string& s) { c.reps_full = to_int(s); });
  r.with("full", [&](const std::string& s) { c.full = to_bool(s); });
  r.with("seed", [&](const std::string& s) {
    std::uint64_t v = 0;
    if (!parse_int(s, v)) throw ConfigError("seed must be an unsigned 64-bit integer, got '" + s + "'");
    c.seed = v;
  });
  r.with("threads", [&](const std::string& s) { c.threads = to_int(s); });
  r.with("bins", [&](const std::string& s) { c.bins = to_int(s); });
  r.with("out", [&](const std::string& s) { c.out = s; });

  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (id.empty() || id.find_first_of(",\"/\\\n") != std::string::npos)
    fail("experiment id must be nonempty and free of ',', '\"', '/', '\\'");
  if (n < 2) fail("n must be >= 2");
  if (m.empty()) fail("m must list at least one firm count");
  for (int mm : m)
    if (mm < 1) fail("m must be >= 1");
  if (capacity < 1 || capacity >= n) fail("capacity must lie in [1, n)");
  if (share && !(*share > 0.0 && *share < 1.0)) fail("S must lie in (0,1)");
  if (modes.empty()) fail("mode must list mono and/or poly");
  if (beta.empty() || gamma.empty()) fail("beta and gamma need at least one value");
  for (double b : beta)
    if (!(b >= 0.0)) fail("beta must be >= 0");
  for (double g : gamma)
    if (!(g >= 0.0)) fail("gamma must be >= 0");
  if (preferences == prefs::PreferenceKind::uniform &&
      (beta != std::vector<double>{0.0} || gamma != std::vector<double>{0.0}))
    fail("beta and gamma apply only to preferences = rum");
  if (kappa)
    for (int mm : m)
      if (kappa->max_k() > mm) fail("kappa puts mass on k = " + std::to_string(kappa->max_k()) + " > m = " + std::to_string(mm));
  if (reps < 1) fail("reps must be >= 1");
  if (reps_full && *reps_full < 1) fail("reps_full must be >= 1");
  if (threads < 0) fail("threads must be >= 0");
  if (bins < 1) fail("bins must be >= 1");
  if (suite == Suite::correlated) {
    if (preferences != prefs::PreferenceKind::random_utility) fail("the correlated suite needs preferences = rum");
    if (m.size() != 1) fail("the correlated suite takes a single m");
    if (!kappa) fail("the correlated suite needs a kappa");
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << "experiment=" << id << "\nsuite=" << to_string(suite) << "\nn=" << n << "\nm=";
  for (std::size_t i = 0; i < m.size(); ++i) s << (i ? "," : "") << m[i];
  s << "\ncapacity=" << capacity << "\nvalues=" << values.to_string() << "\nnoise=" << noise.to_string()
    << "\nmode=";
  for (std::size_t i = 0; i < modes.size(); ++i) s << (i ? "," : "") << to_string(modes[i]);
  s << "\npreferences=" << prefs::to_string(preferences) << "\nbeta=" << join_doubles(beta)
    << "\ngamma=" << join_doubles(gamma) << "\nkappa=" << (kappa ? kappa->to_string() : "none")
    << "\nstrategy=" << access::to_string(strategy) << "\nreps=" << effective_reps() << "\nseed=" << seed
    << "\nbins=" << bins << "\n";
  return s.str();
}

}  // namespace matchlab::exp
