#include "matchlab/access.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "matchlab/format.hpp"

namespace matchlab::access {

AccessDistribution::AccessDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  while (!weights_.empty() && weights_.back() == 0.0) weights_.pop_back();
  if (weights_.empty()) throw std::invalid_argument("access law needs at least one positive weight");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("access weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("access weights must sum to 1");
}

AccessDistribution AccessDistribution::uniform(int max_k) {
  if (max_k < 1) throw std::invalid_argument("uniform access law needs K >= 1");
  return AccessDistribution(std::vector<double>(max_k, 1.0 / max_k));
}

AccessDistribution AccessDistribution::point_mass(int k) {
  if (k < 1) throw std::invalid_argument("point-mass access law needs k >= 1");
  std::vector<double> w(k, 0.0);
  w.back() = 1.0;
  return AccessDistribution(std::move(w));
}

double AccessDistribution::weight(int k) const noexcept {
  return (k >= 1 && k <= max_k()) ? weights_[k - 1] : 0.0;
}

double AccessDistribution::mean() const noexcept {
  double m = 0.0;
  for (int k = 1; k <= max_k(); ++k) m += k * weights_[k - 1];
  return m;
}

std::string AccessDistribution::to_string() const {
  const int K = max_k();
  bool is_uniform = true;
  for (double w : weights_) is_uniform = is_uniform && std::abs(w - 1.0 / K) < 1e-15;
  if (is_uniform) return "uniform(1.." + std::to_string(K) + ")";
  if (weights_.back() == 1.0) return "pointmass(" + std::to_string(K) + ")";
  std::string s = "weights [";
  for (int k = 0; k < K; ++k) {
    if (k) s += ",";
    s += format_double(weights_[k]);
  }
  return s + "]";
}

AccessDistribution parse_access(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  const auto bad = [&] { return std::invalid_argument("malformed access law '" + std::string(text) + "'"); };

  if (s.rfind("uniform(1..", 0) == 0 && s.back() == ')') {
    int K = 0;
    if (!parse_int(std::string_view(s).substr(11, s.size() - 12), K)) throw bad();
    return AccessDistribution::uniform(K);
  }
  if (s.rfind("pointmass(", 0) == 0 && s.back() == ')') {
    int k = 0;
    if (!parse_int(std::string_view(s).substr(10, s.size() - 11), k)) throw bad();
    return AccessDistribution::point_mass(k);
  }
  if (s.rfind("weights[", 0) == 0 && s.back() == ']') {
    std::vector<double> w;
    std::string_view body = std::string_view(s).substr(8, s.size() - 9);
    while (true) {
      const auto comma = body.find(',');
      double x = 0.0;
      if (!parse_double(body.substr(0, comma), x)) throw bad();
      w.push_back(x);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return AccessDistribution(std::move(w));
  }
  throw bad();
}

Strategy parse_strategy(std::string_view text) {
  if (text == "topk") return {StrategyKind::top_k};
  if (text == "randomk") return {StrategyKind::random_k};
  throw std::invalid_argument("strategy must be 'topk' or 'randomk', got '" + std::string(text) + "'");
}

std::string to_string(Strategy s) { return s.kind == StrategyKind::top_k ? "topk" : "randomk"; }

int sample_k(const AccessDistribution& kappa, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  const auto& w = kappa.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    cumulative += w[i];
    if (u <= cumulative && w[i] > 0.0) return static_cast<int>(i) + 1;
  }
  // Rounding left u above the final cumulative sum.
  return kappa.max_k();
}

std::vector<int> apply_strategy(Strategy strategy, std::span<const int> ranking, int k, Rng& rng) {
  const int m = static_cast<int>(ranking.size());
  if (k < 1 || k > m) throw std::invalid_argument("k = " + std::to_string(k) + " outside 1..m");
  if (strategy.kind == StrategyKind::top_k) return {ranking.begin(), ranking.begin() + k};

  // Partial Fisher-Yates over preference positions, then restore order.
  std::vector<int> positions(m);
  std::iota(positions.begin(), positions.end(), 0);
  for (int j = 0; j < k; ++j) {
    const auto r = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - j)));
    std::swap(positions[j], positions[r]);
  }
  positions.resize(k);
  std::sort(positions.begin(), positions.end());
  std::vector<int> firms(k);
  for (int j = 0; j < k; ++j) firms[j] = ranking[positions[j]];
  return firms;
}

SetOutcome expected_outcome_for_set(const continuum::MarketSpec& spec, double cutoff, double v,
                                    std::span<const int> ranks_of_set) {
  spec.validate();
  const int size = static_cast<int>(ranks_of_set.size());
  if (size == 0) throw std::invalid_argument("application set must be nonempty");
  if (size > kMaxEnumeratedSet)
    throw std::invalid_argument("application set larger than " + std::to_string(kMaxEnumeratedSet) +
                                " cannot be enumerated exactly");
  for (int r : ranks_of_set)
    if (r < 1 || r > spec.num_firms) throw std::invalid_argument("rank outside 1..m");

  const double p = continuum::top_choice_probability(spec, cutoff, v);
  SetOutcome out;
  if (spec.mode == Mode::mono) {
    // One shared estimate: every applied firm is cleared or none is.
    out.match_probability = p;
    if (p > 0.0) out.expected_rank = *std::min_element(ranks_of_set.begin(), ranks_of_set.end());
    return out;
  }

  out.match_probability = continuum::clear_probability(spec, cutoff, v, size);
  if (!(out.match_probability > 0.0)) return out;

  double weighted_rank = 0.0;
  const std::uint32_t subsets = 1u << size;
  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    const int cleared = std::popcount(mask);
    const double prob = std::pow(p, cleared) * std::pow(1.0 - p, size - cleared);
    int best = spec.num_firms + 1;
    for (int j = 0; j < size; ++j)
      if (mask & (1u << j)) best = std::min(best, ranks_of_set[j]);
    weighted_rank += prob * best;
  }
  out.expected_rank = weighted_rank / out.match_probability;
  return out;
}

}  // namespace matchlab::access
