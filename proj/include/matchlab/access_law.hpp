#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace matchlab::access {

/// Discrete law kappa over the number of applications k in {1..K}.
class AccessDistribution {
 public:
  /// weights[k-1] is the probability of k. Must be nonnegative and sum to 1
  /// (within 1e-9); trailing zeros are trimmed.
  explicit AccessDistribution(std::vector<double> weights);

  /// Uniform over {1..max_k}.
  static AccessDistribution uniform(int max_k);
  static AccessDistribution point_mass(int k);

  [[nodiscard]] int max_k() const noexcept { return static_cast<int>(weights_.size()); }
  [[nodiscard]] double weight(int k) const noexcept;
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] double mean() const noexcept;

  /// Config literal: `uniform(1..K)`, `pointmass(k)` or `weights [w1,w2,...]`.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const AccessDistribution&, const AccessDistribution&) = default;

 private:
  std::vector<double> weights_;
};

/// Inverse of AccessDistribution::to_string. Throws std::invalid_argument.
AccessDistribution parse_access(std::string_view text);

enum class StrategyKind { top_k, random_k };

/// Which k firms an applicant applies to, given that they may apply to k.
struct Strategy {
  StrategyKind kind = StrategyKind::top_k;
  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// `topk` or `randomk`.
Strategy parse_strategy(std::string_view text);
std::string to_string(Strategy s);

}  // namespace matchlab::access
