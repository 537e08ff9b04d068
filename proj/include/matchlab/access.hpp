#pragma once

#include <optional>
#include <span>
#include <vector>

#include "matchlab/access_law.hpp"
#include "matchlab/continuum.hpp"
#include "matchlab/rng.hpp"

namespace matchlab::access {

/// Draw k from kappa by inverting its cumulative weights.
int sample_k(const AccessDistribution& kappa, Rng& rng);

/// Firms an applicant with the given ranking applies to when limited to k.
/// top-k takes the k most preferred; random-k draws k firms uniformly
/// without replacement. Either way the result is in preference order.
/// Throws std::invalid_argument unless 1 <= k <= ranking.size().
std::vector<int> apply_strategy(Strategy strategy, std::span<const int> ranking, int k, Rng& rng);

struct SetOutcome {
  double match_probability = 0.0;
  /// Expected preference rank of the match given a match; empty when the
  /// match probability is zero.
  std::optional<double> expected_rank;
};

inline constexpr int kMaxEnumeratedSet = 20;

/// Ex-ante outcome for an applicant of value v applying to firms holding
/// the given preference ranks, when every firm uses cutoff P and
/// preferences are uniformly random. Exact enumeration over which applied
/// firms the applicant clears; throws std::invalid_argument for an empty set
/// or one larger than kMaxEnumeratedSet.
SetOutcome expected_outcome_for_set(const continuum::MarketSpec& spec, double cutoff, double v,
                                    std::span<const int> ranks_of_set);

}  // namespace matchlab::access
