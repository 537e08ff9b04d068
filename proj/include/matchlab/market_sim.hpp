#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matchlab/access_law.hpp"
#include "matchlab/continuum.hpp"
#include "matchlab/distributions.hpp"
#include "matchlab/preferences.hpp"
#include "matchlab/rng.hpp"

namespace matchlab::sim {

/// Finite counterpart of continuum::MarketSpec with integer seat counts.
struct FiniteMarketSpec {
  int num_firms = 1;
  int total_capacity = 1;
  dist::Distribution values = dist::Distribution::uniform(0.0, 1.0);
  dist::Distribution noise = dist::Distribution::uniform(-0.5, 0.5);
  Mode mode = Mode::mono;
  std::optional<access::AccessDistribution> access;
  access::Strategy strategy;

  void validate() const;
};

/// total / m seats per firm; the remainder goes one seat each to the
/// lowest-index firms.
std::vector<int> split_capacity(int total_capacity, int num_firms);

/// A realized market: n applicants with values, rankings, and an n x m
/// matrix of estimated values. -inf marks firms the applicant did not apply to.
class FiniteMarket {
 public:
  /// Validates dimensions, sum(capacities) < n, and (mono) that the finite
  /// entries of each score row are equal. Throws std::invalid_argument.
  FiniteMarket(Mode mode, dist::Distribution value_law, std::vector<double> values,
               prefs::PreferenceProfile preferences, std::vector<int> capacities,
               std::vector<double> scores);

  [[nodiscard]] Mode mode() const noexcept { return mode_; }
  [[nodiscard]] int num_applicants() const noexcept { return static_cast<int>(values_.size()); }
  [[nodiscard]] int num_firms() const noexcept { return static_cast<int>(capacities_.size()); }
  [[nodiscard]] const dist::Distribution& value_law() const noexcept { return value_law_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] const prefs::PreferenceProfile& preferences() const noexcept { return preferences_; }
  [[nodiscard]] const std::vector<int>& capacities() const noexcept { return capacities_; }
  [[nodiscard]] int total_capacity() const noexcept;

  [[nodiscard]] double score(int applicant, int firm) const {
    return scores_[static_cast<std::size_t>(applicant) * num_firms() + firm];
  }
  [[nodiscard]] std::span<const double> score_row(int applicant) const {
    return {scores_.data() + static_cast<std::size_t>(applicant) * num_firms(),
            static_cast<std::size_t>(num_firms())};
  }
  [[nodiscard]] bool applied(int applicant, int firm) const;
  /// Firms with a finite score, in the applicant's preference order.
  [[nodiscard]] std::vector<int> application_set(int applicant) const;
  [[nodiscard]] int num_applications(int applicant) const;

  /// Firm f ranks applicant a above b: higher score, ties to lower index.
  [[nodiscard]] bool firm_prefers(int firm, int a, int b) const;

 private:
  Mode mode_;
  dist::Distribution value_law_;
  std::vector<double> values_;
  prefs::PreferenceProfile preferences_;
  std::vector<int> capacities_;
  std::vector<double> scores_;
};

/// Draw order from rng: values, preferences, noise (m draws per applicant
/// under poly, including firms later masked), then k and strategy choices.
/// Markets that differ only in access settings therefore share values,
/// preferences and noise for the same seed.
FiniteMarket generate_market(const FiniteMarketSpec& spec, int n, const prefs::PreferenceModel& model,
                             Rng& rng);

struct Matching {
  /// Firm per applicant, or prefs::kUnmatched.
  std::vector<int> assignment;
  /// Applicants per firm, ascending.
  std::vector<std::vector<int>> rosters;

  static Matching from_assignment(std::vector<int> assignment, int num_firms);
  [[nodiscard]] int num_matched() const;
  friend bool operator==(const Matching&, const Matching&) = default;
};

/// Applicant-proposing deferred acceptance. Firms hold the best proposals by
/// score up to capacity and never admit an applicant scored -inf.
Matching deferred_acceptance(const FiniteMarket& market);

struct BlockingPair {
  int applicant = 0;
  int firm = 0;
  friend bool operator==(const BlockingPair&, const BlockingPair&) = default;
};

/// Every applicant-firm pair that would both rather match each other.
/// Throws std::invalid_argument if the matching does not fit the market.
std::vector<BlockingPair> verify_stability(const FiniteMarket& market, const Matching& matching);

struct BinCount {
  int applicants = 0;
  int matched = 0;
  int top_choice = 0;

  [[nodiscard]] double match_rate() const { return applicants ? double(matched) / applicants : 0.0; }
  [[nodiscard]] double top_choice_rate() const { return applicants ? double(top_choice) / applicants : 0.0; }
};

struct MatchMetrics {
  int num_applicants = 0;
  int num_matched = 0;
  double match_rate = 0.0;
  /// Fraction of all applicants matched to their first choice.
  double top_choice_rate = 0.0;
  /// Mean preference rank of the match among matched applicants; NaN if none.
  double avg_rank_conditional_on_match = 0.0;
  /// Mean realized-sample percentile of matched applicants' values; NaN if none.
  double avg_matched_value_percentile = 0.0;
  /// Matched applicants not at their first choice, over matched applicants.
  double not_top_choice_given_match = 0.0;
  /// Equal-probability bins of the value law.
  std::vector<BinCount> by_value_bin;
  /// by_k[k-1] counts applicants who applied to k firms.
  std::vector<BinCount> by_k;
};

inline constexpr int kDefaultValueBins = 20;

MatchMetrics compute_metrics(const FiniteMarket& market, const Matching& matching,
                             int value_bins = kDefaultValueBins);

std::string metrics_json(const MatchMetrics& metrics);

}  // namespace matchlab::sim
