#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matchlab/rng.hpp"

namespace matchlab::prefs {

/// Firm index for "not matched". rank_of returns 0 for it.
inline constexpr int kUnmatched = -1;

enum class PreferenceKind { uniform, random_utility };

/// Applicant-side preference generator.
///
/// Random utility: u_i(f) = beta * quality_f - gamma * (loc_i - loc_f)^2 + eps_if
/// with standard logistic eps. beta = gamma = 0 has the same law as `uniform`.
struct PreferenceModel {
  PreferenceKind kind = PreferenceKind::uniform;
  double beta = 0.0;
  double gamma = 0.0;

  static PreferenceModel uniform() { return {}; }
  static PreferenceModel random_utility(double beta, double gamma);
  void validate() const;
};

/// `uniform` or `rum`.
PreferenceKind parse_preference_kind(std::string_view text);
std::string to_string(PreferenceKind kind);

/// Strict rankings of m firms for each of n applicants. Immutable.
class PreferenceProfile {
 public:
  /// rankings[i] lists firms from most to least preferred; each must be a
  /// permutation of 0..m-1. Throws std::invalid_argument otherwise.
  static PreferenceProfile from_rankings(const std::vector<std::vector<int>>& rankings);

  [[nodiscard]] int num_applicants() const noexcept { return num_applicants_; }
  [[nodiscard]] int num_firms() const noexcept { return num_firms_; }

  /// Firms in preference order.
  [[nodiscard]] std::span<const int> ranking(int applicant) const;
  [[nodiscard]] int top_choice(int applicant) const { return ranking(applicant)[0]; }

  /// 1 for the most preferred firm, m for the least; 0 for kUnmatched.
  /// Throws std::out_of_range on bad indices.
  [[nodiscard]] int rank_of(int applicant, int firm) const;

  /// Random-utility characteristics in [0,1]; empty for profiles built from
  /// explicit rankings.
  [[nodiscard]] const std::vector<double>& applicant_locations() const noexcept { return applicant_loc_; }
  [[nodiscard]] const std::vector<double>& firm_qualities() const noexcept { return firm_quality_; }
  [[nodiscard]] const std::vector<double>& firm_locations() const noexcept { return firm_loc_; }

 private:
  friend PreferenceProfile generate_preferences(const PreferenceModel&, int, int, Rng&);
  PreferenceProfile(int n, int m);

  int num_applicants_ = 0;
  int num_firms_ = 0;
  std::vector<int> order_;  // n x m, firm at each position
  std::vector<int> rank_;   // n x m, 1-based rank of each firm
  std::vector<double> applicant_loc_;
  std::vector<double> firm_quality_;
  std::vector<double> firm_loc_;
};

/// Draws n rankings over m firms. Utilities are sorted descending with ties
/// broken toward the lower firm index.
PreferenceProfile generate_preferences(const PreferenceModel& model, int n, int m, Rng& rng);

/// Free-function form of PreferenceProfile::rank_of.
inline int rank_of(const PreferenceProfile& profile, int applicant, int firm) {
  return profile.rank_of(applicant, firm);
}

/// Standard logistic draw by inversion: ln(u / (1 - u)).
double draw_logistic(Rng& rng);

}  // namespace matchlab::prefs
