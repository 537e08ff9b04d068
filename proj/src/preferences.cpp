#include "matchlab/preferences.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace matchlab::prefs {

PreferenceModel PreferenceModel::random_utility(double beta, double gamma) {
  PreferenceModel model{PreferenceKind::random_utility, beta, gamma};
  model.validate();
  return model;
}

void PreferenceModel::validate() const {
  if (!(beta >= 0.0) || !(gamma >= 0.0) || !std::isfinite(beta) || !std::isfinite(gamma))
    throw std::invalid_argument("beta and gamma must be finite and >= 0");
}

PreferenceKind parse_preference_kind(std::string_view text) {
  if (text == "uniform") return PreferenceKind::uniform;
  if (text == "rum" || text == "random-utility") return PreferenceKind::random_utility;
  throw std::invalid_argument("preferences must be 'uniform' or 'rum', got '" + std::string(text) + "'");
}

std::string to_string(PreferenceKind kind) {
  return kind == PreferenceKind::uniform ? "uniform" : "rum";
}

PreferenceProfile::PreferenceProfile(int n, int m)
    : num_applicants_(n),
      num_firms_(m),
      order_(static_cast<std::size_t>(n) * m),
      rank_(static_cast<std::size_t>(n) * m) {}

PreferenceProfile PreferenceProfile::from_rankings(const std::vector<std::vector<int>>& rankings) {
  if (rankings.empty()) throw std::invalid_argument("at least one applicant required");
  const int m = static_cast<int>(rankings.front().size());
  if (m < 1) throw std::invalid_argument("at least one firm required");
  PreferenceProfile p(static_cast<int>(rankings.size()), m);
  for (int i = 0; i < p.num_applicants_; ++i) {
    const auto& row = rankings[i];
    if (static_cast<int>(row.size()) != m) throw std::invalid_argument("ragged rankings");
    int* rank = &p.rank_[static_cast<std::size_t>(i) * m];
    std::fill(rank, rank + m, 0);
    for (int pos = 0; pos < m; ++pos) {
      const int f = row[pos];
      if (f < 0 || f >= m || rank[f] != 0)
        throw std::invalid_argument("ranking of applicant " + std::to_string(i) + " is not a permutation");
      rank[f] = pos + 1;
      p.order_[static_cast<std::size_t>(i) * m + pos] = f;
    }
  }
  return p;
}

std::span<const int> PreferenceProfile::ranking(int applicant) const {
  if (applicant < 0 || applicant >= num_applicants_) throw std::out_of_range("applicant index out of range");
  return {order_.data() + static_cast<std::size_t>(applicant) * num_firms_,
          static_cast<std::size_t>(num_firms_)};
}

int PreferenceProfile::rank_of(int applicant, int firm) const {
  if (applicant < 0 || applicant >= num_applicants_) throw std::out_of_range("applicant index out of range");
  if (firm == kUnmatched) return 0;
  if (firm < 0 || firm >= num_firms_) throw std::out_of_range("firm index out of range");
  return rank_[static_cast<std::size_t>(applicant) * num_firms_ + firm];
}

double draw_logistic(Rng& rng) {
  const double u = rng.uniform();
  return std::log(u / (1.0 - u));
}

PreferenceProfile generate_preferences(const PreferenceModel& model, int n, int m, Rng& rng) {
  model.validate();
  if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 applicants and m >= 1 firms");

  PreferenceProfile p(n, m);
  p.firm_quality_.resize(m);
  p.firm_loc_.resize(m);
  p.applicant_loc_.resize(n);
  for (int f = 0; f < m; ++f) {
    p.firm_quality_[f] = rng.uniform();
    p.firm_loc_[f] = rng.uniform();
  }
  for (auto& x : p.applicant_loc_) x = rng.uniform();

  std::vector<int> order(m);
  std::vector<double> utility(m);
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    if (model.kind == PreferenceKind::uniform) {
      for (int j = m - 1; j > 0; --j) {
        const auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
        std::swap(order[j], order[r]);
      }
    } else {
      for (int f = 0; f < m; ++f) {
        const double dx = p.applicant_loc_[i] - p.firm_loc_[f];
        utility[f] = model.beta * p.firm_quality_[f] - model.gamma * dx * dx + draw_logistic(rng);
      }
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return utility[a] > utility[b] || (utility[a] == utility[b] && a < b);
      });
    }
    const std::size_t base = static_cast<std::size_t>(i) * m;
    for (int pos = 0; pos < m; ++pos) {
      p.order_[base + pos] = order[pos];
      p.rank_[base + order[pos]] = pos + 1;
    }
  }
  return p;
}

}  // namespace matchlab::prefs
