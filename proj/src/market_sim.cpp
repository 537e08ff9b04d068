#include "matchlab/market_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <json.hpp>

#include "matchlab/access.hpp"

namespace matchlab::sim {

namespace {
constexpr double kNotApplied = -std::numeric_limits<double>::infinity();
}

void FiniteMarketSpec::validate() const {
  if (num_firms < 1) throw std::invalid_argument("number of firms must be >= 1");
  if (total_capacity < 1) throw std::invalid_argument("total capacity must be >= 1");
  if (access && access->max_k() > num_firms)
    throw std::invalid_argument("access law puts mass on k > m");
}

std::vector<int> split_capacity(int total_capacity, int num_firms) {
  if (num_firms < 1 || total_capacity < 0) throw std::invalid_argument("bad capacity split");
  std::vector<int> caps(num_firms, total_capacity / num_firms);
  for (int f = 0; f < total_capacity % num_firms; ++f) ++caps[f];
  return caps;
}

FiniteMarket::FiniteMarket(Mode mode, dist::Distribution value_law, std::vector<double> values,
                           prefs::PreferenceProfile preferences, std::vector<int> capacities,
                           std::vector<double> scores)
    : mode_(mode),
      value_law_(value_law),
      values_(std::move(values)),
      preferences_(std::move(preferences)),
      capacities_(std::move(capacities)),
      scores_(std::move(scores)) {
  const int n = num_applicants();
  const int m = num_firms();
  if (n < 1 || m < 1) throw std::invalid_argument("market needs applicants and firms");
  if (preferences_.num_applicants() != n || preferences_.num_firms() != m)
    throw std::invalid_argument("preference profile does not match market dimensions");
  if (scores_.size() != static_cast<std::size_t>(n) * m)
    throw std::invalid_argument("score matrix does not match market dimensions");
  for (int c : capacities_)
    if (c < 0) throw std::invalid_argument("capacities must be >= 0");
  if (total_capacity() >= n) throw std::invalid_argument("total capacity must be below the number of applicants");
  for (double s : scores_)
    if (std::isnan(s) || s == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("scores must be finite or -inf");
  if (mode_ == Mode::mono) {
    for (int i = 0; i < n; ++i) {
      double shared = kNotApplied;
      for (double s : score_row(i)) {
        if (s == kNotApplied) continue;
        if (shared != kNotApplied && s != shared)
          throw std::invalid_argument("monoculture row " + std::to_string(i) + " has unequal estimates");
        shared = s;
      }
    }
  }
}

int FiniteMarket::total_capacity() const noexcept {
  return std::accumulate(capacities_.begin(), capacities_.end(), 0);
}

bool FiniteMarket::applied(int applicant, int firm) const { return score(applicant, firm) != kNotApplied; }

std::vector<int> FiniteMarket::application_set(int applicant) const {
  std::vector<int> set;
  for (int f : preferences_.ranking(applicant))
    if (applied(applicant, f)) set.push_back(f);
  return set;
}

int FiniteMarket::num_applications(int applicant) const {
  const auto row = score_row(applicant);
  return static_cast<int>(std::count_if(row.begin(), row.end(), [](double s) { return s != kNotApplied; }));
}

bool FiniteMarket::firm_prefers(int firm, int a, int b) const {
  const double sa = score(a, firm), sb = score(b, firm);
  return sa > sb || (sa == sb && a < b);
}

FiniteMarket generate_market(const FiniteMarketSpec& spec, int n, const prefs::PreferenceModel& model,
                             Rng& rng) {
  spec.validate();
  if (n <= spec.total_capacity)
    throw std::invalid_argument("need more applicants (" + std::to_string(n) + ") than seats (" +
                                std::to_string(spec.total_capacity) + ")");
  const int m = spec.num_firms;

  auto values = dist::sample(spec.values, rng, static_cast<std::size_t>(n));
  auto profile = prefs::generate_preferences(model, n, m, rng);

  std::vector<double> scores(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    double* row = &scores[static_cast<std::size_t>(i) * m];
    if (spec.mode == Mode::mono) {
      std::fill(row, row + m, values[i] + dist::draw(spec.noise, rng));
    } else {
      for (int f = 0; f < m; ++f) row[f] = values[i] + dist::draw(spec.noise, rng);
    }
  }

  if (spec.access) {
    std::vector<char> keep(m);
    for (int i = 0; i < n; ++i) {
      const int k = access::sample_k(*spec.access, rng);
      const auto chosen = access::apply_strategy(spec.strategy, profile.ranking(i), k, rng);
      std::fill(keep.begin(), keep.end(), 0);
      for (int f : chosen) keep[f] = 1;
      double* row = &scores[static_cast<std::size_t>(i) * m];
      for (int f = 0; f < m; ++f)
        if (!keep[f]) row[f] = kNotApplied;
    }
  }

  return FiniteMarket(spec.mode, spec.values, std::move(values), std::move(profile),
                      split_capacity(spec.total_capacity, m), std::move(scores));
}

Matching Matching::from_assignment(std::vector<int> assignment, int num_firms) {
  Matching out;
  out.rosters.assign(num_firms, {});
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
    const int f = assignment[i];
    if (f == prefs::kUnmatched) continue;
    if (f < 0 || f >= num_firms) throw std::invalid_argument("assignment names an unknown firm");
    out.rosters[f].push_back(i);
  }
  out.assignment = std::move(assignment);
  return out;
}

int Matching::num_matched() const {
  return static_cast<int>(
      std::count_if(assignment.begin(), assignment.end(), [](int f) { return f != prefs::kUnmatched; }));
}

Matching deferred_acceptance(const FiniteMarket& market) {
  const int n = market.num_applicants();
  const int m = market.num_firms();
  const auto& caps = market.capacities();
  const auto& profile = market.preferences();

  // Per-firm heap of held applicants with the least preferred on top.
  struct WorstFirst {
    const FiniteMarket* market;
    int firm;
    bool operator()(int a, int b) const { return market->firm_prefers(firm, a, b); }
  };
  std::vector<std::vector<int>> held(m);
  std::vector<int> next(n, 0);
  std::vector<int> assignment(n, prefs::kUnmatched);

  std::vector<int> free_applicants(n);
  std::iota(free_applicants.rbegin(), free_applicants.rend(), 0);

  while (!free_applicants.empty()) {
    const int a = free_applicants.back();
    free_applicants.pop_back();
    const auto ranking = profile.ranking(a);
    while (next[a] < m) {
      const int f = ranking[next[a]++];
      if (!market.applied(a, f) || caps[f] == 0) continue;
      auto& heap = held[f];
      const WorstFirst cmp{&market, f};
      if (static_cast<int>(heap.size()) < caps[f]) {
        heap.push_back(a);
        std::push_heap(heap.begin(), heap.end(), cmp);
        assignment[a] = f;
        break;
      }
      const int worst = heap.front();
      if (market.firm_prefers(f, a, worst)) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        heap.back() = a;
        std::push_heap(heap.begin(), heap.end(), cmp);
        assignment[a] = f;
        assignment[worst] = prefs::kUnmatched;
        free_applicants.push_back(worst);
        break;
      }
    }
  }
  return Matching::from_assignment(std::move(assignment), m);
}

std::vector<BlockingPair> verify_stability(const FiniteMarket& market, const Matching& matching) {
  const int n = market.num_applicants();
  const int m = market.num_firms();
  if (static_cast<int>(matching.assignment.size()) != n || static_cast<int>(matching.rosters.size()) != m)
    throw std::invalid_argument("matching dimensions do not fit the market");

  // Least preferred admit per firm.
  std::vector<int> weakest(m, -1);
  for (int f = 0; f < m; ++f) {
    for (int a : matching.rosters[f]) {
      if (a < 0 || a >= n || matching.assignment[a] != f)
        throw std::invalid_argument("roster and assignment disagree");
      if (weakest[f] < 0 || market.firm_prefers(f, weakest[f], a)) weakest[f] = a;
    }
  }

  const auto& profile = market.preferences();
  std::vector<BlockingPair> blocking;
  for (int a = 0; a < n; ++a) {
    const int current = matching.assignment[a];
    const int current_rank = current == prefs::kUnmatched ? m + 1 : profile.rank_of(a, current);
    for (int f : profile.ranking(a)) {
      if (profile.rank_of(a, f) >= current_rank) break;
      if (!market.applied(a, f)) continue;
      const bool has_seat = static_cast<int>(matching.rosters[f].size()) < market.capacities()[f];
      if (has_seat || (weakest[f] >= 0 && market.firm_prefers(f, a, weakest[f])))
        blocking.push_back({a, f});
    }
  }
  return blocking;
}

MatchMetrics compute_metrics(const FiniteMarket& market, const Matching& matching, int value_bins) {
  if (value_bins < 1) throw std::invalid_argument("value_bins must be >= 1");
  const int n = market.num_applicants();
  const int m = market.num_firms();
  const auto& profile = market.preferences();
  const auto& values = market.values();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  std::vector<double> percentile(n);
  for (int pos = 0; pos < n; ++pos) percentile[order[pos]] = (pos + 0.5) / n;

  MatchMetrics out;
  out.num_applicants = n;
  out.by_value_bin.assign(value_bins, {});
  out.by_k.assign(m, {});

  int matched = 0, top = 0;
  double rank_sum = 0.0, pct_sum = 0.0;
  for (int a = 0; a < n; ++a) {
    const int f = matching.assignment[a];
    const bool is_matched = f != prefs::kUnmatched;
    const bool is_top = is_matched && profile.rank_of(a, f) == 1;
    const int bin = std::min(value_bins - 1,
                             static_cast<int>(dist::cdf(market.value_law(), values[a]) * value_bins));
    const int k = market.num_applications(a);
    for (BinCount* c : {&out.by_value_bin[bin], k >= 1 ? &out.by_k[k - 1] : nullptr}) {
      if (!c) continue;
      ++c->applicants;
      c->matched += is_matched;
      c->top_choice += is_top;
    }
    if (is_matched) {
      ++matched;
      top += is_top;
      rank_sum += profile.rank_of(a, f);
      pct_sum += percentile[a];
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.num_matched = matched;
  out.match_rate = double(matched) / n;
  out.top_choice_rate = double(top) / n;
  out.avg_rank_conditional_on_match = matched ? rank_sum / matched : nan;
  out.avg_matched_value_percentile = matched ? pct_sum / matched : nan;
  out.not_top_choice_given_match = matched ? double(matched - top) / matched : nan;
  return out;
}

std::string metrics_json(const MatchMetrics& metrics) {
  auto number = [](double x) { return std::isnan(x) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(x); };
  nlohmann::ordered_json j;
  j["applicants"] = metrics.num_applicants;
  j["matched"] = metrics.num_matched;
  j["match_rate"] = metrics.match_rate;
  j["top_choice_rate"] = metrics.top_choice_rate;
  j["avg_rank_conditional_on_match"] = number(metrics.avg_rank_conditional_on_match);
  j["avg_matched_value_percentile"] = number(metrics.avg_matched_value_percentile);
  j["not_top_choice_given_match"] = number(metrics.not_top_choice_given_match);
  auto bins = nlohmann::ordered_json::array();
  for (const auto& b : metrics.by_value_bin) bins.push_back(b.match_rate());
  j["match_rate_by_value_bin"] = bins;
  auto by_k = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < metrics.by_k.size(); ++k)
    if (metrics.by_k[k].applicants) by_k[std::to_string(k + 1)] = metrics.by_k[k].match_rate();
  j["match_rate_by_k"] = by_k;
  return j.dump();
}

}  // namespace matchlab::sim
