#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "matchlab/market_sim.hpp"
#include "support.hpp"

using namespace matchlab;
using dist::Distribution;
using sim::FiniteMarket;
using sim::FiniteMarketSpec;

namespace {

constexpr double kOff = -std::numeric_limits<double>::infinity();

FiniteMarketSpec spec_of(Mode mode, int m, int capacity) {
  return {m, capacity, Distribution::uniform(0, 1), Distribution::uniform(-0.5, 0.5), mode, std::nullopt, {}};
}

FiniteMarket explicit_market(Mode mode, const std::vector<std::vector<int>>& rankings, std::vector<int> caps,
                             const std::vector<std::vector<double>>& scores) {
  std::vector<double> values, flat;
  for (const auto& row : scores) {
    double v = 0.0;
    for (double s : row)
      if (std::isfinite(s)) v = s;
    values.push_back(v);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return FiniteMarket(mode, Distribution::uniform(0, 1), values, prefs::PreferenceProfile::from_rankings(rankings),
                      std::move(caps), flat);
}

// Blocking pairs by a direct scan of the definition, independent of
// sim::verify_stability.
std::set<std::pair<int, int>> blocking_by_scan(const FiniteMarket& market, const std::vector<int>& assign) {
  std::set<std::pair<int, int>> out;
  const auto& prefs = market.preferences();
  for (int a = 0; a < market.num_applicants(); ++a)
    for (int f = 0; f < market.num_firms(); ++f) {
      if (!market.applied(a, f)) continue;
      if (assign[a] >= 0 && prefs.rank_of(a, f) >= prefs.rank_of(a, assign[a])) continue;
      int held = 0;
      bool beats_someone = false;
      for (int b = 0; b < market.num_applicants(); ++b)
        if (assign[b] == f) {
          ++held;
          beats_someone = beats_someone || market.score(a, f) > market.score(b, f);
        }
      if (held < market.capacities()[f] || beats_someone) out.insert({a, f});
    }
  return out;
}

std::set<std::pair<int, int>> as_set(const std::vector<sim::BlockingPair>& pairs) {
  std::set<std::pair<int, int>> out;
  for (const auto& p : pairs) out.insert({p.applicant, p.firm});
  return out;
}

}  // namespace

TEST_CASE("capacity split gives the remainder to the first firms") {
  CHECK(sim::split_capacity(500, 25) == std::vector<int>(25, 20));
  CHECK(sim::split_capacity(10, 3) == std::vector<int>{4, 3, 3});
  CHECK(sim::split_capacity(2, 4) == std::vector<int>{1, 1, 0, 0});
  CHECK_THROWS_AS(sim::split_capacity(5, 0), std::invalid_argument);
}

TEST_CASE("market construction validates its inputs") {
  const std::vector<std::vector<int>> r2{{0, 1}, {1, 0}, {0, 1}};
  CHECK_NOTHROW(explicit_market(Mode::mono, r2, {1, 1}, {{0.5, 0.5}, {0.2, kOff}, {0.1, 0.1}}));
  CHECK_THROWS_AS(explicit_market(Mode::mono, r2, {1, 1}, {{0.5, 0.4}, {0.2, 0.2}, {0.1, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(explicit_market(Mode::poly, r2, {2, 1}, {{0.5, 0.4}, {0.2, 0.2}, {0.1, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(explicit_market(Mode::poly, r2, {1}, {{0.5}, {0.2}, {0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(explicit_market(Mode::poly, r2, {1, -1}, {{0.5, 0.4}, {0.2, 0.2}, {0.1, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(explicit_market(Mode::poly, r2, {1, 0}, {{NAN, 0.4}, {0.2, 0.2}, {0.1, 0.1}}), std::invalid_argument);
}

TEST_CASE("generate_market rejects too few applicants") {
  Rng rng(1);
  CHECK_THROWS_AS(sim::generate_market(spec_of(Mode::poly, 5, 100), 100, prefs::PreferenceModel::uniform(), rng),
                  std::invalid_argument);
  auto bad = spec_of(Mode::poly, 5, 10);
  bad.access = access::AccessDistribution::uniform(6);
  CHECK_THROWS_AS(sim::generate_market(bad, 100, prefs::PreferenceModel::uniform(), rng), std::invalid_argument);
}

TEST_CASE("mono rows broadcast one estimate") {
  Rng rng(2);
  const auto market = sim::generate_market(spec_of(Mode::mono, 8, 100), 300, prefs::PreferenceModel::uniform(), rng);
  for (int a = 0; a < 300; ++a) {
    const auto row = market.score_row(a);
    CHECK(std::all_of(row.begin(), row.end(), [&](double s) { return s == row[0]; }));
    CHECK(std::abs(row[0] - market.values()[a]) <= 0.5);
  }
}

TEST_CASE("poly residuals follow the noise law") {
  Rng rng(3);
  const auto market = sim::generate_market(spec_of(Mode::poly, 10, 500), 1000, prefs::PreferenceModel::uniform(), rng);
  std::vector<double> residuals;
  for (int a = 0; a < 1000; ++a)
    for (int f = 0; f < 10; ++f) residuals.push_back(market.score(a, f) - market.values()[a]);
  const Distribution noise = Distribution::uniform(-0.5, 0.5);
  CHECK(testsupport::ks_statistic(residuals, [&](double x) { return dist::cdf(noise, x); }) < 0.05);
  CHECK(testsupport::ks_statistic(market.values(), [](double x) { return std::clamp(x, 0.0, 1.0); }) < 0.06);
}

TEST_CASE("one application under top-k goes to the top choice") {
  Rng rng(4);
  auto spec = spec_of(Mode::poly, 6, 50);
  spec.access = access::AccessDistribution::point_mass(1);
  const auto market = sim::generate_market(spec, 200, prefs::PreferenceModel::uniform(), rng);
  for (int a = 0; a < 200; ++a) {
    CHECK(market.num_applications(a) == 1);
    CHECK(market.application_set(a) == std::vector<int>{market.preferences().top_choice(a)});
  }
}

TEST_CASE("access variants share values, preferences and noise") {
  auto full = spec_of(Mode::poly, 6, 50);
  auto limited = full;
  limited.access = access::AccessDistribution::uniform(6);
  limited.strategy.kind = access::StrategyKind::random_k;
  Rng r1(5), r2(5);
  const auto a = sim::generate_market(full, 200, prefs::PreferenceModel::uniform(), r1);
  const auto b = sim::generate_market(limited, 200, prefs::PreferenceModel::uniform(), r2);
  CHECK(a.values() == b.values());
  for (int i = 0; i < 200; ++i) {
    CHECK(std::equal(a.preferences().ranking(i).begin(), a.preferences().ranking(i).end(),
                     b.preferences().ranking(i).begin()));
    for (int f : b.application_set(i)) CHECK(a.score(i, f) == b.score(i, f));
    CHECK(b.application_set(i).size() >= 1);
  }
}

TEST_CASE("two applicants, one seat: the higher score wins") {
  const auto market = explicit_market(Mode::poly, {{0}, {0}}, {1}, {{0.9}, {0.3}});
  const auto m = sim::deferred_acceptance(market);
  CHECK(m.assignment == std::vector<int>{0, prefs::kUnmatched});
  CHECK(m.rosters == std::vector<std::vector<int>>{{0}});
}

TEST_CASE("score ties go to the lower applicant index") {
  const auto market = explicit_market(Mode::poly, {{0}, {0}, {0}}, {1}, {{0.5}, {0.5}, {0.5}});
  CHECK(sim::deferred_acceptance(market).assignment == std::vector<int>{0, -1, -1});
  CHECK(market.firm_prefers(0, 0, 1));
  CHECK_FALSE(market.firm_prefers(0, 1, 0));
}

TEST_CASE("applicants who did not apply are never admitted") {
  const auto market = explicit_market(Mode::poly, {{0, 1}, {0, 1}, {1, 0}}, {1, 1}, {{0.9, kOff}, {0.8, kOff}, {kOff, 0.1}});
  const auto m = sim::deferred_acceptance(market);
  CHECK(m.assignment == std::vector<int>{0, -1, 1});
}

TEST_CASE("constructed blocking pairs are reported") {
  // a0, a1 prefer F0; a2 prefers F1. Swapping a0 and a1 away from the DA
  // outcome creates two blocking pairs: (a0, F0) and (a2, F1).
  const auto market =
      explicit_market(Mode::poly, {{0, 1}, {0, 1}, {1, 0}}, {1, 1}, {{0.9, 0.3}, {0.5, 0.8}, {0.1, 0.7}});
  const auto da = sim::deferred_acceptance(market);
  CHECK(da.assignment == std::vector<int>{0, 1, -1});
  CHECK(sim::verify_stability(market, da).empty());

  const std::vector<int> swapped{1, 0, -1};
  const auto reported = as_set(sim::verify_stability(market, sim::Matching::from_assignment(swapped, 2)));
  const std::set<std::pair<int, int>> expected{{0, 0}, {2, 1}};
  CHECK(reported == expected);
  CHECK(blocking_by_scan(market, swapped) == expected);
}

TEST_CASE("the empty matching is blocked") {
  Rng rng(6);
  const auto market = sim::generate_market(spec_of(Mode::poly, 3, 6), 10, prefs::PreferenceModel::uniform(), rng);
  const auto empty = sim::Matching::from_assignment(std::vector<int>(10, prefs::kUnmatched), 3);
  CHECK_FALSE(sim::verify_stability(market, empty).empty());
}

TEST_CASE("verify_stability rejects inconsistent matchings") {
  Rng rng(7);
  const auto market = sim::generate_market(spec_of(Mode::poly, 3, 6), 10, prefs::PreferenceModel::uniform(), rng);
  CHECK_THROWS_AS(sim::verify_stability(market, sim::Matching::from_assignment(std::vector<int>(9, -1), 3)),
                  std::invalid_argument);
  auto m = sim::deferred_acceptance(market);
  m.rosters[0].push_back(9);
  CHECK_THROWS_AS(sim::verify_stability(market, m), std::invalid_argument);
  CHECK_THROWS_AS(sim::Matching::from_assignment({0, 3}, 3), std::invalid_argument);
}

TEST_CASE("DA is stable on random markets and agrees with an independent scan") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(60));
    const int m = 1 + static_cast<int>(rng.below(std::min(n - 1, 8)));
    auto spec = spec_of(trial % 2 ? Mode::poly : Mode::mono, m, 1 + static_cast<int>(rng.below(n - 1)));
    if (trial % 3 == 0) spec.access = access::AccessDistribution::uniform(m);
    const auto model = trial % 4 == 0 ? prefs::PreferenceModel::random_utility(5, 5) : prefs::PreferenceModel::uniform();
    Rng stream = rng.split(trial);
    const auto market = sim::generate_market(spec, n, model, stream);
    const auto matching = sim::deferred_acceptance(market);
    CHECK(sim::verify_stability(market, matching).empty());
    CHECK(blocking_by_scan(market, matching.assignment).empty());
    for (int f = 0; f < m; ++f) CHECK(static_cast<int>(matching.rosters[f].size()) <= market.capacities()[f]);
    if (!spec.access) CHECK(matching.num_matched() == market.total_capacity());
  }
}

TEST_CASE("shared preferences under mono reduce DA to serial dictatorship") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(6)), m = 1 + static_cast<int>(rng.below(3));
    std::vector<std::vector<int>> rankings(n);
    std::vector<int> shared(m);
    std::iota(shared.begin(), shared.end(), 0);
    std::shuffle(shared.begin(), shared.end(), rng);
    std::vector<std::vector<double>> scores;
    for (int a = 0; a < n; ++a) {
      rankings[a] = shared;
      scores.emplace_back(m, rng.uniform());
    }
    auto caps = sim::split_capacity(1 + static_cast<int>(rng.below(n - 1)), m);
    const auto market = explicit_market(Mode::mono, rankings, caps, scores);

    std::vector<int> order(n), greedy(n, -1);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a][0] > scores[b][0]; });
    for (int a : order)
      for (int f : shared)
        if (caps[f] > 0) {
          --caps[f];
          greedy[a] = f;
          break;
        }
    CHECK(sim::deferred_acceptance(market).assignment == greedy);
  }
}

TEST_CASE("metrics on a hand-built market") {
  const auto market =
      explicit_market(Mode::poly, {{0, 1}, {0, 1}, {1, 0}}, {1, 1}, {{0.9, 0.3}, {0.5, 0.8}, {0.1, 0.7}});
  // a0 gets F0 (rank 1), a2 gets F1 (rank 1), a1 is left out.
  const auto matching = sim::Matching::from_assignment({0, -1, 1}, 2);
  const auto metrics = sim::compute_metrics(market, matching, 2);
  CHECK(metrics.num_matched == 2);
  CHECK(metrics.match_rate == doctest::Approx(2.0 / 3));
  CHECK(metrics.top_choice_rate == doctest::Approx(2.0 / 3));
  CHECK(metrics.avg_rank_conditional_on_match == 1.0);
  CHECK(metrics.not_top_choice_given_match == 0.0);
  REQUIRE(metrics.by_k.size() == 2);
  CHECK(metrics.by_k[1].applicants == 3);
  CHECK(metrics.by_k[0].applicants == 0);
}

TEST_CASE("capacity fills: match rate is exactly one half") {
  for (Mode mode : {Mode::mono, Mode::poly}) {
    Rng rng(10);
    const auto market = sim::generate_market(spec_of(mode, 10, 500), 1000, prefs::PreferenceModel::uniform(), rng);
    const auto metrics = sim::compute_metrics(market, sim::deferred_acceptance(market));
    CHECK(metrics.match_rate == 0.5);
    CHECK(metrics.avg_rank_conditional_on_match >= 1.0);
    int binned = 0;
    for (const auto& b : metrics.by_value_bin) {
      binned += b.applicants;
      CHECK(b.match_rate() >= 0.0);
      CHECK(b.match_rate() <= 1.0);
    }
    CHECK(binned == 1000);
    CHECK(metrics.by_value_bin.size() == 20);
  }
}

TEST_CASE("perfect information matches the top half") {
  Rng rng(11);
  auto spec = spec_of(Mode::poly, 10, 500);
  spec.noise = Distribution::point_mass(0.0);
  const auto market = sim::generate_market(spec, 1000, prefs::PreferenceModel::uniform(), rng);
  const auto metrics = sim::compute_metrics(market, sim::deferred_acceptance(market));
  CHECK(metrics.avg_matched_value_percentile == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("mono: matched-but-not-top-choice shrinks with market size") {
  double previous = 1.0;
  for (int n : {100, 1000, 10000}) {
    std::vector<double> rates;
    for (int rep = 0; rep < 20; ++rep) {
      Rng rng = Rng(12).split(n).split(rep);
      const auto market = sim::generate_market(spec_of(Mode::mono, 10, n / 2), n, prefs::PreferenceModel::uniform(), rng);
      rates.push_back(sim::compute_metrics(market, sim::deferred_acceptance(market)).not_top_choice_given_match);
    }
    const double mean = testsupport::mean_se(rates).mean;
    CHECK(mean < previous);
    previous = mean;
  }
}

TEST_CASE("polyculture matches lower-ranked choices than monoculture") {
  Rng a(13), b(13);
  const auto mono = sim::generate_market(spec_of(Mode::mono, 10, 500), 1000, prefs::PreferenceModel::uniform(), a);
  const auto poly = sim::generate_market(spec_of(Mode::poly, 10, 500), 1000, prefs::PreferenceModel::uniform(), b);
  const auto mm = sim::compute_metrics(mono, sim::deferred_acceptance(mono));
  const auto pm = sim::compute_metrics(poly, sim::deferred_acceptance(poly));
  CHECK(mm.avg_rank_conditional_on_match < pm.avg_rank_conditional_on_match);
  CHECK(mm.avg_matched_value_percentile < pm.avg_matched_value_percentile);
}

TEST_CASE("metrics are deterministic in the seed") {
  auto run = [] {
    Rng rng(14);
    auto spec = spec_of(Mode::poly, 7, 300);
    spec.access = access::AccessDistribution::uniform(7);
    const auto market = sim::generate_market(spec, 900, prefs::PreferenceModel::random_utility(5, 5), rng);
    return sim::metrics_json(sim::compute_metrics(market, sim::deferred_acceptance(market)));
  };
  CHECK(run() == run());
}

TEST_CASE("metrics JSON and empty matches") {
  const auto market = explicit_market(Mode::poly, {{0}, {0}}, {0}, {{0.9}, {0.3}});
  const auto metrics = sim::compute_metrics(market, sim::deferred_acceptance(market), 4);
  CHECK(metrics.num_matched == 0);
  CHECK(std::isnan(metrics.avg_rank_conditional_on_match));
  const auto j = nlohmann::json::parse(sim::metrics_json(metrics));
  CHECK(j["match_rate"] == 0.0);
  CHECK(j["avg_rank_conditional_on_match"].is_null());
  CHECK(j["match_rate_by_value_bin"].size() == 4);
  CHECK(j["match_rate_by_k"]["1"] == 0.0);
  CHECK_THROWS_AS(sim::compute_metrics(market, sim::deferred_acceptance(market), 0), std::invalid_argument);
}
