#include "matchlab/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

namespace matchlab {

std::string to_string(Mode mode) { return mode == Mode::mono ? "mono" : "poly"; }

Mode parse_mode(std::string_view text) {
  if (text == "mono") return Mode::mono;
  if (text == "poly") return Mode::poly;
  throw std::invalid_argument("mode must be 'mono' or 'poly', got '" + std::string(text) + "'");
}

}  // namespace matchlab

namespace matchlab::continuum {

namespace {

constexpr double kBracketTail = 1e-12;

double lower_end(const dist::Distribution& d) {
  return std::isfinite(d.support_lo()) ? d.support_lo() : dist::quantile(d, kBracketTail);
}

double upper_end(const dist::Distribution& d) {
  return std::isfinite(d.support_hi()) ? d.support_hi() : dist::quantile(d, 1.0 - kBracketTail);
}

// Values of v where the match-probability integrand has kinks.
std::vector<double> kinks(const MarketSpec& spec, double cutoff) {
  std::vector<double> points;
  if (std::isfinite(spec.noise.support_lo())) points.push_back(cutoff - spec.noise.support_lo());
  if (std::isfinite(spec.noise.support_hi())) points.push_back(cutoff - spec.noise.support_hi());
  if (spec.noise.kind() != dist::Kind::uniform) points.push_back(cutoff - spec.noise.mean());
  return points;
}

// Unconditional match probability at value v, mixing over kappa if present.
double demand_integrand(const MarketSpec& spec, double cutoff, double v) {
  if (spec.mode == Mode::mono || !spec.access) {
    return clear_probability(spec, cutoff, v, spec.num_firms);
  }
  const double miss = dist::cdf(spec.noise, cutoff - v);
  double q = 0.0;
  const auto& w = spec.access->weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) q += w[i] * (1.0 - std::pow(miss, static_cast<double>(i + 1)));
  }
  return q;
}

}  // namespace

void MarketSpec::validate() const {
  if (num_firms < 1) throw std::invalid_argument("number of firms must be >= 1");
  if (!(total_capacity > 0.0 && total_capacity < 1.0))
    throw std::invalid_argument("total capacity S must lie in (0,1)");
  if (access && access->max_k() > num_firms)
    throw std::invalid_argument("access law puts mass on k = " + std::to_string(access->max_k()) +
                                " > m = " + std::to_string(num_firms));
}

double clear_probability(const MarketSpec& spec, double cutoff, double v, int applications) {
  const double miss = dist::cdf(spec.noise, cutoff - v);
  if (spec.mode == Mode::mono) return 1.0 - miss;
  return std::clamp(1.0 - std::pow(miss, applications), 0.0, 1.0);
}

double aggregate_demand(const MarketSpec& spec, double cutoff) {
  spec.validate();
  const auto breaks = kinks(spec, cutoff);
  return dist::expect(
      spec.values, [&](double v) { return demand_integrand(spec, cutoff, v); }, breaks);
}

CutoffSolution solve_cutoff(const MarketSpec& spec, double tolerance) {
  spec.validate();
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (!spec.values.has_connected_support() || !spec.noise.has_connected_support())
    throw std::invalid_argument("cutoff solving requires value and noise laws with connected support");

  CutoffSolution sol;
  sol.mode = spec.mode;
  double lo = lower_end(spec.values) + lower_end(spec.noise);
  double hi = upper_end(spec.values) + upper_end(spec.noise);
  sol.bracket_lo = lo;
  sol.bracket_hi = hi;

  const double target = spec.total_capacity;
  const double r_lo = aggregate_demand(spec, lo) - target;
  const double r_hi = aggregate_demand(spec, hi) - target;
  if (!(r_lo > 0.0 && r_hi < 0.0))
    throw SolverError("demand does not straddle capacity on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");

  for (int it = 1; it <= kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = aggregate_demand(spec, mid) - target;
    sol.cutoff = mid;
    sol.residual = r;
    sol.iterations = it;
    if (std::abs(r) <= tolerance) return sol;
    // Demand falls as the cutoff rises.
    if (r > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  throw SolverError("bisection did not reach tolerance " + std::to_string(tolerance) + " in " +
                    std::to_string(kMaxBisections) + " iterations");
}

double match_probability(const MarketSpec& spec, double cutoff, double v, std::optional<int> k) {
  if (k) {
    if (!spec.access) throw std::invalid_argument("k given but the market has no access law");
    if (*k < 1 || *k > spec.num_firms)
      throw std::invalid_argument("k = " + std::to_string(*k) + " outside 1..m");
    return clear_probability(spec, cutoff, v, *k);
  }
  return clear_probability(spec, cutoff, v, spec.num_firms);
}

double top_choice_probability(const MarketSpec& spec, double cutoff, double v) {
  return 1.0 - dist::cdf(spec.noise, cutoff - v);
}

double v_s_threshold(const dist::Distribution& values, double total_capacity) {
  if (!(total_capacity > 0.0 && total_capacity < 1.0))
    throw std::invalid_argument("total capacity S must lie in (0,1)");
  return dist::quantile(values, 1.0 - total_capacity);
}

FirmWelfare firm_welfare(const MarketSpec& spec, double cutoff) {
  spec.validate();
  FirmWelfare w;
  w.achieved = dist::expect(
      spec.values, [&](double v) { return v * demand_integrand(spec, cutoff, v); },
      kinks(spec, cutoff));
  const double v_s = v_s_threshold(spec.values, spec.total_capacity);
  const double knot[] = {v_s};
  w.optimal = dist::expect(
      spec.values, [&](double v) { return v > v_s ? v : 0.0; }, knot);
  return w;
}

double conditional_rank(int num_firms, double p) {
  if (num_firms < 1) throw std::invalid_argument("number of firms must be >= 1");
  if (!(p > 0.0)) throw std::invalid_argument("rank is undefined when no firm is affordable (p = 0)");
  if (p >= 1.0) return 1.0;

  // Sum over j ~ Binomial(m, p) of the expected minimum rank of j uniformly
  // chosen firms, (m + 1) / (j + 1).
  const double m = num_firms;
  const double log_p = std::log(p), log_q = std::log1p(-p);
  double total = 0.0;
  for (int j = 1; j <= num_firms; ++j) {
    const double log_pmf =
        std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0) + j * log_p + (m - j) * log_q;
    total += std::exp(log_pmf) * (m + 1.0) / (j + 1.0);
  }
  const double matched = -std::expm1(m * log_q);
  return total / matched;
}

double expected_rank_poly(const MarketSpec& spec, double cutoff, double v) {
  const double p = top_choice_probability(spec, cutoff, v);
  if (spec.mode == Mode::mono) {
    if (!(p > 0.0)) throw std::invalid_argument("rank is undefined when no firm is affordable (p = 0)");
    return 1.0;
  }
  return conditional_rank(spec.num_firms, p);
}

std::string solution_json(const MarketSpec& spec, const CutoffSolution& solution) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(spec.mode);
  j["m"] = spec.num_firms;
  j["S"] = spec.total_capacity;
  j["value_dist"] = spec.values.to_string();
  j["noise_dist"] = spec.noise.to_string();
  j["kappa"] = spec.access ? nlohmann::ordered_json(spec.access->to_string()) : nlohmann::ordered_json(nullptr);
  j["cutoff"] = solution.cutoff;
  j["residual"] = solution.residual;
  return j.dump();
}

}  // namespace matchlab::continuum
