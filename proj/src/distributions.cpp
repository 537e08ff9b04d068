#include "matchlab/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "matchlab/format.hpp"

namespace matchlab::dist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailSigmas = 8.0;
constexpr double kQuadTolerance = 1e-12;
// Floor for the error target, so near-zero integrals stop refining.
constexpr double kQuadAbsFloor = 1e-15;
constexpr int kQuadMaxSegments = 4000;

void require_order(int n) {
  if (n < 1) throw std::invalid_argument("order statistic size n must be >= 1");
}

// Quantiles of the n-th order maximum, used as quadrature breakpoints so the
// adaptive rule sees where the mass of X^(n) sits even for large n.
std::vector<double> max_order_breakpoints(const Distribution& d, int n) {
  std::vector<double> points;
  if (d.kind() == Kind::point_mass) return points;
  for (double p : {1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0 - 1e-6}) {
    const double q = std::exp(std::log(p) / n);
    if (q > 0.0 && q < 1.0) points.push_back(quantile(d, q));
  }
  return points;
}

}  // namespace

Distribution Distribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw std::invalid_argument("uniform(a,b) requires finite a < b");
  return {Kind::uniform, lo, hi};
}

Distribution Distribution::gaussian(double mean, double variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || !(variance > 0.0))
    throw std::invalid_argument("gaussian(mu,var) requires finite mu and var > 0");
  return {Kind::gaussian, mean, variance};
}

Distribution Distribution::point_mass(double at) {
  if (!std::isfinite(at)) throw std::invalid_argument("pointmass(c) requires finite c");
  return {Kind::point_mass, at, 0.0};
}

double Distribution::support_lo() const noexcept {
  switch (kind_) {
    case Kind::uniform: return a_;
    case Kind::gaussian: return -kInf;
    case Kind::point_mass: return a_;
  }
  return a_;
}

double Distribution::support_hi() const noexcept {
  switch (kind_) {
    case Kind::uniform: return b_;
    case Kind::gaussian: return kInf;
    case Kind::point_mass: return a_;
  }
  return a_;
}

double Distribution::mean() const noexcept {
  return kind_ == Kind::uniform ? 0.5 * (a_ + b_) : a_;
}

double Distribution::variance() const noexcept {
  switch (kind_) {
    case Kind::uniform: return (b_ - a_) * (b_ - a_) / 12.0;
    case Kind::gaussian: return b_;
    case Kind::point_mass: return 0.0;
  }
  return 0.0;
}

double Distribution::stddev() const noexcept { return std::sqrt(variance()); }

double Distribution::integration_lo() const noexcept {
  return kind_ == Kind::gaussian ? a_ - kTailSigmas * stddev() : support_lo();
}

double Distribution::integration_hi() const noexcept {
  return kind_ == Kind::gaussian ? a_ + kTailSigmas * stddev() : support_hi();
}

double Distribution::density(double x) const noexcept {
  switch (kind_) {
    case Kind::uniform: return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
    case Kind::gaussian: {
      const double z = (x - a_) / std::sqrt(b_);
      return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * b_);
    }
    case Kind::point_mass: return 0.0;
  }
  return 0.0;
}

std::string Distribution::to_string() const {
  switch (kind_) {
    case Kind::uniform: return "uniform(" + format_double(a_) + "," + format_double(b_) + ")";
    case Kind::gaussian: return "gaussian(" + format_double(a_) + "," + format_double(b_) + ")";
    case Kind::point_mass: return "pointmass(" + format_double(a_) + ")";
  }
  return {};
}

Distribution parse_distribution(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw std::invalid_argument("malformed distribution literal '" + std::string(text) + "'");
  const std::string name = s.substr(0, open);
  const std::string body = s.substr(open + 1, s.size() - open - 2);

  std::vector<double> args;
  std::size_t start = 0;
  while (start <= body.size()) {
    const auto comma = body.find(',', start);
    const auto token = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double value = 0.0;
    if (!parse_double(token, value))
      throw std::invalid_argument("bad number '" + token + "' in distribution literal '" +
                                  std::string(text) + "'");
    args.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  auto expect_args = [&](std::size_t count) {
    if (args.size() != count)
      throw std::invalid_argument(name + " takes " + std::to_string(count) + " argument(s)");
  };
  if (name == "uniform") {
    expect_args(2);
    return Distribution::uniform(args[0], args[1]);
  }
  if (name == "gaussian" || name == "normal") {
    expect_args(2);
    return Distribution::gaussian(args[0], args[1]);
  }
  if (name == "pointmass" || name == "point_mass") {
    expect_args(1);
    return Distribution::point_mass(args[0]);
  }
  throw std::invalid_argument("unknown distribution '" + name + "'");
}

double cdf(const Distribution& d, double x) noexcept {
  switch (d.kind()) {
    case Kind::uniform: {
      const double lo = d.support_lo(), hi = d.support_hi();
      if (x <= lo) return 0.0;
      if (x >= hi) return 1.0;
      return (x - lo) / (hi - lo);
    }
    case Kind::gaussian: {
      const double z = (x - d.mean()) / (d.stddev() * std::numbers::sqrt2);
      return std::clamp(0.5 * std::erfc(-z), 0.0, 1.0);
    }
    case Kind::point_mass: return x >= d.mean() ? 1.0 : 0.0;
  }
  return 0.0;
}

double quantile(const Distribution& d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile requires 0 < p < 1");
  switch (d.kind()) {
    case Kind::uniform: return d.support_lo() + p * (d.support_hi() - d.support_lo());
    case Kind::gaussian:
      return d.mean() - d.stddev() * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    case Kind::point_mass: return d.mean();
  }
  return 0.0;
}

double draw(const Distribution& d, Rng& rng) {
  if (d.kind() == Kind::point_mass) return d.mean();
  return quantile(d, rng.uniform());
}

std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t count) {
  std::vector<double> out(count);
  for (auto& x : out) x = draw(d, rng);
  return out;
}

double max_order_cdf(const Distribution& d, int n, double x) {
  require_order(n);
  return std::pow(cdf(d, x), n);
}

MaxOrderSummary max_order_summary(const Distribution& d, int n) {
  require_order(n);
  const double nn = n;
  switch (d.kind()) {
    case Kind::uniform: {
      // Affine image of Beta(n, 1).
      const double width = d.support_hi() - d.support_lo();
      return {n, d.support_lo() + width * nn / (nn + 1.0),
              width * width * nn / ((nn + 1.0) * (nn + 1.0) * (nn + 2.0))};
    }
    case Kind::point_mass: return {n, d.mean(), 0.0};
    case Kind::gaussian: break;
  }

  const double lo = d.integration_lo(), hi = d.integration_hi();
  const auto breaks = max_order_breakpoints(d, n);
  const double mean =
      lo + integrate([&](double x) { return 1.0 - std::pow(cdf(d, x), nn); }, lo, hi, breaks);
  const double variance = integrate(
      [&](double x) {
        const double dev = x - mean;
        return dev * dev * nn * std::pow(cdf(d, x), nn - 1.0) * d.density(x);
      },
      lo, hi, breaks);
  return {n, mean, std::max(variance, 0.0)};
}

std::vector<ConcentrationPoint> concentration_curve(const Distribution& d, double epsilon,
                                                    std::span<const int> n_schedule) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (n_schedule.empty()) throw std::invalid_argument("n schedule must be nonempty");
  if (!std::is_sorted(n_schedule.begin(), n_schedule.end(), std::less_equal<>{}))
    throw std::invalid_argument("n schedule must be strictly increasing");

  std::vector<ConcentrationPoint> curve;
  curve.reserve(n_schedule.size());
  for (int n : n_schedule) {
    const double center = max_order_summary(d, n).mean;
    const double below = max_order_cdf(d, n, center - epsilon);
    const double above = 1.0 - max_order_cdf(d, n, center + epsilon);
    curve.push_back({n, std::clamp(below + above, 0.0, 1.0)});
  }
  return curve;
}

double pr_max_exceeds(const Distribution& d, int n, double delta) {
  require_order(n);
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  // Two atoms at the same point always tie.
  if (d.kind() == Kind::point_mass) return 0.0;

  const double nn = n;
  const double lo = d.integration_lo(), hi = d.integration_hi();
  auto breaks = max_order_breakpoints(d, n);
  breaks.push_back(hi - delta);
  const double p = integrate(
      [&](double x) {
        const double tail = 1.0 - std::pow(cdf(d, x + delta), nn);
        if (tail <= 0.0) return 0.0;
        return tail * nn * std::pow(cdf(d, x), nn - 1.0) * d.density(x);
      },
      lo, hi, breaks);
  return std::clamp(p, 0.0, 1.0);
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breakpoints) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> knots{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi) knots.push_back(b);
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  // Globally adaptive: keep bisecting the segment with the largest error
  // estimate until the summed error meets the target.
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
  };
  auto estimate = [&](double a, double b) {
    double error = 0.0;
    const double value = Rule::integrate(f, a, b, 0, 0.0, &error);
    return Segment{a, b, value, error};
  };

  std::priority_queue<Segment> queue;
  double total = 0.0, total_error = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    queue.push(estimate(knots[i], knots[i + 1]));
    total += queue.top().value;
    total_error += queue.top().error;
  }
  auto converged = [&] { return total_error <= std::max(kQuadTolerance * std::abs(total), kQuadAbsFloor); };
  for (int segments = static_cast<int>(queue.size()); !converged() && segments < kQuadMaxSegments; ++segments) {
    const Segment worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    queue.pop();
    const Segment left = estimate(worst.a, mid), right = estimate(mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  // Re-summing from scratch avoids drift from the running updates.
  double sum = 0.0;
  for (; !queue.empty(); queue.pop()) sum += queue.top().value;
  return sum;
}

double expect(const Distribution& d, const std::function<double(double)>& f,
              std::span<const double> breakpoints) {
  switch (d.kind()) {
    case Kind::point_mass: return f(d.mean());
    case Kind::uniform:
      return integrate(f, d.support_lo(), d.support_hi(), breakpoints) /
             (d.support_hi() - d.support_lo());
    case Kind::gaussian: {
      std::vector<double> knots(breakpoints.begin(), breakpoints.end());
      knots.push_back(d.mean());
      return integrate([&](double x) { return f(x) * d.density(x); }, d.integration_lo(),
                       d.integration_hi(), knots);
    }
  }
  return 0.0;
}

}  // namespace matchlab::dist
