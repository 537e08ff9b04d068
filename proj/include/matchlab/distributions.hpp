#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matchlab/rng.hpp"

namespace matchlab::dist {

enum class Kind { uniform, gaussian, point_mass };

/// A one-dimensional value or noise law.
///
/// Gaussians are parameterized by (mean, variance). Point masses exist for
/// tests only; the cutoff solver rejects them because their support is not
/// an interval.
class Distribution {
 public:
  static Distribution uniform(double lo, double hi);
  static Distribution gaussian(double mean, double variance);
  static Distribution point_mass(double at);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// Support endpoints; -inf / +inf for gaussians.
  [[nodiscard]] double support_lo() const noexcept;
  [[nodiscard]] double support_hi() const noexcept;
  [[nodiscard]] double mean() const noexcept;
  [[nodiscard]] double variance() const noexcept;
  [[nodiscard]] double stddev() const noexcept;
  [[nodiscard]] bool has_connected_support() const noexcept { return kind_ != Kind::point_mass; }

  /// Finite range that carries all but a negligible tail of the mass:
  /// the support for bounded laws, mean +/- 8 sd for gaussians.
  [[nodiscard]] double integration_lo() const noexcept;
  [[nodiscard]] double integration_hi() const noexcept;

  /// Lebesgue density; zero for point masses.
  [[nodiscard]] double density(double x) const noexcept;

  /// Canonical literal, e.g. "uniform(-0.5,0.5)"; parse_distribution inverts it.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Distribution(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_;  // lo / mean / atom
  double b_;  // hi / variance / unused
};

/// Parses `uniform(a,b)`, `gaussian(mu,var)` and `pointmass(c)`,
/// case-insensitively. Throws std::invalid_argument on malformed input.
Distribution parse_distribution(std::string_view text);

double cdf(const Distribution& d, double x) noexcept;

/// Inverse CDF. Throws std::invalid_argument unless 0 < p < 1.
double quantile(const Distribution& d, double p);

/// One draw by inversion of a single uniform.
double draw(const Distribution& d, Rng& rng);

std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t count);

/// P[max of n i.i.d. draws <= x].
double max_order_cdf(const Distribution& d, int n, double x);

struct MaxOrderSummary {
  int n = 0;
  double mean = 0.0;
  double variance = 0.0;
};

MaxOrderSummary max_order_summary(const Distribution& d, int n);

struct ConcentrationPoint {
  int n = 0;
  double probability = 0.0;
};

/// P[|X^(n) - E X^(n)| > epsilon] for each n in the schedule.
std::vector<ConcentrationPoint> concentration_curve(const Distribution& d, double epsilon,
                                                    std::span<const int> n_schedule);

/// P[X_B^(n) - X_A^(n) > delta] for independent maxima of n draws each.
double pr_max_exceeds(const Distribution& d, int n, double delta);

/// Adaptive Gauss-Kronrod integral of f over [lo, hi], split at the given
/// interior breakpoints (points outside [lo, hi] are ignored).
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breakpoints = {});

/// E[f(V)] for V ~ d. Breakpoints mark kinks of f.
double expect(const Distribution& d, const std::function<double(double)>& f,
              std::span<const double> breakpoints = {});

}  // namespace matchlab::dist
