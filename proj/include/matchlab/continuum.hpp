#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "matchlab/access_law.hpp"
#include "matchlab/distributions.hpp"

namespace matchlab {

/// Monoculture: one shared estimate per applicant. Polyculture: one
/// independent estimate per (applicant, firm).
enum class Mode { mono, poly };

std::string to_string(Mode mode);
/// `mono` or `poly`; throws std::invalid_argument otherwise.
Mode parse_mode(std::string_view text);

}  // namespace matchlab

namespace matchlab::continuum {

/// Root finding failed: the bracket does not straddle the target or the
/// iteration cap was hit.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Continuum economy: a unit mass of applicants with values from `values`,
/// m symmetric firms sharing total capacity S, and estimation noise `noise`.
struct MarketSpec {
  int num_firms = 1;
  double total_capacity = 0.5;
  dist::Distribution values = dist::Distribution::uniform(0.0, 1.0);
  dist::Distribution noise = dist::Distribution::uniform(-0.5, 0.5);
  Mode mode = Mode::mono;
  /// Absent: every applicant applies to every firm.
  std::optional<access::AccessDistribution> access;

  /// Throws std::invalid_argument on m < 1, S outside (0,1), or a kappa
  /// whose support exceeds m.
  void validate() const;
};

struct CutoffSolution {
  double cutoff = 0.0;
  /// aggregate_demand(cutoff) - S.
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  Mode mode = Mode::mono;
  int iterations = 0;
};

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr int kMaxBisections = 200;

/// Probability that an applicant of value v clears the shared cutoff P at
/// some firm they apply to, given they apply to `applications` firms.
double clear_probability(const MarketSpec& spec, double cutoff, double v, int applications);

/// Mass of applicants matched when every firm uses cutoff P.
double aggregate_demand(const MarketSpec& spec, double cutoff);

/// Shared market-clearing cutoff by bisection on the strictly decreasing
/// map P -> aggregate_demand(P) - S.
CutoffSolution solve_cutoff(const MarketSpec& spec, double tolerance = kDefaultTolerance);

/// Match probability for value v. With k given (requires a kappa), the
/// probability for an applicant who applies to k firms; otherwise k = m.
double match_probability(const MarketSpec& spec, double cutoff, double v,
                         std::optional<int> k = std::nullopt);

/// Probability of matching to the top-choice firm: one draw against P.
double top_choice_probability(const MarketSpec& spec, double cutoff, double v);

/// v_S with eta((v_S, inf)) = S.
double v_s_threshold(const dist::Distribution& values, double total_capacity);

struct FirmWelfare {
  /// Integral of v times match probability against eta.
  double achieved = 0.0;
  /// Integral of v over the top-S mass of eta.
  double optimal = 0.0;
};

FirmWelfare firm_welfare(const MarketSpec& spec, double cutoff);

/// Expected preference rank of the best of the affordable firms, conditional
/// on at least one of m being affordable, when each firm is affordable
/// independently with probability p and preferences are uniformly random.
/// Throws std::invalid_argument for p <= 0.
double conditional_rank(int num_firms, double p);

/// Continuum expected matched rank under polyculture; 1 under monoculture.
double expected_rank_poly(const MarketSpec& spec, double cutoff, double v);

/// `{mode, m, S, value_dist, noise_dist, kappa, cutoff, residual}` as one
/// JSON object.
std::string solution_json(const MarketSpec& spec, const CutoffSolution& solution);

}  // namespace matchlab::continuum
