#pragma once

// Ground truth for survival probabilities: exhaustive enumeration of
// cylinders, Monte-Carlo sampling from exact Gibbs conditionals, tail fits
// and the Kac return-time identity.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "escrate/symbolic.hpp"
#include "escrate/thermo.hpp"

namespace escrate {

enum class SurvivalMethod { Exhaustive, MonteCarlo };

std::string to_string(SurvivalMethod m);

struct SurvivalCurve {
  std::vector<std::size_t> k_values;
  /// mu{x : sigma^i x not in U, 0 <= i < k}.
  std::vector<double> survival;
  /// Binomial standard errors; empty for exhaustive curves.
  std::vector<double> standard_error;
  SurvivalMethod method = SurvivalMethod::Exhaustive;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> flags;
};

/// Sum of Gibbs weights of admissible (k + L - 1)-words avoiding the hole at
/// every shift below k, for k = 0..k_max (L = hole word length). Throws
/// EnumerationCapExceeded when admissible words of length k_max + L - 1 exceed the cap.
SurvivalCurve exhaustive_survival(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                  std::size_t k_max, const PowerOptions& options = {});
SurvivalCurve exhaustive_survival(const GibbsMeasure& mu, const std::vector<Word>& hole, std::size_t k_max);

/// Sample i draws its symbols from a counter-based stream keyed by
/// (seed, i), so results do not depend on the thread count.
SurvivalCurve monte_carlo_survival(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                   std::size_t k_max, std::uint64_t samples, std::uint64_t seed,
                                   const PowerOptions& options = {});
SurvivalCurve monte_carlo_survival(const GibbsMeasure& mu, const std::vector<Word>& hole, std::size_t k_max,
                                   std::uint64_t samples, std::uint64_t seed);

struct EscapeRateFit {
  double rate = 0.0;
  double standard_error = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of -log survival against k over the trailing
/// tail_fraction of the curve. Throws InsufficientTail with fewer than 4
/// positive points there.
EscapeRateFit fit_escape_rate(const SurvivalCurve& curve, double tail_fraction = 0.5);

struct KacCheck {
  /// sum_{i <= k_max} i m(T = i).
  double partial = 0.0;
  /// Interval containing the full mean return time.
  double lhs_lower = 0.0;
  double lhs_upper = 0.0;
  /// 1 / mu(U).
  double rhs = 0.0;
  /// Distance from rhs to [lhs_lower, lhs_upper].
  double gap = 0.0;
  /// m(T > k_max).
  double tail_mass = 0.0;
  /// Geometric ratio bounding the tail.
  double tail_ratio = 0.0;
  std::vector<double> return_law;
};

/// Return-time law of the normalized restriction of mu to U, enumerated to
/// k_max, with the remaining tail bounded geometrically.
KacCheck kac_check(const Subshift& s, const Potential& phi, const std::vector<Word>& hole, std::size_t k_max,
                   const PowerOptions& options = {});

}  // namespace escrate
