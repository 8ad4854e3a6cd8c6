#pragma once

// Shrinking holes around a point, the perturbed transfer operator
// L_n w = L(1_{U_n^c} w), its leading eigenvalue and the escape-rate
// asymptotics built on it.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "escrate/symbolic.hpp"
#include "escrate/thermo.hpp"

namespace escrate {

/// One member U_n of a hole family: a finite union of cylinders of a common
/// length, all inside the cylinder [z]_{center_depth}.
struct Hole {
  std::size_t index = 0;
  std::vector<Word> words;
  std::size_t length = 0;
  std::size_t center_depth = 0;
};

class HoleFamily {
 public:
  HoleFamily(SymbolicPoint center, std::vector<Hole> holes);

  const SymbolicPoint& center() const noexcept { return center_; }
  const std::vector<Hole>& holes() const noexcept { return holes_; }
  std::size_t first_index() const { return holes_.front().index; }
  std::size_t last_index() const { return holes_.back().index; }
  /// Throws InvalidInput for an index outside the family.
  const Hole& at(std::size_t n) const;

 private:
  SymbolicPoint center_;
  std::vector<Hole> holes_;
};

/// U_n = [z]_n for n = 1..n_max. Throws InsufficientDigits when a finite
/// generator for z is shorter than n_max.
HoleFamily standard_hole_family(const Subshift& s, const SymbolicPoint& z, std::size_t n_max);

struct HoleFamilyReport {
  bool nested = true;
  bool contains_center = true;
  bool inside_center_cylinder = true;
  /// min over n of center_depth / length.
  double kappa = 0.0;
  /// Least-squares fit mu(U_n) ~ c rho^{length}; rho < 1 expected.
  double fitted_c = 0.0;
  double fitted_rho = 0.0;
  /// For periodic centers: first index from which
  /// sigma^{-p}(U_n) cap [z_0..z_{p-1}] is contained in U_n for every later
  /// member. nullopt if the center is not periodic or it never settles.
  std::optional<std::size_t> periodic_threshold;
};

HoleFamilyReport check_hole_family(const Subshift& s, const HoleFamily& family, const GibbsMeasure& mu);

/// Copy of `m` with every column indexed by a hole cylinder removed. Hole
/// words shorter than m.depth are refined; longer ones raise DepthMismatch.
TransferMatrix perturbed_matrix(const TransferMatrix& m, const std::vector<Word>& hole);

struct PerturbedEigenvalue {
  double lambda_n = 0.0;
  std::size_t depth = 0;
  /// Surviving graph has a single primitive component carrying cycles.
  bool mixing = false;
  /// No surviving cycle: lambda_n = 0 and the escape rate is infinite.
  bool empty_survivor = false;
  std::size_t components_with_cycles = 0;
  std::size_t iterations = 0;
};

/// Spectral radius of the perturbed matrix at depth max(depth, hole length,
/// phi.depth).
PerturbedEigenvalue perturbed_eigenvalue(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                         std::size_t depth, const PowerOptions& options = {});

struct EscapeRateResult {
  std::size_t n = 0;
  std::size_t len_n = 0;
  double mu_hole = 0.0;
  double lambda = 0.0;
  double lambda_n = 0.0;
  /// log lambda - log lambda_n; +inf for an empty survivor set.
  double escape_rate = 0.0;
  double ratio = 0.0;
  /// (lambda - lambda_n) / mu(U_n).
  double gap_ratio = 0.0;
  double predicted = 0.0;
  bool mixing = false;
  bool empty_survivor = false;
};

/// d_phi(z): 1 for non-periodic z, 1 - e^{phi^p(z) - p P(phi)} for prime period p.
double predicted_limit(const Subshift& s, const Potential& phi, const SymbolicPoint& z,
                       const PowerOptions& options = {});

/// Shared state for computations on one (subshift, potential) pair: the
/// unperturbed pressure and the exact Gibbs measure.
class EscapeProblem {
 public:
  EscapeProblem(Subshift s, Potential phi, PowerOptions options = {});

  const Subshift& subshift() const noexcept { return subshift_; }
  const Potential& potential() const noexcept { return phi_; }
  const GibbsMeasure& measure() const noexcept { return mu_; }
  double lambda() const noexcept { return mu_.lambda(); }
  double pressure() const noexcept { return mu_.pressure(); }
  const PowerOptions& options() const noexcept { return options_; }

  double predicted(const SymbolicPoint& z) const;
  EscapeRateResult escape_rate(const Hole& hole, const SymbolicPoint& z) const;

 private:
  Subshift subshift_;
  Potential phi_;
  PowerOptions options_;
  GibbsMeasure mu_;
};

EscapeRateResult escape_rate(const Subshift& s, const Potential& phi, const HoleFamily& family, std::size_t n,
                             const PowerOptions& options = {});

struct SweepReport {
  std::vector<EscapeRateResult> rows;
  double final_ratio = 0.0;
  double predicted = 0.0;
  /// |final_ratio - predicted|.
  double deviation = 0.0;
  /// Limit of gap_ratio: lambda (1 - lambda^{-p} e^{phi^p(z)}), or lambda.
  double predicted_gap = 0.0;
  double final_gap_ratio = 0.0;
  /// lambda_n nondecreasing along the sweep (nested holes).
  bool lambda_monotone = true;
  /// Deviations strictly decrease over the last min(5, rows) rows.
  bool deviations_decreasing = true;
  /// Fitted geometric rate of |ratio - predicted| over the sweep; absent
  /// for fewer than 3 rows.
  std::optional<double> convergence_rate;
};

/// Indices n in [n_first, n_last] of the family, computed concurrently.
SweepReport escape_sweep(const Subshift& s, const Potential& phi, const HoleFamily& family, std::size_t n_first,
                         std::size_t n_last, const PowerOptions& options = {});
SweepReport escape_sweep(const EscapeProblem& problem, const HoleFamily& family, std::size_t n_first,
                         std::size_t n_last);

struct PressureGapRatio {
  double value = 0.0;
  /// Set when the ratio is undefined (empty hole: 0/0) or infinite.
  bool degenerate = false;
  std::string note;
};

/// (P(phi) - log lambda_n) / mu(U_n).
PressureGapRatio pressure_gap_ratio(const Subshift& s, const Potential& phi, const HoleFamily& family,
                                    std::size_t n, const PowerOptions& options = {});
PressureGapRatio pressure_gap_ratio(const EscapeProblem& problem, const Hole& hole);

/// mu{x : sigma^i x not in U, 0 <= i < k} for k = 0..k_max from the
/// normalized perturbed matrix: sum_c mu(c) (M~_n^k 1)(c).
std::vector<double> matrix_survival(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                    std::size_t k_max, const PowerOptions& options = {});

}  // namespace escrate
