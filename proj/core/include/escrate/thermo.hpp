#pragma once

// Locally constant potentials, finite transfer matrices on the n-cylinder
// algebra, Perron-Frobenius data, pressure and Gibbs cylinder weights.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "escrate/sparse.hpp"
#include "escrate/symbolic.hpp"

namespace escrate {

/// A real function on the shift space depending only on the first `depth`
/// symbols. Values are stored densely by base-l word code.
class Potential {
 public:
  /// Throws InvalidInput if an admissible k-word has no value and no
  /// default was supplied.
  Potential(const Subshift& s, std::size_t depth, const std::map<Word, double>& values,
            std::optional<double> default_value = std::nullopt);

  static Potential constant(const Subshift& s, double value);
  /// Depth-1 potential, one value per symbol.
  static Potential per_symbol(const Subshift& s, const std::vector<double>& values);

  std::size_t depth() const noexcept { return depth_; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }

  /// Value on the cylinder of the first `depth` symbols of `w`.
  double operator()(const Word& w) const;
  /// Value by base-l code of a depth-length word; NaN when inadmissible.
  double at_code(std::uint64_t code) const { return values_[code]; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Same function viewed at a larger depth.
  Potential lifted(std::size_t depth) const;
  Potential scaled(double factor) const;
  Potential shifted(double constant) const;

  std::map<Word, double> to_map(const Subshift& s) const;

 private:
  Potential() = default;
  std::size_t depth_ = 1;
  std::size_t alphabet_ = 0;
  std::vector<double> values_;
};

/// Transfer operator restricted to functions constant on n-cylinders.
/// Row c, column c' holds e^{phi(c')} when c' = a . c_0 ... c_{n-2}.
struct TransferMatrix {
  std::size_t depth = 0;
  std::shared_ptr<const Cylinders> states;
  SparseMatrix entries;
};

/// Depth is raised to max(n, phi.depth) so phi is constant on states.
TransferMatrix build_transfer_matrix(const Subshift& s, const Potential& phi, std::size_t n);

struct PowerOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
};

struct SpectralData {
  std::size_t depth = 0;
  std::shared_ptr<const Cylinders> states;
  double lambda = 0.0;
  /// Eigenfunction g on n-cylinders.
  std::vector<double> right_vector;
  /// Eigenmeasure nu of n-cylinders; sums to 1.
  std::vector<double> left_vector;
  /// Equilibrium weights mu = g nu; sums to 1.
  std::vector<double> gibbs;
  double pressure = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Perron triple by power iteration. Requires a primitive graph; throws
/// NotMixingAfterRestriction otherwise, NoConvergence on budget exhaustion.
SpectralData leading_eigentriple(const TransferMatrix& m, const PowerOptions& options = {});

/// Spectral radius of a nonnegative matrix of any graph structure, as the
/// maximum of per-component Perron roots.
struct RadiusResult {
  double radius = 0.0;
  /// True when the components achieving the maximum reduce to one primitive
  /// component and every other component carries no cycle.
  bool mixing = false;
  std::size_t components_with_cycles = 0;
  std::size_t iterations = 0;
};

RadiusResult spectral_radius(const SparseMatrix& a, const PowerOptions& options = {});

/// Perron data of the component attaining the spectral radius. Vectors are
/// indexed like `members`, normalized so sum(left) = 1 and left . right = 1.
struct DominantComponent {
  double lambda = 0.0;
  std::vector<std::uint32_t> members;
  std::vector<double> left;
  std::vector<double> right;
  bool mixing = false;
  std::size_t components_with_cycles = 0;
};

/// lambda = 0 and empty members when no component carries a cycle.
DominantComponent dominant_component(const SparseMatrix& a, const PowerOptions& options = {});

double pressure(const Subshift& s, const Potential& phi, const PowerOptions& options = {});

/// Cylinder weights aligned with a Cylinders table.
struct CylinderWeights {
  std::shared_ptr<const Cylinders> cylinders;
  std::vector<double> weights;

  double operator[](const Word& w) const;
  std::map<Word, double> to_map() const;
};

CylinderWeights gibbs_measure(const Subshift& s, const Potential& phi, std::size_t n,
                              const PowerOptions& options = {});

/// Exact Gibbs measure of arbitrary cylinders. Built once from the Perron
/// data at depth D = phi.depth; longer words use the order-D Markov
/// property P(b | u) = nu(c) M[c][u] / (lambda nu(u)) with c = u_1..u_{D-1} b.
class GibbsMeasure {
 public:
  GibbsMeasure(const Subshift& s, const Potential& phi, const PowerOptions& options = {});

  const Subshift& subshift() const noexcept { return subshift_; }
  const SpectralData& spectral() const noexcept { return spectral_; }
  std::size_t depth() const noexcept { return spectral_.depth; }
  double lambda() const noexcept { return spectral_.lambda; }
  double pressure() const noexcept { return spectral_.pressure; }

  /// mu of the cylinder [w]; 0 for inadmissible words. The empty word has
  /// measure 1.
  double operator()(const Word& w) const;
  double of_set(const std::vector<Word>& words) const;

  /// P(x_D = b | x_0..x_{D-1} = state), indexed [state * l + b].
  const std::vector<double>& transitions() const noexcept { return transitions_; }
  /// Index into spectral().states of the window shifted by one symbol.
  std::size_t next_state(std::size_t state, Symbol b) const;

 private:
  Subshift subshift_;
  SpectralData spectral_;
  std::vector<double> transitions_;
  std::vector<std::vector<double>> marginals_;
};

/// phi^p(z) = sum_{j<p} phi(sigma^j z).
double birkhoff_sum(const Potential& phi, const SymbolicPoint& z, std::size_t p);

/// Least admissible infinite extension of w, truncated to `length` symbols.
Word least_extension(const Subshift& s, const Word& w, std::size_t length);

struct GibbsConstantReport {
  /// Overall constant: max over depths 1..n_max.
  double constant = 1.0;
  /// Per-depth constants, index d-1 for depth d.
  std::vector<double> per_depth;
};

/// Empirical constant c with c^{-1} <= mu[x]_n / e^{phi^n(x) - n P} <= c,
/// using the least admissible extension of each word as its point.
GibbsConstantReport gibbs_constant_check(const Subshift& s, const Potential& phi, std::size_t n_max,
                                         const PowerOptions& options = {});

/// phi + log g - log g o sigma - log lambda, which has pressure 0 and
/// transfer operator fixing 1.
Potential normalized_potential(const Subshift& s, const Potential& phi, const PowerOptions& options = {});

}  // namespace escrate
