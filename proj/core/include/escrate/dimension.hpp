#pragma once

// Bowen equation P(-t log|f'|) = 0 for open and closed Markov interval
// maps, and the asymptotics of the survivor-set dimension.

#include <cstddef>
#include <optional>
#include <vector>

#include "escrate/geometry.hpp"
#include "escrate/holes.hpp"
#include "escrate/thermo.hpp"

namespace escrate {

struct LyapunovDerivative {
  /// Spectral radius of the (perturbed) transfer matrix of -t psi.
  double lambda = 0.0;
  /// d lambda / dt = -lambda * integral of psi against the equilibrium weights.
  double derivative = 0.0;
  /// integral of psi = log|f'| against mu_t.
  double lyapunov = 0.0;
  bool mixing = false;
};

/// psi is log|f'| sampled on cylinders (see log_derivative). The matrix
/// depth is max(depth, psi.depth, hole length).
LyapunovDerivative lyapunov_derivative(const Subshift& s, const Potential& psi, double t,
                                       const std::vector<Word>& hole = {}, std::size_t depth = 1,
                                       const PowerOptions& options = {});

struct BowenOptions {
  double residual_tolerance = 1e-10;
  double bisection_width = 1e-4;
  std::size_t max_newton_steps = 50;
  PowerOptions power{};
};

struct BowenRoot {
  double t = 0.0;
  /// |log lambda_t| at the returned root.
  double residual = 0.0;
  double lyapunov = 0.0;
  std::size_t bisection_steps = 0;
  std::size_t newton_steps = 0;
  bool mixing = true;
  /// Oscillation diagnostic of the sampled log|f'|.
  double oscillation = 0.0;
};

/// Root of t -> log lambda_t with psi sampled at `depth`. Throws NoRoot when
/// the map is not expanding, when lambda_0 < 1 or when no sign change is
/// found.
BowenRoot bowen_root(const MarkovIntervalMap& m, std::size_t depth, const std::vector<Word>& hole = {},
                     const BowenOptions& options = {});

struct DimensionResult {
  std::size_t n = 0;
  std::size_t depth = 0;
  double mu_hole = 0.0;
  double s = 0.0;
  double s_n = 0.0;
  /// (s - s_n) / mu(U_n).
  double ratio = 0.0;
  /// d_phi(z) / lyapunov with phi = -s log|f'|.
  double predicted = 0.0;
  double deviation = 0.0;
  double lyapunov = 0.0;
  double oscillation = 0.0;
  bool mixing = true;
};

struct DimensionSweep {
  std::vector<DimensionResult> rows;
  double final_ratio = 0.0;
  double predicted = 0.0;
  double deviation = 0.0;
  bool s_n_monotone = true;
};

/// Each row is computed at the hole's own depth; rows run concurrently.
DimensionSweep dimension_sweep(const MarkovIntervalMap& m, const HoleFamily& family, std::size_t n_first,
                               std::size_t n_last, const BowenOptions& options = {});

}  // namespace escrate
