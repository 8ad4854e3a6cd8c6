#pragma once

// Markov interval maps: the geometric realization of cylinders, symbolic
// coding of points, inner/outer cylinder approximations of balls and the
// geometric potential -t log|f'|.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "escrate/symbolic.hpp"
#include "escrate/thermo.hpp"

namespace escrate {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double x, double tol = 0.0) const noexcept { return x >= lo - tol && x <= hi + tol; }
  bool intersects(const Interval& o) const noexcept { return hi >= o.lo && lo <= o.hi; }
  bool inside(const Interval& o, double tol = 0.0) const noexcept { return lo >= o.lo - tol && hi <= o.hi + tol; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// One monotone C^1 branch f: domain -> R.
class Branch {
 public:
  static Branch linear(Interval domain, double slope, double offset);
  /// `f` must be strictly monotone on the domain, `df` its derivative.
  static Branch general(Interval domain, std::function<double(double)> f, std::function<double(double)> df,
                        std::string f_text = {}, std::string df_text = {});

  const Interval& domain() const noexcept { return domain_; }
  double operator()(double x) const;
  double derivative(double x) const;
  Interval image() const;
  bool increasing() const noexcept { return increasing_; }
  bool is_linear() const noexcept { return linear_; }
  double slope() const noexcept { return slope_; }
  double offset() const noexcept { return offset_; }
  const std::string& f_text() const noexcept { return f_text_; }
  const std::string& df_text() const noexcept { return df_text_; }

  /// Preimage of y in the domain (y must lie in image()); exact for linear
  /// branches, safeguarded Newton to 1e-14 otherwise.
  double inverse(double y) const;

 private:
  Interval domain_;
  bool linear_ = true;
  bool increasing_ = true;
  double slope_ = 1.0;
  double offset_ = 0.0;
  std::function<double(double)> f_;
  std::function<double(double)> df_;
  std::string f_text_;
  std::string df_text_;
};

struct ExpansionReport {
  /// Minimum of |f'| sampled on every branch.
  double min_derivative = 0.0;
  /// min over depth-n0 cylinders of |(f^{n0})'| at the left endpoint.
  double eventual_expansion = 0.0;
  std::size_t n0 = 1;
};

class MarkovIntervalMap {
 public:
  /// Validates disjoint interiors and the Markov property: every branch
  /// image meets the union of branch intervals in a union of whole branch
  /// intervals. Throws InvalidInput otherwise.
  explicit MarkovIntervalMap(std::vector<Branch> branches, std::vector<std::string> labels = {});

  /// f(x) = 3x mod 1 on [0,1/3] u [2/3,1], symbols labelled 0 and 2.
  static MarkovIntervalMap cantor();
  /// f(x) = 2x mod 1 on [0,1/2] u [1/2,1].
  static MarkovIntervalMap doubling();

  const Subshift& subshift() const noexcept { return subshift_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  bool piecewise_linear() const noexcept;
  ExpansionReport expansion(std::size_t n0 = 1) const;

  /// Lowest-index branch whose domain contains x.
  std::optional<Symbol> branch_of(double x, double tol = 0.0) const;
  Interval cylinder_interval(const Word& w) const;
  /// Intervals of every cylinder of the given depth, aligned with `cylinders`.
  std::vector<Interval> cylinder_intervals(const Cylinders& cylinders) const;

 private:
  std::vector<Branch> branches_;
  Subshift subshift_;
};

struct EncodedPoint {
  SymbolicPoint point;
  /// Exact eventual periodicity was established with rational arithmetic.
  bool exact = false;
};

/// Address of x. For linear maps with rational data and rational x the
/// orbit is followed exactly and an eventually periodic representation is
/// returned when it closes up; otherwise a `digits`-long prefix. Throws
/// NotInRepeller if the orbit leaves the branch intervals.
EncodedPoint encode_point(const MarkovIntervalMap& m, double x, std::size_t digits);

struct BallApproximation {
  double center = 0.0;
  double epsilon = 0.0;
  std::size_t depth = 0;
  /// Cylinders whose intervals lie in the closed ball.
  std::vector<Word> inner;
  /// Cylinders whose intervals meet the closed ball.
  std::vector<Word> outer;
  double mu_inner = 0.0;
  double mu_outer = 0.0;
  /// (mu(outer) - mu(inner)) / mu(outer).
  double eta = 0.0;
};

/// Least depth whose cylinder sandwich around B(z, eps) has measure slack
/// at most eta under `mu`. Throws NotInRepeller if z is not in J and
/// DepthCapExceeded (with the best slack reached) when no depth within the
/// state cap achieves eta.
BallApproximation ball_to_cylinders(const MarkovIntervalMap& m, const GibbsMeasure& mu, double z, double epsilon,
                                    double eta, std::size_t cap = kStateCap);

struct GeometricPotential {
  Potential potential;
  /// Max over depth-k cylinders of the variation of log|f'| on the
  /// cylinder interval; exactly 0 for piecewise-linear maps.
  double oscillation = 0.0;
};

/// log|f'| sampled at the left endpoint of every depth-k cylinder.
GeometricPotential log_derivative(const MarkovIntervalMap& m, std::size_t depth);
/// -t log|f'| sampled the same way.
GeometricPotential log_deriv_potential(const MarkovIntervalMap& m, double t, std::size_t depth);

}  // namespace escrate
