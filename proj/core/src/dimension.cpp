#include "escrate/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "escrate/errors.hpp"
#include "escrate/parallel.hpp"

namespace escrate {

LyapunovDerivative lyapunov_derivative(const Subshift& s, const Potential& psi, double t, const std::vector<Word>& hole,
                                       std::size_t depth, const PowerOptions& options) {
  std::size_t d = std::max({depth, psi.depth(), std::size_t{1}});
  for (const auto& w : hole) d = std::max(d, w.size());
  auto m = build_transfer_matrix(s, psi.scaled(-t), d);
  if (!hole.empty()) m = perturbed_matrix(m, hole);
  auto dc = dominant_component(m.entries, options);

  LyapunovDerivative out;
  out.lambda = dc.lambda;
  out.mixing = dc.mixing;
  if (dc.members.empty()) return out;

  std::uint64_t factor = 1;
  for (std::size_t i = psi.depth(); i < d; ++i) factor *= s.alphabet_size();
  double integral = 0.0;
  for (std::size_t i = 0; i < dc.members.size(); ++i) {
    const double value = psi.at_code(m.states->code(dc.members[i]) / factor);
    integral += value * dc.left[i] * dc.right[i];
  }
  out.lyapunov = integral;
  out.derivative = -dc.lambda * integral;
  return out;
}

BowenRoot bowen_root(const MarkovIntervalMap& m, std::size_t depth, const std::vector<Word>& hole,
                     const BowenOptions& options) {
  const auto geo = log_derivative(m, std::max<std::size_t>(1, depth));
  const auto& s = m.subshift();
  const double tol = options.residual_tolerance;

  BowenRoot root;
  root.oscillation = geo.oscillation;
  auto eval = [&](double t) { return lyapunov_derivative(s, geo.potential, t, hole, depth, options.power); };
  auto finish = [&](double t, const LyapunovDerivative& e) {
    root.t = t;
    root.residual = std::abs(std::log(e.lambda));
    root.lyapunov = e.lyapunov;
    root.mixing = e.mixing;
    return root;
  };

  const auto e0 = eval(0.0);
  if (!(e0.lambda > 0.0)) raise(ErrorCode::NoRoot, "survivor set is empty (lambda_0 = 0)");
  if (!(e0.lyapunov > 0.0)) raise(ErrorCode::NoRoot, "map is not expanding on the survivor set (log|f'| integrates to <= 0)");
  const double f0 = std::log(e0.lambda);
  if (std::abs(f0) <= tol) return finish(0.0, e0);
  if (f0 < 0.0) raise(ErrorCode::NoRoot, "lambda_0 < 1: pressure is negative at t = 0");

  double lo = 0.0, hi = 1.0;
  auto ehi = eval(hi);
  while (std::log(ehi.lambda) > tol) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1024.0) raise(ErrorCode::NoRoot, "no sign change of the pressure for t <= 1024");
    ehi = eval(hi);
  }
  if (std::abs(std::log(ehi.lambda)) <= tol) return finish(hi, ehi);

  while (hi - lo > options.bisection_width) {
    const double mid = 0.5 * (lo + hi);
    const auto e = eval(mid);
    ++root.bisection_steps;
    const double f = std::log(e.lambda);
    if (std::abs(f) <= tol) return finish(mid, e);
    (f > 0.0 ? lo : hi) = mid;
  }

  double t = 0.5 * (lo + hi);
  for (std::size_t step = 0; step < options.max_newton_steps; ++step) {
    const auto e = eval(t);
    const double f = std::log(e.lambda);
    if (std::abs(f) <= tol) return finish(t, e);
    (f > 0.0 ? lo : hi) = t;
    ++root.newton_steps;
    // d/dt log lambda_t = -lyapunov
    double next = e.lyapunov > 0.0 ? t + f / e.lyapunov : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  // Newton failed to contract; finish by bisection.
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    const auto e = eval(mid);
    ++root.bisection_steps;
    const double f = std::log(e.lambda);
    if (std::abs(f) <= tol) return finish(mid, e);
    (f > 0.0 ? lo : hi) = mid;
  }
  return finish(0.5 * (lo + hi), eval(0.5 * (lo + hi)));
}

DimensionSweep dimension_sweep(const MarkovIntervalMap& m, const HoleFamily& family, std::size_t n_first,
                               std::size_t n_last, const BowenOptions& options) {
  if (n_first > n_last) raise(ErrorCode::InvalidInput, "empty sweep range");
  std::vector<const Hole*> selected;
  for (const auto& h : family.holes())
    if (h.index >= n_first && h.index <= n_last) selected.push_back(&h);
  if (selected.empty()) raise(ErrorCode::InvalidInput, "sweep range selects no holes");

  std::vector<std::size_t> depths;
  for (auto* h : selected) depths.push_back(std::max<std::size_t>(1, h->length));
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  std::vector<BowenRoot> closed(depths.size());
  parallel_for(depths.size(), [&](std::size_t i) { closed[i] = bowen_root(m, depths[i], {}, options); });
  auto closed_at = [&](std::size_t d) {
    return closed[static_cast<std::size_t>(std::lower_bound(depths.begin(), depths.end(), d) - depths.begin())];
  };

  const auto& z = family.center();
  const auto period = prime_period(z);
  DimensionSweep sweep;
  sweep.rows.resize(selected.size());
  parallel_for(selected.size(), [&](std::size_t i) {
    const Hole& h = *selected[i];
    const std::size_t d = std::max<std::size_t>(1, h.length);
    const BowenRoot& full = closed_at(d);
    const auto open = bowen_root(m, d, h.words, options);

    const auto geo = log_derivative(m, d);
    const Potential phi = geo.potential.scaled(-full.t);
    GibbsMeasure mu(m.subshift(), phi, options.power);

    DimensionResult& r = sweep.rows[i];
    r.n = h.index;
    r.depth = d;
    r.s = full.t;
    r.s_n = open.t;
    r.mu_hole = mu.of_set(h.words);
    r.ratio = (r.s - r.s_n) / r.mu_hole;
    r.lyapunov = full.lyapunov;
    r.oscillation = geo.oscillation;
    r.mixing = open.mixing;
    double d_phi = 1.0;
    if (period) {
      d_phi = 1.0 - std::exp(birkhoff_sum(phi, z, *period) - static_cast<double>(*period) * mu.pressure());
    }
    r.predicted = d_phi / r.lyapunov;
    r.deviation = std::abs(r.ratio - r.predicted);
  });

  const auto& last = sweep.rows.back();
  sweep.final_ratio = last.ratio;
  sweep.predicted = last.predicted;
  sweep.deviation = last.deviation;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    if (sweep.rows[i].s_n < sweep.rows[i - 1].s_n - 1e-9) sweep.s_n_monotone = false;
  }
  return sweep;
}

}  // namespace escrate
