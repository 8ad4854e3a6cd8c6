#include "escrate/holes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "escrate/errors.hpp"
#include "escrate/parallel.hpp"

namespace escrate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t hole_depth(const std::vector<Word>& hole) {
  std::size_t d = 0;
  for (const auto& w : hole) d = std::max(d, w.size());
  return d;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

std::optional<LinearFit> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return std::nullopt;
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace

HoleFamily::HoleFamily(SymbolicPoint center, std::vector<Hole> holes)
    : center_(std::move(center)), holes_(std::move(holes)) {
  if (holes_.empty()) raise(ErrorCode::InvalidInput, "hole family is empty");
  for (std::size_t i = 0; i < holes_.size(); ++i) {
    auto& h = holes_[i];
    std::sort(h.words.begin(), h.words.end());
    h.words.erase(std::unique(h.words.begin(), h.words.end()), h.words.end());
    for (const auto& w : h.words) {
      if (w.size() != h.length) raise(ErrorCode::InvalidInput, "hole words must share the hole length");
    }
    if (h.center_depth > h.length) raise(ErrorCode::InvalidInput, "center depth exceeds hole length");
    if (i > 0) {
      if (h.index <= holes_[i - 1].index) raise(ErrorCode::InvalidInput, "hole indices must increase");
      if (h.length < holes_[i - 1].length) raise(ErrorCode::InvalidInput, "hole lengths must be nondecreasing");
    }
  }
}

const Hole& HoleFamily::at(std::size_t n) const {
  for (const auto& h : holes_)
    if (h.index == n) return h;
  raise(ErrorCode::InvalidInput, "hole index " + std::to_string(n) + " not in family");
}

HoleFamily standard_hole_family(const Subshift& s, const SymbolicPoint& z, std::size_t n_max) {
  if (n_max == 0) raise(ErrorCode::InvalidInput, "n_max must be >= 1");
  const Word digits = z.take(n_max);
  if (!s.admissible(digits) || !z.admissible_in(s)) raise(ErrorCode::InvalidInput, "center is not admissible");
  std::vector<Hole> holes;
  holes.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) holes.push_back(Hole{n, {digits.prefix(n)}, n, n});
  return HoleFamily(z, std::move(holes));
}

HoleFamilyReport check_hole_family(const Subshift& s, const HoleFamily& family, const GibbsMeasure& mu) {
  HoleFamilyReport report;
  const auto& holes = family.holes();
  const auto& z = family.center();

  report.kappa = std::numeric_limits<double>::infinity();
  std::vector<double> lengths, logs;
  for (std::size_t i = 0; i < holes.size(); ++i) {
    const auto& h = holes[i];
    report.kappa = std::min(report.kappa, static_cast<double>(h.center_depth) / static_cast<double>(h.length));
    try {
      const Word center_word = z.take(h.length);
      report.contains_center =
          report.contains_center && std::binary_search(h.words.begin(), h.words.end(), center_word);
      const Word cyl = center_word.prefix(h.center_depth);
      for (const auto& w : h.words) report.inside_center_cylinder = report.inside_center_cylinder && w.starts_with(cyl);
    } catch (const Error&) {
      report.contains_center = false;
      report.inside_center_cylinder = false;
    }
    if (i + 1 < holes.size()) {
      const std::set<Word> outer(h.words.begin(), h.words.end());
      for (const auto& w : holes[i + 1].words) {
        if (!outer.contains(w.prefix(h.length))) report.nested = false;
      }
    }
    const double m = mu.of_set(h.words);
    if (m > 0.0) {
      lengths.push_back(static_cast<double>(h.length));
      logs.push_back(std::log(m));
    }
  }
  if (auto fit = least_squares(lengths, logs)) {
    report.fitted_rho = std::exp(fit->slope);
    report.fitted_c = std::exp(fit->intercept);
  }

  if (auto p = prime_period(z)) {
    const Word head = z.take(*p);
    std::vector<bool> ok(holes.size(), true);
    for (std::size_t i = 0; i < holes.size(); ++i) {
      const auto& h = holes[i];
      for (const auto& u : h.words) {
        const Word v = head + u;
        if (!s.admissible(v)) continue;
        if (!std::binary_search(h.words.begin(), h.words.end(), v.prefix(h.length))) ok[i] = false;
      }
    }
    std::size_t i = holes.size();
    while (i > 0 && ok[i - 1]) --i;
    if (i < holes.size()) report.periodic_threshold = holes[i].index;
  }
  return report;
}

TransferMatrix perturbed_matrix(const TransferMatrix& m, const std::vector<Word>& hole) {
  std::vector<bool> drop(m.states->size(), false);
  for (const auto& w : hole) {
    if (w.size() > m.depth) raise(ErrorCode::DepthMismatch, "hole word longer than matrix depth");
    auto [first, last] = m.states->refinement_range(w);
    for (auto i = first; i < last; ++i) drop[i] = true;
  }
  TransferMatrix out;
  out.depth = m.depth;
  out.states = m.states;
  out.entries = m.entries.without_columns(drop);
  return out;
}

PerturbedEigenvalue perturbed_eigenvalue(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                         std::size_t depth, const PowerOptions& options) {
  const std::size_t d = std::max({depth, hole_depth(hole), phi.depth(), std::size_t{1}});
  auto m = perturbed_matrix(build_transfer_matrix(s, phi, d), hole);
  auto r = spectral_radius(m.entries, options);
  PerturbedEigenvalue out;
  out.lambda_n = r.radius;
  out.depth = d;
  out.mixing = r.mixing;
  out.empty_survivor = r.components_with_cycles == 0;
  out.components_with_cycles = r.components_with_cycles;
  out.iterations = r.iterations;
  return out;
}

double predicted_limit(const Subshift& s, const Potential& phi, const SymbolicPoint& z, const PowerOptions& options) {
  auto p = prime_period(z);
  if (!p) return 1.0;
  const double pr = pressure(s, phi, options);
  return 1.0 - std::exp(birkhoff_sum(phi, z, *p) - static_cast<double>(*p) * pr);
}

// ---------------------------------------------------------------------------

EscapeProblem::EscapeProblem(Subshift s, Potential phi, PowerOptions options)
    : subshift_(std::move(s)), phi_(std::move(phi)), options_(options), mu_(subshift_, phi_, options_) {}

double EscapeProblem::predicted(const SymbolicPoint& z) const {
  auto p = prime_period(z);
  if (!p) return 1.0;
  return 1.0 - std::exp(birkhoff_sum(phi_, z, *p) - static_cast<double>(*p) * pressure());
}

EscapeRateResult EscapeProblem::escape_rate(const Hole& hole, const SymbolicPoint& z) const {
  EscapeRateResult r;
  r.n = hole.index;
  r.len_n = hole.length;
  r.mu_hole = mu_.of_set(hole.words);
  r.lambda = lambda();
  r.predicted = predicted(z);
  if (hole.words.empty()) {
    r.lambda_n = r.lambda;
    r.escape_rate = 0.0;
    r.ratio = kNaN;
    r.gap_ratio = kNaN;
    r.mixing = true;
    return r;
  }
  auto pe = perturbed_eigenvalue(subshift_, phi_, hole.words, hole.length, options_);
  r.lambda_n = pe.lambda_n;
  r.mixing = pe.mixing;
  r.empty_survivor = pe.empty_survivor;
  r.escape_rate = pe.empty_survivor ? kInf : std::log(r.lambda) - std::log(pe.lambda_n);
  r.ratio = r.mu_hole > 0.0 ? r.escape_rate / r.mu_hole : kNaN;
  r.gap_ratio = r.mu_hole > 0.0 ? (r.lambda - r.lambda_n) / r.mu_hole : kNaN;
  return r;
}

EscapeRateResult escape_rate(const Subshift& s, const Potential& phi, const HoleFamily& family, std::size_t n,
                             const PowerOptions& options) {
  EscapeProblem problem(s, phi, options);
  return problem.escape_rate(family.at(n), family.center());
}

SweepReport escape_sweep(const Subshift& s, const Potential& phi, const HoleFamily& family, std::size_t n_first,
                         std::size_t n_last, const PowerOptions& options) {
  return escape_sweep(EscapeProblem(s, phi, options), family, n_first, n_last);
}

SweepReport escape_sweep(const EscapeProblem& problem, const HoleFamily& family, std::size_t n_first,
                         std::size_t n_last) {
  if (n_first > n_last) raise(ErrorCode::InvalidInput, "empty sweep range");
  std::vector<const Hole*> selected;
  for (const auto& h : family.holes())
    if (h.index >= n_first && h.index <= n_last) selected.push_back(&h);
  if (selected.empty()) raise(ErrorCode::InvalidInput, "sweep range selects no holes");

  SweepReport report;
  report.rows.resize(selected.size());
  parallel_for(selected.size(),
               [&](std::size_t i) { report.rows[i] = problem.escape_rate(*selected[i], family.center()); });

  const auto& last = report.rows.back();
  report.final_ratio = last.ratio;
  report.predicted = last.predicted;
  report.deviation = std::abs(last.ratio - last.predicted);
  report.final_gap_ratio = last.gap_ratio;

  const double lambda = problem.lambda();
  if (auto p = prime_period(family.center())) {
    report.predicted_gap =
        lambda * (1.0 - std::pow(lambda, -static_cast<double>(*p)) *
                            std::exp(birkhoff_sum(problem.potential(), family.center(), *p)));
  } else {
    report.predicted_gap = lambda;
  }

  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].lambda_n < report.rows[i - 1].lambda_n - 1e-12 * lambda) report.lambda_monotone = false;
  }
  const std::size_t tail = std::min<std::size_t>(5, report.rows.size());
  for (std::size_t i = report.rows.size() - tail + 1; i < report.rows.size(); ++i) {
    const double prev = std::abs(report.rows[i - 1].ratio - report.rows[i - 1].predicted);
    const double cur = std::abs(report.rows[i].ratio - report.rows[i].predicted);
    if (!(cur < prev)) report.deviations_decreasing = false;
  }
  if (report.rows.size() >= 3) {
    std::vector<double> x, y;
    for (const auto& r : report.rows) {
      const double dev = std::abs(r.ratio - r.predicted);
      if (dev > 0.0 && std::isfinite(dev)) {
        x.push_back(static_cast<double>(r.n));
        y.push_back(std::log(dev));
      }
    }
    if (auto fit = least_squares(x, y)) report.convergence_rate = std::exp(fit->slope);
  }
  return report;
}

PressureGapRatio pressure_gap_ratio(const Subshift& s, const Potential& phi, const HoleFamily& family,
                                    std::size_t n, const PowerOptions& options) {
  return pressure_gap_ratio(EscapeProblem(s, phi, options), family.at(n));
}

PressureGapRatio pressure_gap_ratio(const EscapeProblem& problem, const Hole& hole) {
  PressureGapRatio out;
  const double mu_hole = problem.measure().of_set(hole.words);
  if (hole.words.empty() || mu_hole == 0.0) {
    out.value = kNaN;
    out.degenerate = true;
    out.note = "empty hole: pressure gap and hole measure both vanish";
    return out;
  }
  auto pe = perturbed_eigenvalue(problem.subshift(), problem.potential(), hole.words, hole.length,
                                 problem.options());
  if (pe.empty_survivor) {
    out.value = kInf;
    out.degenerate = true;
    out.note = "empty survivor set: restricted pressure is -infinity";
    return out;
  }
  out.value = (problem.pressure() - std::log(pe.lambda_n)) / mu_hole;
  return out;
}

std::vector<double> matrix_survival(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                    std::size_t k_max, const PowerOptions& options) {
  const std::size_t d = std::max({hole_depth(hole), phi.depth(), std::size_t{1}});
  auto m = build_transfer_matrix(s, phi, d);
  auto data = leading_eigentriple(m, options);
  auto mn = perturbed_matrix(m, hole);
  const auto& g = data.right_vector;
  const std::size_t n = g.size();

  std::vector<double> v(n, 1.0), w(n), out;
  out.reserve(k_max + 1);
  auto integrate = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += data.gibbs[i] * v[i];
    return total;
  };
  out.push_back(integrate());
  // M~ = diag(g)^{-1} M_n diag(g) / lambda, applied without forming it.
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= g[i];
    mn.entries.multiply(v, w);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / (data.lambda * g[i]);
    out.push_back(integrate());
  }
  return out;
}

}  // namespace escrate
