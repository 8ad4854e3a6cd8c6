#include "escrate/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/rational.hpp>

#include "escrate/errors.hpp"

namespace escrate {

namespace {

constexpr double kMarkovTol = 1e-12;
constexpr double kInverseTol = 1e-14;

using Rational = boost::rational<long long>;

// Continued-fraction approximation; accepted only when it reproduces x to
// near machine precision with a modest denominator.
std::optional<Rational> rationalize(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  constexpr long long kMaxDen = 1'000'000;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e12) break;
    const auto ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > kMaxDen) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
      return Rational(p1, q1);
    }
    const double frac = r - a;
    if (frac < 1e-300) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

Subshift induce_subshift(const std::vector<Branch>& branches, std::vector<std::string> labels) {
  const std::size_t m = branches.size();
  if (m == 0) raise(ErrorCode::InvalidInput, "map has no branches");
  if (m > kMaxAlphabet) raise(ErrorCode::InvalidInput, "too many branches");

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return branches[a].domain().lo < branches[b].domain().lo; });
  for (std::size_t i = 0; i < m; ++i) {
    const auto& d = branches[order[i]].domain();
    if (!(d.hi > d.lo)) raise(ErrorCode::InvalidInput, "branch interval must have positive length");
    if (i > 0 && d.lo < branches[order[i - 1]].domain().hi - kMarkovTol) {
      raise(ErrorCode::InvalidInput, "branch intervals overlap");
    }
  }

  std::vector<std::vector<std::uint8_t>> a(m, std::vector<std::uint8_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    const auto img = branches[i].image();
    for (std::size_t k = 0; k < m; ++k) {
      const auto& d = branches[k].domain();
      const bool interiors_meet = img.hi > d.lo + kMarkovTol && img.lo < d.hi - kMarkovTol;
      if (!interiors_meet) continue;
      if (!d.inside(img, kMarkovTol)) {
        raise(ErrorCode::InvalidInput, "branch " + std::to_string(i) + " image covers interval " +
                                           std::to_string(k) + " only partially (not Markov)");
      }
      a[i][k] = 1;
    }
  }
  return Subshift(std::move(a), std::move(labels));
}

}  // namespace

// ---------------------------------------------------------------------------

Branch Branch::linear(Interval domain, double slope, double offset) {
  if (slope == 0.0 || !std::isfinite(slope) || !std::isfinite(offset)) {
    raise(ErrorCode::InvalidInput, "linear branch needs a finite nonzero slope");
  }
  Branch b;
  b.domain_ = domain;
  b.linear_ = true;
  b.slope_ = slope;
  b.offset_ = offset;
  b.increasing_ = slope > 0;
  return b;
}

Branch Branch::general(Interval domain, std::function<double(double)> f, std::function<double(double)> df,
                       std::string f_text, std::string df_text) {
  Branch b;
  b.domain_ = domain;
  b.linear_ = false;
  b.f_ = std::move(f);
  b.df_ = std::move(df);
  b.f_text_ = std::move(f_text);
  b.df_text_ = std::move(df_text);
  const double lo = b.f_(domain.lo), hi = b.f_(domain.hi);
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo == hi) {
    raise(ErrorCode::InvalidInput, "branch is not strictly monotone on its interval");
  }
  b.increasing_ = hi > lo;
  return b;
}

double Branch::operator()(double x) const { return linear_ ? slope_ * x + offset_ : f_(x); }

double Branch::derivative(double x) const { return linear_ ? slope_ : df_(x); }

Interval Branch::image() const {
  const double a = (*this)(domain_.lo), b = (*this)(domain_.hi);
  return {std::min(a, b), std::max(a, b)};
}

double Branch::inverse(double y) const {
  if (linear_) return std::clamp((y - offset_) / slope_, domain_.lo, domain_.hi);
  double lo = domain_.lo, hi = domain_.hi;
  // g(x) = f(x) - y has a sign change on [lo, hi]; keep the bracket.
  auto g = [&](double x) { return increasing_ ? (*this)(x) - y : y - (*this)(x); };
  if (g(lo) >= 0) return lo;
  if (g(hi) <= 0) return hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > kInverseTol; ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if (gx < 0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = increasing_ ? df_(x) : -df_(x);
    double next = d != 0.0 ? x - gx / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= kInverseTol * 0.5) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

// ---------------------------------------------------------------------------

MarkovIntervalMap::MarkovIntervalMap(std::vector<Branch> branches, std::vector<std::string> labels)
    : branches_(std::move(branches)), subshift_(induce_subshift(branches_, std::move(labels))) {}

MarkovIntervalMap MarkovIntervalMap::cantor() {
  return MarkovIntervalMap({Branch::linear({0.0, 1.0 / 3.0}, 3.0, 0.0), Branch::linear({2.0 / 3.0, 1.0}, 3.0, -2.0)},
                           {"0", "2"});
}

MarkovIntervalMap MarkovIntervalMap::doubling() {
  return MarkovIntervalMap({Branch::linear({0.0, 0.5}, 2.0, 0.0), Branch::linear({0.5, 1.0}, 2.0, -1.0)});
}

bool MarkovIntervalMap::piecewise_linear() const noexcept {
  return std::all_of(branches_.begin(), branches_.end(), [](const Branch& b) { return b.is_linear(); });
}

ExpansionReport MarkovIntervalMap::expansion(std::size_t n0) const {
  ExpansionReport r;
  r.n0 = std::max<std::size_t>(1, n0);
  r.min_derivative = std::numeric_limits<double>::infinity();
  for (const auto& b : branches_) {
    for (int i = 0; i <= 16; ++i) {
      const double x = b.domain().lo + b.domain().length() * i / 16.0;
      r.min_derivative = std::min(r.min_derivative, std::abs(b.derivative(x)));
    }
  }
  Cylinders words(subshift_, r.n0);
  auto intervals = cylinder_intervals(words);
  r.eventual_expansion = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto w = words.word(i);
    double x = intervals[i].lo, prod = 1.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const auto& b = branches_[w[j]];
      prod *= std::abs(b.derivative(x));
      x = b(x);
    }
    r.eventual_expansion = std::min(r.eventual_expansion, prod);
  }
  return r;
}

std::optional<Symbol> MarkovIntervalMap::branch_of(double x, double tol) const {
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    if (branches_[i].domain().contains(x, tol)) return static_cast<Symbol>(i);
  }
  return std::nullopt;
}

Interval MarkovIntervalMap::cylinder_interval(const Word& w) const {
  if (w.empty()) return {0.0, 1.0};
  if (!subshift_.admissible(w)) raise(ErrorCode::InvalidInput, "word is not admissible for this map");
  Interval j = branches_[w.back()].domain();
  for (std::size_t i = w.size() - 1; i-- > 0;) {
    const auto& b = branches_[w[i]];
    const double a = b.inverse(j.lo), c = b.inverse(j.hi);
    j = {std::min(a, c), std::max(a, c)};
  }
  return j;
}

std::vector<Interval> MarkovIntervalMap::cylinder_intervals(const Cylinders& cylinders) const {
  const std::size_t l = subshift_.alphabet_size();
  // Intervals by code at the current depth, built from depth-1 upward via
  // I(a v) = f_a^{-1}(I(v)).
  std::vector<Interval> by_code(l);
  for (std::size_t a = 0; a < l; ++a) by_code[a] = branches_[a].domain();
  std::uint64_t space = l;
  for (std::size_t d = 2; d <= cylinders.depth(); ++d) {
    std::vector<Interval> next(space * l);
    Cylinders level(subshift_, d);
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto code = level.code(i);
      const auto head = level.first_symbol(i);
      const auto& tail = by_code[code % space];
      const auto& b = branches_[head];
      const double a = b.inverse(tail.lo), c = b.inverse(tail.hi);
      next[code] = {std::min(a, c), std::max(a, c)};
    }
    by_code.swap(next);
    space *= l;
  }
  std::vector<Interval> out(cylinders.size());
  for (std::size_t i = 0; i < cylinders.size(); ++i) out[i] = by_code[cylinders.code(i)];
  return out;
}

// ---------------------------------------------------------------------------

EncodedPoint encode_point(const MarkovIntervalMap& m, double x, std::size_t digits) {
  const auto& branches = m.branches();
  const auto& s = m.subshift();

  std::optional<Rational> rx = rationalize(x);
  std::vector<Rational> slopes, offsets, lows, highs;
  bool exact = rx.has_value() && m.piecewise_linear();
  for (const auto& b : branches) {
    if (!exact) break;
    auto sl = rationalize(b.slope()), of = rationalize(b.offset());
    auto lo = rationalize(b.domain().lo), hi = rationalize(b.domain().hi);
    if (!sl || !of || !lo || !hi) {
      exact = false;
      break;
    }
    slopes.push_back(*sl);
    offsets.push_back(*of);
    lows.push_back(*lo);
    highs.push_back(*hi);
  }

  if (exact) {
    constexpr std::size_t kMaxSteps = 4096;
    constexpr long long kMaxDen = 1'000'000'000;
    std::map<Rational, std::size_t> seen;
    std::vector<Symbol> path;
    Rational cur = *rx;
    for (std::size_t step = 0; step < std::max(kMaxSteps, digits); ++step) {
      if (auto it = seen.find(cur); it != seen.end()) {
        Word pre(std::vector<Symbol>(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(it->second)));
        Word block(std::vector<Symbol>(path.begin() + static_cast<std::ptrdiff_t>(it->second), path.end()));
        return {SymbolicPoint::periodic(std::move(block), std::move(pre)), true};
      }
      seen.emplace(cur, step);
      std::optional<std::size_t> branch;
      for (std::size_t i = 0; i < branches.size(); ++i) {
        if (cur >= lows[i] && cur <= highs[i]) {
          branch = i;
          break;
        }
      }
      if (!branch) {
        raise(ErrorCode::NotInRepeller, "orbit of " + std::to_string(x) + " leaves the branch intervals at step " +
                                            std::to_string(step));
      }
      if (!path.empty() && !s.allowed(path.back(), static_cast<Symbol>(*branch))) {
        raise(ErrorCode::NotInRepeller, "orbit follows an inadmissible transition");
      }
      path.push_back(static_cast<Symbol>(*branch));
      cur = slopes[*branch] * cur + offsets[*branch];
      if (cur.denominator() > kMaxDen) break;
    }
  }

  // Floating-point orbit: a finite address prefix.
  std::vector<Symbol> out;
  out.reserve(digits);
  double cur = x;
  for (std::size_t step = 0; step < digits; ++step) {
    auto b = m.branch_of(cur, 1e-12);
    if (!b) {
      raise(ErrorCode::NotInRepeller, "orbit of " + std::to_string(x) + " leaves the branch intervals at step " +
                                          std::to_string(step));
    }
    if (!out.empty() && !s.allowed(out.back(), *b)) {
      raise(ErrorCode::NotInRepeller, "orbit follows an inadmissible transition");
    }
    out.push_back(*b);
    const auto& d = branches[*b].domain();
    cur = branches[*b](std::clamp(cur, d.lo, d.hi));
  }
  return {SymbolicPoint::prefix(Word(std::move(out))), false};
}

// ---------------------------------------------------------------------------

BallApproximation ball_to_cylinders(const MarkovIntervalMap& m, const GibbsMeasure& mu, double z, double epsilon,
                                    double eta, std::size_t cap) {
  if (!(epsilon > 0.0)) raise(ErrorCode::InvalidInput, "epsilon must be positive");
  if (eta < 0.0) raise(ErrorCode::InvalidInput, "eta must be nonnegative");
  // A zero slack asks for the ball itself as a cylinder union, which no
  // finite-depth search can certify.
  if (eta == 0.0) raise(ErrorCode::DepthCapExceeded, "eta = 0 cannot be certified at any finite depth");
  if (!(mu.subshift() == m.subshift())) raise(ErrorCode::InvalidInput, "measure is not defined on this map's coding");
  encode_point(m, z, 64);  // throws NotInRepeller

  const auto& s = m.subshift();
  const Interval ball{z - epsilon, z + epsilon};
  constexpr double kTol = 1e-14;

  struct Candidate {
    Word word;
    Interval interval;
  };
  std::vector<Candidate> frontier;
  for (std::size_t a = 0; a < s.alphabet_size(); ++a) {
    Word w{static_cast<Symbol>(a)};
    frontier.push_back({w, m.branches()[a].domain()});
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t depth = 1; s.code_space(depth, cap).has_value(); ++depth) {
    if (depth > 1) {
      std::vector<Candidate> next;
      for (const auto& c : frontier) {
        for (std::size_t b = 0; b < s.alphabet_size(); ++b) {
          if (!s.allowed(c.word.back(), static_cast<Symbol>(b))) continue;
          Word w = c.word.with(static_cast<Symbol>(b));
          auto iv = m.cylinder_interval(w);
          if (iv.intersects(ball)) next.push_back({std::move(w), iv});
        }
      }
      frontier.swap(next);
    } else {
      std::erase_if(frontier, [&](const Candidate& c) { return !c.interval.intersects(ball); });
    }

    BallApproximation out;
    out.center = z;
    out.epsilon = epsilon;
    out.depth = depth;
    for (const auto& c : frontier) {
      const double w = mu(c.word);
      out.outer.push_back(c.word);
      out.mu_outer += w;
      if (c.interval.inside(ball, kTol)) {
        out.inner.push_back(c.word);
        out.mu_inner += w;
      }
    }
    out.eta = out.mu_outer > 0.0 ? (out.mu_outer - out.mu_inner) / out.mu_outer : 0.0;
    best = std::min(best, out.eta);
    if (out.eta <= eta) return out;
  }
  raise(ErrorCode::DepthCapExceeded,
        "ball slack " + std::to_string(eta) + " not reached within the state cap; best achieved " + std::to_string(best));
}

// ---------------------------------------------------------------------------

GeometricPotential log_derivative(const MarkovIntervalMap& m, std::size_t depth) {
  const auto& s = m.subshift();
  Cylinders words(s, std::max<std::size_t>(1, depth));
  const auto intervals = m.cylinder_intervals(words);
  std::map<Word, double> values;
  double oscillation = 0.0;
  const bool linear = m.piecewise_linear();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& b = m.branches()[words.first_symbol(i)];
    const auto& iv = intervals[i];
    const double at_left = std::log(std::abs(b.derivative(iv.lo)));
    values[words.word(i)] = at_left;
    if (!linear) {
      double lo = at_left, hi = at_left;
      for (int k = 1; k <= 8; ++k) {
        const double v = std::log(std::abs(b.derivative(iv.lo + iv.length() * k / 8.0)));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      oscillation = std::max(oscillation, hi - lo);
    }
  }
  return {Potential(s, words.depth(), values), oscillation};
}

GeometricPotential log_deriv_potential(const MarkovIntervalMap& m, double t, std::size_t depth) {
  auto g = log_derivative(m, depth);
  g.potential = g.potential.scaled(-t);
  return g;
}

}  // namespace escrate
