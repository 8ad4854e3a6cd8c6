#include "escrate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "escrate/errors.hpp"
#include "escrate/holes.hpp"
#include "escrate/parallel.hpp"

namespace escrate {
namespace {

std::size_t hole_length(const std::vector<Word>& hole) {
  std::size_t d = 0;
  for (const auto& w : hole) d = std::max(d, w.size());
  return d;
}

// Admissible words of the given length, saturating just above the cap.
std::uint64_t admissible_count(const Subshift& s, std::size_t length) {
  const std::size_t l = s.alphabet_size();
  if (length == 0) return 1;
  std::vector<std::uint64_t> ending(l, 1), next(l);
  for (std::size_t i = 1; i < length; ++i) {
    for (std::size_t b = 0; b < l; ++b) {
      std::uint64_t total = 0;
      for (std::size_t a = 0; a < l; ++a) {
        if (s.allowed(static_cast<Symbol>(a), static_cast<Symbol>(b))) total += ending[a];
      }
      next[b] = std::min<std::uint64_t>(total, kEnumerationCap + 1);
    }
    ending.swap(next);
  }
  std::uint64_t total = 0;
  for (auto c : ending) total += c;
  return total;
}

void check_enumeration(const Subshift& s, std::size_t length) {
  if (admissible_count(s, length) > kEnumerationCap) {
    raise(ErrorCode::EnumerationCapExceeded, "admissible words of length " + std::to_string(length) +
                                                 " exceed the enumeration cap 2^24");
  }
}

// Membership table over base-l codes of length-L windows.
std::vector<char> hole_table(const Subshift& s, const std::vector<Word>& hole, std::size_t length) {
  const std::size_t l = s.alphabet_size();
  std::size_t space = 1;
  for (std::size_t i = 0; i < length; ++i) space *= l;
  std::vector<char> table(space, 0);
  for (const auto& w : hole) {
    for (const auto& v : refine_cylinder(s, w, length, kEnumerationCap)) {
      std::uint64_t code = 0;
      for (auto sym : v) code = code * l + sym;
      table[code] = 1;
    }
  }
  return table;
}

// Depth-first walk over admissible words carrying exact Gibbs weights.
class Walker {
 public:
  Walker(const GibbsMeasure& mu, std::size_t window)
      : mu_(mu), l_(mu.subshift().alphabet_size()), depth_(mu.depth()), window_mod_(1) {
    for (std::size_t i = 0; i < window; ++i) window_mod_ *= l_;
  }

  struct Node {
    Word word;
    double weight = 1.0;
    std::size_t state = 0;
    std::uint64_t window = 0;
  };

  template <class Visit>
  void walk(Node& node, Visit&& visit) const {
    for (std::size_t b = 0; b < l_; ++b) {
      const auto sym = static_cast<Symbol>(b);
      if (!node.word.empty() && !mu_.subshift().allowed(node.word.back(), sym)) continue;
      Node child;
      child.word = node.word.with(sym);
      child.window = (node.window * l_ + b) % window_mod_;
      if (child.word.size() < depth_) {
        child.weight = mu_(child.word);
      } else if (child.word.size() == depth_) {
        child.state = *mu_.spectral().states->index_of(child.word);
        child.weight = mu_.spectral().gibbs[child.state];
      } else {
        child.weight = node.weight * mu_.transitions()[node.state * l_ + b];
        child.state = mu_.next_state(node.state, sym);
      }
      if (child.weight == 0.0) continue;
      if (visit(child)) walk(child, visit);
    }
  }

 private:
  const GibbsMeasure& mu_;
  std::size_t l_;
  std::size_t depth_;
  std::uint64_t window_mod_;
};

// Counter-based stream: SplitMix64 keyed by (seed, sample).
class SplitMix {
 public:
  SplitMix(std::uint64_t seed, std::uint64_t sample) : state_(finalize(seed ^ finalize(sample + kGolden))) {}
  double uniform() {
    state_ += kGolden;
    return static_cast<double>(finalize(state_) >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

std::size_t draw(const double* cumulative, std::size_t n, double u) {
  const auto it = std::upper_bound(cumulative, cumulative + n, u * cumulative[n - 1]);
  return std::min(static_cast<std::size_t>(it - cumulative), n - 1);
}

std::vector<std::size_t> iota_k(std::size_t k_max) {
  std::vector<std::size_t> k(k_max + 1);
  std::iota(k.begin(), k.end(), std::size_t{0});
  return k;
}

}  // namespace

std::string to_string(SurvivalMethod m) { return m == SurvivalMethod::Exhaustive ? "exhaustive" : "monte_carlo"; }

SurvivalCurve exhaustive_survival(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                  std::size_t k_max, const PowerOptions& options) {
  return exhaustive_survival(GibbsMeasure(s, phi, options), hole, k_max);
}

SurvivalCurve exhaustive_survival(const GibbsMeasure& mu, const std::vector<Word>& hole, std::size_t k_max) {
  const auto& s = mu.subshift();
  const std::size_t len = hole_length(hole);
  SurvivalCurve curve;
  curve.method = SurvivalMethod::Exhaustive;
  curve.k_values = iota_k(k_max);
  curve.survival.assign(k_max + 1, 0.0);
  curve.survival[0] = 1.0;
  if (len == 0) {
    std::fill(curve.survival.begin(), curve.survival.end(), 1.0);
    return curve;
  }
  if (k_max == 0) return curve;
  const std::size_t max_len = k_max + len - 1;
  check_enumeration(s, max_len);
  const auto table = hole_table(s, hole, len);

  // Per-thread partial sums keyed by the first symbol keep the result
  // independent of scheduling.
  const std::size_t l = s.alphabet_size();
  std::vector<std::vector<double>> partial(l, std::vector<double>(k_max + 1, 0.0));
  Walker walker(mu, len);
  parallel_for(l, [&](std::size_t a) {
    auto& acc = partial[a];
    Walker::Node root;
    walker.walk(root, [&](const Walker::Node& node) {
      const std::size_t m = node.word.size();
      if (node.word[0] != a) return false;
      if (m >= len) {
        if (table[node.window]) return false;
        acc[m - len + 1] += node.weight;
      }
      return m < max_len;
    });
  });
  for (std::size_t k = 1; k <= k_max; ++k) {
    double total = 0.0;
    for (std::size_t a = 0; a < l; ++a) total += partial[a][k];
    curve.survival[k] = total;
  }
  return curve;
}

SurvivalCurve monte_carlo_survival(const Subshift& s, const Potential& phi, const std::vector<Word>& hole,
                                   std::size_t k_max, std::uint64_t samples, std::uint64_t seed,
                                   const PowerOptions& options) {
  return monte_carlo_survival(GibbsMeasure(s, phi, options), hole, k_max, samples, seed);
}

SurvivalCurve monte_carlo_survival(const GibbsMeasure& mu, const std::vector<Word>& hole, std::size_t k_max,
                                   std::uint64_t samples, std::uint64_t seed) {
  SurvivalCurve curve;
  curve.method = SurvivalMethod::MonteCarlo;
  curve.samples = samples;
  curve.seed = seed;
  if (samples == 0) {
    curve.flags.push_back("no_samples");
    return curve;
  }
  const auto& s = mu.subshift();
  const auto& states = *mu.spectral().states;
  const std::size_t l = s.alphabet_size();
  const std::size_t depth = mu.depth();
  const std::size_t len = hole_length(hole);
  const std::size_t path = std::max(depth, k_max + (len == 0 ? 0 : len - 1));
  const auto table = len == 0 ? std::vector<char>{} : hole_table(s, hole, len);
  std::uint64_t window_mod = 1;
  for (std::size_t i = 0; i < len; ++i) window_mod *= l;

  std::vector<double> initial(states.size());
  std::partial_sum(mu.spectral().gibbs.begin(), mu.spectral().gibbs.end(), initial.begin());
  std::vector<double> rows(mu.transitions());
  for (std::size_t u = 0; u < states.size(); ++u)
    std::partial_sum(rows.begin() + u * l, rows.begin() + (u + 1) * l, rows.begin() + u * l);

  // First shift at which the orbit enters the hole, capped at k_max.
  auto first_hit = [&](std::uint64_t sample) {
    SplitMix rng(seed, sample);
    std::size_t state = draw(initial.data(), initial.size(), rng.uniform());
    std::uint64_t window = 0;
    std::size_t m = 0;
    auto push = [&](Symbol b) {
      ++m;
      window = len == 0 ? 0 : (window * l + b) % window_mod;
      return len != 0 && m >= len && table[window];
    };
    for (auto b : states.word(state))
      if (push(b) && m - len < k_max) return m - len;
    while (m < path) {
      const auto b = static_cast<Symbol>(draw(rows.data() + state * l, l, rng.uniform()));
      state = mu.next_state(state, b);
      if (push(b) && m - len < k_max) return m - len;
    }
    return k_max;
  };

  constexpr std::uint64_t kBatch = 4096;
  const std::size_t batches = static_cast<std::size_t>((samples + kBatch - 1) / kBatch);
  std::vector<std::vector<std::uint64_t>> hist(batches, std::vector<std::uint64_t>(k_max + 1, 0));
  parallel_for(batches, [&](std::size_t batch) {
    const std::uint64_t lo = batch * kBatch;
    const std::uint64_t hi = std::min<std::uint64_t>(samples, lo + kBatch);
    for (std::uint64_t i = lo; i < hi; ++i) ++hist[batch][first_hit(i)];
  });

  curve.k_values = iota_k(k_max);
  curve.survival.resize(k_max + 1);
  curve.standard_error.resize(k_max + 1);
  std::uint64_t alive = samples;
  const double n = static_cast<double>(samples);
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (k > 0)
      for (const auto& h : hist) alive -= h[k - 1];
    const double p = static_cast<double>(alive) / n;
    curve.survival[k] = p;
    curve.standard_error[k] = std::sqrt(p * (1.0 - p) / n);
  }
  return curve;
}

EscapeRateFit fit_escape_rate(const SurvivalCurve& curve, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) raise(ErrorCode::InvalidInput, "tail_fraction must lie in (0, 1]");
  const std::size_t n = curve.survival.size();
  const auto take = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  std::vector<double> x, y;
  for (std::size_t i = n - std::min(n, take); i < n; ++i) {
    if (curve.survival[i] > 0.0) {
      x.push_back(static_cast<double>(curve.k_values[i]));
      y.push_back(-std::log(curve.survival[i]));
    }
  }
  if (x.size() < 4) {
    raise(ErrorCode::InsufficientTail,
          "need at least 4 positive tail points, found " + std::to_string(x.size()));
  }
  const double m = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  EscapeRateFit fit;
  fit.rate = sxy / sxx;
  fit.points = x.size();
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + fit.rate * (x[i] - mx));
    rss += r * r;
  }
  fit.standard_error = std::sqrt(rss / (m - 2.0) / sxx);
  return fit;
}

KacCheck kac_check(const Subshift& s, const Potential& phi, const std::vector<Word>& hole, std::size_t k_max,
                   const PowerOptions& options) {
  const std::size_t len = hole_length(hole);
  if (len == 0) raise(ErrorCode::InvalidInput, "Kac check needs a nonempty hole");
  if (k_max == 0) raise(ErrorCode::InvalidInput, "Kac check needs k_max >= 1");
  check_enumeration(s, k_max + len);
  GibbsMeasure mu(s, phi, options);
  const auto table = hole_table(s, hole, len);

  // returns[i] = mu(U, T = i); tail = mu(U, T > k_max).
  std::vector<double> returns(k_max + 1, 0.0);
  double mass = 0.0, tail = 0.0;
  Walker walker(mu, len);
  Walker::Node root;
  walker.walk(root, [&](const Walker::Node& node) {
    const std::size_t m = node.word.size();
    if (m < len) return true;
    const bool in_hole = table[node.window] != 0;
    if (m == len) {
      if (in_hole) mass += node.weight;
      return in_hole;
    }
    const std::size_t j = m - len;
    if (in_hole) {
      returns[j] += node.weight;
      return false;
    }
    if (j == k_max) {
      tail += node.weight;
      return false;
    }
    return true;
  });
  if (!(mass > 0.0)) raise(ErrorCode::InvalidInput, "hole has zero measure");

  KacCheck out;
  out.rhs = 1.0 / mass;
  out.return_law.assign(k_max + 1, 0.0);
  for (std::size_t i = 1; i <= k_max; ++i) {
    out.return_law[i] = returns[i] / mass;
    out.partial += static_cast<double>(i) * out.return_law[i];
  }
  out.tail_mass = tail / mass;

  // sum_{i > K} i m(T = i) = K m(T > K) + sum_{j >= K} m(T > j), and
  // m(T > K + j) <= q^j m(T > K).
  const double lambda_n = perturbed_eigenvalue(s, phi, hole, len, options).lambda_n;
  double q = lambda_n / mu.lambda();
  const double before = out.tail_mass + out.return_law[k_max];
  if (before > 0.0) q = std::max(q, out.tail_mass / before);
  out.tail_ratio = q;
  const double base = out.partial + static_cast<double>(k_max) * out.tail_mass;
  out.lhs_lower = base + out.tail_mass;
  out.lhs_upper = out.tail_mass == 0.0 ? out.lhs_lower
                  : q < 1.0            ? base + out.tail_mass / (1.0 - q)
                                       : std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * out.rhs;
  out.lhs_lower -= slack;
  out.lhs_upper += slack;
  out.gap = out.rhs < out.lhs_lower ? out.lhs_lower - out.rhs
            : out.rhs > out.lhs_upper ? out.rhs - out.lhs_upper
                                      : 0.0;
  return out;
}

}  // namespace escrate
