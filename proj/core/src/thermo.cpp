#include "escrate/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "escrate/errors.hpp"

namespace escrate {

namespace {

std::uint64_t ipow(std::size_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

struct PowerResult {
  double lambda = 0.0;
  std::vector<double> vector;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Power iteration on (A + shift I) or its transpose, from the uniform vector.
// Converges when ||(A v) - lambda v||_1 <= tol * lambda with ||v||_1 = 1.
PowerResult power_iterate(const SparseMatrix& a, bool transpose, double shift, const PowerOptions& options) {
  const std::size_t n = a.rows();
  PowerResult out;
  std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    if (transpose) {
      a.multiply_transpose(v, w);
    } else {
      a.multiply(v, w);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += shift * v[i];
      norm += w[i];
    }
    if (!(norm > 0.0)) {
      out.lambda = 0.0;
      out.vector = v;
      out.iterations = it;
      return out;
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += std::abs(w[i] - norm * v[i]);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    out.lambda = norm - shift;
    out.residual = residual;
    out.iterations = it;
    if (residual <= options.tolerance * norm) {
      out.vector = std::move(v);
      return out;
    }
  }
  raise(ErrorCode::NoConvergence, "power iteration did not reach tolerance in " +
                                      std::to_string(options.max_iterations) + " iterations");
}

bool has_cycle(const SparseMatrix& a, const std::vector<std::uint32_t>& members) {
  if (members.size() > 1) return true;
  return a.at(members.front(), members.front()) > 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------

Potential::Potential(const Subshift& s, std::size_t depth, const std::map<Word, double>& values,
                     std::optional<double> default_value)
    : depth_(depth), alphabet_(s.alphabet_size()) {
  if (depth == 0) raise(ErrorCode::InvalidInput, "potential depth must be >= 1");
  for (const auto& [w, v] : values) {
    if (w.size() != depth) raise(ErrorCode::InvalidInput, "potential word '" + s.format(w) + "' has wrong length");
    if (!s.admissible(w)) raise(ErrorCode::InvalidInput, "potential word '" + s.format(w) + "' is not admissible");
    if (!std::isfinite(v)) raise(ErrorCode::InvalidInput, "potential value must be finite");
  }
  if (default_value && !std::isfinite(*default_value)) raise(ErrorCode::InvalidInput, "default must be finite");
  Cylinders words(s, depth);
  values_.assign(words.code_space(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto w = words.word(i);
    auto it = values.find(w);
    if (it != values.end()) {
      values_[words.code(i)] = it->second;
    } else if (default_value) {
      values_[words.code(i)] = *default_value;
    } else {
      raise(ErrorCode::InvalidInput, "no potential value for admissible word '" + s.format(w) + "'");
    }
  }
}

Potential Potential::constant(const Subshift& s, double value) { return Potential(s, 1, {}, value); }

Potential Potential::per_symbol(const Subshift& s, const std::vector<double>& values) {
  if (values.size() != s.alphabet_size()) raise(ErrorCode::InvalidInput, "one value per symbol required");
  std::map<Word, double> m;
  for (std::size_t a = 0; a < values.size(); ++a) m[Word{static_cast<Symbol>(a)}] = values[a];
  return Potential(s, 1, m);
}

double Potential::operator()(const Word& w) const {
  if (w.size() < depth_) raise(ErrorCode::InvalidInput, "word shorter than potential depth");
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < depth_; ++i) code = code * alphabet_ + w[i];
  return values_.at(code);
}

Potential Potential::lifted(std::size_t depth) const {
  if (depth <= depth_) return *this;
  Potential out;
  out.depth_ = depth;
  out.alphabet_ = alphabet_;
  const auto factor = ipow(alphabet_, depth - depth_);
  const auto space = ipow(alphabet_, depth);
  if (space > kStateCap) raise(ErrorCode::StateCapExceeded, "lifted potential exceeds the state cap");
  out.values_.resize(space);
  for (std::uint64_t c = 0; c < space; ++c) out.values_[c] = values_[c / factor];
  return out;
}

Potential Potential::scaled(double factor) const {
  Potential out = *this;
  for (auto& v : out.values_) v *= factor;
  return out;
}

Potential Potential::shifted(double constant) const {
  Potential out = *this;
  for (auto& v : out.values_) v += constant;
  return out;
}

std::map<Word, double> Potential::to_map(const Subshift& s) const {
  Cylinders words(s, depth_);
  std::map<Word, double> out;
  for (std::size_t i = 0; i < words.size(); ++i) out[words.word(i)] = values_[words.code(i)];
  return out;
}

// ---------------------------------------------------------------------------

TransferMatrix build_transfer_matrix(const Subshift& s, const Potential& phi, std::size_t n) {
  if (phi.alphabet_size() != s.alphabet_size()) raise(ErrorCode::InvalidInput, "potential alphabet mismatch");
  n = std::max<std::size_t>({n, phi.depth(), 1});
  TransferMatrix m;
  m.depth = n;
  m.states = enumerate_cylinders(s, n);
  const auto& states = *m.states;
  const std::size_t l = s.alphabet_size();
  const auto top = ipow(l, n - 1);
  const auto to_phi = ipow(l, n - phi.depth());

  std::vector<SparseMatrix::Entry> entries;
  entries.reserve(states.size() * 2);
  for (std::size_t row = 0; row < states.size(); ++row) {
    const auto code = states.code(row);
    const auto first = states.first_symbol(row);
    for (std::size_t a = 0; a < l; ++a) {
      if (!s.allowed(static_cast<Symbol>(a), first)) continue;
      const auto pre = a * top + code / l;
      auto col = states.index_of_code(pre);
      if (!col) continue;
      entries.push_back({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(*col),
                         std::exp(phi.at_code(pre / to_phi))});
    }
  }
  m.entries = SparseMatrix(states.size(), states.size(), std::move(entries));
  return m;
}

SpectralData leading_eigentriple(const TransferMatrix& m, const PowerOptions& options) {
  const auto& a = m.entries;
  if (a.rows() == 0) raise(ErrorCode::InvalidInput, "empty transfer matrix");
  auto scc = strongly_connected_components(a);
  if (scc.members.size() != 1 ||
      component_period(a, scc.members.front(), scc.component_of, 0) != 1) {
    raise(ErrorCode::NotMixingAfterRestriction,
          "transfer graph is not primitive (" + std::to_string(scc.members.size()) + " components)");
  }

  auto right = power_iterate(a, false, 0.0, options);
  auto left = power_iterate(a, true, 0.0, options);

  SpectralData out;
  out.depth = m.depth;
  out.states = m.states;
  out.lambda = right.lambda;
  out.pressure = std::log(right.lambda);
  out.iterations = right.iterations + left.iterations;
  out.residual = std::max(right.residual, left.residual);

  out.left_vector = std::move(left.vector);
  const double left_sum = std::accumulate(out.left_vector.begin(), out.left_vector.end(), 0.0);
  for (auto& x : out.left_vector) x /= left_sum;
  out.right_vector = std::move(right.vector);
  double pairing = 0.0;
  for (std::size_t i = 0; i < out.right_vector.size(); ++i) pairing += out.left_vector[i] * out.right_vector[i];
  for (auto& x : out.right_vector) x /= pairing;
  out.gibbs.resize(out.right_vector.size());
  for (std::size_t i = 0; i < out.gibbs.size(); ++i) out.gibbs[i] = out.left_vector[i] * out.right_vector[i];
  return out;
}

namespace {

struct ComponentScan {
  ComponentDecomposition scc;
  std::vector<std::uint32_t> cyclic;
  std::vector<std::size_t> periods;
};

ComponentScan scan_components(const SparseMatrix& a) {
  ComponentScan out;
  out.scc = strongly_connected_components(a);
  for (std::uint32_t id = 0; id < out.scc.members.size(); ++id) {
    if (!has_cycle(a, out.scc.members[id])) continue;
    out.cyclic.push_back(id);
    out.periods.push_back(component_period(a, out.scc.members[id], out.scc.component_of, id));
  }
  return out;
}

// Perron root and vectors of one irreducible block; periodic blocks are
// shifted by their mean row sum, which bounds the Perron root from both sides.
PowerResult block_perron(const SparseMatrix& sub, std::size_t period, bool transpose, const PowerOptions& options) {
  double shift = 0.0;
  if (period != 1) {
    double total = 0.0;
    for (std::size_t r = 0; r < sub.rows(); ++r) {
      auto vals = sub.row_values(r);
      total += std::accumulate(vals.begin(), vals.end(), 0.0);
    }
    shift = total / static_cast<double>(sub.rows());
  }
  return power_iterate(sub, transpose, shift, options);
}

}  // namespace

RadiusResult spectral_radius(const SparseMatrix& a, const PowerOptions& options) {
  RadiusResult out;
  if (a.rows() == 0) return out;
  auto scan = scan_components(a);
  std::size_t primitive = 0;
  for (std::size_t i = 0; i < scan.cyclic.size(); ++i) {
    if (scan.periods[i] == 1) ++primitive;
    auto sub = a.principal(scan.scc.members[scan.cyclic[i]]);
    auto res = block_perron(sub, scan.periods[i], false, options);
    out.iterations += res.iterations;
    out.radius = std::max(out.radius, res.lambda);
  }
  out.components_with_cycles = scan.cyclic.size();
  out.mixing = scan.cyclic.size() == 1 && primitive == 1;
  return out;
}

DominantComponent dominant_component(const SparseMatrix& a, const PowerOptions& options) {
  DominantComponent out;
  if (a.rows() == 0) return out;
  auto scan = scan_components(a);
  out.components_with_cycles = scan.cyclic.size();
  std::optional<std::size_t> best;
  PowerResult best_right;
  SparseMatrix best_sub;
  for (std::size_t i = 0; i < scan.cyclic.size(); ++i) {
    auto sub = a.principal(scan.scc.members[scan.cyclic[i]]);
    auto res = block_perron(sub, scan.periods[i], false, options);
    if (!best || res.lambda > best_right.lambda) {
      best = i;
      best_right = std::move(res);
      best_sub = std::move(sub);
    }
  }
  if (!best) return out;
  auto left = block_perron(best_sub, scan.periods[*best], true, options);
  out.lambda = best_right.lambda;
  out.members = scan.scc.members[scan.cyclic[*best]];
  out.mixing = scan.cyclic.size() == 1 && scan.periods[*best] == 1;
  out.left = std::move(left.vector);
  out.right = std::move(best_right.vector);
  const double left_sum = std::accumulate(out.left.begin(), out.left.end(), 0.0);
  for (auto& x : out.left) x /= left_sum;
  double pairing = 0.0;
  for (std::size_t i = 0; i < out.left.size(); ++i) pairing += out.left[i] * out.right[i];
  for (auto& x : out.right) x /= pairing;
  return out;
}

double pressure(const Subshift& s, const Potential& phi, const PowerOptions& options) {
  return leading_eigentriple(build_transfer_matrix(s, phi, std::max<std::size_t>(1, phi.depth())), options)
      .pressure;
}

// ---------------------------------------------------------------------------

double CylinderWeights::operator[](const Word& w) const {
  auto idx = cylinders->index_of(w);
  return idx ? weights[*idx] : 0.0;
}

std::map<Word, double> CylinderWeights::to_map() const {
  std::map<Word, double> out;
  for (std::size_t i = 0; i < cylinders->size(); ++i) out[cylinders->word(i)] = weights[i];
  return out;
}

CylinderWeights gibbs_measure(const Subshift& s, const Potential& phi, std::size_t n,
                              const PowerOptions& options) {
  if (n == 0) raise(ErrorCode::InvalidInput, "depth must be >= 1");
  auto data = leading_eigentriple(build_transfer_matrix(s, phi, n), options);
  CylinderWeights out;
  if (data.depth == n) {
    out.cylinders = data.states;
    out.weights = std::move(data.gibbs);
    return out;
  }
  out.cylinders = enumerate_cylinders(s, n);
  out.weights.assign(out.cylinders->size(), 0.0);
  const auto factor = ipow(s.alphabet_size(), data.depth - n);
  for (std::size_t i = 0; i < data.states->size(); ++i) {
    auto idx = out.cylinders->index_of_code(data.states->code(i) / factor);
    out.weights[*idx] += data.gibbs[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

GibbsMeasure::GibbsMeasure(const Subshift& s, const Potential& phi, const PowerOptions& options)
    : subshift_(s) {
  auto m = build_transfer_matrix(s, phi, phi.depth());
  spectral_ = leading_eigentriple(m, options);
  const auto& states = *spectral_.states;
  const std::size_t l = s.alphabet_size();
  const std::size_t depth = spectral_.depth;

  transitions_.assign(states.size() * l, 0.0);
  for (std::size_t u = 0; u < states.size(); ++u) {
    const double weight = std::exp(phi.at_code(states.code(u)));
    for (std::size_t b = 0; b < l; ++b) {
      if (!s.allowed(states.last_symbol(u), static_cast<Symbol>(b))) continue;
      const auto c = next_state(u, static_cast<Symbol>(b));
      transitions_[u * l + b] =
          spectral_.left_vector[c] * weight / (spectral_.lambda * spectral_.left_vector[u]);
    }
  }

  marginals_.resize(depth);
  for (std::size_t m_len = 1; m_len < depth; ++m_len) {
    const auto factor = ipow(l, depth - m_len);
    marginals_[m_len].assign(ipow(l, m_len), 0.0);
    for (std::size_t i = 0; i < states.size(); ++i) marginals_[m_len][states.code(i) / factor] += spectral_.gibbs[i];
  }
}

std::size_t GibbsMeasure::next_state(std::size_t state, Symbol b) const {
  const auto& states = *spectral_.states;
  const std::size_t l = subshift_.alphabet_size();
  const auto keep = ipow(l, spectral_.depth - 1);
  auto idx = states.index_of_code((states.code(state) % keep) * l + b);
  if (!idx) raise(ErrorCode::InvalidInput, "inadmissible transition");
  return *idx;
}

double GibbsMeasure::operator()(const Word& w) const {
  if (w.empty()) return 1.0;
  if (!subshift_.admissible(w)) return 0.0;
  const std::size_t depth = spectral_.depth;
  const std::size_t l = subshift_.alphabet_size();
  if (w.size() < depth) {
    std::uint64_t code = 0;
    for (auto sym : w) code = code * l + sym;
    return marginals_[w.size()][code];
  }
  auto state = *spectral_.states->index_of(w.prefix(depth));
  double mu = spectral_.gibbs[state];
  for (std::size_t i = depth; i < w.size(); ++i) {
    mu *= transitions_[state * l + w[i]];
    state = next_state(state, w[i]);
  }
  return mu;
}

double GibbsMeasure::of_set(const std::vector<Word>& words) const {
  double total = 0.0;
  for (const auto& w : words) total += (*this)(w);
  return total;
}

// ---------------------------------------------------------------------------

double birkhoff_sum(const Potential& phi, const SymbolicPoint& z, std::size_t p) {
  double total = 0.0;
  const auto l = phi.alphabet_size();
  for (std::size_t j = 0; j < p; ++j) {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < phi.depth(); ++i) code = code * l + z.at(j + i);
    total += phi.at_code(code);
  }
  return total;
}

Word least_extension(const Subshift& s, const Word& w, std::size_t length) {
  Word out = w.prefix(length);
  if (out.empty() && length > 0) out.push_back(0);
  while (out.size() < length) out.push_back(s.least_successor(out.back()));
  return out;
}

GibbsConstantReport gibbs_constant_check(const Subshift& s, const Potential& phi, std::size_t n_max,
                                         const PowerOptions& options) {
  GibbsMeasure mu(s, phi, options);
  const double p = mu.pressure();
  const std::size_t k = phi.depth();
  GibbsConstantReport out;
  out.constant = 1.0;
  for (std::size_t d = 1; d <= n_max; ++d) {
    Cylinders words(s, d);
    double c = 1.0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto w = words.word(i);
      const auto x = least_extension(s, w, d + k - 1);
      double sum = 0.0;
      for (std::size_t j = 0; j < d; ++j) sum += phi(x.suffix_from(j));
      const double ratio = mu(w) / std::exp(sum - static_cast<double>(d) * p);
      c = std::max({c, ratio, 1.0 / ratio});
    }
    out.per_depth.push_back(c);
    out.constant = std::max(out.constant, c);
  }
  return out;
}

Potential normalized_potential(const Subshift& s, const Potential& phi, const PowerOptions& options) {
  auto data = leading_eigentriple(build_transfer_matrix(s, phi, phi.depth()), options);
  const auto& states = *data.states;
  const std::size_t depth = data.depth;
  std::map<Word, double> values;
  Cylinders words(s, depth + 1);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto w = words.word(i);
    const auto head = *states.index_of(w.prefix(depth));
    const auto tail = *states.index_of(w.suffix_from(1));
    values[w] = phi(w) + std::log(data.right_vector[head]) - std::log(data.right_vector[tail]) -
                std::log(data.lambda);
  }
  return Potential(s, depth + 1, values);
}

}  // namespace escrate
