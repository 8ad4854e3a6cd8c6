#include "escrate/symbolic.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "escrate/errors.hpp"

namespace escrate {

Word Word::prefix(std::size_t n) const {
  n = std::min(n, symbols_.size());
  return Word(std::vector<Symbol>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Word Word::suffix_from(std::size_t start) const {
  start = std::min(start, symbols_.size());
  return Word(std::vector<Symbol>(symbols_.begin() + static_cast<std::ptrdiff_t>(start), symbols_.end()));
}

Word Word::with(Symbol s) const {
  Word out = *this;
  out.symbols_.push_back(s);
  return out;
}

bool Word::starts_with(const Word& other) const {
  return other.size() <= size() && std::equal(other.begin(), other.end(), begin());
}

Word operator+(const Word& a, const Word& b) {
  Word out = a;
  out.symbols_.insert(out.symbols_.end(), b.begin(), b.end());
  return out;
}

// ---------------------------------------------------------------------------

Subshift::Subshift(std::vector<std::vector<std::uint8_t>> transition,
                   std::vector<std::string> labels)
    : size_(transition.size()), transition_(std::move(transition)) {
  if (size_ == 0) raise(ErrorCode::InvalidInput, "transition matrix is empty");
  if (size_ > kMaxAlphabet) raise(ErrorCode::InvalidInput, "alphabet larger than 256 symbols");
  allowed_.assign(size_ * size_, 0);
  for (std::size_t i = 0; i < size_; ++i) {
    if (transition_[i].size() != size_) raise(ErrorCode::InvalidInput, "transition matrix is not square");
    for (std::size_t j = 0; j < size_; ++j) {
      auto v = transition_[i][j];
      if (v > 1) raise(ErrorCode::InvalidInput, "transition entries must be 0 or 1");
      allowed_[i * size_ + j] = v;
    }
  }
  for (std::size_t i = 0; i < size_; ++i) {
    bool row = false, col = false;
    for (std::size_t j = 0; j < size_; ++j) {
      row = row || allowed_[i * size_ + j];
      col = col || allowed_[j * size_ + i];
    }
    if (!row || !col) {
      raise(ErrorCode::InvalidInput, "symbol " + std::to_string(i) + " has no successor or no predecessor");
    }
  }

  if (labels.empty()) {
    labels_.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) labels_.push_back(std::to_string(i));
  } else {
    if (labels.size() != size_) raise(ErrorCode::InvalidInput, "label count does not match alphabet size");
    labels_ = std::move(labels);
    default_labels_ = false;
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      raise(ErrorCode::InvalidInput, "symbol labels must be distinct");
    }
  }
  for (const auto& l : labels_) {
    if (l.empty() || l.find(',') != std::string::npos) raise(ErrorCode::InvalidInput, "bad symbol label");
    separated_ = separated_ || l.size() > 1;
  }
}

Subshift Subshift::full(std::size_t alphabet_size) {
  return Subshift(std::vector<std::vector<std::uint8_t>>(
      alphabet_size, std::vector<std::uint8_t>(alphabet_size, 1)));
}

Subshift Subshift::golden_mean() { return Subshift({{1, 1}, {1, 0}}); }

std::size_t Subshift::out_degree(Symbol s) const {
  return static_cast<std::size_t>(
      std::count(allowed_.begin() + s * size_, allowed_.begin() + (s + 1) * size_, 1));
}

bool Subshift::admissible(const Word& w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= size_) return false;
    if (i + 1 < w.size() && !allowed(w[i], w[i + 1])) return false;
  }
  return true;
}

Symbol Subshift::least_successor(Symbol s) const {
  for (std::size_t j = 0; j < size_; ++j) {
    if (allowed(s, static_cast<Symbol>(j))) return static_cast<Symbol>(j);
  }
  return 0;  // unreachable: constructor guarantees a successor
}

Word Subshift::parse_word(std::string_view text) const {
  std::vector<Symbol> out;
  auto lookup = [&](std::string_view token) -> Symbol {
    for (std::size_t i = 0; i < size_; ++i) {
      if (labels_[i] == token) return static_cast<Symbol>(i);
    }
    raise(ErrorCode::InvalidInput, "unknown symbol '" + std::string(token) + "'");
  };
  if (separated_ || text.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size() && !text.empty()) {
      auto end = text.find(',', start);
      if (end == std::string_view::npos) end = text.size();
      out.push_back(lookup(text.substr(start, end - start)));
      start = end + 1;
    }
  } else {
    for (char c : text) out.push_back(lookup(std::string_view(&c, 1)));
  }
  return Word(std::move(out));
}

std::string Subshift::format(const Word& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (separated_ && i > 0) out += ',';
    out += labels_.at(w[i]);
  }
  return out;
}

std::optional<std::size_t> Subshift::code_space(std::size_t n, std::size_t cap) const {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / size_) return std::nullopt;
    total *= size_;
  }
  if (total > cap) return std::nullopt;
  return total;
}

// ---------------------------------------------------------------------------

MixingWitness is_mixing(const Subshift& s) {
  const std::size_t l = s.alphabet_size();
  const std::size_t bound = (l - 1) * (l - 1) + 1;
  std::vector<std::uint8_t> power(l * l), next(l * l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) power[i * l + j] = s.allowed(static_cast<Symbol>(i), static_cast<Symbol>(j));

  for (std::size_t d = 1; d <= bound; ++d) {
    if (std::all_of(power.begin(), power.end(), [](auto v) { return v != 0; })) return {true, d};
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t k = 0; k < l; ++k) {
        if (!power[i * l + k]) continue;
        for (std::size_t j = 0; j < l; ++j) {
          if (s.allowed(static_cast<Symbol>(k), static_cast<Symbol>(j))) next[i * l + j] = 1;
        }
      }
    power.swap(next);
  }
  return {};
}

// ---------------------------------------------------------------------------

Cylinders::Cylinders(const Subshift& s, std::size_t depth, std::size_t cap)
    : depth_(depth), alphabet_(s.alphabet_size()) {
  if (depth == 0) raise(ErrorCode::InvalidInput, "cylinder depth must be >= 1");
  auto space = s.code_space(depth, cap);
  if (!space) {
    raise(ErrorCode::StateCapExceeded, std::to_string(alphabet_) + "^" + std::to_string(depth) +
                                           " exceeds the cap of " + std::to_string(cap));
  }
  lookup_.assign(*space, -1);

  // Depth-first generation in lexicographic order.
  std::vector<Symbol> stack(depth);
  std::vector<std::uint64_t> partial(depth + 1, 0);
  std::size_t level = 0;
  std::vector<std::size_t> next(depth + 1, 0);
  while (true) {
    if (level == depth) {
      lookup_[partial[depth]] = static_cast<std::int32_t>(codes_.size());
      codes_.push_back(partial[depth]);
      --level;
      continue;
    }
    bool advanced = false;
    while (next[level] < alphabet_) {
      auto sym = static_cast<Symbol>(next[level]++);
      if (level > 0 && !s.allowed(stack[level - 1], sym)) continue;
      stack[level] = sym;
      partial[level + 1] = partial[level] * alphabet_ + sym;
      ++level;
      next[level] = 0;
      advanced = true;
      break;
    }
    if (!advanced) {
      if (level == 0) break;
      --level;
    }
  }
}

Word Cylinders::word(std::size_t index) const {
  std::vector<Symbol> out(depth_);
  auto c = codes_[index];
  for (std::size_t i = depth_; i-- > 0;) {
    out[i] = static_cast<Symbol>(c % alphabet_);
    c /= alphabet_;
  }
  return Word(std::move(out));
}

Symbol Cylinders::first_symbol(std::size_t index) const {
  auto c = codes_[index];
  for (std::size_t i = 1; i < depth_; ++i) c /= alphabet_;
  return static_cast<Symbol>(c);
}

Symbol Cylinders::last_symbol(std::size_t index) const {
  return static_cast<Symbol>(codes_[index] % alphabet_);
}

std::uint64_t Cylinders::encode(const Word& w) const {
  std::uint64_t c = 0;
  for (auto sym : w) c = c * alphabet_ + sym;
  return c;
}

std::optional<std::size_t> Cylinders::index_of(const Word& w) const {
  if (w.size() != depth_) return std::nullopt;
  for (auto sym : w)
    if (sym >= alphabet_) return std::nullopt;
  return index_of_code(encode(w));
}

std::optional<std::size_t> Cylinders::index_of_code(std::uint64_t code) const {
  if (code >= lookup_.size() || lookup_[code] < 0) return std::nullopt;
  return static_cast<std::size_t>(lookup_[code]);
}

std::pair<std::size_t, std::size_t> Cylinders::refinement_range(const Word& w) const {
  if (w.size() > depth_) raise(ErrorCode::DepthMismatch, "word longer than cylinder depth");
  std::uint64_t lo = encode(w), width = 1;
  for (std::size_t i = w.size(); i < depth_; ++i) {
    lo *= alphabet_;
    width *= alphabet_;
  }
  auto first = std::lower_bound(codes_.begin(), codes_.end(), lo);
  auto last = std::lower_bound(first, codes_.end(), lo + width);
  return {static_cast<std::size_t>(first - codes_.begin()), static_cast<std::size_t>(last - codes_.begin())};
}

std::shared_ptr<const Cylinders> enumerate_cylinders(const Subshift& s, std::size_t n, std::size_t cap) {
  return std::make_shared<const Cylinders>(s, n, cap);
}

std::vector<Word> refine_cylinder(const Subshift& s, const Word& w, std::size_t target_depth,
                                  std::size_t cap) {
  if (target_depth < w.size()) raise(ErrorCode::DepthMismatch, "target depth shorter than word");
  if (!s.admissible(w)) raise(ErrorCode::InvalidInput, "word is not admissible");
  if (!s.code_space(target_depth - w.size(), cap)) {
    raise(ErrorCode::StateCapExceeded, "refinement exceeds the state cap");
  }
  std::vector<Word> out;
  if (w.empty()) {
    Cylinders all(s, target_depth, cap);
    out.reserve(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) out.push_back(all.word(i));
    return out;
  }
  Word current = w;
  auto extend = [&](auto&& self) -> void {
    if (current.size() == target_depth) {
      out.push_back(current);
      return;
    }
    for (std::size_t a = 0; a < s.alphabet_size(); ++a) {
      auto sym = static_cast<Symbol>(a);
      if (!s.allowed(current.back(), sym)) continue;
      current.push_back(sym);
      self(self);
      current.pop_back();
    }
  };
  extend(extend);
  return out;
}

// ---------------------------------------------------------------------------

SymbolicPoint SymbolicPoint::periodic(Word period_block, Word preperiod) {
  if (period_block.empty()) raise(ErrorCode::InvalidInput, "period block must be nonempty");
  SymbolicPoint p;
  p.period_ = std::move(period_block);
  p.preperiod_ = std::move(preperiod);
  return p;
}

SymbolicPoint SymbolicPoint::prefix(Word digits) {
  SymbolicPoint p;
  p.digits_ = std::move(digits);
  return p;
}

std::optional<std::size_t> SymbolicPoint::available_digits() const {
  if (eventually_periodic()) return std::nullopt;
  return digits_.size();
}

Symbol SymbolicPoint::at(std::size_t i) const {
  if (!eventually_periodic()) {
    if (i >= digits_.size()) {
      raise(ErrorCode::InsufficientDigits, "digit " + std::to_string(i) + " requested from a generator of " +
                                               std::to_string(digits_.size()) + " digits");
    }
    return digits_[i];
  }
  if (i < preperiod_.size()) return preperiod_[i];
  return period_[(i - preperiod_.size()) % period_.size()];
}

Word SymbolicPoint::take(std::size_t n) const {
  std::vector<Symbol> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(at(i));
  return Word(std::move(out));
}

SymbolicPoint SymbolicPoint::shifted(std::size_t j) const {
  if (!eventually_periodic()) {
    if (j > digits_.size()) raise(ErrorCode::InsufficientDigits, "shift past the end of the generator");
    return prefix(digits_.suffix_from(j));
  }
  if (j <= preperiod_.size()) return periodic(period_, preperiod_.suffix_from(j));
  std::size_t r = (j - preperiod_.size()) % period_.size();
  return periodic(period_.suffix_from(r) + period_.prefix(r));
}

bool SymbolicPoint::admissible_in(const Subshift& s) const {
  if (!eventually_periodic()) return s.admissible(digits_);
  const Word unrolled = preperiod_ + period_ + period_.prefix(1);
  return s.admissible(unrolled);
}

std::optional<std::size_t> prime_period(const SymbolicPoint& z) {
  if (!z.eventually_periodic() || !z.preperiod().empty()) return std::nullopt;
  const Word& b = z.period_block();
  const std::size_t n = b.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = b[i] == b[i - p];
    if (ok) return p;
  }
  return n;
}

Word champernowne_binary(std::size_t digits) {
  std::vector<Symbol> out;
  out.reserve(digits + 64);
  for (std::uint64_t k = 0; out.size() < digits; ++k) {
    if (k == 0) {
      out.push_back(0);
      continue;
    }
    int top = 63;
    while (((k >> top) & 1U) == 0) --top;
    for (int b = top; b >= 0; --b) out.push_back(static_cast<Symbol>((k >> b) & 1U));
  }
  out.resize(digits);
  return Word(std::move(out));
}

}  // namespace escrate
