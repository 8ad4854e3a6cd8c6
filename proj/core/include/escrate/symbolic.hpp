#pragma once

// Subshifts of finite type, finite words, cylinder enumeration and
// eventually-periodic symbolic points.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace escrate {

using Symbol = std::uint8_t;

inline constexpr std::size_t kMaxAlphabet = 256;
/// Upper bound on l^n for matrix-depth cylinder algebras.
inline constexpr std::size_t kStateCap = std::size_t{1} << 20;
/// Upper bound on l^n for exhaustive word enumeration.
inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 24;

/// A finite sequence of symbols. Ordered lexicographically.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}
  explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  Symbol front() const { return symbols_.front(); }
  Symbol back() const { return symbols_.back(); }

  auto begin() const noexcept { return symbols_.begin(); }
  auto end() const noexcept { return symbols_.end(); }
  std::span<const Symbol> symbols() const noexcept { return symbols_; }

  Word prefix(std::size_t n) const;
  Word suffix_from(std::size_t start) const;
  Word with(Symbol s) const;
  void push_back(Symbol s) { symbols_.push_back(s); }
  void pop_back() { symbols_.pop_back(); }
  bool starts_with(const Word& other) const;

  friend Word operator+(const Word& a, const Word& b);
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) noexcept {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.symbols_[i] != b.symbols_[i]) return a.symbols_[i] <=> b.symbols_[i];
    }
    return a.size() <=> b.size();
  }
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Symbol> symbols_;
};

/// One-sided subshift of finite type given by a 0/1 transition matrix.
class Subshift {
 public:
  /// Throws InvalidInput on a non-square, non-binary matrix, a symbol with
  /// no successor or predecessor, or more than 256 symbols. `labels`
  /// defaults to "0", "1", ...; custom labels let e.g. the middle-third
  /// Cantor coding be written with ternary digits {0, 2}.
  explicit Subshift(std::vector<std::vector<std::uint8_t>> transition,
                    std::vector<std::string> labels = {});

  static Subshift full(std::size_t alphabet_size);
  static Subshift golden_mean();

  std::size_t alphabet_size() const noexcept { return size_; }
  bool allowed(Symbol from, Symbol to) const { return allowed_[from * size_ + to] != 0; }
  std::size_t out_degree(Symbol s) const;
  const std::vector<std::vector<std::uint8_t>>& transition() const noexcept { return transition_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool default_labels() const noexcept { return default_labels_; }

  bool admissible(const Word& w) const;

  /// Least admissible successor of `s`.
  Symbol least_successor(Symbol s) const;

  /// Words use labels, separated by "," when any label is longer than one
  /// character (e.g. alphabets with more than 10 symbols).
  Word parse_word(std::string_view text) const;
  std::string format(const Word& w) const;

  /// l^n, or nullopt if it exceeds `cap`.
  std::optional<std::size_t> code_space(std::size_t n, std::size_t cap) const;

  friend bool operator==(const Subshift& a, const Subshift& b) {
    return a.transition_ == b.transition_ && a.labels_ == b.labels_;
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::vector<std::uint8_t>> transition_;
  std::vector<std::uint8_t> allowed_;
  std::vector<std::string> labels_;
  bool default_labels_ = true;
  bool separated_ = false;
};

struct MixingWitness {
  bool mixing = false;
  /// Least d with A^d > 0 entrywise; 0 when not mixing.
  std::size_t exponent = 0;
};

/// Primitivity test; searches d up to the Wielandt bound (l-1)^2 + 1.
MixingWitness is_mixing(const Subshift& s);

/// The admissible words of a fixed length, in lexicographic order. Words
/// are stored as base-l codes so the index lookup is a flat array.
class Cylinders {
 public:
  Cylinders(const Subshift& s, std::size_t depth, std::size_t cap = kStateCap);

  std::size_t depth() const noexcept { return depth_; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return codes_.size(); }

  std::uint64_t code(std::size_t index) const { return codes_[index]; }
  Word word(std::size_t index) const;
  Symbol first_symbol(std::size_t index) const;
  Symbol last_symbol(std::size_t index) const;

  std::optional<std::size_t> index_of(const Word& w) const;
  std::optional<std::size_t> index_of_code(std::uint64_t code) const;
  std::uint64_t encode(const Word& w) const;
  std::uint64_t code_space() const noexcept { return lookup_.size(); }

  /// Indices of the cylinders refining `w` (|w| <= depth), a contiguous range.
  std::pair<std::size_t, std::size_t> refinement_range(const Word& w) const;

 private:
  std::size_t depth_;
  std::size_t alphabet_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::int32_t> lookup_;
};

/// Throws StateCapExceeded when l^n > cap.
std::shared_ptr<const Cylinders> enumerate_cylinders(const Subshift& s, std::size_t n,
                                                     std::size_t cap = kStateCap);

/// All admissible extensions of `w` to length `target_depth`.
std::vector<Word> refine_cylinder(const Subshift& s, const Word& w, std::size_t target_depth,
                                  std::size_t cap = kStateCap);

/// preperiod . period_block^infinity, or a finite digit generator for a
/// point that is not (known to be) eventually periodic.
class SymbolicPoint {
 public:
  static SymbolicPoint periodic(Word period_block, Word preperiod = {});
  static SymbolicPoint prefix(Word digits);

  bool eventually_periodic() const noexcept { return !period_.empty(); }
  const Word& preperiod() const noexcept { return preperiod_; }
  const Word& period_block() const noexcept { return period_; }
  /// Digits available to finite computations; nullopt means unlimited.
  std::optional<std::size_t> available_digits() const;

  /// Throws InsufficientDigits past the end of a finite generator.
  Symbol at(std::size_t i) const;
  Word take(std::size_t n) const;
  /// sigma^j applied to the point.
  SymbolicPoint shifted(std::size_t j) const;

  bool admissible_in(const Subshift& s) const;

 private:
  Word preperiod_;
  Word period_;
  Word digits_;
};

/// Least p >= 1 with sigma^p(z) = z; nullopt for non-periodic points,
/// including strictly preperiodic ones.
std::optional<std::size_t> prime_period(const SymbolicPoint& z);

/// Binary Champernowne digits 0 1 10 11 100 ..., truncated to `digits`.
Word champernowne_binary(std::size_t digits);

}  // namespace escrate
