#include "escrate/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "escrate/errors.hpp"
#include "escrate/expr.hpp"

namespace escrate::io {
namespace {

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) raise(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidInput, std::string("field '") + key + "': " + e.what());
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) raise(ErrorCode::InvalidInput, std::string(what) + " must be a JSON object");
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

Subshift subshift_from_json(const json& j) {
  require_object(j, "subshift");
  const auto preset = j.value("preset", std::string{});
  if (preset == "full") return Subshift::full(get<std::size_t>(j, "alphabet_size"));
  if (preset == "golden_mean") return Subshift::golden_mean();
  if (!preset.empty()) raise(ErrorCode::InvalidInput, "unknown subshift preset '" + preset + "'");
  auto transition = get<std::vector<std::vector<int>>>(j, "transition");
  std::vector<std::vector<std::uint8_t>> a;
  for (const auto& row : transition) {
    std::vector<std::uint8_t> r;
    for (int v : row) {
      if (v != 0 && v != 1) raise(ErrorCode::InvalidInput, "transition entries must be 0 or 1");
      r.push_back(static_cast<std::uint8_t>(v));
    }
    a.push_back(std::move(r));
  }
  if (j.contains("alphabet_size") && get<std::size_t>(j, "alphabet_size") != a.size()) {
    raise(ErrorCode::InvalidInput, "alphabet_size does not match the transition matrix");
  }
  auto labels = j.contains("labels") ? get<std::vector<std::string>>(j, "labels") : std::vector<std::string>{};
  return Subshift(std::move(a), std::move(labels));
}

json to_json(const Subshift& s) {
  json j;
  j["alphabet_size"] = s.alphabet_size();
  j["transition"] = s.transition();
  j["labels"] = s.labels();
  return j;
}

MarkovIntervalMap map_from_json(const json& j) {
  require_object(j, "map");
  const auto preset = j.value("preset", std::string{});
  if (preset == "cantor") return MarkovIntervalMap::cantor();
  if (preset == "doubling") return MarkovIntervalMap::doubling();
  if (!preset.empty()) raise(ErrorCode::InvalidInput, "unknown map preset '" + preset + "'");
  const auto& bj = j.at("branches");
  if (!bj.is_array() || bj.empty()) raise(ErrorCode::InvalidInput, "branches must be a nonempty array");
  std::vector<Branch> branches;
  for (const auto& b : bj) {
    require_object(b, "branch");
    const auto iv = get<std::vector<double>>(b, "interval");
    if (iv.size() != 2) raise(ErrorCode::InvalidInput, "interval must be [lo, hi]");
    const Interval domain{iv[0], iv[1]};
    const auto kind = b.value("kind", std::string{"linear"});
    if (kind == "linear") {
      branches.push_back(Branch::linear(domain, get<double>(b, "slope"), get<double>(b, "offset")));
    } else if (kind == "expr") {
      const auto f_text = get<std::string>(b, "f");
      const auto df_text = get<std::string>(b, "df");
      auto f = Expression::parse(f_text);
      auto df = Expression::parse(df_text);
      branches.push_back(Branch::general(domain, f, df, f_text, df_text));
    } else {
      raise(ErrorCode::InvalidInput, "unknown branch kind '" + kind + "'");
    }
  }
  auto labels = j.contains("labels") ? get<std::vector<std::string>>(j, "labels") : std::vector<std::string>{};
  return MarkovIntervalMap(std::move(branches), std::move(labels));
}

json to_json(const MarkovIntervalMap& m) {
  json branches = json::array();
  for (const auto& b : m.branches()) {
    json e;
    e["interval"] = {b.domain().lo, b.domain().hi};
    if (b.is_linear()) {
      e["kind"] = "linear";
      e["slope"] = b.slope();
      e["offset"] = b.offset();
    } else {
      e["kind"] = "expr";
      e["f"] = b.f_text();
      e["df"] = b.df_text();
    }
    branches.push_back(std::move(e));
  }
  return {{"branches", branches}, {"labels", m.subshift().labels()}};
}

Potential potential_from_json(const Subshift& s, const json& j) {
  require_object(j, "potential");
  if (j.contains("constant")) return Potential::constant(s, get<double>(j, "constant"));
  if (j.contains("per_symbol")) return Potential::per_symbol(s, get<std::vector<double>>(j, "per_symbol"));
  const auto depth = get<std::size_t>(j, "depth");
  std::map<Word, double> values;
  if (j.contains("values")) {
    const auto& vj = j.at("values");
    if (!vj.is_object()) raise(ErrorCode::InvalidInput, "potential values must map words to numbers");
    for (const auto& [key, v] : vj.items()) {
      if (!v.is_number()) raise(ErrorCode::InvalidInput, "potential value for '" + key + "' is not a number");
      values[s.parse_word(key)] = v.get<double>();
    }
  }
  std::optional<double> fallback;
  if (j.contains("default")) fallback = get<double>(j, "default");
  return Potential(s, depth, values, fallback);
}

json to_json(const Subshift& s, const Potential& phi) {
  json values = json::object();
  for (const auto& [w, v] : phi.to_map(s)) values[s.format(w)] = number(v);
  return {{"depth", phi.depth()}, {"values", values}};
}

SymbolicPoint point_from_json(const Subshift& s, const json& j) {
  require_object(j, "point");
  if (j.contains("periodic")) {
    const auto pre = j.contains("preperiod") ? s.parse_word(get<std::string>(j, "preperiod")) : Word{};
    return SymbolicPoint::periodic(s.parse_word(get<std::string>(j, "periodic")), pre);
  }
  if (j.contains("prefix")) return SymbolicPoint::prefix(s.parse_word(get<std::string>(j, "prefix")));
  if (j.contains("champernowne")) {
    if (s.alphabet_size() != 2) raise(ErrorCode::InvalidInput, "champernowne point needs a 2-symbol alphabet");
    return SymbolicPoint::prefix(champernowne_binary(get<std::size_t>(j, "champernowne")));
  }
  raise(ErrorCode::InvalidInput, "point needs one of periodic, prefix, champernowne");
}

json to_json(const Subshift& s, const SymbolicPoint& z) {
  if (z.eventually_periodic()) {
    return {{"periodic", s.format(z.period_block())}, {"preperiod", s.format(z.preperiod())}};
  }
  return {{"prefix", s.format(z.take(*z.available_digits()))}};
}

json to_json(const SpectralData& d) {
  return {{"depth", d.depth},         {"states", d.states ? d.states->size() : 0},
          {"lambda", number(d.lambda)}, {"pressure", number(d.pressure)},
          {"iterations", d.iterations}, {"residual", number(d.residual)}};
}

json to_json(const Subshift& s, const BallApproximation& b) {
  json inner = json::array(), outer = json::array();
  for (const auto& w : b.inner) inner.push_back(s.format(w));
  for (const auto& w : b.outer) outer.push_back(s.format(w));
  return {{"center", b.center}, {"epsilon", b.epsilon},        {"depth", b.depth},
          {"inner", inner},     {"outer", outer},              {"mu_inner", number(b.mu_inner)},
          {"mu_outer", number(b.mu_outer)}, {"eta", number(b.eta)}};
}

json to_json(const EscapeRateResult& r) {
  return {{"n", r.n},
          {"len_n", r.len_n},
          {"mu_hole", number(r.mu_hole)},
          {"lambda", number(r.lambda)},
          {"lambda_n", number(r.lambda_n)},
          {"escape_rate", number(r.escape_rate)},
          {"ratio", number(r.ratio)},
          {"gap_ratio", number(r.gap_ratio)},
          {"predicted", number(r.predicted)},
          {"deviation", number(std::abs(r.ratio - r.predicted))},
          {"mixing_flag", r.mixing},
          {"empty_survivor", r.empty_survivor}};
}

json to_json(const DimensionResult& r) {
  return {{"n", r.n},
          {"depth", r.depth},
          {"mu_hole", number(r.mu_hole)},
          {"s", number(r.s)},
          {"s_n", number(r.s_n)},
          {"ratio", number(r.ratio)},
          {"predicted", number(r.predicted)},
          {"deviation", number(r.deviation)},
          {"lyapunov", number(r.lyapunov)},
          {"oscillation_diagnostic", number(r.oscillation)},
          {"mixing_flag", r.mixing}};
}

json to_json(const SurvivalCurve& c) {
  json survival = json::array(), err = json::array();
  for (double x : c.survival) survival.push_back(number(x));
  for (double x : c.standard_error) err.push_back(number(x));
  return {{"method", to_string(c.method)}, {"k", c.k_values},   {"survival", survival}, {"stderr", err},
          {"samples", c.samples},          {"seed", c.seed},    {"flags", c.flags}};
}

json to_json(const KacCheck& k) {
  return {{"partial", number(k.partial)},     {"lhs_lower", number(k.lhs_lower)},
          {"lhs_upper", number(k.lhs_upper)}, {"rhs", number(k.rhs)},
          {"gap", number(k.gap)},             {"tail_mass", number(k.tail_mass)},
          {"tail_ratio", number(k.tail_ratio)}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ == columns_) raise(ErrorCode::InvalidInput, "CSV row has too many cells");
  if (filled_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(bool x) {
  separator();
  out_ << (x ? 1 : 0);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& x) {
  separator();
  if (x.find_first_of(",\"\n") == std::string::npos) {
    out_ << x;
    return *this;
  }
  out_ << '"';
  for (char c : x) out_ << (c == '"' ? "\"\"" : std::string(1, c));
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) raise(ErrorCode::InvalidInput, "CSV row has too few cells");
  out_ << '\n';
  filled_ = 0;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace escrate::io
