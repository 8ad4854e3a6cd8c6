#pragma once

// JSON descriptors for systems, potentials and points, and deterministic
// CSV/JSON serialization of results.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "escrate/dimension.hpp"
#include "escrate/geometry.hpp"
#include "escrate/holes.hpp"
#include "escrate/oracle.hpp"
#include "escrate/symbolic.hpp"
#include "escrate/thermo.hpp"

namespace escrate::io {

using nlohmann::json;

/// {"preset": "full", "alphabet_size": l} | {"preset": "golden_mean"} |
/// {"transition": [[...]], "labels": [...]}.
Subshift subshift_from_json(const json& j);
json to_json(const Subshift& s);

/// {"preset": "cantor" | "doubling"} | {"branches": [...], "labels": [...]}.
/// A branch is {"interval": [a, b], "kind": "linear", "slope", "offset"} or
/// {"interval": [a, b], "kind": "expr", "f": "...", "df": "..."}.
MarkovIntervalMap map_from_json(const json& j);
json to_json(const MarkovIntervalMap& m);

/// {"constant": c} | {"per_symbol": [...]} |
/// {"depth": k, "values": {"word": v, ...}, "default": d}.
Potential potential_from_json(const Subshift& s, const json& j);
json to_json(const Subshift& s, const Potential& phi);

/// {"periodic": "02", "preperiod": ""} | {"prefix": "0110"} |
/// {"champernowne": digits}. Words use the subshift's labels.
SymbolicPoint point_from_json(const Subshift& s, const json& j);
json to_json(const Subshift& s, const SymbolicPoint& z);

json to_json(const SpectralData& d);
json to_json(const Subshift& s, const BallApproximation& b);
json to_json(const EscapeRateResult& r);
json to_json(const DimensionResult& r);
json to_json(const SurvivalCurve& c);
json to_json(const KacCheck& k);

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);

/// Plain CSV: header line then rows, cells joined by commas.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out, std::vector<std::string> header);
  CsvWriter& cell(double x);
  CsvWriter& cell(std::size_t x);
  CsvWriter& cell(bool x);
  CsvWriter& cell(const std::string& x);
  void end_row();

 private:
  void separator();
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace escrate::io
