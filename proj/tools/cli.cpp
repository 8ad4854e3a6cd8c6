#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "escrate/dimension.hpp"
#include "escrate/errors.hpp"
#include "escrate/geometry.hpp"
#include "escrate/holes.hpp"
#include "escrate/io.hpp"
#include "escrate/oracle.hpp"
#include "escrate/thermo.hpp"

#ifndef ESCRATE_VERSION
#define ESCRATE_VERSION "0.0.0"
#endif

namespace escrate::cli {
namespace {

using io::json;
namespace fs = std::filesystem;

constexpr std::size_t kPointDigits = 64;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Everything a command needs, resolved from the config file.
struct Experiment {
  json raw;
  std::string hash;
  std::optional<MarkovIntervalMap> map;
  std::optional<Subshift> subshift;
  json potential;
  json hole;
  json run_options;
  fs::path out_dir;
  std::string format = "csv";
  PowerOptions power;
  BowenOptions bowen;

  const Subshift& shift() const { return map ? map->subshift() : *subshift; }
  bool bowen_potential() const { return potential.is_object() && potential.value("bowen", false); }
};

Experiment load(const Options& options) {
  std::ifstream in(options.config, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + options.config.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  Experiment e;
  try {
    e.raw = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!e.raw.is_object()) throw ConfigError("config must be a JSON object");
  e.hash = hex(io::fnv1a(text));

  const json system = e.raw.value("system", json::object());
  const bool has_map = system.contains("map"), has_shift = system.contains("subshift");
  if (has_map == has_shift) throw ConfigError("system needs exactly one of 'map' or 'subshift'");
  if (has_map) e.map.emplace(io::map_from_json(system.at("map")));
  else e.subshift.emplace(io::subshift_from_json(system.at("subshift")));

  e.potential = e.raw.value("potential", json::object());
  if (e.bowen_potential() && !e.map) throw ConfigError("a Bowen potential needs a map system");
  e.hole = e.raw.value("hole", json());

  for (const auto& r : e.raw.value("run", json::array())) {
    if (!r.is_object() || !r.contains("command")) throw ConfigError("run entries need a 'command'");
    if (r.at("command") == options.command) e.run_options = r;
  }
  if (e.run_options.is_null()) e.run_options = json::object();

  const json output = e.raw.value("output", json::object());
  e.out_dir = options.out ? *options.out : fs::path(output.value("directory", std::string(".")));
  e.format = options.format ? *options.format : output.value("format", std::string("csv"));
  if (e.format != "csv" && e.format != "json") throw ConfigError("format must be csv or json");

  const json tol = e.raw.value("tolerances", json::object());
  e.power.tolerance = tol.value("power", e.power.tolerance);
  e.power.max_iterations = tol.value("max_iterations", e.power.max_iterations);
  e.bowen.residual_tolerance = tol.value("bowen_residual", e.bowen.residual_tolerance);
  e.bowen.bisection_width = tol.value("bisection_width", e.bowen.bisection_width);
  e.bowen.power = e.power;
  return e;
}

json summary_header(const Experiment& e, const std::string& command) {
  json tolerances = {{"power_tolerance", e.power.tolerance},
                     {"power_max_iterations", e.power.max_iterations},
                     {"bowen_residual", e.bowen.residual_tolerance},
                     {"bisection_width", e.bowen.bisection_width}};
  return {{"command", command}, {"version", ESCRATE_VERSION}, {"config_hash", e.hash}, {"tolerances", tolerances}};
}

std::size_t sampling_depth(const Experiment& e, const Options& o) {
  return std::max<std::size_t>({1, o.depth.value_or(0), e.potential.value("depth", std::size_t{1})});
}

// The potential of the run plus, for Bowen potentials, the exponent used.
struct ResolvedPotential {
  Potential phi;
  std::optional<double> t;
};

ResolvedPotential resolve_potential(const Experiment& e, const Options& o) {
  if (!e.bowen_potential()) return {io::potential_from_json(e.shift(), e.potential), std::nullopt};
  const auto depth = sampling_depth(e, o);
  double t = e.potential.contains("t") ? e.potential.at("t").get<double>() : bowen_root(*e.map, depth, {}, e.bowen).t;
  return {log_deriv_potential(*e.map, t, depth).potential, t};
}

SymbolicPoint resolve_center(const Experiment& e) {
  if (!e.hole.is_object() || !e.hole.contains("center")) throw ConfigError("hole.center is required");
  const json& c = e.hole.at("center");
  if (c.is_object() && c.contains("x")) {
    if (!e.map) throw ConfigError("a real center needs a map system");
    return encode_point(*e.map, c.at("x").get<double>(), kPointDigits).point;
  }
  return io::point_from_json(e.shift(), c);
}

std::pair<std::size_t, std::size_t> n_range(const Experiment& e) {
  const json r = e.hole.value("n_range", json());
  if (!r.is_array() || r.size() != 2) throw ConfigError("hole.n_range must be [first, last]");
  const auto a = r[0].get<std::size_t>(), b = r[1].get<std::size_t>();
  if (a == 0 || a > b) throw ConfigError("hole.n_range is empty or starts at 0");
  return {a, b};
}

std::string family_kind(const Experiment& e) { return e.hole.value("family", std::string("cylinder")); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
}

// Writes rows as CSV or as a JSON array, depending on the format.
void write_table(const Experiment& e, const std::string& stem, const std::vector<std::string>& header,
                 const std::vector<json>& rows) {
  ensure_dir(e.out_dir);
  if (e.format == "json") {
    write_file(e.out_dir / (stem + ".json"), json(rows).dump(2) + "\n");
    return;
  }
  std::ostringstream csv;
  io::CsvWriter w(csv, header);
  for (const auto& row : rows) {
    for (const auto& h : header) {
      const json& v = row.at(h);
      if (v.is_boolean()) w.cell(v.get<bool>());
      else if (v.is_number_unsigned()) w.cell(v.get<std::size_t>());
      else if (v.is_number()) w.cell(v.get<double>());
      else w.cell(v.get<std::string>());
    }
    w.end_row();
  }
  write_file(e.out_dir / (stem + ".csv"), csv.str());
}

void emit_summary(const Experiment& e, const std::string& stem, const json& summary, std::ostream& out) {
  ensure_dir(e.out_dir);
  const auto text = summary.dump(2) + "\n";
  write_file(e.out_dir / (stem + "_summary.json"), text);
  out << text;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(io::format_double(x)); }

// ---------------------------------------------------------------------------

int cmd_pressure(const Experiment& e, const Options& o, std::ostream& out) {
  auto [phi, t] = resolve_potential(e, o);
  const auto depth = std::max(phi.depth(), o.depth.value_or(phi.depth()));
  auto m = build_transfer_matrix(e.shift(), phi, depth);
  const auto data = leading_eigentriple(m, e.power);
  const auto n_max = e.run_options.value("gibbs_n_max", std::size_t{8});
  const auto gibbs = gibbs_constant_check(e.shift(), phi, n_max, e.power);

  json s = summary_header(e, "pressure");
  s["lambda"] = data.lambda;
  s["pressure"] = data.pressure;
  s["depth"] = data.depth;
  s["states"] = data.states->size();
  s["iterations"] = data.iterations;
  s["residual"] = data.residual;
  s["gibbs_constant"] = gibbs.constant;
  s["gibbs_constant_per_depth"] = gibbs.per_depth;
  if (t) s["t"] = *t;
  emit_summary(e, "pressure", s, out);
  return kExitOk;
}

const std::vector<std::string> kEscapeColumns = {"n",      "len_n",     "mu_hole",   "lambda_n",
                                                 "escape_rate", "ratio", "gap_ratio", "predicted",
                                                 "deviation",   "mixing_flag"};

json escape_row(const EscapeRateResult& r) {
  return {{"n", r.n},
          {"len_n", r.len_n},
          {"mu_hole", num(r.mu_hole)},
          {"lambda_n", num(r.lambda_n)},
          {"escape_rate", num(r.escape_rate)},
          {"ratio", num(r.ratio)},
          {"gap_ratio", num(r.gap_ratio)},
          {"predicted", num(r.predicted)},
          {"deviation", num(std::abs(r.ratio - r.predicted))},
          {"mixing_flag", r.mixing}};
}

int cmd_escape_balls(const Experiment& e, const EscapeProblem& problem, std::ostream& out) {
  if (!e.map) throw ConfigError("ball families need a map system");
  const json& c = e.hole.at("center");
  if (!c.is_object() || !c.contains("x")) throw ConfigError("ball families need a real center {\"x\": ...}");
  const double x = c.at("x").get<double>();
  const auto eps = e.hole.value("epsilons", std::vector<double>{});
  if (eps.empty()) throw ConfigError("ball families need a nonempty hole.epsilons");
  const double eta = e.hole.value("eta", 0.1);
  const auto z = resolve_center(e);

  std::vector<json> inner_rows, outer_rows, balls;
  std::vector<EscapeRateResult> inner, outer;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto ball = ball_to_cylinders(*e.map, problem.measure(), x, eps[i], eta);
    balls.push_back(io::to_json(e.shift(), ball));
    const Hole in{i + 1, ball.inner, ball.depth, 0};
    const Hole outh{i + 1, ball.outer, ball.depth, 0};
    inner.push_back(problem.escape_rate(in, z));
    outer.push_back(problem.escape_rate(outh, z));
    auto ri = escape_row(inner.back()), ro = escape_row(outer.back());
    ri["epsilon"] = ro["epsilon"] = eps[i];
    inner_rows.push_back(ri);
    outer_rows.push_back(ro);
  }
  auto header = kEscapeColumns;
  header.push_back("epsilon");
  write_table(e, "escape_inner", header, inner_rows);
  write_table(e, "escape_outer", header, outer_rows);

  const double predicted = problem.predicted(z);
  json s = summary_header(e, "escape");
  s["family"] = "ball";
  s["eta"] = eta;
  s["predicted"] = predicted;
  s["final_ratio_inner"] = num(inner.back().ratio);
  s["final_ratio_outer"] = num(outer.back().ratio);
  s["bracket"] = {(1.0 - eta) * predicted, (1.0 + eta) * predicted};
  s["balls"] = balls;
  emit_summary(e, "escape", s, out);
  return kExitOk;
}

int cmd_escape(const Experiment& e, const Options& o, std::ostream& out) {
  auto [phi, t] = resolve_potential(e, o);
  EscapeProblem problem(e.shift(), phi, e.power);
  if (family_kind(e) == "ball") return cmd_escape_balls(e, problem, out);
  if (family_kind(e) != "cylinder") throw ConfigError("hole.family must be cylinder or ball");

  const auto [first, last] = n_range(e);
  const auto z = resolve_center(e);
  const auto family = standard_hole_family(e.shift(), z, last);
  const auto sweep = escape_sweep(problem, family, first, last);

  std::vector<json> rows;
  for (const auto& r : sweep.rows) rows.push_back(escape_row(r));
  write_table(e, "escape", kEscapeColumns, rows);

  json s = summary_header(e, "escape");
  s["family"] = "cylinder";
  s["n_range"] = {first, last};
  s["center"] = io::to_json(e.shift(), z);
  s["lambda"] = problem.lambda();
  s["pressure"] = problem.pressure();
  s["final_ratio"] = num(sweep.final_ratio);
  s["predicted"] = sweep.predicted;
  s["deviation"] = num(sweep.deviation);
  s["predicted_gap"] = sweep.predicted_gap;
  s["final_gap_ratio"] = num(sweep.final_gap_ratio);
  s["lambda_monotone"] = sweep.lambda_monotone;
  s["deviations_decreasing"] = sweep.deviations_decreasing;
  s["convergence_rate"] = sweep.convergence_rate ? num(*sweep.convergence_rate) : json();
  if (t) s["t"] = *t;
  emit_summary(e, "escape", s, out);
  return kExitOk;
}

int cmd_dimension(const Experiment& e, const Options& o, std::ostream& out) {
  if (!e.map) throw ConfigError("dimension needs a map system");
  json s = summary_header(e, "dimension");
  if (e.hole.is_null()) {
    const auto root = bowen_root(*e.map, sampling_depth(e, o), {}, e.bowen);
    s["s"] = root.t;
    s["residual"] = root.residual;
    s["lyapunov"] = root.lyapunov;
    s["oscillation_diagnostic"] = root.oscillation;
    emit_summary(e, "dimension", s, out);
    return kExitOk;
  }
  if (family_kind(e) != "cylinder") throw ConfigError("dimension sweeps use cylinder families");
  const auto [first, last] = n_range(e);
  const auto z = resolve_center(e);
  const auto family = standard_hole_family(e.shift(), z, last);
  const auto sweep = dimension_sweep(*e.map, family, first, last, e.bowen);

  const std::vector<std::string> header = {"n",         "mu_hole",   "s",        "s_n",
                                           "ratio",     "predicted", "deviation", "lyapunov",
                                           "oscillation_diagnostic"};
  std::vector<json> rows;
  for (const auto& r : sweep.rows) rows.push_back(io::to_json(r));
  write_table(e, "dimension", header, rows);

  s["n_range"] = {first, last};
  s["center"] = io::to_json(e.shift(), z);
  s["s"] = sweep.rows.back().s;
  s["final_ratio"] = num(sweep.final_ratio);
  s["predicted"] = sweep.predicted;
  s["deviation"] = num(sweep.deviation);
  s["s_n_monotone"] = sweep.s_n_monotone;
  emit_summary(e, "dimension", s, out);
  return kExitOk;
}

int cmd_oracle(const Experiment& e, const Options& o, std::ostream& out) {
  auto [phi, t] = resolve_potential(e, o);
  const auto& shift = e.shift();
  const auto [first, last] = n_range(e);
  const auto z = resolve_center(e);
  const auto family = standard_hole_family(shift, z, last);
  const auto n = e.run_options.value("n", first);
  const auto& hole = family.at(n);
  const auto k_max = e.run_options.value("k_max", std::size_t{12});
  const auto samples = e.run_options.value("samples", std::uint64_t{100000});
  const auto tail = e.run_options.value("tail_fraction", 0.5);
  std::vector<std::uint64_t> seeds = e.run_options.value("seeds", std::vector<std::uint64_t>{0});
  if (o.seed) seeds = {*o.seed};

  GibbsMeasure mu(shift, phi, e.power);
  json s = summary_header(e, "oracle");
  std::vector<std::string> flags;
  std::vector<SurvivalCurve> curves;
  try {
    curves.push_back(exhaustive_survival(mu, hole.words, k_max));
  } catch (const Error& err) {
    if (err.code() != ErrorCode::EnumerationCapExceeded) throw;
    flags.push_back("enumeration_cap_exceeded: monte carlo only");
  }
  for (auto seed : seeds) curves.push_back(monte_carlo_survival(mu, hole.words, k_max, samples, seed));

  std::vector<json> rows;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.survival.size(); ++i) {
      rows.push_back({{"method", to_string(c.method)},
                      {"seed", c.seed},
                      {"samples", c.samples},
                      {"k", c.k_values[i]},
                      {"survival", num(c.survival[i])},
                      {"stderr", c.standard_error.empty() ? json(0.0) : num(c.standard_error[i])}});
    }
  }
  write_table(e, "oracle", {"method", "seed", "samples", "k", "survival", "stderr"}, rows);

  const auto lambda_n = perturbed_eigenvalue(shift, phi, hole.words, hole.length, e.power).lambda_n;
  s["n"] = n;
  s["k_max"] = k_max;
  s["samples"] = samples;
  s["seeds"] = seeds;
  s["spectral_escape_rate"] = num(std::log(mu.lambda()) - std::log(lambda_n));
  const SurvivalCurve& reference = curves.front();
  s["fit_method"] = to_string(reference.method);
  try {
    const auto fit = fit_escape_rate(reference, tail);
    s["fitted_rate"] = fit.rate;
    s["fitted_stderr"] = fit.standard_error;
  } catch (const Error& err) {
    if (err.code() != ErrorCode::InsufficientTail) throw;
    flags.push_back("insufficient_tail");
  }
  if (reference.method == SurvivalMethod::Exhaustive) {
    const auto matrix = matrix_survival(shift, phi, hole.words, k_max, e.power);
    double worst = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) worst = std::max(worst, std::abs(matrix[k] - reference.survival[k]));
    s["matrix_vs_exhaustive"] = worst;
  }
  try {
    s["kac"] = io::to_json(kac_check(shift, phi, hole.words, e.run_options.value("kac_k_max", k_max), e.power));
  } catch (const Error& err) {
    if (err.code() != ErrorCode::EnumerationCapExceeded) throw;
    flags.push_back("kac_enumeration_cap_exceeded");
  }
  s["flags"] = flags;
  emit_summary(e, "oracle", s, out);
  return kExitOk;
}

void report(std::ostream& err, std::string_view code, const std::string& message, int exit_code) {
  err << json{{"error", code}, {"message", message}, {"exit_code", exit_code}}.dump() << "\n";
}

}  // namespace

int run(const Options& options, std::ostream& out, std::ostream& err) {
  try {
    const auto e = load(options);
    if (options.command == "pressure") return cmd_pressure(e, options, out);
    if (options.command == "escape") return cmd_escape(e, options, out);
    if (options.command == "dimension") return cmd_dimension(e, options, out);
    if (options.command == "oracle") return cmd_oracle(e, options, out);
    throw ConfigError("unknown command '" + options.command + "'");
  } catch (const ConfigError& x) {
    report(err, "InvalidInput", x.what(), kExitConfig);
    return kExitConfig;
  } catch (const json::exception& x) {
    report(err, "InvalidInput", x.what(), kExitConfig);
    return kExitConfig;
  } catch (const Error& x) {
    const int code = is_input_error(x.code()) ? kExitConfig : kExitNumeric;
    report(err, to_string(x.code()), x.what(), code);
    return code;
  } catch (const std::exception& x) {
    report(err, "Internal", x.what(), kExitNumeric);
    return kExitNumeric;
  }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Escape rates and survivor-set dimensions for open Markov systems", "escrate"};
  app.set_version_flag("--version", ESCRATE_VERSION);
  Options options;
  std::string config;
  std::string out_dir;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
  std::string format;
  app.add_option("command", options.command, "pressure | escape | dimension | oracle")
      ->required()
      ->check(CLI::IsMember({"pressure", "escape", "dimension", "oracle"}));
  app.add_option("--config", config, "experiment JSON")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* depth_opt = app.add_option("--depth", depth, "minimum matrix / sampling depth")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Monte-Carlo seed");
  auto* format_opt = app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << ESCRATE_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& x) {
    report(err, "InvalidInput", x.what(), kExitConfig);
    return kExitConfig;
  }
  options.config = config;
  if (*out_opt) options.out = out_dir;
  if (*depth_opt) options.depth = depth;
  if (*seed_opt) options.seed = seed;
  if (*format_opt) options.format = format;
  return run(options, out, err);
}

}  // namespace escrate::cli
