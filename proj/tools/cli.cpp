#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "pcs/errors.hpp"
#include "pcs/numerics.hpp"
#include "pcs/sl2.hpp"
#include "pcs/spectra.hpp"

namespace pcs::cli {
namespace {

constexpr std::array<std::pair<std::string_view, Command>, 6> kCommands{{
    {"analyze", Command::analyze},
    {"spectrum", Command::spectrum},
    {"verify", Command::verify},
    {"sl2", Command::sl2},
    {"bifurcation", Command::bifurcation},
    {"exchange", Command::exchange},
}};

Json params_json(const SusyParams& p) {
  Json j = Json::object();
  j["A"] = p.A;
  j["B"] = p.B;
  j["C"] = p.C;
  j["alpha"] = p.alpha;
  return j;
}

Json coefficients_json(const PotentialCoefficients& v) {
  Json j = Json::object();
  j["t2"] = complex_json(v.t2);
  j["st"] = complex_json(v.st);
  j["e0"] = complex_json(v.e0);
  return j;
}

Json superpotential_json(const Superpotential& w) {
  Json j = Json::object();
  j["lam"] = complex_json(w.lam);
  j["mu"] = complex_json(w.mu);
  j["factorization_energy"] = complex_json(w.factorization_energy);
  j["pt_antisymmetric"] = w.is_pt_antisymmetric();
  return j;
}

Json series_json(const SpectrumSeries& s) {
  Json j = Json::object();
  j["label"] = std::string(to_string(s.label));
  j["branch"] = std::string(to_string(s.branch));
  j["factorization_energy"] = complex_json(s.factorization_energy);
  j["empty"] = s.empty();
  Json levels = Json::array();
  for (std::size_t n = 0; n < s.energies.size(); ++n) {
    Json level = Json::object();
    level["n"] = n;
    level["lam"] = complex_json(s.ladder_params[n].lam);
    level["mu"] = complex_json(s.ladder_params[n].mu);
    level["energy"] = complex_json(s.energies[n]);
    levels.push_back(level);
  }
  j["levels"] = levels;
  return j;
}

Json header(Command command) {
  Json j = Json::object();
  j["schema_version"] = kSchemaVersion;
  j["command"] = std::string(to_string(command));
  return j;
}

std::string render(const Json& report) {
  std::ostringstream os;
  write_json(os, report);
  return os.str();
}

std::string render(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

void require_json(const RunConfig& config) {
  if (config.resolved_format() == Format::csv) {
    throw UsageError("--format csv is not available for '" + std::string(to_string(config.command)) + "'");
  }
}

void append_series_rows(std::vector<CsvRow>& rows, double C, const SeriesPair& pair) {
  for (const SpectrumSeries* s : {&pair.s1, &pair.s2}) {
    for (std::size_t n = 0; n < s->energies.size(); ++n) {
      rows.push_back({C, std::string(to_string(s->branch)), std::string(to_string(s->label)), static_cast<int>(n),
                      s->energies[n], false, 0.0});
    }
  }
}

void append_numeric_rows(std::vector<CsvRow>& rows, double C, Branch branch, const NumericSpectrum& numeric) {
  for (std::size_t n = 0; n < numeric.levels.size(); ++n) {
    const NumericLevel& l = numeric.levels[n];
    rows.push_back({C, std::string(to_string(branch)), "numeric", static_cast<int>(n), l.energy, true, l.residual});
  }
}

Json grid_json(const Grid& g) {
  Json j = Json::object();
  j["L"] = g.L;
  j["N"] = g.N;
  j["h"] = g.h();
  return j;
}

Json match_json(const MatchReport& m) {
  Json j = Json::object();
  Json matched = Json::array();
  for (const LevelMatch& lm : m.matched) {
    Json e = Json::object();
    e["analytic"] = complex_json(lm.analytic);
    e["analytic_multiplicity"] = lm.analytic_multiplicity;
    e["numeric"] = complex_json(lm.numeric);
    e["numeric_multiplicity"] = lm.numeric_multiplicity;
    e["delta"] = lm.delta;
    matched.push_back(e);
  }
  j["matched"] = matched;
  j["unmatched_analytic"] = complex_list_json(m.unmatched_analytic);
  j["unmatched_numeric"] = complex_list_json(m.unmatched_numeric);
  j["max_delta"] = m.max_delta;
  j["multiplicity_mismatches"] = m.multiplicity_mismatches;
  j["pass"] = m.pass;
  return j;
}

Json numeric_levels_json(const NumericSpectrum& s) {
  Json levels = Json::array();
  for (const NumericLevel& l : s.levels) {
    Json e = Json::object();
    e["energy"] = complex_json(l.energy);
    e["multiplicity"] = l.multiplicity;
    e["residual"] = l.residual;
    e["boundary_leak"] = l.boundary_leak;
    e["c_norm"] = l.c_norm;
    e["extrapolated"] = l.extrapolated;
    levels.push_back(e);
  }
  return levels;
}

Json verification_json(const VerificationReport& report) {
  Json j = Json::object();
  std::size_t matched = 0;
  double max_delta = 0.0;
  Json branches = Json::array();
  for (const BranchVerification& b : report.branches) {
    matched += b.match.matched.size();
    max_delta = std::max(max_delta, b.match.max_delta);
    Json e = Json::object();
    e["branch"] = std::string(to_string(b.branch));
    e["coarse_grid"] = grid_json(b.numeric.coarse);
    e["fine_grid"] = grid_json(b.numeric.fine);
    e["failed_seeds"] = b.numeric.failed_seeds;
    e["analytic"] = complex_list_json(b.analytic);
    e["numeric"] = numeric_levels_json(b.numeric);
    e["match"] = match_json(b.match);
    branches.push_back(e);
  }
  j["tol_match"] = report.tol_match;
  j["matched"] = matched;
  j["max_delta"] = max_delta;
  j["branch_conjugation_gap"] = report.branch_conjugation_gap;
  j["pass"] = report.pass;
  j["branches"] = branches;
  return j;
}

std::optional<Grid> grid_override(const RunConfig& config, const SusyParams& p) {
  if (!config.L && !config.N) return std::nullopt;
  const std::vector<Complex> predictions = two_series_spectrum(p, Branch::plus).all_energies();
  const Grid rec = recommended_grid(pcs_partner_coefficients(p, Branch::plus), predictions);
  Grid g{config.L.value_or(rec.L), config.N.value_or(rec.N)};
  pcs::validate(g);
  return g;
}

BoundSpectrumOptions solver_options(const RunConfig& config) {
  BoundSpectrumOptions o;
  o.tol = config.tol;
  return o;
}

RunResult run_analyze(const RunConfig& config) {
  require_json(config);
  Json report = header(config.command);
  SusyParams p;
  if (config.V1) {
    const PcsPhysicalParams phys{*config.V1, *config.V2, config.alpha};
    const std::vector<FactorizationCandidate> candidates = physical_to_susy(phys);
    Json list = Json::array();
    for (const FactorizationCandidate& c : candidates) {
      Json e = params_json(c.params);
      e["sign_convention"] = c.sign_convention;
      list.push_back(e);
    }
    Json physical = Json::object();
    physical["V1"] = phys.V1;
    physical["V2"] = phys.V2;
    physical["alpha"] = phys.alpha;
    report["physical_input"] = physical;
    report["factorizations"] = list;
    // Prefer the canonical B >= 0 representative; the B < 0 ones are its parity images.
    const auto chosen = std::find_if(candidates.begin(), candidates.end(),
                                     [](const FactorizationCandidate& c) { return c.params.B >= 0.0; });
    const auto index = chosen == candidates.end() ? 0 : chosen - candidates.begin();
    report["selected_factorization"] = index;
    p = candidates[static_cast<std::size_t>(index)].params;
  } else {
    p = config.params();
  }
  const Branch branch = config.branch;
  const PartnerPair partners = partner_potentials(branch_superpotential(p, branch));
  const PtConstraint pt = pt_constraint_check(p);
  const ComplexSusyParams cp = complexify(p, branch);
  const DualSuperpotentials duals = dual_superpotentials(p, branch);

  report["params"] = params_json(p);
  report["branch"] = std::string(to_string(branch));
  Json complex_params = Json::object();
  complex_params["calA"] = complex_json(cp.calA);
  complex_params["calB"] = complex_json(cp.calB);
  report["complex_params"] = complex_params;
  Json coefficients = Json::object();
  coefficients["vminus"] = coefficients_json(partners.vminus);
  coefficients["vplus"] = coefficients_json(partners.vplus);
  report["coefficients"] = coefficients;
  Json constraint = Json::object();
  constraint["pt_symmetric"] = pt.pt_symmetric;
  constraint["constraint_residual"] = pt.constraint_residual;
  constraint["degenerate_branch"] = pt.degenerate_branch;
  constraint["coefficients_pt_symmetric"] = partners.vminus.is_pt_symmetric();
  report["pt_constraint"] = constraint;
  Json sp = Json::object();
  sp["w"] = superpotential_json(duals.w);
  sp["wprime"] = superpotential_json(duals.wprime);
  report["superpotentials"] = sp;
  report["exchange_image"] = params_json(exchange_map(p));
  if (p.C == 0.0) {
    const PcsPhysicalParams phys = susy_to_physical(p);
    Json physical = Json::object();
    physical["V1"] = phys.V1;
    physical["V2"] = phys.V2;
    physical["alpha"] = phys.alpha;
    report["physical"] = physical;
  }
  return {exit_code::ok, render(report)};
}

RunResult run_spectrum(const RunConfig& config) {
  const SusyParams p = config.params();
  const SeriesPair pair = two_series_spectrum(p, config.branch);
  if (config.resolved_format() == Format::csv) {
    std::vector<CsvRow> rows;
    append_series_rows(rows, p.C, pair);
    return {exit_code::ok, render(rows)};
  }
  Json report = header(config.command);
  report["params"] = params_json(p);
  report["branch"] = std::string(to_string(config.branch));
  report["pt_symmetric"] = pt_constraint_check(p).pt_symmetric;
  Json series = Json::array();
  series.push_back(series_json(pair.s1));
  series.push_back(series_json(pair.s2));
  report["series"] = series;
  std::vector<Complex> all = pair.all_energies();
  sort_energies(all);
  report["energies"] = complex_list_json(all);
  return {exit_code::ok, render(report)};
}

RunResult run_verify(const RunConfig& config) {
  const SusyParams p = config.params();
  const VerificationReport v = verify_spectrum(p, grid_override(config, p), config.tol_match, solver_options(config));
  const int code = v.pass ? exit_code::ok : exit_code::verification_failed;
  if (config.resolved_format() == Format::csv) {
    std::vector<CsvRow> rows;
    for (const BranchVerification& b : v.branches) {
      append_series_rows(rows, p.C, two_series_spectrum(p, b.branch));
      append_numeric_rows(rows, p.C, b.branch, b.numeric);
    }
    return {code, render(rows)};
  }
  Json report = header(config.command);
  report["params"] = params_json(p);
  const Json body = verification_json(v);
  report["summary"] = std::to_string(body["matched"].get<std::size_t>()) + " matched, max |dE| = " +
                      format_double(body["max_delta"].get<double>()) + (v.pass ? ", PASS" : ", FAIL");
  report.update(body);
  return {code, render(report)};
}

RunResult run_sl2(const RunConfig& config) {
  require_json(config);
  const SusyParams p = config.params();
  const CorrespondenceResult r = solve_correspondence(p, config.branch);
  const PotentialCoefficients target = pcs_partner_coefficients(p, config.branch);
  const double scale = std::max({1.0, std::abs(target.t2), std::abs(target.st)});
  const bool pass = r.routes_agree && r.max_residual <= 1e-10 * scale;

  Json report = header(config.command);
  report["params"] = params_json(p);
  report["branch"] = std::string(to_string(config.branch));
  Json shape = Json::object();
  shape["t2"] = complex_json(target.t2);
  shape["st"] = complex_json(target.st);
  report["target"] = shape;
  Json solutions = Json::array();
  for (const Sl2Params& s : r.solutions) {
    Json e = Json::object();
    e["m"] = complex_json(s.m);
    e["b"] = complex_json(s.b);
    Json res = Json::array();
    for (double x : correspondence_residuals(s, p, config.branch)) res.push_back(x);
    e["residuals"] = res;
    const PotentialCoefficients built = build_sl2_potential(s);
    Json potential = Json::object();
    potential["t2"] = complex_json(built.t2);
    potential["st"] = complex_json(built.st);
    e["potential"] = potential;
    solutions.push_back(e);
  }
  report["solutions"] = solutions;
  report["max_residual"] = r.max_residual;
  report["newton_solution_count"] = r.newton_solutions.size();
  report["newton_divergences"] = r.newton_divergences;
  report["route_mismatch"] = r.route_mismatch;
  report["routes_agree"] = r.routes_agree;
  report["degenerate_b"] = r.degenerate_b;
  report["repeated_b2"] = r.repeated_b2;
  report["pass"] = pass;
  return {pass ? exit_code::ok : exit_code::verification_failed, render(report)};
}

std::vector<double> c_grid(const RunConfig& config) {
  std::vector<double> grid(static_cast<std::size_t>(config.steps));
  for (int i = 0; i < config.steps; ++i) {
    grid[i] = config.steps == 1 ? config.C_min
                                : config.C_min + (config.C_max - config.C_min) * i / (config.steps - 1);
  }
  grid.back() = config.steps == 1 ? config.C_min : config.C_max;
  return grid;
}

RunResult run_bifurcation(const RunConfig& config) {
  const SusyParams p0 = config.params();
  const std::vector<double> grid = c_grid(config);
  const std::vector<BifurcationPoint> points = bifurcation_scan(p0, grid);

  bool pass = true;
  Json analytic = Json::array();
  for (const BifurcationPoint& pt : points) {
    const double gap = conjugate_pairing_gap(pt.energies_plus, pt.energies_minus);
    const bool all_real = std::all_of(pt.energies_plus.begin(), pt.energies_plus.end(),
                                      [](Complex z) { return z.imag() == 0.0; });
    pass = pass && gap <= config.tol_match && (pt.C != 0.0 || all_real);
    Json e = Json::object();
    e["C"] = pt.C;
    e["energies_plus"] = complex_list_json(pt.energies_plus);
    e["energies_minus"] = complex_list_json(pt.energies_minus);
    e["conjugation_gap"] = gap;
    e["all_real"] = all_real;
    e["empty_series"] = pt.any_empty_series();
    analytic.push_back(e);
  }

  std::vector<std::pair<SusyParams, VerificationReport>> numeric;
  for (double c : config.numeric_C) {
    SusyParams p = p0;
    p.C = c;
    numeric.emplace_back(p, verify_spectrum(p, grid_override(config, p), config.tol_match, solver_options(config)));
    pass = pass && numeric.back().second.pass;
  }
  const int code = pass ? exit_code::ok : exit_code::verification_failed;

  if (config.resolved_format() == Format::csv) {
    std::vector<CsvRow> rows;
    for (const BifurcationPoint& pt : points) {
      append_series_rows(rows, pt.C, pt.series_plus);
      append_series_rows(rows, pt.C, pt.series_minus);
    }
    for (const auto& [p, v] : numeric) {
      for (const BranchVerification& b : v.branches) append_numeric_rows(rows, p.C, b.branch, b.numeric);
    }
    return {code, render(rows)};
  }
  Json report = header(config.command);
  report["params"] = params_json(p0);
  report["C_grid"] = grid;
  report["points"] = analytic;
  Json checks = Json::array();
  for (const auto& [p, v] : numeric) {
    Json e = Json::object();
    e["C"] = p.C;
    e.update(verification_json(v));
    checks.push_back(e);
  }
  report["numeric_checks"] = checks;
  report["pass"] = pass;
  return {code, render(report)};
}

RunResult run_exchange(const RunConfig& config) {
  require_json(config);
  const SusyParams p = config.params();
  const SusyParams image = exchange_map(p);
  const SusyParams back = exchange_map(image);
  const PotentialCoefficients before = pcs_partner_coefficients(p, config.branch);
  const PotentialCoefficients after = pcs_partner_coefficients(image, config.branch);
  const double scale = std::max({std::abs(before.t2), std::abs(before.st), std::numeric_limits<double>::min()});
  const double shape_change = std::max(std::abs(before.t2 - after.t2), std::abs(before.st - after.st)) / scale;
  const ComplexSusyParams cp = complexify(p, config.branch);
  const ComplexSusyParams cimage = exchange_map(cp);

  Json report = header(config.command);
  report["params"] = params_json(p);
  report["branch"] = std::string(to_string(config.branch));
  report["image"] = params_json(image);
  report["involution_exact"] = back == p;
  Json complex_image = Json::object();
  complex_image["calA"] = complex_json(cimage.calA);
  complex_image["calB"] = complex_json(cimage.calB);
  report["complex_image"] = complex_image;
  report["vminus_before"] = coefficients_json(before);
  report["vminus_after"] = coefficients_json(after);
  report["shape_relative_change"] = shape_change;
  report["fixed_point"] = image == p;
  return {exit_code::ok, render(report)};
}

void reject_unknown(const Json& doc) {
  static const std::vector<std::string> known{"command", "A", "B", "C", "alpha", "V1", "V2", "branch", "L",
                                              "N", "tol", "tol_match", "C_min", "C_max", "steps", "numeric_C",
                                              "out", "format"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("config: unknown field '" + key + "'");
    }
  }
}

double number_field(const Json& doc, const char* key) {
  const Json& v = doc.at(key);
  if (!v.is_number()) throw UsageError(std::string("config: field '") + key + "' must be a number");
  return v.get<double>();
}

int integer_field(const Json& doc, const char* key) {
  const Json& v = doc.at(key);
  if (!v.is_number_integer()) throw UsageError(std::string("config: field '") + key + "' must be an integer");
  const auto n = v.get<long long>();
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
    throw UsageError(std::string("config: field '") + key + "' is out of range");
  }
  return static_cast<int>(n);
}

std::string string_field(const Json& doc, const char* key) {
  const Json& v = doc.at(key);
  if (!v.is_string()) throw UsageError(std::string("config: field '") + key + "' must be a string");
  return v.get<std::string>();
}

Branch branch_value(std::string_view text, std::string_view where) {
  try {
    return parse_branch(text);
  } catch (const InvalidArgument&) {
    throw UsageError(std::string(where) + ": expected plus or minus, got '" + std::string(text) + "'");
  }
}

Format format_value(std::string_view text, std::string_view where) {
  if (text == "json") return Format::json;
  if (text == "csv") return Format::csv;
  throw UsageError(std::string(where) + ": expected json or csv, got '" + std::string(text) + "'");
}

void check_threads_env() {
  const char* env = std::getenv("PCS_SPECTRA_THREADS");
  if (env == nullptr) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n <= 0) {
    throw UsageError(std::string("PCS_SPECTRA_THREADS: expected a positive integer, got '") + env + "'");
  }
}

void add_common_options(CLI::App& sub, RunConfig& c, std::string& branch, std::string& format) {
  sub.add_option("--A", c.A, "Coefficient of tanh in the superpotential");
  sub.add_option("--B", c.B, "Coefficient of i sech in the superpotential");
  sub.add_option("--C", c.C, "PT-breaking parameter");
  sub.add_option("--alpha", c.alpha, "Inverse length scale");
  sub.add_option("--branch", branch, "plus or minus");
  sub.add_option("--out", c.out, "Output file (default stdout)");
  sub.add_option("--format", format, "json or csv");
}

void add_solver_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--L", c.L, "Box half-width");
  sub.add_option("--N", c.N, "Interior grid points");
  sub.add_option("--tol", c.tol, "Eigen-residual tolerance");
  sub.add_option("--tol-match", c.tol_match, "Analytic vs numeric tolerance");
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  for (const auto& [name, cmd] : kCommands) {
    if (cmd == c) return name;
  }
  return "analyze";
}

Command parse_command(std::string_view name) {
  for (const auto& [text, cmd] : kCommands) {
    if (text == name) return cmd;
  }
  throw UsageError("unknown command '" + std::string(name) + "'");
}

Format RunConfig::resolved_format() const {
  if (format) return *format;
  return out.size() >= 4 && out.ends_with(".csv") ? Format::csv : Format::json;
}

SusyParams RunConfig::params() const { return {A.value_or(0.0), B.value_or(0.0), C, alpha}; }

void apply_config(RunConfig& c, const Json& doc) {
  if (!doc.is_object()) throw UsageError("config: top level must be an object");
  reject_unknown(doc);
  if (doc.contains("command")) c.command = parse_command(string_field(doc, "command"));
  if (doc.contains("A")) c.A = number_field(doc, "A");
  if (doc.contains("B")) c.B = number_field(doc, "B");
  if (doc.contains("C")) c.C = number_field(doc, "C");
  if (doc.contains("alpha")) c.alpha = number_field(doc, "alpha");
  if (doc.contains("V1")) c.V1 = number_field(doc, "V1");
  if (doc.contains("V2")) c.V2 = number_field(doc, "V2");
  if (doc.contains("branch")) c.branch = branch_value(string_field(doc, "branch"), "config: field 'branch'");
  if (doc.contains("L")) c.L = number_field(doc, "L");
  if (doc.contains("N")) c.N = integer_field(doc, "N");
  if (doc.contains("tol")) c.tol = number_field(doc, "tol");
  if (doc.contains("tol_match")) c.tol_match = number_field(doc, "tol_match");
  if (doc.contains("C_min")) c.C_min = number_field(doc, "C_min");
  if (doc.contains("C_max")) c.C_max = number_field(doc, "C_max");
  if (doc.contains("steps")) c.steps = integer_field(doc, "steps");
  if (doc.contains("numeric_C")) {
    const Json& v = doc.at("numeric_C");
    if (!v.is_array()) throw UsageError("config: field 'numeric_C' must be an array of numbers");
    c.numeric_C.clear();
    for (const Json& x : v) {
      if (!x.is_number()) throw UsageError("config: field 'numeric_C' must be an array of numbers");
      c.numeric_C.push_back(x.get<double>());
    }
  }
  if (doc.contains("out")) c.out = string_field(doc, "out");
  if (doc.contains("format")) c.format = format_value(string_field(doc, "format"), "config: field 'format'");
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("--config: '" + path + "' is not valid JSON: " + e.what());
  }
  apply_config(config, doc);
}

void validate(const RunConfig& c) {
  auto finite = [](double x, const char* flag) {
    if (!std::isfinite(x)) throw UsageError(std::string(flag) + " must be finite");
  };
  auto positive = [](double x, const char* flag) {
    if (!(x > 0.0) || !std::isfinite(x)) throw UsageError(std::string(flag) + " must be positive");
  };
  positive(c.alpha, "--alpha");
  finite(c.C, "--C");
  if (c.V1.has_value() != c.V2.has_value()) throw UsageError("--V1 and --V2 must be given together");
  if (c.V1) {
    if (c.command != Command::analyze) throw UsageError("--V1/--V2 are only accepted by analyze");
    if (c.A || c.B) throw UsageError("--V1/--V2 cannot be combined with --A/--B");
    if (c.C != 0.0) throw UsageError("--V1/--V2 describe the C = 0 potential; --C must be 0");
    finite(*c.V1, "--V1");
    finite(*c.V2, "--V2");
  } else {
    if (!c.A) throw UsageError("--A is required");
    if (!c.B) throw UsageError("--B is required");
    finite(*c.A, "--A");
    finite(*c.B, "--B");
  }
  if (c.L) positive(*c.L, "--L");
  if (c.N && *c.N < 3) throw UsageError("--N must be at least 3");
  positive(c.tol, "--tol");
  positive(c.tol_match, "--tol-match");
  if (c.command == Command::bifurcation) {
    finite(c.C_min, "--C-min");
    finite(c.C_max, "--C-max");
    if (c.steps < 1) throw UsageError("--steps must be at least 1");
    if (c.C_max < c.C_min) throw UsageError("--C-max must not be below --C-min");
    for (double x : c.numeric_C) finite(x, "--numeric-C");
  } else if (!c.numeric_C.empty()) {
    throw UsageError("--numeric-C is only accepted by bifurcation");
  }
}

RunResult run(const RunConfig& config) {
  switch (config.command) {
    case Command::analyze:
      return run_analyze(config);
    case Command::spectrum:
      return run_spectrum(config);
    case Command::verify:
      return run_verify(config);
    case Command::sl2:
      return run_sl2(config);
    case Command::bifurcation:
      return run_bifurcation(config);
    case Command::exchange:
      return run_exchange(config);
  }
  throw UsageError("unknown command");
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::string branch;
  std::string format;
  std::string config_path;

  CLI::App app{"Spectra of the complexified Scarf II potential and its SUSY partners", "pcs_spectra"};
  app.require_subcommand(0, 1);
  app.add_option("--config", config_path, "JSON RunConfig document; its fields override flags");
  std::map<CLI::App*, Command> subcommands;
  for (const auto& [name, cmd] : kCommands) {
    CLI::App* sub = nullptr;
    switch (cmd) {
      case Command::analyze:
        sub = app.add_subcommand("analyze", "Partner potentials, PT constraint and dual superpotentials");
        sub->add_option("--V1", config.V1, "sech^2 coupling of the physical potential (instead of --A/--B)");
        sub->add_option("--V2", config.V2, "sech tanh coupling of the physical potential");
        break;
      case Command::spectrum:
        sub = app.add_subcommand("spectrum", "Both analytic eigenvalue series");
        break;
      case Command::verify:
        sub = app.add_subcommand("verify", "Analytic series against the finite-difference solver");
        add_solver_options(*sub, config);
        break;
      case Command::sl2:
        sub = app.add_subcommand("sl2", "Potential-algebra parameters (m, b) for (A, B, C)");
        break;
      case Command::bifurcation:
        sub = app.add_subcommand("bifurcation", "Both branch spectra over a C grid");
        sub->add_option("--C-min", config.C_min, "First C value");
        sub->add_option("--C-max", config.C_max, "Last C value");
        sub->add_option("--steps", config.steps, "Number of C values");
        sub->add_option("--numeric-C", config.numeric_C, "C values also checked numerically")->delimiter(',');
        add_solver_options(*sub, config);
        break;
      case Command::exchange:
        sub = app.add_subcommand("exchange", "The parameter exchange A + alpha/2 <-> B");
        break;
    }
    add_common_options(*sub, config, branch, format);
    sub->add_option("--config", config_path, "JSON RunConfig document; its fields override flags");
    subcommands[sub] = cmd;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    const auto chosen = app.get_subcommands();
    if (!chosen.empty()) config.command = subcommands.at(chosen.front());
    if (!branch.empty()) config.branch = branch_value(branch, "--branch");
    if (!format.empty()) config.format = format_value(format, "--format");
    if (!config_path.empty()) {
      apply_config_file(config, config_path);
    } else if (chosen.empty()) {
      throw UsageError("a subcommand is required (analyze, spectrum, verify, sl2, bifurcation, exchange)");
    }
    check_threads_env();
    validate(config);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  }

  RunResult result;
  try {
    result = run(config);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const NoRealFactorization& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const Error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return exit_code::numeric;
  }

  if (config.out.empty()) {
    out << result.output;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    file << result.output;
    if (!file) {
      err << "usage error: --out: cannot write '" << config.out << "'\n";
      return exit_code::usage;
    }
  }
  return result.exit_code;
}

}  // namespace pcs::cli
