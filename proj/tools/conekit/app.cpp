#include "app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "conekit/errors.hpp"
#include "conekit/harmonic_library.hpp"
#include "conekit/indicial.hpp"
#include "conekit/link_spectrum.hpp"
#include "conekit/mass_expansion.hpp"
#include "conekit/radial_modes.hpp"
#include "expr.hpp"
#include "json_format.hpp"

namespace conekit::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kSubcommands = {"indicial", "solve-mode", "obstruction",
                                               "mass",     "expansion-check", "classify"};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::Validation, what); }

std::vector<double> parse_list(const std::string& text, std::size_t count, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      invalid(flag + ": '" + item + "' is not a number");
    }
  }
  if (count && v.size() != count) invalid(flag + " expects " + std::to_string(count) + " comma-separated numbers");
  return v;
}

Window parse_window(const std::string& text) {
  if (text.empty()) return {};
  const auto v = parse_list(text, 2, "--window");
  if (!(v[0] <= v[1])) invalid("--window: lo must not exceed hi");
  return {v[0], v[1]};
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) invalid("--params: expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_list(item.substr(eq + 1), 1, "--params " + item.substr(0, eq))[0];
  }
  return out;
}

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) invalid(name + " must be positive");
}

// Link selection shared by indicial and classify.
struct LinkOptions {
  std::string file;
  int sphere = 0;
  int lens = 0;
  int modes = 8;

  void add(CLI::App* app) {
    app->add_option("--link", file, "Link spectrum JSON file");
    app->add_option("--sphere", sphere, "Round sphere S^m of the given dimension");
    app->add_option("--lens", lens, "Lens space L(p,1) of the given order");
    app->add_option("--modes", modes, "Number of modes for built-in links")->check(CLI::PositiveNumber);
  }

  LinkSpectrum load() const {
    const int chosen = !file.empty() + (sphere > 0) + (lens > 0);
    if (chosen != 1) invalid("choose exactly one of --link, --sphere, --lens");
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw Error(ErrorKind::Io, "cannot read link file '" + file + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      return spectrum_from_json_text(ss.str());
    }
    if (lens > 0) return lens_spectrum(lens, modes);
    return sphere >= 3 ? sphere_spectrum(sphere, modes) : sphere_function_spectrum(sphere, modes);
  }
};

struct Output {
  std::string format = "csv";
  std::string path;

  void add(CLI::App* app, const std::string& default_format) {
    format = default_format;
    app->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--out", path, "Write the result to this file instead of stdout");
  }

  void emit(const std::string& text, std::ostream& out) const {
    if (path.empty()) {
      out << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text) || !f.flush()) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  }
};

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + "\n";
}

const std::string& fd(double x) {
  thread_local std::string buf;
  buf = format_double(x);
  return buf;
}

// ---------------------------------------------------------------------------

struct IndicialCmd {
  LinkOptions link;
  Output output;
  std::string set;
  int n = 0;
  std::string window;
  double gap_tol = kDefaultGapTol;

  void add(CLI::App* app) {
    link.add(app);
    output.add(app, "csv");
    app->add_option("--set", set, "Exceptional set A, B, C or D")->required();
    app->add_option("--n", n, "Cone dimension (defaults to link dimension + 1)");
    app->add_option("--window", window, "Order window lo,hi");
    app->add_option("--gap-tol", gap_tol, "Tolerance for rational detection of log cases");
  }

  void run(std::ostream& out) const {
    require_positive(gap_tol, "--gap-tol");
    const LinkSpectrum spec = link.load();
    const int dim = n > 0 ? n : spec.cone_dim();
    const ExceptionalSet es = compute_set(parse_set_label(set), spec, dim, parse_window(window));
    if (output.format == "json") {
      json j;
      j["set"] = std::string(1, label_char(es.label));
      j["cone_dim"] = es.cone_dim;
      j["link"] = spec.name;
      j["branch_sum"] = branch_sum(es.label, dim);
      j["entries"] = json::array();
      for (const auto& e : es.entries)
        j["entries"].push_back({{"mode_index", e.mode_index},
                                {"eigenvalue", e.source_eigenvalue},
                                {"branch", e.branch == Branch::Plus ? "+" : "-"},
                                {"root", e.root},
                                {"shift", e.shift},
                                {"order", e.order},
                                {"log_case", e.log_case},
                                {"exact", e.exact.exact ? e.exact.to_string() : ""}});
      output.emit(dump_json(j), out);
      return;
    }
    std::string text = csv_line({"set", "mode_index", "eigenvalue", "branch", "root", "shift", "order", "log_case", "exact"});
    for (const auto& e : es.entries)
      text += csv_line({std::string(1, label_char(es.label)), std::to_string(e.mode_index), fd(e.source_eigenvalue),
                        e.branch == Branch::Plus ? "+" : "-", format_double(e.root), format_double(e.shift),
                        format_double(e.order), e.log_case ? "1" : "0", e.exact.exact ? e.exact.to_string() : ""});
    output.emit(text, out);
  }
};

struct SolveModeCmd {
  Output output;
  std::string kind;
  int n = 4;
  double lambda = 0.0;
  std::string rhs, rhs2, rhs2_derivative;
  double rate = 0.0;
  double rmax = 1e4;
  int ppd = 64;
  std::string data, data2;

  void add(CLI::App* app) {
    output.add(app, "csv");
    app->add_option("--kind", kind, "coclosed, pair or function")->required();
    app->add_option("--n", n, "Cone dimension");
    app->add_option("--lambda", lambda, "Link eigenvalue")->required();
    app->add_option("--rhs", rhs, "Right-hand side: expression in r or a CSV file (r,value)")->required();
    app->add_option("--rhs2", rhs2, "Second right-hand side v for the exact pair");
    app->add_option("--rhs2-derivative", rhs2_derivative, "v' in closed form for the exact pair");
    app->add_option("--rate", rate, "Target decay order")->required();
    app->add_option("--rmax", rmax, "Outer grid radius");
    app->add_option("--ppd", ppd, "Grid points per decade");
    app->add_option("--data", data, "y(1),y'(1)");
    app->add_option("--data2", data2, "Exact pair only: g(1),g'(1)");
  }

  void run(std::ostream& out) const {
    require_positive(rmax - 1.0, "--rmax - 1");
    if (ppd < 8) invalid("--ppd must be >= 8");
    ModeProblem p;
    p.kind = parse_mode_kind(kind);
    p.n = n;
    p.eigenvalue = lambda;
    p.rate = rate;
    p.rhs = parse_profile(rhs);
    if (!rhs2.empty()) p.rhs2 = parse_profile(rhs2);
    if (!rhs2_derivative.empty()) p.rhs2_derivative = parse_profile(rhs2_derivative);
    auto pair_data = [](const std::string& s, const char* flag) -> std::optional<std::array<double, 2>> {
      if (s.empty()) return std::nullopt;
      const auto v = parse_list(s, 2, flag);
      return std::array<double, 2>{v[0], v[1]};
    };
    p.data = pair_data(data, "--data");
    p.data2 = pair_data(data2, "--data2");
    if (p.kind != ModeKind::ExactPair && (!rhs2.empty() || !data2.empty() || !rhs2_derivative.empty()))
      invalid("--rhs2, --rhs2-derivative and --data2 apply to --kind pair only");
    p.options.rmax = rmax;
    p.options.points_per_decade = ppd;

    std::vector<double> r, value, residual;
    std::vector<double> g;
    double max_res = 0.0, decay = 0.0;
    if (p.kind == ModeKind::ExactPair) {
      const auto s = solve_exact_pair(p);
      const auto res = exact_pair_residual(p, s);
      r = s.f.r;
      value = s.f.value;
      g = s.g.value;
      residual = res.pointwise;
      max_res = std::max(res.f_equation, res.g_equation);
      decay = s.f.fitted_decay();
    } else {
      const bool coclosed = p.kind == ModeKind::Coclosed;
      const auto y = coclosed ? solve_coclosed_mode(p) : solve_function_mode(p);
      const auto op = coclosed ? coclosed_operator(p.n, p.eigenvalue) : function_operator(p.n, p.eigenvalue);
      const auto res = euler_residual(op, y, p.rhs);
      r = y.r;
      value = y.value;
      residual = res.pointwise;
      max_res = res.max_relative;
      decay = y.fitted_decay();
    }
    if (output.format == "json") {
      json j{{"kind", to_string(p.kind)},  {"n", p.n},          {"lambda", p.eigenvalue},
             {"rate", p.rate},             {"r", r},            {"value", value},
             {"residual", residual},       {"max_residual", max_res}, {"fitted_decay", decay}};
      if (!g.empty()) j["g"] = g;
      output.emit(dump_json(j), out);
      return;
    }
    std::string text = g.empty() ? csv_line({"r", "value", "residual"}) : csv_line({"r", "value", "g", "residual"});
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (g.empty())
        text += csv_line({format_double(r[i]), format_double(value[i]), format_double(residual[i])});
      else
        text += csv_line({format_double(r[i]), format_double(value[i]), format_double(g[i]), format_double(residual[i])});
    }
    output.emit(text, out);
  }
};

struct ObstructionCmd {
  Output output;
  int k = 0;

  void add(CLI::App* app) {
    output.add(app, "csv");
    app->add_option("--k", k, "Growth index k >= 0 (rate -2 - k)")->required();
  }

  void run(std::ostream& out) const {
    if (k < 0) invalid("--k must be >= 0");
    const auto ob = obstruction_dimensions(k, std::max(6, k));
    auto strings = [](const std::vector<Form01>& forms) {
      std::vector<std::string> v;
      for (const auto& f : forms) v.push_back(f.to_string());
      return v;
    };
    if (output.format == "json") {
      json j{{"k", ob.k},
             {"growth_rate", ob.growth_rate},
             {"dim_harmonic", ob.dim_harmonic},
             {"dim_dbar_image", ob.dim_dbar_image},
             {"basis", strings(ob.basis)},
             {"image_basis", strings(ob.image_basis)},
             {"quotient_basis", strings(ob.quotient_basis)},
             {"quotient_complements_image", ob.quotient_complements_image}};
      output.emit(dump_json(j), out);
      return;
    }
    std::string text = std::to_string(ob.dim_harmonic) + " " + std::to_string(ob.dim_dbar_image) + "\n";
    for (const auto& s : strings(ob.basis)) text += "harmonic " + s + "\n";
    for (const auto& s : strings(ob.image_basis)) text += "image " + s + "\n";
    for (const auto& s : strings(ob.quotient_basis)) text += "quotient " + s + "\n";
    output.emit(text, out);
  }
};

json report_json(const MassReport& rep, const RadiusSchedule& sch) {
  json j{{"family", rep.family},
         {"normalization", to_string(rep.normalization)},
         {"real_dim", rep.real_dim},
         {"quotient_order", rep.quotient_order},
         {"link_volume", rep.link_volume},
         {"constant", rep.constant},
         {"schedule", {{"r0", sch.r0}, {"factor", sch.factor}, {"count", sch.count}}},
         {"radii", rep.radii},
         {"integrals", rep.integrals},
         {"integral_errors", rep.integral_errors},
         {"normalized", rep.normalized},
         {"fit",
          {{"limit", rep.fit.limit},
           {"error", rep.fit.error},
           {"exponent", rep.fit.exponent},
           {"amplitude", rep.fit.amplitude},
           {"residual", rep.fit.residual},
           {"residuals", rep.fit.residuals}}},
         {"mass", rep.mass},
         {"mass_error", rep.mass_error},
         {"fitted_tau", rep.fitted_tau},
         {"decay_warning", rep.decay_warning}};
  if (rep.formula)
    j["formula_rhs"] = {{"pairing", rep.formula->pairing},
                        {"total_scalar", rep.formula->total_scalar},
                        {"rhs", rep.formula->rhs}};
  return j;
}

RadiusSchedule parse_schedule(const std::string& text) {
  RadiusSchedule s;
  if (text.empty()) return s;
  const auto v = parse_list(text, 3, "--schedule");
  if (v[2] != std::floor(v[2])) invalid("--schedule: count must be an integer");
  s = {v[0], v[1], static_cast<int>(v[2])};
  s.radii();
  return s;
}

struct MassCmd {
  Output output;
  std::string family;
  std::string params;
  std::string schedule;
  std::string normalization = "ac";
  double tol = 1e-10;
  bool kahler = false;
  bool formula = false;
  bool strict_decay = false;

  void add(CLI::App* app) {
    output.add(app, "json");
    app->add_option("--family", family, "flat, schwarzschild, burns, eguchi-hanson or potential")->required();
    app->add_option("--params", params, "Family parameters k=v,...");
    app->add_option("--schedule", schedule, "r0,factor,count");
    app->add_option("--normalization", normalization, "ac or ale");
    app->add_option("--tol", tol, "Relative quadrature tolerance");
    app->add_flag("--kahler", kahler, "Use the Ricci-potential boundary term of the Kahler potential");
    app->add_flag("--formula", formula, "Compare with the pairing/total-scalar formula");
    app->add_flag("--strict-decay", strict_decay, "Fail instead of warning when the fitted decay is too slow");
  }

  void run(std::ostream& out) const {
    require_positive(tol, "--tol");
    const auto fam = make_family(family, parse_params(params));
    const auto sch = parse_schedule(schedule);
    MassReport rep;
    if (kahler) {
      if (!fam.potential) invalid("--kahler needs a Kahler family (burns, eguchi-hanson, potential)");
      if (normalization != "ac") invalid("--kahler reports the AC-normalized mass only");
      rep = kahler_mass(*fam.potential, sch);
    } else {
      MassOptions opt;
      opt.normalization = parse_normalization(normalization);
      opt.quadrature_tol = tol;
      opt.allow_slow_decay = !strict_decay;
      rep = mass(fam.metric, sch, opt);
    }
    if (formula) {
      if (!fam.potential || !fam.pairing || !fam.scalar_flat)
        invalid("--formula needs a scalar-flat Kahler family with a known pairing (burns, eguchi-hanson)");
      FormulaComparison c;
      c.pairing = *fam.pairing;
      c.total_scalar = 0.0;
      c.rhs = mass_formula_rhs(c.pairing, c.total_scalar, fam.potential->n_complex, rep.link_volume);
      rep.formula = c;
    }
    if (output.format == "json") {
      output.emit(dump_json(report_json(rep, sch)), out);
      return;
    }
    std::string text = csv_line({"r", "integral", "integral_error", "normalized"});
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
      text += csv_line({format_double(rep.radii[i]), format_double(rep.integrals[i]),
                        format_double(rep.integral_errors[i]), format_double(rep.normalized[i])});
    output.emit(text, out);
  }
};

struct ExpansionCheckCmd {
  Output output;
  int n = 2;
  double c = 1.0;
  std::string schedule;
  double tolerance = 1e-2;

  void add(CLI::App* app) {
    output.add(app, "json");
    app->add_option("--n", n, "Complex dimension (2: burns family, >= 3: power family)");
    app->add_option("--c", c, "Coefficient of the model term");
    app->add_option("--schedule", schedule, "r0,factor,count");
    app->add_option("--tolerance", tolerance, "Relative tolerance for the pass flags");
  }

  void run(std::ostream& out) const {
    require_positive(tolerance, "--tolerance");
    if (n < 2) invalid("--n must be >= 2");
    if (c == 0.0) invalid("--c must be nonzero");
    const auto fam = n == 2 ? make_family("burns", {{"c", c}}) : make_family("potential", {{"n", n}, {"c", c}});
    const auto sch = parse_schedule(schedule);
    const auto rep = mass(fam.metric, sch);
    const double lit = expansion_coefficient(rep.mass, n);
    const double con = expansion_coefficient_consistent(rep.mass, n);
    const double lit_err = std::abs(lit - c) / std::abs(c);
    const double con_err = std::abs(con - c) / std::abs(c);
    json j{{"n_complex", n},
           {"c", c},
           {"family", fam.name},
           {"mass", rep.mass},
           {"mass_error", rep.mass_error},
           {"predicted_mass", mass_from_coefficient(c, n)},
           {"coefficient", lit},
           {"relative_error", lit_err},
           {"pass", lit_err <= tolerance},
           {"coefficient_consistent", con},
           {"relative_error_consistent", con_err},
           {"pass_consistent", con_err <= tolerance}};
    if (output.format == "json") {
      output.emit(dump_json(j), out);
      return;
    }
    std::string text = csv_line({"n_complex", "c", "mass", "coefficient", "relative_error", "coefficient_consistent",
                                 "relative_error_consistent"});
    text += csv_line({std::to_string(n), format_double(c), format_double(rep.mass), format_double(lit),
                      format_double(lit_err), format_double(con), format_double(con_err)});
    output.emit(text, out);
  }
};

struct ClassifyCmd {
  LinkOptions link;
  Output output;
  int n = 0;
  std::string window;
  bool verify = false;
  unsigned seed = 1;

  void add(CLI::App* app, unsigned* global_seed) {
    link.add(app);
    output.add(app, "csv");
    app->add_option("--n", n, "Complex dimension (defaults to (link dimension + 1) / 2)");
    app->add_option("--window", window, "Order window lo,hi");
    app->add_flag("--verify", verify, "Check harmonicity of flat representatives (round spheres only)");
    seed_ptr = global_seed;
  }
  unsigned* seed_ptr = nullptr;

  void run(std::ostream& out) const {
    const LinkSpectrum spec = link.load();
    const int nc = n > 0 ? n : (spec.dim_link + 1) / 2;
    const auto rep = classify_harmonic_one_forms(spec, nc, parse_window(window));
    if (verify && link.sphere == 0) invalid("--verify needs --sphere");
    std::vector<double> residuals;
    if (verify)
      for (const auto& f : rep.forms)
        residuals.push_back(verify_harmonic(realize_flat(f, nc), 2 * nc, 16, *seed_ptr).laplacian);
    if (output.format == "json") {
      json j{{"n_complex", nc},         {"link", spec.name},
             {"bound_I", rep.bound_I},  {"bound_II", rep.bound_II},
             {"bound_III", rep.bound_III}, {"attained_I", rep.attained_I},
             {"attained_II", rep.attained_II}, {"attained_III", rep.attained_III},
             {"bounds_hold", rep.bounds_hold}, {"max_order", rep.max_order}};
      j["forms"] = json::array();
      for (std::size_t i = 0; i < rep.forms.size(); ++i) {
        const auto& f = rep.forms[i];
        json e{{"type", to_string(f.form_type)}, {"mode_index", f.mode_index}, {"eigenvalue", f.eigenvalue},
               {"multiplicity", f.multiplicity}, {"order", f.order}, {"raw_exponent", f.raw_exponent},
               {"description", f.description}, {"flagged", f.flagged}};
        if (f.coefficient_B) e["coefficient_B"] = *f.coefficient_B;
        if (verify) e["laplacian_residual"] = residuals[i];
        j["forms"].push_back(e);
      }
      output.emit(dump_json(j), out);
      return;
    }
    std::string text = verify ? csv_line({"type", "mode_index", "eigenvalue", "multiplicity", "order", "flagged",
                                          "laplacian_residual"})
                              : csv_line({"type", "mode_index", "eigenvalue", "multiplicity", "order", "flagged"});
    for (std::size_t i = 0; i < rep.forms.size(); ++i) {
      const auto& f = rep.forms[i];
      std::string line = to_string(f.form_type) + "," + std::to_string(f.mode_index) + "," +
                         format_double(f.eigenvalue) + "," + std::to_string(f.multiplicity) + "," +
                         format_double(f.order) + "," + (f.flagged ? "1" : "0");
      if (verify) line += "," + format_double(residuals[i]);
      text += line + "\n";
    }
    output.emit(text, out);
  }
};

// Turns a JSON config object into command-line arguments for `sub`.
std::vector<std::string> config_args(const json& cfg, const CLI::App* sub) {
  std::vector<std::string> args;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() == "subcommand") continue;
    const std::string flag = "--" + it.key();
    const CLI::Option* opt = nullptr;
    for (const CLI::Option* o : sub->get_options())
      if (o->check_lname(it.key())) opt = o;
    if (!opt || it.key() == "help") invalid("config: unknown key '" + it.key() + "' for " + sub->get_name());
    const json& v = it.value();
    if (v.is_boolean()) {
      if (opt->get_expected_max() != 0) invalid("config: '" + it.key() + "' is not a flag");
      if (v.get<bool>()) args.push_back(flag);
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& x : v) {
        if (!joined.empty()) joined += ',';
        joined += x.is_string() ? x.get<std::string>() : x.is_number_float() ? format_double(x.get<double>()) : x.dump();
      }
      args.insert(args.end(), {flag, joined});
    } else if (v.is_string()) {
      args.insert(args.end(), {flag, v.get<std::string>()});
    } else if (v.is_number_float()) {
      args.insert(args.end(), {flag, format_double(v.get<double>())});
    } else if (v.is_number()) {
      args.insert(args.end(), {flag, v.dump()});
    } else if (v.is_object()) {
      // params-style maps: {"c": 1} -> c=1
      std::string joined;
      for (auto p = v.begin(); p != v.end(); ++p) {
        if (!p.value().is_number()) invalid("config: '" + it.key() + "." + p.key() + "' must be a number");
        if (!joined.empty()) joined += ',';
        joined += p.key() + "=" + format_double(p.value().get<double>());
      }
      args.insert(args.end(), {flag, joined});
    } else {
      invalid("config: unsupported value for '" + it.key() + "'");
    }
  }
  return args;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
      return 3;
    case ErrorKind::Validation:
    case ErrorKind::UnsupportedDimension:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ExceptionalRate:
    case ErrorKind::InsufficientData:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Numerical and exact computations on asymptotically conical metrics", "conekit");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  unsigned seed = 1;
  std::string config_path;

  IndicialCmd indicial;
  SolveModeCmd solve_mode;
  ObstructionCmd obstruction;
  MassCmd mass_cmd;
  ExpansionCheckCmd expansion;
  ClassifyCmd classify;
  std::map<std::string, CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config_path, "JSON file with option values");
    s->add_option("--seed", seed, "Seed for randomized checks");
    subs[name] = s;
    return s;
  };
  indicial.add(sub("indicial", "Exceptional sets of a link"));
  solve_mode.add(sub("solve-mode", "Solve one radial mode equation"));
  obstruction.add(sub("obstruction", "Decaying harmonic (0,1)-forms on C^2 and the dbar image"));
  mass_cmd.add(sub("mass", "Extrapolated mass of a built-in family"));
  expansion.add(sub("expansion-check", "Mass versus the potential's expansion coefficient"));
  classify.add(sub("classify", "Homogeneous harmonic 1-forms on the cone over a link"), &seed);

  if (argv.empty()) {
    err << app.help();
    return 2;
  }
  try {
    // Options from --config come first so the command line overrides them.
    std::vector<std::string> args = argv;
    auto name_it = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return subs.count(a) > 0; });
    auto cfg_it = std::find_if(args.begin(), args.end(),
                               [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
    if (cfg_it != args.end()) {
      std::string path = *cfg_it == "--config" ? (cfg_it + 1 != args.end() ? *(cfg_it + 1) : "") : cfg_it->substr(9);
      std::ifstream in(path);
      if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
      json cfg;
      try {
        cfg = json::parse(in);
      } catch (const json::parse_error& e) {
        invalid("config '" + path + "': " + e.what());
      }
      if (!cfg.is_object()) invalid("config '" + path + "' must be a JSON object");
      if (name_it == args.end()) {
        if (!cfg.contains("subcommand")) invalid("no subcommand given on the command line or in the config");
        const std::string name = cfg["subcommand"].get<std::string>();
        if (!subs.count(name)) invalid("config: unknown subcommand '" + name + "'");
        args.insert(args.begin(), name);
        name_it = args.begin();
      } else if (cfg.contains("subcommand") && cfg["subcommand"] != *name_it) {
        invalid("config subcommand does not match '" + *name_it + "'");
      }
      const auto extra = config_args(cfg, subs[*name_it]);
      args.insert(name_it + 1, extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "conekit: " << e.what() << "\n";
      if (app.get_subcommands().empty()) err << app.help();
      return 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "indicial") indicial.run(out);
    if (name == "solve-mode") solve_mode.run(out);
    if (name == "obstruction") obstruction.run(out);
    if (name == "mass") mass_cmd.run(out);
    if (name == "expansion-check") expansion.run(out);
    if (name == "classify") classify.run(out);
    return 0;
  } catch (const Error& e) {
    err << "conekit: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "conekit: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace conekit::cli
