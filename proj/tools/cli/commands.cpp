#include "cli/commands.hpp"

#include "cli/model_file.hpp"
#include "occtime/error.hpp"
#include "occtime/firstpassage.hpp"
#include "occtime/inversion.hpp"
#include "occtime/montecarlo.hpp"
#include "occtime/occupation.hpp"
#include "occtime/wienerhopf.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace occtime::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string model_path;
  std::optional<double> q;
  std::optional<double> p;
  std::optional<double> x;
  std::string x_grid;
  std::string phi_grid;
  std::string t_grid;
  std::optional<double> alpha;
  std::optional<double> b;
  std::uint64_t seed = 20240601;
  std::size_t paths = 100000;
  double dt = 1e-3;
  std::string format;
  std::string out_path;

  bool emit_canonical = false;
  std::string method = "gaver_stehfest";
  int order = 14;
  int terms = 24;
  double fee_rate = 1.0;
  std::string direction = "up";
  std::string quantity = "occupation";
  std::string horizon = "exponential";
  double horizon_T = 1.0;
  double s = 0.0;
  std::string extraction = "automatic";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{:.17g}", v + 0.0); }  // + 0.0 turns -0 into 0

json cjson(Complex z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required option ") + flag);
  return *v;
}

std::vector<double> x_values(const Options& o) {
  if (!o.x_grid.empty()) return parse_grid(o.x_grid);
  if (o.x) return {*o.x};
  throw UsageError("give --x or --x-grid");
}

ValidatedModel load_validated(const Options& o, std::ostream& err, int& status) {
  RefractedModel raw = load_model(o.model_path);
  if (o.alpha) raw.alpha = *o.alpha;
  if (o.b) raw.b = *o.b;
  auto report = validate(raw);
  if (!report.ok()) {
    for (const auto& issue : report.issues) err << to_string(issue.kind) << ": " << issue.detail << "\n";
    status = kValidationFailure;
    throw std::invalid_argument("validation failed");
  }
  return *report.model;
}

json roots_json(const RootSet& r) {
  json a = json::array();
  for (const auto& root : r.roots) a.push_back({{"value", cjson(root.value)}, {"multiplicity", root.multiplicity}});
  return a;
}

json factor_json(const WienerHopfFactor& f) {
  json terms = json::array();
  for (const auto& t : f.terms()) {
    terms.push_back({{"root", cjson(t.root)}, {"order", t.order}, {"coeff", cjson(t.coeff)}});
  }
  json rates = json::array();
  for (const auto& a : f.rates()) rates.push_back({{"rate", cjson(a.rate)}, {"order", a.order}});
  return {{"roots", roots_json(f.roots())},
          {"total_multiplicity", f.roots().total_multiplicity()},
          {"rates", rates},
          {"atom", cjson(f.atom())},
          {"simple_coeff", cjson(f.simple_coeff())},
          {"terms", terms}};
}

json side_json(const ExpPolySide& s) {
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back({{"root", cjson(t.root)}, {"order", t.order}, {"coeff", cjson(t.coeff)}});
  return {{"constant", cjson(s.constant)}, {"terms", terms}};
}

json model_json(const ValidatedModel& m) {
  const auto dens = [](const RationalJumpDensity& d) {
    json a = json::array();
    for (const auto& t : d.terms) {
      json cs = json::array();
      for (auto c : t.coeffs) cs.push_back(cjson(c));
      a.push_back({{"rate", cjson(t.rate)}, {"coeffs", cs}});
    }
    return a;
  };
  const auto& x = m.levy();
  return {{"mu", x.mu},
          {"sigma", x.sigma},
          {"lambda_plus", x.lambda_plus},
          {"lambda_minus", x.lambda_minus},
          {"jumps", {{"up", dens(x.jumps_up)}, {"down", dens(x.jumps_down)}}},
          {"alpha", m.alpha()},
          {"b", m.b()}};
}

ExtractionPath extraction(const std::string& s) {
  if (s == "general") return ExtractionPath::general;
  if (s == "simple") return ExtractionPath::simple_roots;
  return ExtractionPath::automatic;
}

std::string csv_values(const char* head, const std::vector<double>& xs, const std::vector<double>& vs) {
  std::string out = fmt::format("{},value\n", head);
  for (std::size_t i = 0; i < xs.size(); ++i) out += fmt::format("{},{}\n", num(xs[i]), num(vs[i]));
  return out;
}

std::string piecewise_output(const Options& o, const PiecewiseExpPoly& f, json header) {
  const auto xs = x_values(o);
  const auto vs = f.evaluate(xs);
  if (o.format == "json") {
    json values = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) values.push_back({{"x", xs[i]}, {"value", vs[i]}});
    header["level"] = f.level();
    header["below"] = side_json(f.below());
    header["above"] = side_json(f.above());
    header["values"] = values;
    return header.dump(2) + "\n";
  }
  return csv_values("x", xs, vs);
}

InversionConfig inversion_config(const Options& o) {
  InversionConfig cfg;
  cfg.method = o.method == "talbot" ? InversionMethod::talbot : InversionMethod::gaver_stehfest;
  cfg.order = o.order;
  cfg.talbot_terms = o.terms;
  if (o.t_grid.empty()) throw UsageError("give --t-grid");
  cfg.t_grid = parse_grid(o.t_grid);
  return cfg;
}

std::string inversion_output(const Options& o, const InversionResult& r, std::ostream& err, json header) {
  json diag = header;
  diag["method"] = r.method_used == InversionMethod::talbot ? "talbot" : "gaver_stehfest";
  diag["order"] = o.order;
  diag["talbot_terms"] = o.terms;
  diag["residuals"] = r.residuals;
  diag["warnings"] = r.warnings;
  if (o.format == "json") {
    json values = json::array();
    for (std::size_t i = 0; i < r.t.size(); ++i) values.push_back({{"t", r.t[i]}, {"value", r.values[i]}});
    diag["values"] = values;
    return diag.dump(2) + "\n";
  }
  err << diag.dump() << "\n";
  return csv_values("t", r.t, r.values);
}

using Command = std::function<std::string(const Options&, std::ostream&, int&)>;

std::string cmd_validate(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  if (o.emit_canonical) return emit_model(m.model());
  const auto info = m.regime();
  json j = {{"status", "ok"},
            {"regime", std::string(to_string(info.regime))},
            {"y_has_atom_at_sup", info.y_has_atom_at_sup},
            {"x_has_atom_at_inf", info.x_has_atom_at_inf},
            {"model", model_json(m)}};
  return j.dump(2) + "\n";
}

std::string cmd_roots(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double q = require(o.q, "--q");
  const auto beta = roots_beta(m.levy(), m.alpha(), q);
  const auto gamma = roots_gamma(m.levy(), q);
  if (o.format == "csv") {
    std::string s = "side,re,im,multiplicity\n";
    for (const auto& r : beta.roots) s += fmt::format("beta,{},{},{}\n", num(r.value.real()), num(r.value.imag()), r.multiplicity);
    for (const auto& r : gamma.roots) s += fmt::format("gamma,{},{},{}\n", num(r.value.real()), num(r.value.imag()), r.multiplicity);
    return s;
  }
  json j = {{"q", q},
            {"beta", roots_json(beta)},
            {"beta_total_multiplicity", beta.total_multiplicity()},
            {"gamma", roots_json(gamma)},
            {"gamma_total_multiplicity", gamma.total_multiplicity()}};
  return j.dump(2) + "\n";
}

std::string cmd_wh(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double q = require(o.q, "--q");
  json j = {{"q", q}, {"sup_of_Y", factor_json(pos_factor(m.levy(), m.alpha(), q))},
            {"inf_of_X", factor_json(neg_factor(m.levy(), q))}};
  return j.dump(2) + "\n";
}

std::string cmd_exit(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double q = require(o.q, "--q");
  const bool up = o.direction == "up";
  if (!up && o.direction != "down") throw UsageError("--direction is up or down");
  const auto f = up ? pos_factor(m.levy(), m.alpha(), q) : neg_factor(m.levy(), q);
  const auto xs = x_values(o);
  std::vector<ExitLaw> laws;
  for (double x : xs) {
    if (up ? x < 0.0 : x > 0.0) throw UsageError(up ? "upward levels must be >= 0" : "downward levels must be <= 0");
    laws.push_back(exit_law_from_factor(f, std::abs(x)));
  }
  if (o.format == "csv") {
    std::string s = "x,atom,mass\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      s += fmt::format("{},{},{}\n", num(xs[i]), num(realize(laws[i].atom)), num(realize(laws[i].mass())));
    }
    return s;
  }
  json arr = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    json terms = json::array();
    for (const auto& t : laws[i].terms) terms.push_back({{"rate", cjson(t.root)}, {"order", t.order}, {"coeff", cjson(t.coeff)}});
    arr.push_back({{"x", xs[i]}, {"atom", cjson(laws[i].atom)}, {"mass", cjson(laws[i].mass())}, {"terms", terms}});
  }
  json j = {{"q", q}, {"direction", up ? "up_Y" : "down_X"}, {"levels", arr}};
  return j.dump(2) + "\n";
}

std::string cmd_occ_lt(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double p = require(o.p, "--p");
  const double q = require(o.q, "--q");
  return piecewise_output(o, occupation_laplace(m, p, q, extraction(o.extraction)), {{"p", p}, {"q", q}});
}

std::string cmd_occ_exp(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double q = require(o.q, "--q");
  return piecewise_output(o, occupation_expectation(m, q, extraction(o.extraction)), {{"q", q}});
}

std::string cmd_identity(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double q = require(o.q, "--q");
  if (o.phi_grid.empty()) throw UsageError("give --phi-grid (imaginary parts of phi)");
  const auto grid = parse_grid(o.phi_grid);
  std::string s = "phi_im,lhs_re,lhs_im,rhs_re,rhs_im,abs_diff\n";
  json rows = json::array();
  for (double v : grid) {
    const Complex phi(0.0, v);
    const Complex lhs = identity_lhs(m, q, phi);
    const Complex rhs = identity_rhs(m, q, phi);
    const double diff = std::abs(lhs - rhs);
    s += fmt::format("{},{},{},{},{},{}\n", num(v), num(lhs.real()), num(lhs.imag()), num(rhs.real()), num(rhs.imag()),
                     num(diff));
    rows.push_back({{"phi_im", v}, {"lhs", cjson(lhs)}, {"rhs", cjson(rhs)}, {"abs_diff", diff}});
  }
  if (o.format == "json") return json({{"q", q}, {"points", rows}}).dump(2) + "\n";
  return s;
}

std::string cmd_invert(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double x = require(o.x, "--x");
  const auto r = invert_occupation(m, x, inversion_config(o));
  return inversion_output(o, r, err, {{"x", x}, {"quantity", "occupation"}});
}

std::string cmd_fee(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  const double x = require(o.x, "--x");
  const auto r = fee_expectation(m, x, o.fee_rate, inversion_config(o));
  return inversion_output(o, r, err, {{"x", x}, {"quantity", "fee"}, {"fee_rate", o.fee_rate}});
}

std::string cmd_mc(const Options& o, std::ostream& err, int& status) {
  const auto m = load_validated(o, err, status);
  SimConfig cfg;
  cfg.dt = o.dt;
  cfg.n_paths = o.paths;
  cfg.seed = o.seed;
  if (o.horizon == "fixed") {
    cfg.horizon = HorizonKind::fixed;
    cfg.horizon_value = o.horizon_T;
  } else {
    cfg.horizon = HorizonKind::exponential;
    cfg.horizon_value = require(o.q, "--q");
  }
  const double x = require(o.x, "--x");
  SimEstimate est{};
  if (o.quantity == "occupation") {
    est = estimate_occupation(m, x, cfg);
  } else if (o.quantity == "V") {
    est = estimate_V(m, x, require(o.p, "--p"), require(o.q, "--q"), cfg);
  } else if (o.quantity == "below") {
    est = estimate_below_probability(m, x, cfg);
  } else if (o.quantity == "exit") {
    const auto dir = o.direction == "down" ? ExitDirection::down_X : ExitDirection::up_Y;
    est = estimate_exit(m, require(o.q, "--q"), x, dir, o.s, cfg);
  } else {
    throw UsageError("--quantity is occupation, V, below or exit");
  }
  json j = {{"quantity", o.quantity}, {"mean", est.mean},   {"std_error", est.std_error},
            {"n_paths", est.n_paths}, {"dt", cfg.dt},       {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

void add_common(CLI::App* sub, Options& o, const std::string& default_format) {
  o.format = default_format;
  sub->add_option("model", o.model_path, "model file (YAML)")->required();
  sub->add_option("--q", o.q, "discount rate of the exponential horizon");
  sub->add_option("--p", o.p, "Laplace variable of the occupation time");
  sub->add_option("--x", o.x, "starting point (or level)");
  sub->add_option("--x-grid", o.x_grid, "start:stop:count");
  sub->add_option("--phi-grid", o.phi_grid, "imaginary parts of phi, start:stop:count");
  sub->add_option("--t-grid", o.t_grid, "times, start:stop:count");
  sub->add_option("--alpha", o.alpha, "override the refraction drift");
  sub->add_option("--b", o.b, "override the refraction level");
  sub->add_option("--seed", o.seed, "simulation seed");
  sub->add_option("--paths", o.paths, "simulated paths");
  sub->add_option("--dt", o.dt, "Euler step near the level");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out_path, "write the result here instead of stdout");
  sub->add_option("--method", o.method, "gaver_stehfest or talbot")
      ->check(CLI::IsMember({"gaver_stehfest", "talbot"}));
  sub->add_option("--order", o.order, "Gaver-Stehfest order");
  sub->add_option("--terms", o.terms, "Talbot nodes");
  sub->add_option("--fee-rate", o.fee_rate, "fee rate c");
  sub->add_option("--direction", o.direction, "up or down")->check(CLI::IsMember({"up", "down"}));
  sub->add_option("--quantity", o.quantity, "occupation, V, below or exit");
  sub->add_option("--horizon", o.horizon, "exponential or fixed")->check(CLI::IsMember({"exponential", "fixed"}));
  sub->add_option("--T", o.horizon_T, "fixed horizon length");
  sub->add_option("--s", o.s, "overshoot transform variable for exit estimates");
  sub->add_option("--path", o.extraction, "coefficient extraction: automatic, general or simple")
      ->check(CLI::IsMember({"automatic", "general", "simple"}));
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  const auto to_d = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("bad grid '" + text + "'");
    return v;
  };
  if (parts.size() == 1) return {to_d(parts[0])};
  if (parts.size() != 3) throw UsageError("grids are start:stop:count");
  const double a = to_d(parts[0]);
  const double b = to_d(parts[1]);
  const double c = to_d(parts[2]);
  const auto n = static_cast<long>(c);
  if (static_cast<double>(n) != c || n < 1) throw UsageError("grid count must be a positive integer");
  if (n == 1) return {a};
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = b;
  return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Occupation times of refracted jump diffusions with rational jump transforms"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::tuple<std::string, std::string, std::string, Command>> table = {
      {"validate", "check a model and echo it in canonical form", "json", cmd_validate},
      {"roots", "roots of the exponent equations at q", "json", cmd_roots},
      {"wh", "Wiener-Hopf factors at q", "json", cmd_wh},
      {"exit", "one-sided exit laws", "json", cmd_exit},
      {"occ-lt", "Laplace transform of the occupation time below b", "csv", cmd_occ_lt},
      {"occ-exp", "expected occupation time below b", "csv", cmd_occ_exp},
      {"identity-check", "compare both sides of the factorisation identity", "csv", cmd_identity},
      {"invert", "expected occupation time over [0, t]", "csv", cmd_invert},
      {"fee", "expected fee charged over [0, T]", "csv", cmd_fee},
      {"mc", "Monte Carlo estimate", "json", cmd_mc},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  std::vector<Options> per(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto* sub = app.add_subcommand(std::get<0>(table[i]), std::get<1>(table[i]));
    add_common(sub, per[i], std::get<2>(table[i]));
    if (std::get<0>(table[i]) == "validate") {
      sub->add_flag("--emit-canonical", per[i].emit_canonical, "print the canonical model file");
    }
    subs.emplace_back(sub, std::get<3>(table[i]));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i].first->parsed()) continue;
    const Options& opt = per[i];
    int status = kSuccess;
    try {
      const std::string result = subs[i].second(opt, err, status);
      if (opt.out_path.empty()) {
        out << result;
      } else {
        std::ofstream f(opt.out_path, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + opt.out_path + "'");
        f << result;
      }
      return kSuccess;
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n";
      return kUsageError;
    } catch (const ModelFileError& e) {
      err << "error: " << e.what() << "\n";
      return kUsageError;
    } catch (const NumericalError& e) {
      out << json({{"error", std::string(to_string(e.code()))}, {"message", e.what()}}).dump() << "\n";
      return kNumericalFailure;
    } catch (const std::invalid_argument& e) {
      if (status == kValidationFailure) return kValidationFailure;
      err << "error: " << e.what() << "\n";
      return kUsageError;
    }
  }
  return kUsageError;
}

}  // namespace occtime::cli
