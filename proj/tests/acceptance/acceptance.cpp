// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "cli/commands.hpp"
#include "occtime/charexp.hpp"
#include "occtime/firstpassage.hpp"
#include "occtime/inversion.hpp"
#include "occtime/montecarlo.hpp"
#include "occtime/occupation.hpp"
#include "occtime/wienerhopf.hpp"
#include "oracles.hpp"

#include <fmt/core.h>

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace occtime;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the worst deviation seen for each check so the summary line says
// how close the criterion came to its tolerance.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    pass_ &= ok;
    ++count_;
  }
  void within(double err, double tol, const std::string& what) {
    worst_ = std::max(worst_, err / tol);
    check(err <= tol, fmt::format("{}: {:.3g} > {:.3g}", what, err, tol));
  }
  Outcome outcome(const std::string& summary) const {
    std::string d = fmt::format("{} ({} checks, worst error/tolerance {:.3g})", summary, count_, worst_);
    for (const auto& f : failures_) d += "\n      " + f;
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::size_t count_ = 0;
  double worst_ = 0.0;
  std::vector<std::string> failures_;
};

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Complex rate_product(const RationalJumpDensity& d, double lambda) {
  Complex v = 1.0;
  if (lambda == 0.0) return v;
  for (const auto& t : d.terms) v *= ipow(t.rate, t.order());
  return v;
}

Complex root_product(const RootSet& r) {
  Complex v = 1.0;
  for (const auto& root : r.roots) v *= ipow(root.value, root.multiplicity);
  return v;
}

Outcome root_counts() {
  Tally t;
  std::mt19937_64 rng(101);
  for (int k = 0; k < 200; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const double q = uniform(rng, 0.05, 2.0);
    const auto beta = roots_beta(m.levy(), m.alpha(), q);
    const auto gamma = roots_gamma(m.levy(), q);
    t.check(beta.total_multiplicity() == expected_root_count(m.levy(), m.alpha(), RootSide::lower_beta),
            fmt::format("model {}: beta count", k));
    t.check(gamma.total_multiplicity() == expected_root_count(m.levy(), m.alpha(), RootSide::upper_gamma),
            fmt::format("model {}: gamma count", k));
    for (const auto& r : beta.roots) {
      const double res = std::abs(psi_tilde(m.levy(), m.alpha(), Complex(0.0, -1.0) * r.value) - q);
      t.within(res, 1e-9 * (1.0 + q), fmt::format("model {}: beta residual", k));
    }
    for (const auto& r : gamma.roots) {
      const double res = std::abs(psi(m.levy(), Complex(0.0, 1.0) * r.value) - q);
      t.within(res, 1e-9 * (1.0 + q), fmt::format("model {}: gamma residual", k));
    }
  }
  return t.outcome("200 random models, 50 per regime");
}

Outcome brownian_roots() {
  Tally t;
  for (double mu : {-0.4, 0.0, 0.1, 0.7}) {
    for (double sigma : {0.2, 1.0}) {
      for (double alpha : {0.0, 0.05, 0.3}) {
        for (double q : {0.01, 0.1, 1.0, 10.0}) {
          const auto m = oracles::brownian(mu, sigma, alpha).base;
          const double b1 = oracles::brownian_beta1(mu, sigma, alpha, q);
          const double g1 = oracles::brownian_gamma1(mu, sigma, q);
          const auto beta = roots_beta(m, alpha, q);
          const auto gamma = roots_gamma(m, q);
          t.check(beta.roots.size() == 1 && gamma.roots.size() == 1, "one root per side");
          t.within(std::abs(beta.roots.at(0).value - b1) / b1, 1e-12, "beta_1");
          t.within(std::abs(gamma.roots.at(0).value - g1) / g1, 1e-12, "gamma_1");
        }
      }
    }
  }
  return t.outcome("96 drift/volatility/refraction/q combinations");
}

Outcome wiener_hopf_normalization() {
  Tally t;
  std::mt19937_64 rng(103);
  for (int k = 0; k < 80; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const auto& x = m.levy();
    const double q = uniform(rng, 0.05, 2.0);
    const auto pos = pos_factor(x, m.alpha(), q);
    const auto neg = neg_factor(x, q);
    const auto regime = m.regime();
    for (const auto* f : {&pos, &neg}) {
      t.within(std::abs(f->eval(0.0) - 1.0), 1e-12, "F(0)");
      t.within(std::abs(f->atom() + f->density_mass() - 1.0), 1e-10, "atom + mass");
    }
    if (regime.y_has_atom_at_sup) {
      const Complex expected = root_product(pos.roots()) / rate_product(x.jumps_up, x.lambda_plus);
      t.check(pos.atom().real() > 0.0, "sup atom positive");
      t.within(std::abs(pos.atom() - expected), 1e-12 * std::abs(expected), "sup atom product");
    } else {
      t.check(pos.atom() == Complex(0.0), "sup atom exactly zero");
    }
    if (regime.x_has_atom_at_inf) {
      const Complex expected = root_product(neg.roots()) / rate_product(x.jumps_down, x.lambda_minus);
      t.check(neg.atom().real() > 0.0, "inf atom positive");
      t.within(std::abs(neg.atom() - expected), 1e-12 * std::abs(expected), "inf atom product");
    } else {
      t.check(neg.atom() == Complex(0.0), "inf atom exactly zero");
    }
  }
  return t.outcome("80 random models, both factors");
}

Outcome level_transforms() {
  Tally t;
  std::mt19937_64 rng(107);
  for (int k = 0; k < 10; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const double q = uniform(rng, 0.1, 1.0);
    const auto fp = pos_factor(m.levy(), m.alpha(), q);
    const auto fn = neg_factor(m.levy(), q);
    for (int i = 0; i < 20; ++i) {
      const double theta = uniform(rng, 0.1, 4.0);
      double s = uniform(rng, 0.1, 4.0);
      if (std::abs(s - theta) < 0.05) s += 0.1;
      const double up = oracles::integrate_to_infinity(
          [&](double x) { return std::exp(-theta * x) * exit_law_from_factor(fp, x).transform(s).real(); }, 0.0);
      t.within(std::abs(up - pr_rhs(fp, theta, s).real()), 1e-6, fmt::format("model {} up", k));
      const double down = oracles::integrate_to_infinity(
          [&](double x) { return std::exp(-theta * x) * exit_law_from_factor(fn, x).transform(s).real(); }, 0.0);
      t.within(std::abs(down - pr_rhs_down(m.levy(), q, theta, s).real()), 1e-6, fmt::format("model {} down", k));
    }
  }
  return t.outcome("10 models x 20 (theta, s), both directions");
}

// Overshoot integral  sum_kj C_kj int rate^j y^{j-1}/(j-1)! e^{-rate y} g(y) dy.
Complex overshoot_integral(const ExitLaw& law, const std::function<double(double)>& g) {
  return oracles::integrate_to_infinity_c([&](double y) { return law.overshoot_density(y) * g(y); }, 0.0);
}

Outcome renewal_identities() {
  Tally t;
  std::mt19937_64 rng(109);
  for (int k = 0; k < 12; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const double p = uniform(rng, 0.05, 1.0);
    const double q = uniform(rng, 0.05, 1.0);
    const double xi = p + q;
    const double b = m.b();
    const auto v = occupation_laplace(m, p, q);
    for (int i = 0; i < 10; ++i) {
      const double x = b + uniform(rng, -2.0, 2.0);
      Complex rhs;
      if (x < b) {
        // Y runs until it first reaches b, with time discounted at xi.
        const auto law = exit_up_law(m.levy(), m.alpha(), xi, b - x);
        rhs = q / xi * (1.0 - law.mass()) + law.atom * v.value(b) +
              overshoot_integral(law, [&](double y) { return v.value(b + y); });
      } else {
        // X runs until it first goes below b, discounted at q only.
        const auto law = exit_down_law(m.levy(), q, b - x);
        rhs = 1.0 - law.mass() + law.atom * v.value(b) +
              overshoot_integral(law, [&](double y) { return v.value(b - y); });
      }
      t.within(std::abs(v.value(x) - rhs), 1e-7, fmt::format("model {} x={:.4f}", k, x));
    }
  }
  return t.outcome("12 random models x 10 points");
}

Outcome smoothness() {
  Tally t;
  std::mt19937_64 rng(113);
  for (int k = 0; k < 20; ++k) {
    const bool diffusive = k % 2 == 0;
    const auto m = oracles::random_model(
        rng, diffusive ? Regime::PositiveVolatility : Regime::ZeroVolMuBetweenZeroAndAlpha);
    const double p = uniform(rng, 0.05, 1.0);
    const double q = uniform(rng, 0.05, 1.0);
    const auto v = occupation_laplace(m, p, q);
    const double b = m.b();
    const double jump = v.value(b) - v.left_limit();
    if (diffusive) {
      t.within(std::abs(jump), 1e-9, "value gap");
      t.within(std::abs(v.derivative(b) - v.left_derivative()), 1e-7, "slope gap");
    } else {
      const auto& x = m.levy();
      const Complex c0 = root_product(roots_beta(x, m.alpha(), p + q)) / rate_product(x.jumps_up, x.lambda_plus);
      const Complex d0 = root_product(roots_gamma(x, q)) / rate_product(x.jumps_down, x.lambda_minus);
      const double expected = (p / (p + q) * c0 * d0).real();
      t.check(jump > 0.0, "jump strictly positive");
      t.within(std::abs(jump - expected), 1e-9, "jump size");
    }
  }
  return t.outcome("10 diffusive and 10 sticky random models");
}

Outcome compound_poisson() {
  Tally t;
  std::mt19937_64 rng(127);
  for (int k = 0; k < 20; ++k) {
    auto raw = oracles::random_model(rng, Regime::ZeroVolMuBetweenZeroAndAlpha).model();
    raw.base.mu = 0.0;
    raw.alpha = 0.0;
    const auto m = validated(raw);
    const auto& x = m.levy();
    const double q = uniform(rng, 0.05, 2.0);
    const double lambda = x.lambda_plus + x.lambda_minus;
    const Complex product = root_product(roots_beta(x, 0.0, q)) * root_product(roots_gamma(x, q)) /
                            (rate_product(x.jumps_up, x.lambda_plus) * rate_product(x.jumps_down, x.lambda_minus));
    t.within(std::abs(product - q / (q + lambda)), 1e-10, "root product");
    t.within(std::abs(distribution_atom(m, q) + q / (q + lambda)), 1e-10, "atom");
  }
  return t.outcome("20 random compound Poisson models");
}

Outcome wiener_hopf_identity() {
  Tally t;
  std::mt19937_64 rng(131);
  for (int k = 0; k < 20; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const double q = uniform(rng, 0.05, 2.0);
    const auto flat = m.with_refraction(0.0, m.b());
    for (int i = 1; i <= 10; ++i) {
      const Complex phi(0.0, 0.5 * i);
      const Complex rhs = identity_rhs(m, q, phi);
      t.within(std::abs(identity_lhs(m, q, phi) - rhs), 1e-8 * (1.0 + std::abs(rhs)), fmt::format("model {}", k));
      const Complex ref = q / (q - psi(m.levy(), Complex(0.0, -1.0) * phi));
      t.within(std::abs(identity_lhs(flat, q, phi) - ref), 1e-9, fmt::format("model {} alpha=0 lhs", k));
      t.within(std::abs(identity_rhs(flat, q, phi) - ref), 1e-9, fmt::format("model {} alpha=0 rhs", k));
    }
  }
  return t.outcome("20 random models x 10 imaginary phi, plus alpha = 0");
}

Outcome monte_carlo() {
  Tally t;
  auto diffusive = oracles::model_a();
  auto drifting = diffusive;
  drifting.base.sigma = 0.0;
  auto sticky = drifting;
  sticky.base.mu = 0.03;
  const double p = 0.05;
  const double q = 0.1;
  SimConfig cfg;
  cfg.n_paths = 100000;
  cfg.horizon_value = q;
  for (const auto& raw : {diffusive, drifting, sticky}) {
    const auto m = validated(raw);
    const auto v = occupation_laplace(m, p, q);
    const auto e = occupation_expectation(m, q);
    for (double x : {-1.0, -0.3, 0.0, 0.3, 1.0}) {
      const auto samples = simulate_occupation(m, x, cfg);
      std::vector<double> disc(samples.size());
      std::vector<double> occ(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) {
        disc[i] = std::exp(-p * samples[i].occupation);
        occ[i] = q * samples[i].occupation;
      }
      const auto sv = summarize(disc);
      const auto se = summarize(occ);
      const std::string tag = fmt::format("{} x={}", to_string(m.regime().regime), x);
      t.within(std::abs(sv.mean - v.value(x)), 3.0 * sv.std_error, tag + " V");
      t.within(std::abs(se.mean - q * e.value(x)), 3.0 * se.std_error, tag + " q E[occupation]");
    }
  }
  return t.outcome("3 models x 5 starting points, 1e5 paths each");
}

Outcome small_p_bridge() {
  Tally t;
  std::mt19937_64 rng(137);
  std::vector<ValidatedModel> models{validated(oracles::model_a())};
  for (const auto r : oracles::all_regimes()) models.push_back(oracles::random_model(rng, r));
  const double q = 0.5;
  for (const auto& m : models) {
    const auto coarse = occupation_laplace(m, 1e-3, q);
    const auto fine = occupation_laplace(m, 1e-4, q);
    const auto e = occupation_expectation(m, q);
    for (double dx : {-1.5, -0.4, 0.0, 0.4, 1.5}) {
      const double x = m.b() + dx;
      const double d_coarse = (1.0 - coarse.value(x)) / 1e-3;
      const double d_fine = (1.0 - fine.value(x)) / 1e-4;
      const double extrapolated = (10.0 * d_fine - d_coarse) / 9.0;
      t.within(std::abs(extrapolated - e.value(x)), 1e-4, fmt::format("{} x={}", to_string(m.regime().regime), x));
    }
  }
  return t.outcome("5 models x 5 points at q = 0.5");
}

Outcome inversion() {
  Tally t;
  for (double s : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double v = gaver_stehfest([](double q) { return 1.0 / (q * q); }, s, 14);
    t.within(std::abs(v - s) / s, 1e-6, "1/q^2");
  }
  InversionConfig cfg;
  cfg.t_grid = {0.5, 1.0, 2.0, 5.0};
  const auto sym = invert_occupation(validated(oracles::brownian(0.0, 1.0)), 0.0, cfg);
  for (std::size_t i = 0; i < sym.t.size(); ++i) t.within(std::abs(sym.values[i] - sym.t[i] / 2.0), 1e-4, "t/2");
  struct Case {
    double mu, sigma, b, x;
  };
  for (const auto& c : {Case{0.1, 0.2, 0.0, 0.0}, Case{-0.3, 0.5, 0.2, -0.1}, Case{0.25, 1.0, -0.5, 0.3},
                        Case{0.05, 0.3, 0.0, 0.4}}) {
    const auto r = invert_occupation(validated(oracles::brownian(c.mu, c.sigma, 0.0, c.b)), c.x, cfg);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      const double ref = oracles::brownian_occupation(c.mu, c.sigma, c.b, c.x, r.t[i]);
      t.within(std::abs(r.values[i] - ref), 1e-5, fmt::format("mu={} sigma={} t={}", c.mu, c.sigma, r.t[i]));
    }
  }
  return t.outcome("1/q^2, symmetric and drifted Brownian occupation");
}

Outcome simple_root_path() {
  Tally t;
  std::mt19937_64 rng(139);
  int compared = 0;
  for (int k = 0; k < 40; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const double p = uniform(rng, 0.05, 1.0);
    const double q = uniform(rng, 0.05, 1.0);
    const auto& x = m.levy();
    if (!roots_beta(x, m.alpha(), p + q).all_simple() || !roots_gamma(x, q).all_simple() ||
        !roots_beta(x, m.alpha(), q).all_simple()) {
      continue;
    }
    ++compared;
    const auto vs = occupation_laplace(m, p, q, ExtractionPath::simple_roots);
    const auto vg = occupation_laplace(m, p, q, ExtractionPath::general);
    const auto es = occupation_expectation(m, q, ExtractionPath::simple_roots);
    const auto eg = occupation_expectation(m, q, ExtractionPath::general);
    for (double dx = -3.0; dx <= 3.0; dx += 0.25) {
      const double y = m.b() + dx;
      t.within(std::abs(vs.value(y) - vg.value(y)), 1e-10, "V");
      t.within(std::abs(es.value(y) - eg.value(y)), 1e-10 * (1.0 + std::abs(eg.value(y))), "expectation");
    }
  }
  t.check(compared >= 20, fmt::format("only {} models had simple roots", compared));
  return t.outcome(fmt::format("{} random models with simple roots", compared));
}

Outcome determinism() {
  Tally t;
  const std::string model = std::string(OCCTIME_TEST_DATA) + "/model_a.yaml";
  const std::vector<std::vector<std::string>> commands{
      {"validate", model},
      {"validate", model, "--emit-canonical"},
      {"roots", model, "--q", "0.1"},
      {"roots", model, "--q", "0.1", "--format", "csv"},
      {"wh", model, "--q", "0.1"},
      {"exit", model, "--q", "0.1", "--x-grid", "0:2:5", "--direction", "up"},
      {"exit", model, "--q", "0.1", "--x-grid", "-2:0:5", "--direction", "down", "--format", "csv"},
      {"occ-lt", model, "--p", "0.05", "--q", "0.1", "--x-grid", "-1:1:21"},
      {"occ-lt", model, "--p", "0.05", "--q", "0.1", "--x-grid", "-1:1:21", "--format", "json"},
      {"occ-exp", model, "--q", "0.1", "--x-grid", "-1:1:21"},
      {"identity-check", model, "--q", "0.1", "--phi-grid", "0.1:2:10"},
      {"invert", model, "--x", "0", "--t-grid", "0.5:5:10"},
      {"invert", model, "--x", "0", "--t-grid", "0.5:5:10", "--method", "talbot"},
      {"fee", model, "--x", "-0.5", "--t-grid", "1:10:4", "--fee-rate", "0.015"},
      {"mc", model, "--quantity", "V", "--x", "0.2", "--p", "0.05", "--q", "0.1", "--paths", "20000"},
      {"mc", model, "--quantity", "exit", "--x", "0.5", "--q", "0.1", "--direction", "up", "--paths", "20000"},
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    std::string diagnostics[2];
    int status[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto path = oracles::temp_file(fmt::format("determinism_{}_{}", i, rep), "");
      auto args = commands[i];
      args.insert(args.end(), {"--out", path});
      std::ostringstream out;
      std::ostringstream err;
      status[rep] = cli::run(args, out, err);
      outputs[rep] = oracles::read_file(path) + out.str();
      diagnostics[rep] = err.str();
    }
    const std::string tag = commands[i][0] + " #" + std::to_string(i);
    t.check(status[0] == 0 && status[1] == 0, tag + " exit status");
    t.check(!outputs[0].empty(), tag + " produced output");
    t.check(outputs[0] == outputs[1], tag + " output differs between runs");
    t.check(diagnostics[0] == diagnostics[1], tag + " diagnostics differ between runs");
  }
  return t.outcome(fmt::format("{} command lines run twice", commands.size()));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "root counts and residuals", root_counts},
      {2, "Brownian closed-form roots", brownian_roots},
      {3, "Wiener-Hopf normalization, mass and atoms", wiener_hopf_normalization},
      {4, "level transforms of exit laws", level_transforms},
      {5, "renewal identities for V", renewal_identities},
      {6, "smoothness of V at the level", smoothness},
      {7, "compound Poisson root product and atom", compound_poisson},
      {8, "Wiener-Hopf identity for the distribution", wiener_hopf_identity},
      {9, "Monte Carlo agreement", monte_carlo},
      {10, "small-p bridge to the expectation", small_p_bridge},
      {11, "Laplace inversion", inversion},
      {12, "simple-root path equals general path", simple_root_path},
      {13, "deterministic CLI output", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} {:2d} {} [{:.1f}s]: {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
