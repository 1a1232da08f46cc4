#include <doctest.h>

#include "frozen_values.hpp"
#include "occtime/charexp.hpp"
#include "occtime/error.hpp"
#include "oracles.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <random>

using namespace occtime;
using oracles::model_a;

namespace {

const Complex I(0.0, 1.0);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("psi vanishes at the origin") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    CHECK(std::abs(psi(m.levy(), 0.0)) == doctest::Approx(0.0));
    CHECK(std::abs(psi_tilde(m.levy(), m.alpha(), 0.0)) == doctest::Approx(0.0));
  }
}

TEST_CASE("psi of a drifted Brownian motion at z = 1") {
  const auto m = oracles::brownian(0.1, 0.2).base;
  const Complex v = psi(m, 1.0);
  CHECK(v.real() == doctest::Approx(-0.02).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("psi of Model A matches the high-precision reference") {
  const Complex z(1.0, -0.5);
  const Complex v = psi(model_a().base, z);
  CHECK(std::abs(v - Complex(oracles::frozen::kPsiA_re, oracles::frozen::kPsiA_im)) < 1e-14);
  CHECK(std::abs(v - oracles::psi_mp(model_a().base, z)) < 1e-14);
}

TEST_CASE("psi agrees with the multiprecision evaluator on random models") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 40; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const Complex z(u(rng), 0.3 * u(rng));
    const Complex ref = oracles::psi_mp(m.levy(), z);
    CHECK(std::abs(psi(m.levy(), z) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("psi_tilde is psi minus the refraction drift term") {
  const auto m = model_a().base;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 16; ++k) {
    const Complex z(u(rng), u(rng) * 0.2);
    CHECK(psi_tilde(m, 0.0, z) == psi(m, z));
  }
  CHECK(std::abs(psi_tilde(m, 0.05, 2.0 * I) - psi(m, 2.0 * I) - 0.1) < 1e-14);
  CHECK(std::abs(psi_tilde(m, 0.05, 0.0)) == 0.0);
}

TEST_CASE("evaluating on a pole throws") {
  const auto m = model_a().base;
  CHECK_THROWS_AS(psi(m, -2.0 * I), NumericalError);  // iz = 2 is the upward rate
  CHECK_THROWS_AS(laplace_exponent(m, 0.0, -3.0), NumericalError);
}

TEST_CASE("Brownian roots match the quadratic formulas") {
  const auto m = oracles::brownian(0.1, 0.2, 0.05).base;
  const auto beta = roots_beta(m, 0.05, 0.1);
  REQUIRE(beta.roots.size() == 1);
  CHECK(rel(beta.roots[0].value.real(), oracles::brownian_beta1(0.1, 0.2, 0.05, 0.1)) < 1e-12);
  CHECK(beta.roots[0].value.real() == doctest::Approx(1.31174).epsilon(1e-5));
  const auto gamma = roots_gamma(m, 0.1);
  REQUIRE(gamma.roots.size() == 1);
  CHECK(rel(gamma.roots[0].value.real(), oracles::brownian_gamma1(0.1, 0.2, 0.1)) < 1e-12);
  // The closed form evaluates to 5.85410 for these parameters.
  CHECK(gamma.roots[0].value.real() == doctest::Approx(5.85410).epsilon(1e-5));
}

TEST_CASE("Model A root counts and values") {
  const auto m = model_a();
  const auto beta = roots_beta(m.base, m.alpha, 0.1);
  const auto gamma = roots_gamma(m.base, 0.1);
  CHECK(beta.total_multiplicity() == 2);
  CHECK(gamma.total_multiplicity() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(rel(beta.roots[k].value.real(), oracles::frozen::kBetaA_q01[k]) < 1e-12);
    CHECK(rel(gamma.roots[k].value.real(), oracles::frozen::kGammaA_q01[k]) < 1e-12);
  }
}

TEST_CASE("zero volatility root counts follow the drift") {
  auto m = model_a().base;
  m.sigma = 0.0;
  m.mu = 0.03;
  CHECK(roots_beta(m, 0.05, 0.1).total_multiplicity() == 1);
  CHECK(roots_gamma(m, 0.1).total_multiplicity() == 1);
  CHECK(expected_root_count(m, 0.05, RootSide::lower_beta) == 1);
  m.mu = -0.1;
  CHECK(roots_gamma(m, 0.1).total_multiplicity() == 2);
  m.mu = 0.1;
  CHECK(roots_beta(m, 0.05, 0.1).total_multiplicity() == 2);
}

TEST_CASE("root sets are ordered, conjugate-symmetric and satisfy the equation") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uq(0.05, 2.0);
  for (int k = 0; k < 60; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    const double q = uq(rng);
    for (const auto& rs : {roots_beta(m.levy(), m.alpha(), q), roots_gamma(m.levy(), q)}) {
      REQUIRE(!rs.roots.empty());
      CHECK(rs.roots[0].value.imag() == 0.0);
      CHECK(rs.roots[0].multiplicity == 1);
      CHECK(rs.roots[0].value.real() > 0.0);
      for (std::size_t i = 1; i < rs.roots.size(); ++i) {
        CHECK(rs.roots[i].value.real() > rs.roots[0].value.real());
        CHECK(rs.roots[i].value.real() >= rs.roots[i - 1].value.real());
      }
      for (const auto& r : rs.roots) {
        const bool beta = rs.side == RootSide::lower_beta;
        const Complex z = beta ? -I * r.value : I * r.value;
        const Complex v = beta ? psi_tilde(m.levy(), m.alpha(), z) : psi(m.levy(), z);
        CHECK(std::abs(v - q) <= 1e-9 * (1.0 + q));
        if (r.value.imag() != 0.0) {
          const auto partner = std::find_if(rs.roots.begin(), rs.roots.end(), [&](const Root& o) {
            return std::abs(o.value - std::conj(r.value)) < 1e-9 * (1.0 + std::abs(r.value));
          });
          REQUIRE(partner != rs.roots.end());
          CHECK(partner->multiplicity == r.multiplicity);
        }
      }
    }
  }
}

TEST_CASE("the first beta root increases with q") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 12; ++k) {
    const auto m = oracles::random_model(rng, oracles::all_regimes()[static_cast<std::size_t>(k % 4)]);
    double prev_b = 0.0;
    double prev_g = 0.0;
    for (double q = 0.05; q < 3.0; q *= 1.6) {
      const double b1 = roots_beta(m.levy(), m.alpha(), q).roots[0].value.real();
      const double g1 = roots_gamma(m.levy(), q).roots[0].value.real();
      CHECK(b1 > prev_b);
      CHECK(g1 > prev_g);
      prev_b = b1;
      prev_g = g1;
    }
  }
}

TEST_CASE("at alpha = 0 both root sets together are the roots of the cleared polynomial") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 12; ++k) {
    auto raw = oracles::random_model(rng, Regime::PositiveVolatility).model();
    raw.alpha = 0.0;
    const auto m = validated(raw);
    const double q = 0.3;
    const auto beta = roots_beta(m.levy(), 0.0, q);
    const auto gamma = roots_gamma(m.levy(), q);
    const auto poly = cleared_polynomial(m.levy(), 0.0, q);
    // Every polynomial root in s = iz is either some beta or some -gamma.
    CHECK(beta.total_multiplicity() + gamma.total_multiplicity() == poly.degree());
    const auto scale = [&](Complex s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < poly.coefficients().size(); ++i) {
        acc += std::abs(poly.coefficients()[i]) * std::pow(std::abs(s), static_cast<double>(i));
      }
      return acc;
    };
    for (const auto& r : beta.roots) CHECK(std::abs(poly(r.value)) < 1e-10 * scale(r.value));
    for (const auto& r : gamma.roots) CHECK(std::abs(poly(-r.value)) < 1e-10 * scale(-r.value));
  }
}

TEST_CASE("a tangential crossing is reported as a double root") {
  // With Erlang-2 downward jumps, kappa on (-inf, -theta) falls from +inf at
  // the pole to a positive minimum and rises again; at q equal to that
  // minimum the two roots merge.
  LevyModel m;
  m.mu = -1.0;
  m.sigma = 0.5;
  m.lambda_plus = 1.0;
  m.lambda_minus = 1.0;
  m.jumps_up = {JumpSide::positive, {{2.0, {1.0}}}};
  m.jumps_down = {JumpSide::negative, {{2.0, {0.5, 0.5}}}};
  const auto kappa = [&](double s) { return laplace_exponent(m, 0.0, s).real(); };
  const auto [s_star, q_star] = boost::math::tools::brent_find_minima(kappa, -10.0, -2.0001, 60);
  REQUIRE(q_star > 0.0);
  const auto g = roots_gamma(m, q_star);
  CHECK(g.total_multiplicity() == expected_root_count(m, 0.0, RootSide::upper_gamma));
  CHECK_FALSE(g.all_simple());
  const auto dbl = std::find_if(g.roots.begin(), g.roots.end(), [](const Root& r) { return r.multiplicity == 2; });
  REQUIRE(dbl != g.roots.end());
  CHECK(std::abs(dbl->value - Complex(-s_star)) < 1e-6);
  CHECK(g.roots[0].multiplicity == 1);
  CHECK(g.roots[0].value.real() < 2.0);
}

TEST_CASE("complex q with positive real part keeps the root count and conjugates for conjugate q") {
  const auto m = model_a();
  const Complex q(0.3, 0.7);
  const auto b = roots_beta(m.base, m.alpha, q);
  const auto bc = roots_beta(m.base, m.alpha, std::conj(q));
  REQUIRE(b.total_multiplicity() == 2);
  REQUIRE(bc.total_multiplicity() == 2);
  for (const auto& r : b.roots) {
    CHECK(std::abs(psi_tilde(m.base, m.alpha, -I * r.value) - q) < 1e-9 * (1.0 + std::abs(q)));
    CHECK(r.value.real() > 0.0);
  }
}

TEST_CASE("root tracking continues the root group to complex q off the half-plane") {
  const auto m = model_a();
  const Complex q(-0.2, 1.5);
  const auto g = track_roots(m.base, 0.0, RootSide::upper_gamma, q);
  CHECK(g.total_multiplicity() == 2);
  for (const auto& r : g.roots) CHECK(std::abs(psi(m.base, I * r.value) - q) < 1e-9 * (1.0 + std::abs(q)));
  // At real q tracking is the identity.
  const auto t = track_roots(m.base, m.alpha, RootSide::lower_beta, 0.1);
  const auto d = roots_beta(m.base, m.alpha, 0.1);
  REQUIRE(t.roots.size() == d.roots.size());
  for (std::size_t i = 0; i < t.roots.size(); ++i) CHECK(std::abs(t.roots[i].value - d.roots[i].value) < 1e-12);
}
