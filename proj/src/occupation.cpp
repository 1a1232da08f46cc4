#include "occtime/occupation.hpp"

#include "occtime/error.hpp"
#include "occtime/wienerhopf.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace occtime {

namespace {

struct Coefficients {
  std::vector<ExpTerm> below;  // H: (beta, i, H_i)
  std::vector<ExpTerm> above;  // G: (gamma, i, G_i)
};

std::vector<RateOrder> rates_of(const RationalJumpDensity& d, double lambda) {
  std::vector<RateOrder> out;
  if (lambda == 0.0) return out;
  for (const auto& t : d.terms) out.push_back({t.rate, t.order()});
  return out;
}

Coefficients general_coefficients(const RationalFn& f, const RootSet& beta, const RootSet& gamma) {
  Coefficients c;
  for (const auto& r : beta.roots) {
    const auto a = f.principal_part(r.value);
    double sign = 1.0;
    for (int i = 1; i <= r.multiplicity; ++i) {
      sign = -sign;
      c.below.push_back({r.value, i, sign * a[i - 1]});
    }
  }
  for (const auto& r : gamma.roots) {
    const auto a = f.principal_part(-r.value);
    for (int i = 1; i <= r.multiplicity; ++i) c.above.push_back({r.value, i, a[i - 1]});
  }
  return c;
}

Coefficients simple_coefficients(const LevyModel& m, const RootSet& beta, const RootSet& gamma, Complex prefactor) {
  if (!beta.all_simple() || !gamma.all_simple()) {
    throw NumericalError(ErrorCode::DegenerateExpansion, "simple-root products need simple roots");
  }
  const auto up = rates_of(m.jumps_up, m.lambda_plus);
  const auto down = rates_of(m.jumps_down, m.lambda_minus);

  Complex prod_neg_beta = 1.0;
  Complex prod_beta = 1.0;
  Complex prod_gamma = 1.0;
  Complex prod_neg_eta = 1.0;
  Complex prod_eta = 1.0;
  Complex prod_theta = 1.0;
  for (const auto& r : beta.roots) {
    prod_neg_beta *= -r.value;
    prod_beta *= r.value;
  }
  for (const auto& r : gamma.roots) prod_gamma *= r.value;
  for (const auto& a : up) {
    prod_neg_eta *= ipow(-a.rate, a.order);
    prod_eta *= ipow(a.rate, a.order);
  }
  for (const auto& a : down) prod_theta *= ipow(a.rate, a.order);

  Coefficients c;
  const Complex lead_h = -prefactor * prod_neg_beta * prod_gamma / (prod_neg_eta * prod_theta);
  for (std::size_t mi = 0; mi < beta.roots.size(); ++mi) {
    const Complex bm = beta.roots[mi].value;
    Complex num = 1.0;
    for (const auto& a : up) num *= ipow(bm - a.rate, a.order);
    for (const auto& a : down) num *= ipow(bm + a.rate, a.order);
    Complex den = bm;
    for (std::size_t k = 0; k < beta.roots.size(); ++k) {
      if (k != mi) den *= bm - beta.roots[k].value;
    }
    for (const auto& g : gamma.roots) den *= bm + g.value;
    c.below.push_back({bm, 1, lead_h * num / den});
  }
  const Complex lead_g = -prefactor * prod_beta * prod_gamma / (prod_eta * prod_theta);
  for (std::size_t ni = 0; ni < gamma.roots.size(); ++ni) {
    const Complex gn = gamma.roots[ni].value;
    Complex num = 1.0;
    for (const auto& a : up) num *= ipow(gn + a.rate, a.order);
    for (const auto& a : down) num *= ipow(a.rate - gn, a.order);
    Complex den = gn;
    for (const auto& b : beta.roots) den *= gn + b.value;
    for (std::size_t k = 0; k < gamma.roots.size(); ++k) {
      if (k != ni) den *= gamma.roots[k].value - gn;
    }
    c.above.push_back({gn, 1, lead_g * num / den});
  }
  return c;
}

Coefficients coefficients(const LevyModel& m, const RootSet& beta, const RootSet& gamma, Complex prefactor,
                          ExtractionPath path) {
  const bool simple = beta.all_simple() && gamma.all_simple();
  if (path == ExtractionPath::simple_roots || (path == ExtractionPath::automatic && simple)) {
    return simple_coefficients(m, beta, gamma, prefactor);
  }
  return general_coefficients(occupation_kernel(m, beta, gamma, prefactor), beta, gamma);
}

std::vector<ExpTerm> scaled_terms(std::vector<ExpTerm> terms, Complex f) {
  for (auto& t : terms) t.coeff *= f;
  return terms;
}

PiecewiseExpPoly assemble_expectation(const ValidatedModel& m, Complex q, const RootSet& beta, const RootSet& gamma,
                                      ExtractionPath path) {
  const auto c = coefficients(m.levy(), beta, gamma, 1.0, path);
  const Complex inv_q = 1.0 / q;
  return PiecewiseExpPoly(m.b(), ExpPolySide{inv_q, scaled_terms(c.below, -inv_q)},
                          ExpPolySide{0.0, scaled_terms(c.above, -inv_q)});
}

}  // namespace

RationalFn occupation_kernel(const LevyModel& m, const RootSet& beta, const RootSet& gamma, Complex prefactor) {
  Complex num = prefactor;
  Complex den = 1.0;
  std::vector<LinearFactor> factors;
  factors.push_back({0.0, -1});
  for (const auto& r : beta.roots) {
    num *= ipow(-r.value, r.multiplicity);
    factors.push_back({r.value, -r.multiplicity});
  }
  for (const auto& r : gamma.roots) {
    num *= ipow(r.value, r.multiplicity);
    factors.push_back({-r.value, -r.multiplicity});
  }
  for (const auto& a : rates_of(m.jumps_up, m.lambda_plus)) {
    den *= ipow(-a.rate, a.order);
    factors.push_back({a.rate, a.order});
  }
  for (const auto& a : rates_of(m.jumps_down, m.lambda_minus)) {
    den *= ipow(a.rate, a.order);
    factors.push_back({-a.rate, a.order});
  }
  return RationalFn(num / den, std::move(factors));
}

RationalFn f_fn(const ValidatedModel& m, double p, double q) {
  const double xi = p + q;
  return occupation_kernel(m.levy(), roots_beta(m.levy(), m.alpha(), xi), roots_gamma(m.levy(), q), p / xi);
}

PiecewiseExpPoly occupation_laplace(const ValidatedModel& m, double p, double q, ExtractionPath path) {
  if (!(q > 0.0) || !(p >= 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "need p >= 0 and q > 0");
  const double xi = p + q;
  const auto beta = roots_beta(m.levy(), m.alpha(), xi);
  const auto gamma = roots_gamma(m.levy(), q);
  auto c = coefficients(m.levy(), beta, gamma, p / xi, path);
  return PiecewiseExpPoly(m.b(), ExpPolySide{q / xi, std::move(c.below)}, ExpPolySide{1.0, std::move(c.above)});
}

PiecewiseExpPoly occupation_expectation(const ValidatedModel& m, double q, ExtractionPath path) {
  if (!(q > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "need q > 0");
  return assemble_expectation(m, q, roots_beta(m.levy(), m.alpha(), q), roots_gamma(m.levy(), q), path);
}

PiecewiseExpPoly occupation_expectation(const ValidatedModel& m, Complex q) {
  if (q.imag() == 0.0) return occupation_expectation(m, q.real());
  return assemble_expectation(m, q, roots_beta(m.levy(), m.alpha(), q), roots_gamma(m.levy(), q),
                              ExtractionPath::general);
}

PiecewiseExpPoly distribution_at_exp(const ValidatedModel& m, double q) {
  return occupation_expectation(m, q).scaled(q);
}

double distribution_at_exp(const ValidatedModel& m, double q, double x) { return distribution_at_exp(m, q).value(x); }

double distribution_atom(const ValidatedModel& m, double q) {
  // Outside the sticky regime the two sides meet exactly; do not report their rounding gap.
  const auto& x = m.levy();
  if (!(x.sigma == 0.0 && x.mu >= 0.0 && x.mu <= m.alpha())) return 0.0;
  return distribution_at_exp(m, q).jump();
}

double distribution_atom_product_form(const ValidatedModel& m, double q) {
  const auto& x = m.levy();
  if (!(x.sigma == 0.0 && x.mu >= 0.0 && x.mu <= m.alpha())) return 0.0;
  Complex v = -1.0;
  for (const auto& r : roots_beta(x, m.alpha(), q).roots) v *= ipow(r.value, r.multiplicity);
  for (const auto& r : roots_gamma(x, q).roots) v *= ipow(r.value, r.multiplicity);
  for (const auto& a : rates_of(x.jumps_up, x.lambda_plus)) v /= ipow(a.rate, a.order);
  for (const auto& a : rates_of(x.jumps_down, x.lambda_minus)) v /= ipow(a.rate, a.order);
  return realize(v);
}

Complex identity_lhs(const ValidatedModel& m, double q, Complex phi) {
  const auto gamma = roots_gamma(m.levy(), q);
  const double g1 = gamma.roots.empty() ? std::numeric_limits<double>::infinity() : gamma.min_real_part();
  if (!(phi.real() <= 0.0 && phi.real() > -g1)) {
    throw NumericalError(ErrorCode::OutsideStripError, "identity needs -gamma_1 < Re(phi) <= 0");
  }
  return -distribution_at_exp(m, q).stieltjes(phi);
}

Complex identity_rhs(const ValidatedModel& m, double q, Complex phi) {
  return pos_factor(m.levy(), m.alpha(), q).eval(-phi) * neg_factor(m.levy(), q).eval(phi);
}

SmoothnessReport smoothness_report(const PiecewiseExpPoly& v, RegimeInfo regime) {
  const double b = v.level();
  SmoothnessReport r{v.left_limit(), v.value(b), v.left_derivative(), v.derivative(b), 0.0};
  r.jump = r.right_value - r.left_limit;
  const double slope_gap = r.right_derivative - r.left_derivative;
  std::ostringstream os;
  os.precision(17);
  switch (regime.regime) {
    case Regime::PositiveVolatility:
      if (!(std::abs(r.jump) < kJumpTolerance) || !(std::abs(slope_gap) < kSlopeTolerance)) {
        os << "expected a C^1 junction, got jump " << r.jump << " and slope gap " << slope_gap;
      }
      break;
    case Regime::ZeroVolMuAboveAlpha:
    case Regime::ZeroVolMuNegative:
      if (!(std::abs(r.jump) < kJumpTolerance)) os << "expected a continuous junction, got jump " << r.jump;
      break;
    case Regime::ZeroVolMuBetweenZeroAndAlpha:
      if (!(r.jump > 0.0)) os << "expected a positive jump, got " << r.jump;
      break;
  }
  if (!os.str().empty()) throw NumericalError(ErrorCode::RegimeContractViolation, os.str());
  return r;
}

double predicted_jump(const ValidatedModel& m, double p, double q) {
  const double xi = p + q;
  const Complex c0 = pos_factor(m.levy(), m.alpha(), xi).atom();
  const Complex d0 = neg_factor(m.levy(), q).atom();
  return realize(p / xi * c0 * d0);
}

}  // namespace occtime
