#include "occtime/wienerhopf.hpp"

#include "occtime/error.hpp"

#include <algorithm>
#include <cmath>

namespace occtime {

namespace {

constexpr double kRegionEps = 1e-12;

std::vector<RateOrder> side_rates(const RationalJumpDensity& d, double lambda) {
  std::vector<RateOrder> out;
  if (lambda == 0.0) return out;
  for (const auto& t : d.terms) out.push_back({t.rate, t.order()});
  return out;
}

double realize(Complex z, const char* what) {
  if (std::abs(z.imag()) > 1e-10 * (1.0 + std::abs(z.real()))) {
    throw NumericalError(ErrorCode::InvalidArgument, std::string(what) + " has a non-negligible imaginary part");
  }
  return z.real();
}

}  // namespace

WienerHopfFactor::WienerHopfFactor(FactorSide side, Complex q, std::vector<RateOrder> rates, RootSet roots)
    : side_(side), q_(q), rates_(std::move(rates)), roots_(std::move(roots)) {
  Complex num = 1.0;
  Complex den = 1.0;
  std::vector<LinearFactor> factors;
  for (const auto& r : roots_.roots) {
    num *= ipow(r.value, r.multiplicity);
    factors.push_back({-r.value, -r.multiplicity});
  }
  for (const auto& a : rates_) {
    den *= ipow(a.rate, a.order);
    factors.push_back({-a.rate, a.order});
  }
  scale_ = num / den;
  rational_ = RationalFn(scale_, std::move(factors));

  atom_ = rational_.degree() == 0 ? rational_.value_at_infinity() : Complex(0.0);
  for (const auto& r : roots_.roots) {
    const auto pp = rational_.principal_part(-r.value);
    for (int j = 1; j <= r.multiplicity; ++j) terms_.push_back({r.value, j, pp[j - 1]});
  }
}

Complex WienerHopfFactor::simple_coeff() const {
  if (roots_.roots.empty()) return 0.0;
  return terms_.front().coeff;
}

void WienerHopfFactor::check_region(Complex s) const {
  if (roots_.roots.empty()) return;
  const double edge = -roots_.min_real_part();
  if (!(s.real() > edge + kRegionEps * (1.0 + std::abs(edge)))) {
    throw NumericalError(ErrorCode::OutsideAnalyticRegion, "factor evaluated left of its first root");
  }
}

Complex WienerHopfFactor::eval(Complex s) const {
  check_region(s);
  return rational_(s);
}

Complex WienerHopfFactor::eval_partial_fractions(Complex s) const {
  check_region(s);
  Complex v = atom_;
  for (const auto& t : terms_) v += t.coeff * ipow(s + t.root, -t.order);
  return v;
}

Complex WienerHopfFactor::density(double u) const {
  if (u < 0.0) return 0.0;
  Complex v = 0.0;
  for (const auto& t : terms_) {
    double fact = 1.0;
    for (int i = 2; i < t.order; ++i) fact *= i;
    v += t.coeff * std::pow(u, t.order - 1) / fact * std::exp(-t.root * u);
  }
  return v;
}

Complex WienerHopfFactor::density_mass() const {
  Complex v = 0.0;
  for (const auto& t : terms_) v += t.coeff * ipow(t.root, -t.order);
  return v;
}

WienerHopfFactor pos_factor(const LevyModel& m, double alpha, Complex q) {
  return WienerHopfFactor(FactorSide::sup_of_Y, q, side_rates(m.jumps_up, m.lambda_plus), roots_beta(m, alpha, q));
}

WienerHopfFactor neg_factor(const LevyModel& m, Complex q) {
  return WienerHopfFactor(FactorSide::inf_of_X, q, side_rates(m.jumps_down, m.lambda_minus), roots_gamma(m, q));
}

Complex simple_coeff_product_form(const WienerHopfFactor& f) {
  const auto& roots = f.roots().roots;
  if (roots.empty()) return 0.0;
  const Complex r1 = roots.front().value;
  Complex v = r1;
  for (const auto& a : f.rates()) v *= ipow((a.rate - r1) / a.rate, a.order);
  for (std::size_t k = 1; k < roots.size(); ++k) {
    v *= ipow(roots[k].value / (roots[k].value - r1), roots[k].multiplicity);
  }
  return v;
}

LawPoint sup_law_density(const WienerHopfFactor& f, double y) {
  return {realize(f.atom(), "atom"), y < 0.0 ? 0.0 : realize(f.density(y), "density")};
}

LawPoint inf_law_density(const WienerHopfFactor& f, double y) {
  return {realize(f.atom(), "atom"), y > 0.0 ? 0.0 : realize(f.density(-y), "density")};
}

}  // namespace occtime
