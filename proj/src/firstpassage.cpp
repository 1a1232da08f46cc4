#include "occtime/firstpassage.hpp"

#include "occtime/error.hpp"

#include <cmath>

namespace occtime {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Complex ExitLaw::mass() const {
  Complex v = atom;
  for (const auto& t : terms) v += t.coeff;
  return v;
}

Complex ExitLaw::transform(Complex s) const {
  Complex v = atom;
  for (const auto& t : terms) v += t.coeff * ipow(t.root / (t.root + s), t.order);
  return v;
}

Complex ExitLaw::overshoot_density(double y) const {
  if (y < 0.0) return 0.0;
  Complex v = 0.0;
  for (const auto& t : terms) {
    v += t.coeff * ipow(t.root, t.order) * std::pow(y, t.order - 1) / factorial(t.order - 1) *
         std::exp(-t.root * y);
  }
  return v;
}

ExitLaw exit_law_from_factor(const WienerHopfFactor& f, double w) {
  if (w < 0.0) throw NumericalError(ErrorCode::InvalidArgument, "exit distance must be nonnegative");
  ExitLaw law;
  law.direction = f.side() == FactorSide::sup_of_Y ? ExitDirection::up_Y : ExitDirection::down_X;
  law.offset = f.side() == FactorSide::sup_of_Y ? w : -w;
  law.q = f.q();

  // The truncated transform of the extremum beyond w is
  //   R(s) = sum_k sum_j C_kj e^{-r_k w} sum_l w^{j-1-l}/(j-1-l)! (s + r_k)^{-(l+1)},
  // and the exit transform is R(s)/F(s) = R(s) prod (s + r)^M / (K prod (s + a)^m).
  // Each piece of R(s) prod (s + r)^M is a product of linear factors, so the
  // principal part at -a_k follows from exact Taylor series.
  struct Piece {
    Complex coeff;
    std::vector<LinearFactor> factors;
  };
  std::vector<Piece> pieces;
  const auto& roots = f.roots().roots;
  Complex density_at_w = 0.0;
  for (const auto& t : f.terms()) {
    const Complex base = t.coeff * std::exp(-t.root * w);
    for (int l = 0; l < t.order; ++l) {
      const int p = t.order - 1 - l;
      const Complex c = base * std::pow(w, p) / factorial(p) / f.scale();
      if (l == 0) density_at_w += base * std::pow(w, p) / factorial(p);
      Piece piece{c, {}};
      for (const auto& r : roots) {
        const int power = r.value == t.root ? r.multiplicity - l - 1 : r.multiplicity;
        piece.factors.push_back({-r.value, power});
      }
      pieces.push_back(std::move(piece));
    }
  }

  int sum_m = 0;
  for (const auto& a : f.rates()) sum_m += a.order;
  law.atom = f.roots().total_multiplicity() - sum_m == 1 ? density_at_w / f.scale() : Complex(0.0);

  for (std::size_t k = 0; k < f.rates().size(); ++k) {
    const auto& a = f.rates()[k];
    const Complex at = -a.rate;
    const auto n = static_cast<std::size_t>(a.order);
    std::vector<Complex> series(n, 0.0);
    for (const auto& piece : pieces) {
      std::vector<LinearFactor> fs = piece.factors;
      for (std::size_t i = 0; i < f.rates().size(); ++i) {
        if (i != k) fs.push_back({-f.rates()[i].rate, -f.rates()[i].order});
      }
      const auto s = taylor_of_factors(piece.coeff, fs, at, n);
      for (std::size_t i = 0; i < n; ++i) series[i] += s[i];
    }
    // Coefficient of (s + a)^{-j} is series[m - j]; rescale to (a/(a+s))^j.
    for (int j = 1; j <= a.order; ++j) {
      const Complex coeff = series[static_cast<std::size_t>(a.order - j)] / ipow(a.rate, j);
      if (!std::isfinite(std::abs(coeff))) {
        throw NumericalError(ErrorCode::ResidueExtractionFailure, "non-finite exit-law coefficient");
      }
      law.terms.push_back({a.rate, j, coeff});
    }
  }
  return law;
}

ExitLaw exit_up_law(const LevyModel& m, double alpha, Complex q, double x) {
  if (x < 0.0) throw NumericalError(ErrorCode::InvalidArgument, "upward exit level must be >= 0");
  return exit_law_from_factor(pos_factor(m, alpha, q), x);
}

ExitLaw exit_down_law(const LevyModel& m, Complex q, double x) {
  if (x > 0.0) throw NumericalError(ErrorCode::InvalidArgument, "downward exit level must be <= 0");
  return exit_law_from_factor(neg_factor(m, q), -x);
}

Complex pr_rhs(const WienerHopfFactor& f, double theta, double s) {
  if (std::abs(theta - s) <= 1e-8 * (1.0 + std::abs(theta))) {
    throw NumericalError(ErrorCode::DegenerateArguments, "theta and s coincide");
  }
  return (f.eval(theta) / f.eval(s) - 1.0) / (s - theta);
}

Complex pr_rhs(const LevyModel& m, double alpha, double q, double theta, double s) {
  return pr_rhs(pos_factor(m, alpha, q), theta, s);
}

Complex pr_rhs_down(const LevyModel& m, double q, double theta, double s) {
  return pr_rhs(neg_factor(m, q), theta, s);
}

}  // namespace occtime
