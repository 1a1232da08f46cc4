#include "occtime/exp_poly.hpp"

#include "occtime/error.hpp"
#include "occtime/rational_fn.hpp"

#include <cmath>
#include <exception>
#include <sstream>

namespace occtime {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Complex side_value(const ExpPolySide& s, double d) {
  Complex v = s.constant;
  for (const auto& t : s.terms) {
    v += t.coeff * std::pow(d, t.order - 1) / factorial(t.order - 1) * std::exp(-t.root * d);
  }
  return v;
}

// d/dd of the side value at distance d.
Complex side_slope(const ExpPolySide& s, double d) {
  Complex v = 0.0;
  for (const auto& t : s.terms) {
    Complex g = -t.root * std::pow(d, t.order - 1) / factorial(t.order - 1);
    if (t.order >= 2) g += std::pow(d, t.order - 2) / factorial(t.order - 2);
    v += t.coeff * g * std::exp(-t.root * d);
  }
  return v;
}

ExpPolySide scale_side(const ExpPolySide& s, Complex f) {
  ExpPolySide out{s.constant * f, s.terms};
  for (auto& t : out.terms) t.coeff *= f;
  return out;
}

}  // namespace

double realize(Complex z) {
  if (!(std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z.real())))) {
    std::ostringstream os;
    os.precision(17);
    os << "imaginary residue " << z.imag() << " on a real quantity";
    throw NumericalError(ErrorCode::InvalidArgument, os.str());
  }
  return z.real();
}

PiecewiseExpPoly::PiecewiseExpPoly(double level, ExpPolySide below, ExpPolySide above)
    : level_(level), below_(std::move(below)), above_(std::move(above)) {}

Complex PiecewiseExpPoly::value_c(double x) const {
  return x < level_ ? side_value(below_, level_ - x) : side_value(above_, x - level_);
}

double PiecewiseExpPoly::value(double x) const { return realize(value_c(x)); }

Complex PiecewiseExpPoly::derivative_c(double x) const {
  return x < level_ ? -side_slope(below_, level_ - x) : side_slope(above_, x - level_);
}

double PiecewiseExpPoly::derivative(double x) const { return realize(derivative_c(x)); }

double PiecewiseExpPoly::left_limit() const { return realize(side_value(below_, 0.0)); }

double PiecewiseExpPoly::left_derivative() const { return realize(-side_slope(below_, 0.0)); }

double PiecewiseExpPoly::jump() const { return value(level_) - left_limit(); }

Complex PiecewiseExpPoly::stieltjes(Complex phi) const {
  for (const auto& t : below_.terms) {
    if (!((t.root - phi).real() > 0.0)) {
      throw NumericalError(ErrorCode::OutsideStripError, "transform diverges on the left branch");
    }
  }
  for (const auto& t : above_.terms) {
    if (!((t.root + phi).real() > 0.0)) {
      throw NumericalError(ErrorCode::OutsideStripError, "transform diverges on the right branch");
    }
  }
  // Integrating by parts term by term:
  //   left:  c ([i == 1] + phi / (r - phi)^i)
  //   right: c (-[i == 1] + phi / (r + phi)^i)
  Complex v = side_value(above_, 0.0) - side_value(below_, 0.0);
  for (const auto& t : below_.terms) {
    v += t.coeff * ((t.order == 1 ? 1.0 : 0.0) + phi * ipow(t.root - phi, -t.order));
  }
  for (const auto& t : above_.terms) {
    v += t.coeff * ((t.order == 1 ? -1.0 : 0.0) + phi * ipow(t.root + phi, -t.order));
  }
  return v;
}

PiecewiseExpPoly PiecewiseExpPoly::scaled(Complex factor) const {
  return PiecewiseExpPoly(level_, scale_side(below_, factor), scale_side(above_, factor));
}

std::vector<double> PiecewiseExpPoly::evaluate(std::span<const double> xs, Execution exec) const {
  const long n = static_cast<long>(xs.size());
  std::vector<double> out(xs.size());
  if (exec == Execution::serial) {
    for (long i = 0; i < n; ++i) out[i] = value(xs[i]);
    return out;
  }
  // Exceptions must not escape the parallel region; record the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = value(xs[i]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace occtime
