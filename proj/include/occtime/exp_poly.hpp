#pragma once

#include <complex>
#include <span>
#include <vector>

namespace occtime {

using Complex = std::complex<double>;

/// coeff * d^{order-1}/(order-1)! * e^{-root d}, d the distance to the level.
struct ExpTerm {
  Complex root;
  int order;
  Complex coeff;
};

struct ExpPolySide {
  Complex constant;
  std::vector<ExpTerm> terms;
};

enum class Execution { serial, parallel };

/// A function of x that is constant plus exponential-polynomial terms on
/// each side of a level b:
///   x <  b: below.constant + sum c d^{i-1}/(i-1)! e^{-r d}, d = b - x
///   x >= b: above.constant + sum c d^{i-1}/(i-1)! e^{-r d}, d = x - b
/// The right branch owns x = b, so a jump shows up as value(b) - left_limit().
class PiecewiseExpPoly {
 public:
  PiecewiseExpPoly() = default;
  PiecewiseExpPoly(double level, ExpPolySide below, ExpPolySide above);

  double level() const { return level_; }
  const ExpPolySide& below() const { return below_; }
  const ExpPolySide& above() const { return above_; }

  Complex value_c(double x) const;
  /// Real value; throws if the imaginary residue exceeds 1e-10 (relative).
  double value(double x) const;
  Complex derivative_c(double x) const;
  double derivative(double x) const;

  double left_limit() const;
  double left_derivative() const;
  /// value(b) - left_limit().
  double jump() const;

  /// Stieltjes transform  int e^{-phi (x - b)} dF(x) over the real line,
  /// including the jump at b. Needs -min Re(root above) < Re phi < min Re(root below).
  Complex stieltjes(Complex phi) const;

  PiecewiseExpPoly scaled(Complex factor) const;

  /// value() on a grid. The parallel kernel and the serial reference produce
  /// identical results (each point is independent).
  std::vector<double> evaluate(std::span<const double> xs, Execution exec = Execution::parallel) const;

 private:
  double level_ = 0.0;
  ExpPolySide below_;
  ExpPolySide above_;
};

/// Real part of z after checking |Im z| <= 1e-10 (1 + |Re z|).
double realize(Complex z);

}  // namespace occtime
