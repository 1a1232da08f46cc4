#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace occtime {

using Complex = std::complex<double>;

/// z^n for integer n by repeated squaring (std::pow routes through log/exp).
Complex ipow(Complex z, int n);

/// (x - root)^power; a negative power is a pole of that order.
struct LinearFactor {
  Complex root;
  int power;
};

/// Taylor coefficients a_0..a_{n-1} in h of
/// constant * prod_i (at + h - root_i)^{power_i}.
/// No root with a negative power may equal `at`.
std::vector<Complex> taylor_of_factors(Complex constant, std::span<const LinearFactor> factors, Complex at,
                                       std::size_t n);

/// Truncated product of two power series.
std::vector<Complex> series_product(std::span<const Complex> a, std::span<const Complex> b, std::size_t n);

/// A rational function held in factored form,
///   constant * prod_i (x - root_i)^{power_i}.
/// Equal roots are merged and factors are kept sorted (real part, then
/// imaginary part) so every product is accumulated in a fixed order.
class RationalFn {
 public:
  RationalFn() = default;
  RationalFn(Complex constant, std::vector<LinearFactor> factors);

  Complex operator()(Complex x) const;

  /// Numerator degree minus denominator degree.
  int degree() const;
  Complex constant() const { return constant_; }
  const std::vector<LinearFactor>& factors() const { return factors_; }

  /// Limit as |x| -> inf; requires degree() <= 0.
  Complex value_at_infinity() const;

  /// Pole order at `pole` (0 when `pole` is not a pole). Matching is exact.
  int pole_order(Complex pole) const;

  /// Principal part at a pole of order M: {A_1, ..., A_M} with
  /// f(x) = sum_j A_j / (x - pole)^j + (analytic).
  std::vector<Complex> principal_part(Complex pole) const;

  /// Taylor coefficients at a regular point.
  std::vector<Complex> taylor(Complex at, std::size_t n) const;

  std::vector<Complex> poles() const;

 private:
  Complex constant_{1.0};
  std::vector<LinearFactor> factors_;
};

}  // namespace occtime
