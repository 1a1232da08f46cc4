#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace occtime {

using Complex = std::complex<double>;

/// Dense polynomial with complex coefficients, stored in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> ascending);
  Polynomial(std::initializer_list<Complex> ascending);

  /// (x - root)^power for power >= 0.
  static Polynomial linear_power(Complex root, int power);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Complex>& coefficients() const { return c_; }
  Complex leading() const { return c_.empty() ? Complex(0.0) : c_.back(); }

  Complex operator()(Complex x) const;
  Polynomial derivative() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(Complex s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }

 private:
  void trim();
  std::vector<Complex> c_;
};

/// All complex roots (with repetition) of p, from the eigenvalues of the
/// companion matrix followed by Newton polishing on p itself.
std::vector<Complex> polynomial_roots(const Polynomial& p);

}  // namespace occtime
