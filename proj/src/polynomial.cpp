#include "occtime/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace occtime {

Polynomial::Polynomial(std::vector<Complex> ascending) : c_(std::move(ascending)) { trim(); }

Polynomial::Polynomial(std::initializer_list<Complex> ascending) : c_(ascending) { trim(); }

Polynomial Polynomial::linear_power(Complex root, int power) {
  if (power < 0) throw std::invalid_argument("linear_power: negative power");
  Polynomial p{Complex(1.0)};
  const Polynomial factor{-root, Complex(1.0)};
  for (int i = 0; i < power; ++i) p *= factor;
  return p;
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == Complex(0.0)) c_.pop_back();
}

Complex Polynomial::operator()(Complex x) const {
  Complex acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Complex> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
  return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  if (c_.empty() || o.c_.empty()) {
    c_.clear();
    return *this;
  }
  std::vector<Complex> r(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  c_ = std::move(r);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
  for (auto& c : c_) c *= s;
  trim();
  return *this;
}

std::vector<Complex> polynomial_roots(const Polynomial& p) {
  const int n = p.degree();
  if (n < 1) return {};
  const auto& c = p.coefficients();
  const Complex lead = c.back();
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / lead;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue solve failed");
  std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

  const Polynomial dp = p.derivative();
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const Complex d = dp(r);
      if (d == Complex(0.0)) break;
      const Complex step = p(r) / d;
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-3 * (1.0 + std::abs(r))) break;
      r -= step;
    }
  }
  return roots;
}

}  // namespace occtime
