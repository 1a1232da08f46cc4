#include "occtime/rational_fn.hpp"

#include "occtime/error.hpp"

#include <algorithm>
#include <cmath>

namespace occtime {

namespace {

bool root_less(const LinearFactor& a, const LinearFactor& b) {
  if (a.root.real() != b.root.real()) return a.root.real() < b.root.real();
  return a.root.imag() < b.root.imag();
}

}  // namespace

Complex ipow(Complex z, int n) {
  if (n < 0) return 1.0 / ipow(z, -n);
  Complex result = 1.0;
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

std::vector<Complex> series_product(std::span<const Complex> a, std::span<const Complex> b, std::size_t n) {
  std::vector<Complex> out(n, 0.0);
  for (std::size_t i = 0; i < std::min(n, a.size()); ++i) {
    if (a[i] == Complex(0.0)) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<Complex> taylor_of_factors(Complex constant, std::span<const LinearFactor> factors, Complex at,
                                       std::size_t n) {
  std::vector<Complex> acc(n, 0.0);
  if (n == 0) return acc;
  acc[0] = constant;
  std::vector<Complex> term(n);
  for (const auto& f : factors) {
    if (f.power == 0) continue;
    const Complex base = at - f.root;
    if (base == Complex(0.0)) {
      if (f.power < 0) {
        throw NumericalError(ErrorCode::DegenerateExpansion, "taylor expansion requested at a pole");
      }
      // (h)^p: shift the series by p.
      std::vector<Complex> shifted(n, 0.0);
      const auto shift = static_cast<std::size_t>(f.power);
      for (std::size_t i = 0; i + shift < n; ++i) shifted[i + shift] = acc[i];
      acc = std::move(shifted);
      continue;
    }
    // base^p (1 + h/base)^p, binomial series.
    const Complex w = 1.0 / base;
    term[0] = ipow(base, f.power);
    for (std::size_t k = 1; k < n; ++k) {
      term[k] = term[k - 1] * w * (static_cast<double>(f.power) - static_cast<double>(k - 1)) /
                static_cast<double>(k);
    }
    acc = series_product(acc, term, n);
  }
  return acc;
}

RationalFn::RationalFn(Complex constant, std::vector<LinearFactor> factors) : constant_(constant) {
  std::stable_sort(factors.begin(), factors.end(), root_less);
  for (const auto& f : factors) {
    if (f.power == 0) continue;
    if (!factors_.empty() && factors_.back().root == f.root) {
      factors_.back().power += f.power;
      if (factors_.back().power == 0) factors_.pop_back();
    } else {
      factors_.push_back(f);
    }
  }
}

Complex RationalFn::operator()(Complex x) const {
  Complex v = constant_;
  for (const auto& f : factors_) v *= ipow(x - f.root, f.power);
  return v;
}

int RationalFn::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.power;
  return d;
}

Complex RationalFn::value_at_infinity() const {
  const int d = degree();
  if (d > 0) throw NumericalError(ErrorCode::InvalidArgument, "rational function grows at infinity");
  return d == 0 ? constant_ : Complex(0.0);
}

int RationalFn::pole_order(Complex pole) const {
  for (const auto& f : factors_) {
    if (f.root == pole) return f.power < 0 ? -f.power : 0;
  }
  return 0;
}

std::vector<Complex> RationalFn::principal_part(Complex pole) const {
  const int order = pole_order(pole);
  if (order == 0) throw NumericalError(ErrorCode::InvalidArgument, "principal_part: not a pole");
  std::vector<LinearFactor> rest;
  rest.reserve(factors_.size());
  for (const auto& f : factors_) {
    if (f.root != pole) rest.push_back(f);
  }
  // f(x) (x - pole)^M = sum_i a_i h^i; A_{M-i} = a_i.
  const auto a = taylor_of_factors(constant_, rest, pole, static_cast<std::size_t>(order));
  std::vector<Complex> out(order);
  for (int i = 0; i < order; ++i) {
    out[order - 1 - i] = a[i];
    if (!std::isfinite(std::abs(a[i]))) {
      throw NumericalError(ErrorCode::ResidueExtractionFailure, "non-finite principal part coefficient");
    }
  }
  return out;
}

std::vector<Complex> RationalFn::taylor(Complex at, std::size_t n) const {
  return taylor_of_factors(constant_, factors_, at, n);
}

std::vector<Complex> RationalFn::poles() const {
  std::vector<Complex> out;
  for (const auto& f : factors_) {
    if (f.power < 0) out.push_back(f.root);
  }
  return out;
}

}  // namespace occtime
