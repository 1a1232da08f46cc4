#include "occtime/inversion.hpp"

#include "occtime/error.hpp"
#include "occtime/occupation.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>

namespace occtime {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

Wide wide_factorial(int n) {
  Wide f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Stehfest weights V_k, k = 1..N.
std::vector<Wide> stehfest_weights(int n) {
  const int half = n / 2;
  std::vector<Wide> v(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    Wide s = 0;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      s += boost::multiprecision::pow(Wide(j), half) * wide_factorial(2 * j) /
           (wide_factorial(half - j) * wide_factorial(j) * wide_factorial(j - 1) * wide_factorial(k - j) *
            wide_factorial(2 * j - k));
    }
    v[static_cast<std::size_t>(k - 1)] = ((k + half) % 2 == 0 ? s : Wide(-s));
  }
  return v;
}

const std::vector<Wide>& cached_weights(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<Wide>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, stehfest_weights(n)).first;
  return it->second;
}

double stehfest_sum(const std::vector<double>& values, int n, double t) {
  const auto& w = cached_weights(n);
  Wide acc = 0;
  for (int k = 0; k < n; ++k) acc += w[static_cast<std::size_t>(k)] * Wide(values[static_cast<std::size_t>(k)]);
  acc *= Wide(std::numbers::ln2) / Wide(t);
  return static_cast<double>(acc);
}

// Memoised q-domain evaluations, safe under concurrent readers and writers.
class RealMemo {
 public:
  explicit RealMemo(const std::function<double(double)>& f) : f_(f) {}

  double operator()(double q) {
    {
      std::lock_guard lock(mutex_);
      auto it = values_.find(q);
      if (it != values_.end()) return it->second;
    }
    const double v = f_(q);
    std::lock_guard lock(mutex_);
    values_.emplace(q, v);
    return v;
  }

 private:
  const std::function<double(double)>& f_;
  std::mutex mutex_;
  std::map<double, double> values_;
};

}  // namespace

void check_config(const InversionConfig& cfg) {
  if (cfg.order < 8 || cfg.order > 20 || cfg.order % 2 != 0) {
    throw NumericalError(ErrorCode::InvalidArgument, "Gaver-Stehfest order must be even and in [8, 20]");
  }
  if (cfg.talbot_terms < 16) throw NumericalError(ErrorCode::InvalidArgument, "Talbot needs at least 16 terms");
  for (double t : cfg.t_grid) {
    if (!(t > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "inversion times must be positive");
  }
}

double gaver_stehfest(const std::function<double(double)>& transform, double t, int order, double* residual) {
  if (!(t > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "t must be positive");
  std::vector<double> values(static_cast<std::size_t>(order));
  const double step = std::numbers::ln2 / t;
  for (int k = 1; k <= order; ++k) values[static_cast<std::size_t>(k - 1)] = transform(k * step);
  const double f = stehfest_sum(values, order, t);
  values.resize(static_cast<std::size_t>(order - 2));
  const double f_low = stehfest_sum(values, order - 2, t);
  const double res = std::abs(f - f_low);
  if (residual) *residual = res;
  if (!std::isfinite(f) || res > 1e-2 * (std::abs(f) + std::abs(f_low)) + 1e-12) {
    throw NumericalError(ErrorCode::InversionUnstable, "Gaver-Stehfest orders disagree; the transform is not smooth enough");
  }
  return f;
}

double talbot(const std::function<Complex(Complex)>& transform, double t, int terms) {
  if (!(t > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "t must be positive");
  const int m = terms;
  const double r = 2.0 * m / (5.0 * t);
  double acc = 0.5 * (std::exp(r * t) * transform(Complex(r))).real();
  for (int k = 1; k < m; ++k) {
    const double theta = k * std::numbers::pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const Complex s = r * theta * Complex(cot, 1.0);
    const Complex sigma(0.0, theta + (theta * cot - 1.0) * cot);
    acc += (std::exp(t * s) * transform(s) * (1.0 + sigma)).real();
  }
  return r / m * acc;
}

InversionResult invert_transform(const std::function<double(double)>& real_transform,
                                 const std::function<Complex(Complex)>& complex_transform,
                                 const InversionConfig& cfg) {
  check_config(cfg);
  InversionResult out;
  out.t = cfg.t_grid;
  const std::size_t n = cfg.t_grid.size();
  out.values.assign(n, 0.0);
  out.residuals.assign(n, 0.0);
  out.method_used = cfg.method;

  if (cfg.method == InversionMethod::talbot) {
    try {
      for (std::size_t i = 0; i < n; ++i) {
        const double t = cfg.t_grid[i];
        out.values[i] = talbot(complex_transform, t, cfg.talbot_terms);
        out.residuals[i] = std::abs(out.values[i] - talbot(complex_transform, t, cfg.talbot_terms - 4));
      }
      return out;
    } catch (const std::exception& e) {
      out.warnings.push_back(std::string("talbot failed (") + e.what() + "); fell back to gaver_stehfest");
      out.method_used = InversionMethod::gaver_stehfest;
    }
  }

  RealMemo memo(real_transform);
  const auto f = [&memo](double q) { return memo(q); };
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      double res = 0.0;
      out.values[i] = gaver_stehfest(f, cfg.t_grid[i], cfg.order, &res);
      out.residuals[i] = res;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

InversionResult invert_occupation(const ValidatedModel& m, double x, const InversionConfig& cfg) {
  const auto real_transform = [&](double q) { return occupation_expectation(m, q).value(x) / q; };
  const auto complex_transform = [&](Complex q) { return occupation_expectation(m, q).value_c(x) / q; };
  auto out = invert_transform(real_transform, complex_transform, cfg);
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    const double slack = 1e-6 * (1.0 + out.t[i]);
    if (out.values[i] < -slack || out.values[i] > out.t[i] + slack) {
      out.warnings.push_back("value outside [0, t] at t=" + std::to_string(out.t[i]));
    }
    if (i > 0 && out.t[i] > out.t[i - 1] && out.values[i] < out.values[i - 1] - slack) {
      out.warnings.push_back("value decreases at t=" + std::to_string(out.t[i]));
    }
  }
  return out;
}

InversionResult fee_expectation(const ValidatedModel& m, double x, double fee_rate, const InversionConfig& cfg) {
  if (!(fee_rate >= 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "fee rate must be >= 0");
  auto out = invert_occupation(m, x, cfg);
  // Occupation cannot exceed elapsed time; project inversion error back onto [0, c t].
  // invert_occupation has already warned if the raw value was noticeably outside.
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = std::clamp(out.values[i] * fee_rate, 0.0, fee_rate * out.t[i]);
  }
  for (auto& r : out.residuals) r *= fee_rate;
  return out;
}

}  // namespace occtime
