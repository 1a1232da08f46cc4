#include "occtime/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace occtime {

namespace {

bool rate_less(const ErlangTerm& a, const ErlangTerm& b) {
  if (a.rate.real() != b.rate.real()) return a.rate.real() < b.rate.real();
  return a.rate.imag() < b.rate.imag();
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

std::string side_name(JumpSide s) { return s == JumpSide::positive ? "jumps.up" : "jumps.down"; }

void check_density(const RationalJumpDensity& d, std::vector<ValidationIssue>& out) {
  const std::string where = side_name(d.side);
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    const auto& t = d.terms[k];
    bool ok = finite(t.rate);
    for (auto c : t.coeffs) ok = ok && finite(c);
    if (!ok) {
      out.push_back({Violation::NonFiniteParameter, where + ": term " + std::to_string(k) + " is not finite"});
      return;
    }
    if (!(t.rate.real() > 0.0)) {
      out.push_back({Violation::NonPositiveRate, where + ": rate " + std::to_string(k) + " has nonpositive real part"});
    }
  }
  if (d.terms.empty()) return;

  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    for (std::size_t j = i + 1; j < d.terms.size(); ++j) {
      if (close(d.terms[i].rate, d.terms[j].rate, 1e-12)) {
        std::ostringstream os;
        os << where << ": rates " << i << " and " << j << " coincide";
        out.push_back({Violation::DuplicateRate, os.str()});
      }
    }
  }

  // Terms are canonical-sorted, so the first has the smallest real part.
  const auto& first = d.terms.front();
  const double tol = 1e-12 * (1.0 + std::abs(first.rate));
  bool unique_min = std::abs(first.rate.imag()) <= tol;
  for (std::size_t k = 1; k < d.terms.size(); ++k) {
    if (!(d.terms[k].rate.real() > first.rate.real() + tol)) unique_min = false;
  }
  if (!unique_min) {
    out.push_back({Violation::SmallestRateNotReal,
                   where + ": the rate of smallest real part must be real and strictly smallest"});
  }

  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    const auto& t = d.terms[k];
    const double rtol = 1e-12 * (1.0 + std::abs(t.rate));
    if (std::abs(t.rate.imag()) <= rtol) {
      for (auto c : t.coeffs) {
        if (std::abs(c.imag()) > 1e-12 * (1.0 + std::abs(c))) {
          out.push_back({Violation::ConjugatePairViolation,
                         where + ": real rate " + std::to_string(k) + " carries a complex coefficient"});
          break;
        }
      }
      continue;
    }
    bool paired = false;
    for (std::size_t m = 0; m < d.terms.size() && !paired; ++m) {
      if (m == k) continue;
      const auto& u = d.terms[m];
      if (!close(std::conj(t.rate), u.rate, 1e-12) || u.coeffs.size() != t.coeffs.size()) continue;
      paired = true;
      for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
        if (!close(std::conj(t.coeffs[j]), u.coeffs[j], 1e-12)) paired = false;
      }
    }
    if (!paired) {
      out.push_back({Violation::ConjugatePairViolation,
                     where + ": complex rate " + std::to_string(k) + " has no conjugate partner"});
    }
  }

  const Complex mass = d.mass();
  if (std::abs(mass - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << where << ": coefficients sum to " << mass.real();
    if (mass.imag() != 0.0) os << (mass.imag() > 0 ? "+" : "") << mass.imag() << "i";
    os << " instead of 1";
    out.push_back({Violation::CoefficientsNotNormalized, os.str()});
  }

  const double min_rate = d.min_real_rate();
  if (min_rate > 0.0) {
    const double y_max = 20.0 / min_rate;
    constexpr int kGrid = 4000;
    for (int i = 1; i <= kGrid; ++i) {
      const double y = y_max * i / kGrid;
      const double v = d.pdf(y).real();
      if (v < -kDensityTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << where << ": density is negative (" << v << ") at y=" << y;
        out.push_back({Violation::NegativeDensity, os.str()});
        break;
      }
    }
  }
}

}  // namespace

Complex RationalJumpDensity::pdf(double y) const {
  if (!(y > 0.0)) return 0.0;
  Complex sum = 0.0;
  for (const auto& t : terms) {
    const Complex e = std::exp(-t.rate * y);
    Complex pow_term = t.rate;  // rate^j y^{j-1}/(j-1)!
    for (int j = 1; j <= t.order(); ++j) {
      sum += t.coeffs[j - 1] * pow_term * e;
      pow_term *= t.rate * y / static_cast<double>(j);
    }
  }
  return sum;
}

Complex RationalJumpDensity::laplace(Complex s) const {
  Complex sum = 0.0;
  for (const auto& t : terms) {
    const Complex ratio = t.rate / (t.rate + s);
    Complex power = ratio;
    for (int j = 1; j <= t.order(); ++j) {
      sum += t.coeffs[j - 1] * power;
      power *= ratio;
    }
  }
  return sum;
}

Complex RationalJumpDensity::mass() const {
  Complex sum = 0.0;
  for (const auto& t : terms) {
    for (auto c : t.coeffs) sum += c;
  }
  return sum;
}

int RationalJumpDensity::total_order() const {
  int n = 0;
  for (const auto& t : terms) n += t.order();
  return n;
}

double RationalJumpDensity::min_real_rate() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) m = std::min(m, t.rate.real());
  return m;
}

bool RationalJumpDensity::sampleable() const {
  for (const auto& t : terms) {
    if (t.rate.imag() != 0.0 || !(t.rate.real() > 0.0)) return false;
    for (auto c : t.coeffs) {
      if (c.imag() != 0.0 || c.real() < 0.0) return false;
    }
  }
  return true;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::PositiveVolatility: return "PositiveVolatility";
    case Regime::ZeroVolMuAboveAlpha: return "ZeroVolMuAboveAlpha";
    case Regime::ZeroVolMuBetweenZeroAndAlpha: return "ZeroVolMuBetweenZeroAndAlpha";
    case Regime::ZeroVolMuNegative: return "ZeroVolMuNegative";
  }
  return "Unknown";
}

RegimeInfo regime_of(double sigma, double mu, double alpha) {
  RegimeInfo info{};
  if (sigma > 0.0) {
    info.regime = Regime::PositiveVolatility;
  } else if (mu > alpha) {
    info.regime = Regime::ZeroVolMuAboveAlpha;
  } else if (mu >= 0.0) {
    info.regime = Regime::ZeroVolMuBetweenZeroAndAlpha;
  } else {
    info.regime = Regime::ZeroVolMuNegative;
  }
  info.y_has_atom_at_sup = sigma == 0.0 && mu <= alpha;
  info.x_has_atom_at_inf = sigma == 0.0 && mu >= 0.0;
  return info;
}

RegimeInfo regime_of(const RefractedModel& m) { return regime_of(m.base.sigma, m.base.mu, m.alpha); }

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::DuplicateRate: return "DuplicateRate";
    case Violation::SmallestRateNotReal: return "SmallestRateNotReal";
    case Violation::CoefficientsNotNormalized: return "CoefficientsNotNormalized";
    case Violation::ConjugatePairViolation: return "ConjugatePairViolation";
    case Violation::NegativeDensity: return "NegativeDensity";
    case Violation::NegativeIntensity: return "NegativeIntensity";
    case Violation::NegativeVolatility: return "NegativeVolatility";
    case Violation::NegativeRefraction: return "NegativeRefraction";
    case Violation::NonPositiveRate: return "NonPositiveRate";
    case Violation::EmptyDensity: return "EmptyDensity";
    case Violation::NonFiniteParameter: return "NonFiniteParameter";
  }
  return "Unknown";
}

RationalJumpDensity canonical_density(const RationalJumpDensity& d) {
  RationalJumpDensity out{d.side, {}};
  for (const auto& t : d.terms) {
    ErlangTerm c = t;
    while (!c.coeffs.empty() && c.coeffs.back() == Complex(0.0)) c.coeffs.pop_back();
    if (!c.coeffs.empty()) out.terms.push_back(std::move(c));
  }
  std::stable_sort(out.terms.begin(), out.terms.end(), rate_less);
  return out;
}

ValidatedModel ValidatedModel::with_refraction(double alpha, double b) const {
  RefractedModel m = model_;
  m.alpha = alpha;
  m.b = b;
  return validated(m);
}

ValidationReport validate(const RefractedModel& raw) {
  ValidationReport report;
  auto& issues = report.issues;
  const LevyModel& x = raw.base;

  for (double v : {x.mu, x.sigma, x.lambda_plus, x.lambda_minus, raw.alpha, raw.b}) {
    if (!std::isfinite(v)) {
      issues.push_back({Violation::NonFiniteParameter, "process or refraction parameter is not finite"});
      break;
    }
  }
  if (x.sigma < 0.0) issues.push_back({Violation::NegativeVolatility, "sigma must be >= 0"});
  if (x.lambda_plus < 0.0) issues.push_back({Violation::NegativeIntensity, "lambda_plus must be >= 0"});
  if (x.lambda_minus < 0.0) issues.push_back({Violation::NegativeIntensity, "lambda_minus must be >= 0"});
  if (raw.alpha < 0.0) issues.push_back({Violation::NegativeRefraction, "alpha must be >= 0"});

  RefractedModel canon = raw;
  canon.base.jumps_up = canonical_density(x.jumps_up);
  canon.base.jumps_up.side = JumpSide::positive;
  canon.base.jumps_down = canonical_density(x.jumps_down);
  canon.base.jumps_down.side = JumpSide::negative;

  const auto check_side = [&](double lambda, RationalJumpDensity& d) {
    if (lambda > 0.0 && d.empty()) {
      issues.push_back({Violation::EmptyDensity, side_name(d.side) + ": positive intensity needs a density"});
      return;
    }
    check_density(d, issues);
    if (lambda == 0.0) d.terms.clear();
  };
  check_side(x.lambda_plus, canon.base.jumps_up);
  check_side(x.lambda_minus, canon.base.jumps_down);

  if (issues.empty()) report.model = ValidatedModel(std::move(canon));
  return report;
}

ValidatedModel validated(const RefractedModel& raw) {
  auto report = validate(raw);
  if (!report.ok()) {
    std::string msg = "invalid model:";
    for (const auto& i : report.issues) {
      msg += "\n  ";
      msg += to_string(i.kind);
      msg += ": ";
      msg += i.detail;
    }
    throw std::invalid_argument(msg);
  }
  return *report.model;
}

}  // namespace occtime
