#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace occtime {

using Complex = std::complex<double>;

enum class JumpSide { positive, negative };

/// One rate of a rational jump density together with its Erlang-order
/// coefficients: coeffs[j-1] weights the density rate^j y^{j-1} e^{-rate y}/(j-1)!.
struct ErlangTerm {
  Complex rate;
  std::vector<Complex> coeffs;

  int order() const { return static_cast<int>(coeffs.size()); }
};

/// Jump-size density on (0, inf) with rational Laplace transform.
struct RationalJumpDensity {
  JumpSide side = JumpSide::positive;
  std::vector<ErlangTerm> terms;

  Complex pdf(double y) const;
  /// E[e^{-s J}] = sum c_kj (rate_k / (rate_k + s))^j.
  Complex laplace(Complex s) const;
  /// Sum of all coefficients; equals the integral of the density.
  Complex mass() const;
  int total_order() const;
  bool empty() const { return terms.empty(); }
  /// Smallest real part among the rates (inf when empty).
  double min_real_rate() const;
  /// True when every rate and coefficient is real and nonnegative, so the
  /// density is a genuine Erlang mixture that can be sampled directly.
  bool sampleable() const;
};

/// Jump diffusion X_t = mu t + sigma W_t + compound Poisson up/down jumps.
struct LevyModel {
  double mu = 0.0;
  double sigma = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  RationalJumpDensity jumps_up{JumpSide::positive, {}};
  RationalJumpDensity jumps_down{JumpSide::negative, {}};
};

/// dU = dX - alpha 1{U < b} dt.
struct RefractedModel {
  LevyModel base;
  double alpha = 0.0;
  double b = 0.0;
};

enum class Regime {
  PositiveVolatility,
  ZeroVolMuAboveAlpha,
  ZeroVolMuBetweenZeroAndAlpha,
  ZeroVolMuNegative,
};

std::string_view to_string(Regime r);

struct RegimeInfo {
  Regime regime;
  /// sigma = 0 and mu <= alpha: sup of Y at e(q) has an atom at 0.
  bool y_has_atom_at_sup;
  /// sigma = 0 and mu >= 0: inf of X at e(q) has an atom at 0.
  bool x_has_atom_at_inf;
};

RegimeInfo regime_of(double sigma, double mu, double alpha);
RegimeInfo regime_of(const RefractedModel& m);

enum class Violation {
  DuplicateRate,
  SmallestRateNotReal,
  CoefficientsNotNormalized,
  ConjugatePairViolation,
  NegativeDensity,
  NegativeIntensity,
  NegativeVolatility,
  NegativeRefraction,
  NonPositiveRate,
  EmptyDensity,
  NonFiniteParameter,
};

std::string_view to_string(Violation v);

struct ValidationIssue {
  Violation kind;
  std::string detail;
};

struct ValidationReport;

/// A refracted model whose parameters passed every check in validate().
/// Terms are stored in canonical order (rates sorted by real then imaginary
/// part, trailing zero coefficients dropped, densities of zero-intensity
/// sides removed). Immutable.
class ValidatedModel {
 public:
  const RefractedModel& model() const { return model_; }
  const LevyModel& levy() const { return model_.base; }
  double alpha() const { return model_.alpha; }
  double b() const { return model_.b; }
  RegimeInfo regime() const { return regime_of(model_); }

  /// Same process with a different refraction drift or level.
  ValidatedModel with_refraction(double alpha, double b) const;

 private:
  explicit ValidatedModel(RefractedModel m) : model_(std::move(m)) {}
  friend ValidationReport validate(const RefractedModel& raw);

  RefractedModel model_;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::optional<ValidatedModel> model;

  bool ok() const { return issues.empty(); }
};

/// Checks every invariant and reports all violations; never stops at the first.
ValidationReport validate(const RefractedModel& raw);

/// validate() that throws std::invalid_argument listing every violation.
ValidatedModel validated(const RefractedModel& raw);

/// Canonical form used by validate(): sorted terms, trimmed coefficients.
RationalJumpDensity canonical_density(const RationalJumpDensity& d);

inline constexpr double kDensityTolerance = 1e-9;
inline constexpr double kMassTolerance = 1e-10;

}  // namespace occtime
