#pragma once

#include "occtime/charexp.hpp"
#include "occtime/exp_poly.hpp"
#include "occtime/model.hpp"
#include "occtime/rational_fn.hpp"

namespace occtime {

/// The rational kernel
///   prefactor * K * prod (x - eta)^m prod (x + theta)^n
///     / (x prod (x - beta)^M prod (x + gamma)^N),
///   K = prod (-beta)^M prod gamma^N / (prod (-eta)^m prod theta^n),
/// whose partial fractions give every occupation coefficient.
RationalFn occupation_kernel(const LevyModel& m, const RootSet& beta, const RootSet& gamma, Complex prefactor);

/// Kernel of the occupation Laplace transform with xi = p + q: prefactor
/// p/xi, beta roots at xi, gamma roots at q.
RationalFn f_fn(const ValidatedModel& m, double p, double q);

enum class ExtractionPath {
  automatic,     ///< simple-root products when every root is simple, else general
  general,       ///< partial fractions by exact Taylor expansion
  simple_roots,  ///< closed products; throws DegenerateExpansion on a multiple root
};

/// V(x) = E_x[exp(-p * time below b up to e(q))].
PiecewiseExpPoly occupation_laplace(const ValidatedModel& m, double p, double q,
                                    ExtractionPath path = ExtractionPath::automatic);

/// E_x[time below b up to e(q)].
PiecewiseExpPoly occupation_expectation(const ValidatedModel& m, double q,
                                        ExtractionPath path = ExtractionPath::automatic);

/// Same object for complex q (coefficients are complex); roots for q off the
/// positive half-plane come from continuation and may throw
/// ComplexRootTrackingFailed.
PiecewiseExpPoly occupation_expectation(const ValidatedModel& m, Complex q);

/// x -> P_x(U_{e(q)} < b), i.e. q times the expectation.
PiecewiseExpPoly distribution_at_exp(const ValidatedModel& m, double q);
double distribution_at_exp(const ValidatedModel& m, double q, double x);

/// P_b(U_{e(q)} < b) - lim_{x -> b-} P_x(U_{e(q)} < b) from the coefficients.
double distribution_atom(const ValidatedModel& m, double q);
/// The same jump from the root and rate products (zero outside the sticky regime).
double distribution_atom_product_form(const ValidatedModel& m, double q);

/// -int e^{-phi (x - b)} dP_x(U_{e(q)} < b), accepted for -gamma_1 < Re phi <= 0.
Complex identity_lhs(const ValidatedModel& m, double q, Complex phi);
/// E[e^{phi sup Y}] E[e^{phi inf X}] at e(q).
Complex identity_rhs(const ValidatedModel& m, double q, Complex phi);

struct SmoothnessReport {
  double left_limit;
  double right_value;
  double left_derivative;
  double right_derivative;
  double jump;
};

/// Values and slopes of V on both sides of b, checked against the regime:
/// sigma > 0 gives a C^1 function, sigma = 0 with mu outside [0, alpha]
/// a continuous one, and the sticky regime a strictly positive jump.
/// Throws RegimeContractViolation otherwise.
SmoothnessReport smoothness_report(const PiecewiseExpPoly& v, RegimeInfo regime);

/// (p/xi) * (atom of sup Y at e(xi)) * (atom of inf X at e(q)): the size of
/// the jump of V at b.
double predicted_jump(const ValidatedModel& m, double p, double q);

inline constexpr double kJumpTolerance = 1e-9;
inline constexpr double kSlopeTolerance = 1e-7;

}  // namespace occtime
