#pragma once

#include "occtime/model.hpp"
#include "occtime/polynomial.hpp"

#include <vector>

namespace occtime {

/// Laplace exponent of Y = X - alpha t in the real-exponent variable s,
///   kappa(s) = log E[e^{s Y_1}] = sigma^2 s^2/2 + (mu - alpha) s
///              + lambda+ (E[e^{s J+}] - 1) + lambda- (E[e^{-s J-}] - 1),
/// or its n-th derivative. psi(z) = kappa(iz) with alpha = 0.
/// Throws PoleEvaluation within 1e-12 (relative) of a rate pole.
Complex laplace_exponent(const LevyModel& m, double alpha, Complex s, int derivative = 0);

/// psi(z) = log E[e^{i z X_1}].
Complex psi(const LevyModel& m, Complex z);

/// psi(z) - i alpha z, the exponent of Y = X - alpha t.
Complex psi_tilde(const LevyModel& m, double alpha, Complex z);

enum class RootSide {
  lower_beta,   ///< psi~(z) = q, Im z < 0, z = -i beta
  upper_gamma,  ///< psi(z) = q, Im z > 0, z = i gamma
};

struct Root {
  Complex value;  ///< beta or gamma, positive real part
  int multiplicity = 1;
};

/// Distinct roots with multiplicities, ordered by real part (then imaginary
/// part). For real q the first root is real and simple.
struct RootSet {
  RootSide side = RootSide::lower_beta;
  Complex q;
  std::vector<Root> roots;

  int total_multiplicity() const;
  bool all_simple() const;
  double min_real_part() const;
};

/// Total multiplicity implied by the pole orders and the drift/volatility regime for the given side.
int expected_root_count(const LevyModel& m, double alpha, RootSide side);

/// (kappa(s) - q) * prod (eta_k - s)^{m_k} * prod (theta_k + s)^{n_k}.
Polynomial cleared_polynomial(const LevyModel& m, double alpha, Complex q);

/// Roots of psi~(z) = q in Im z < 0, reported as beta with z = -i beta.
/// q may be complex with Re q > 0; other complex q go through root tracking.
RootSet roots_beta(const LevyModel& m, double alpha, Complex q);

/// Roots of psi(z) = q in Im z > 0, reported as gamma with z = i gamma.
RootSet roots_gamma(const LevyModel& m, Complex q);

/// Roots for a complex q anywhere off the branch set: the root group is
/// carried continuously from the real point |q| along a straight path.
/// Throws ComplexRootTrackingFailed when the matching becomes ambiguous.
RootSet track_roots(const LevyModel& m, double alpha, RootSide side, Complex q);

inline constexpr double kRootResidualTolerance = 1e-9;
inline constexpr double kClusterRadius = 1e-7;

}  // namespace occtime
