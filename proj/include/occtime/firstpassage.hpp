#pragma once

#include "occtime/wienerhopf.hpp"

#include <vector>

namespace occtime {

enum class ExitDirection {
  down_X,  ///< first passage of X below x <= 0
  up_Y,    ///< first passage of Y above x >= 0
};

/// Discounted exit law: E[e^{-q tau}; overshoot in dy] for overshoot y >= 0
/// measured away from the level,
///   atom * delta_0(dy) + sum C_kj rate_k^j y^{j-1}/(j-1)! e^{-rate_k y} dy.
/// `terms` hold (rate, j, C_kj); the transform in s is
///   atom + sum C_kj (rate/(rate + s))^j.
struct ExitLaw {
  ExitDirection direction;
  double offset;  ///< the level x (<= 0 for down_X, >= 0 for up_Y)
  Complex q;
  Complex atom;
  std::vector<PoleTerm> terms;

  /// E[e^{-q tau}], atom plus the integral of the overshoot density.
  Complex mass() const;
  /// E[e^{-q tau - s |overshoot|}].
  Complex transform(Complex s) const;
  Complex overshoot_density(double y) const;
};

/// Exit law obtained from a Wiener-Hopf factor at distance w >= 0 from the
/// start, by partial fractions in s of the ratio of truncated and full
/// extremum transforms.
ExitLaw exit_law_from_factor(const WienerHopfFactor& f, double w);

/// Y = X - alpha t crossing x >= 0 from 0. At x = 0 the formula is used as
/// is: atom 1 when Y leaves 0 upwards immediately, atom 0 when it cannot
/// creep upwards.
ExitLaw exit_up_law(const LevyModel& m, double alpha, Complex q, double x);
/// X crossing x <= 0 from 0.
ExitLaw exit_down_law(const LevyModel& m, Complex q, double x);

/// (1/(s - theta)) (F(theta)/F(s) - 1) for the supremum factor of Y;
/// the Laplace transform in the level of the exit transform at s.
/// Throws DegenerateArguments when theta and s coincide.
Complex pr_rhs(const WienerHopfFactor& f, double theta, double s);
Complex pr_rhs(const LevyModel& m, double alpha, double q, double theta, double s);
/// Mirror for the infimum factor of X.
Complex pr_rhs_down(const LevyModel& m, double q, double theta, double s);

}  // namespace occtime
