#pragma once

#include "occtime/charexp.hpp"
#include "occtime/model.hpp"
#include "occtime/rational_fn.hpp"

#include <vector>

namespace occtime {

enum class FactorSide {
  sup_of_Y,  ///< transform E[e^{-s sup Y}] at e(q)
  inf_of_X,  ///< transform E[e^{s inf X}] at e(q)
};

/// One partial-fraction term coeff / (s + root)^order.
struct PoleTerm {
  Complex root;
  int order;
  Complex coeff;
};

/// A jump rate with its Erlang order, i.e. the factor ((s + rate)/rate)^order.
struct RateOrder {
  Complex rate;
  int order;
};

/// Wiener-Hopf factor of the rational class:
///   F(s) = prod_k ((s + a_k)/a_k)^{m_k} prod_k (r_k/(s + r_k))^{M_k}
///        = atom + sum_k sum_j C_kj / (s + r_k)^j
/// where a_k are jump rates on the side of the extremum and r_k the roots
/// (beta for the supremum of Y, gamma for the infimum of X).
/// The associated law on [0, inf) (mirrored for the infimum) is
///   atom * delta_0 + sum C_kj y^{j-1}/(j-1)! e^{-r_k y} dy.
class WienerHopfFactor {
 public:
  WienerHopfFactor(FactorSide side, Complex q, std::vector<RateOrder> rates, RootSet roots);

  FactorSide side() const { return side_; }
  Complex q() const { return q_; }
  const std::vector<RateOrder>& rates() const { return rates_; }
  const RootSet& roots() const { return roots_; }
  /// prod r^M / prod a^m, the leading constant of the product form.
  Complex scale() const { return scale_; }
  const RationalFn& rational() const { return rational_; }

  /// C_0 or D_0.
  Complex atom() const { return atom_; }
  /// C_1 or D_1, the coefficient of the first (real, simple) root.
  Complex simple_coeff() const;
  /// Every partial-fraction term, grouped by root (sorted) and by order.
  const std::vector<PoleTerm>& terms() const { return terms_; }

  /// Product form. Throws OutsideAnalyticRegion unless Re s > -min Re(root).
  Complex eval(Complex s) const;
  /// Partial-fraction form (same region check).
  Complex eval_partial_fractions(Complex s) const;

  /// Density of the extremum at distance u >= 0 from 0 (u = y for the
  /// supremum, u = -y for the infimum).
  Complex density(double u) const;
  /// Closed-form integral of the density over (0, inf).
  Complex density_mass() const;

 private:
  void check_region(Complex s) const;

  FactorSide side_;
  Complex q_;
  std::vector<RateOrder> rates_;
  RootSet roots_;
  Complex scale_;
  RationalFn rational_;
  Complex atom_;
  std::vector<PoleTerm> terms_;
};

/// Law of the supremum of Y = X - alpha t at e(q).
WienerHopfFactor pos_factor(const LevyModel& m, double alpha, Complex q);
/// Law of the infimum of X at e(q).
WienerHopfFactor neg_factor(const LevyModel& m, Complex q);

/// Closed form of C_1 (resp. D_1) from the root and rate products; used to
/// cross-check the residue extraction.
Complex simple_coeff_product_form(const WienerHopfFactor& f);

struct LawPoint {
  double atom_at_0;
  double density;
};

/// Atom at 0 and density of sup Y at y >= 0.
LawPoint sup_law_density(const WienerHopfFactor& f, double y);
/// Atom at 0 and density of inf X at y <= 0.
LawPoint inf_law_density(const WienerHopfFactor& f, double y);

}  // namespace occtime
