#include "occtime/charexp.hpp"

#include "occtime/error.hpp"
#include "occtime/rational_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace occtime {

namespace {

constexpr double kPoleTolerance = 1e-12;
constexpr double kRealSnap = 1e-9;
constexpr double kDerivativeTolerance = 1e-6;

// (j)_n = j (j+1) ... (j+n-1)
double rising(int j, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= static_cast<double>(j + i);
  return r;
}

bool cplx_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Poles of the Laplace exponent in s: eta_k (up jumps) and -theta_k (down jumps).
std::vector<Complex> exponent_poles(const LevyModel& m) {
  std::vector<Complex> out;
  for (const auto& t : m.jumps_up.terms) out.push_back(t.rate);
  for (const auto& t : m.jumps_down.terms) out.push_back(-t.rate);
  return out;
}

double side_alpha(RootSide side, double alpha) { return side == RootSide::lower_beta ? alpha : 0.0; }

// Root of the side in the s variable -> reported value (beta = s, gamma = -s).
Complex to_reported(RootSide side, Complex s) { return side == RootSide::lower_beta ? s : -s; }

struct Cluster {
  Complex centre;
  int size;
};

std::vector<Cluster> cluster_roots(const std::vector<Complex>& roots) {
  // Single-linkage grouping: union every pair closer than the cluster radius.
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = kClusterRadius * (1.0 + std::max(std::abs(roots[i]), std::abs(roots[j])));
      if (std::abs(roots[i] - roots[j]) <= r) parent[find(i)] = find(j);
    }
  }
  std::vector<Cluster> out;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.size());
      out.push_back({0.0, 0});
    }
    auto& c = out[static_cast<std::size_t>(slot[r])];
    c.centre += roots[i];
    ++c.size;
  }
  for (auto& c : out) c.centre /= static_cast<double>(c.size);
  return out;
}

// Newton on kappa^{(mult-1)}(s) - [mult == 1] q, whose root is simple.
Complex polish(const LevyModel& m, double alpha, Complex q, Complex s, int mult) {
  const Complex target = mult == 1 ? q : Complex(0.0);
  for (int it = 0; it < 8; ++it) {
    const Complex f = laplace_exponent(m, alpha, s, mult - 1) - target;
    const Complex d = laplace_exponent(m, alpha, s, mult);
    if (d == Complex(0.0)) break;
    const Complex step = f / d;
    if (!std::isfinite(std::abs(step))) break;
    // A wild step means the cluster centre was not in the basin; keep the
    // eigenvalue estimate and let the residual check decide.
    if (std::abs(step) > 1e-2 * (1.0 + std::abs(s))) break;
    s -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(s))) break;
  }
  return s;
}

void check_root(const LevyModel& m, double alpha, Complex q, Complex s, int mult) {
  const double tol = kRootResidualTolerance * (1.0 + std::abs(q));
  const double res = std::abs(laplace_exponent(m, alpha, s, 0) - q);
  if (!(res <= tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "root " << s << " has residual " << res;
    throw NumericalError(ErrorCode::NonConvergence, os.str());
  }
  for (int j = 1; j < mult; ++j) {
    const double scale = 1.0 + std::abs(q) + std::abs(laplace_exponent(m, alpha, s, j + 1));
    const double dj = std::abs(laplace_exponent(m, alpha, s, j));
    if (!(dj <= kDerivativeTolerance * scale)) {
      std::ostringstream os;
      os.precision(17);
      os << "root " << s << " of multiplicity " << mult << " has derivative " << j << " of size " << dj;
      throw NumericalError(ErrorCode::NonConvergence, os.str());
    }
  }
}

// Every root of the cleared polynomial that is not a pole artefact.
std::vector<Complex> candidate_roots(const LevyModel& m, double alpha, Complex q) {
  const auto poles = exponent_poles(m);
  std::vector<Complex> out;
  for (Complex r : polynomial_roots(cleared_polynomial(m, alpha, q))) {
    bool spurious = false;
    for (Complex p : poles) {
      if (std::abs(r - p) <= kClusterRadius * (1.0 + std::abs(r))) spurious = true;
    }
    if (!spurious) out.push_back(r);
  }
  return out;
}

bool in_side(RootSide side, Complex s) { return side == RootSide::lower_beta ? s.real() > 0.0 : s.real() < 0.0; }

RootSet solve_half_plane(const LevyModel& m, double alpha, RootSide side, Complex q) {
  const double a = side_alpha(side, alpha);
  std::vector<Complex> raw;
  for (Complex r : candidate_roots(m, a, q)) {
    if (in_side(side, r)) raw.push_back(r);
  }

  const bool real_q = q.imag() == 0.0;
  std::vector<Root> found;
  for (const auto& c : cluster_roots(raw)) {
    Complex s = c.centre;
    if (real_q && std::abs(s.imag()) <= kRealSnap * (1.0 + std::abs(s))) s = s.real();
    s = polish(m, a, q, s, c.size);
    if (real_q && std::abs(s.imag()) <= kRealSnap * (1.0 + std::abs(s))) s = s.real();
    found.push_back({s, c.size});
  }

  if (real_q) {
    // Real model and real q: the root set is closed under conjugation.
    std::vector<bool> used(found.size(), false);
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (used[i] || found[i].value.imag() <= 0.0) continue;
      std::size_t best = found.size();
      double best_d = 0.0;
      for (std::size_t j = 0; j < found.size(); ++j) {
        if (j == i || used[j] || found[j].value.imag() >= 0.0) continue;
        const double d = std::abs(found[j].value - std::conj(found[i].value));
        if (best == found.size() || d < best_d) {
          best = j;
          best_d = d;
        }
      }
      if (best == found.size() || found[best].multiplicity != found[i].multiplicity ||
          best_d > 1e-6 * (1.0 + std::abs(found[i].value))) {
        throw NumericalError(ErrorCode::RootCountMismatch, "complex root without a conjugate partner");
      }
      used[i] = used[best] = true;
      found[best].value = std::conj(found[i].value);
    }
  }

  std::sort(found.begin(), found.end(), [](const Root& x, const Root& y) { return cplx_less(x.value, y.value); });

  RootSet out;
  out.side = side;
  out.q = q;
  for (const auto& r : found) out.roots.push_back({to_reported(side, r.value), r.multiplicity});
  // gamma = -s reverses the order of real parts; keep the reported set sorted.
  std::sort(out.roots.begin(), out.roots.end(), [](const Root& x, const Root& y) { return cplx_less(x.value, y.value); });

  const int expected = expected_root_count(m, alpha, side);
  if (out.total_multiplicity() != expected) {
    std::ostringstream os;
    os << (side == RootSide::lower_beta ? "beta" : "gamma") << " side: found total multiplicity "
       << out.total_multiplicity() << ", expected " << expected;
    throw NumericalError(ErrorCode::RootCountMismatch, os.str());
  }
  for (const auto& r : found) check_root(m, a, q, r.value, r.multiplicity);
  if (real_q && !out.roots.empty()) {
    const auto& first = out.roots.front();
    const bool unique = out.roots.size() == 1 || out.roots[1].value.real() > first.value.real();
    if (first.value.imag() != 0.0 || first.multiplicity != 1 || !unique) {
      throw NumericalError(ErrorCode::NonConvergence, "leading root is not real and simple");
    }
  }
  return out;
}

}  // namespace

Complex laplace_exponent(const LevyModel& m, double alpha, Complex s, int derivative) {
  const int n = derivative;
  Complex v = 0.0;
  if (n == 0) {
    v = 0.5 * m.sigma * m.sigma * s * s + (m.mu - alpha) * s;
  } else if (n == 1) {
    v = m.sigma * m.sigma * s + (m.mu - alpha);
  } else if (n == 2) {
    v = m.sigma * m.sigma;
  }

  const auto jump_sum = [&](const RationalJumpDensity& d, double lambda, bool up) {
    if (lambda == 0.0) return Complex(0.0);
    Complex acc = n == 0 ? Complex(-1.0) : Complex(0.0);
    for (const auto& t : d.terms) {
      const Complex den = up ? t.rate - s : t.rate + s;
      if (std::abs(den) <= kPoleTolerance * (1.0 + std::abs(t.rate))) {
        throw NumericalError(ErrorCode::PoleEvaluation, "exponent evaluated at a jump-rate pole");
      }
      const Complex ratio = t.rate / den;
      const Complex tail = ipow(den, -n) * ((up || n % 2 == 0) ? 1.0 : -1.0);
      Complex power = ratio;
      for (int j = 1; j <= t.order(); ++j) {
        acc += t.coeffs[j - 1] * power * tail * rising(j, n);
        power *= ratio;
      }
    }
    return lambda * acc;
  };
  v += jump_sum(m.jumps_up, m.lambda_plus, true);
  v += jump_sum(m.jumps_down, m.lambda_minus, false);
  return v;
}

Complex psi(const LevyModel& m, Complex z) { return laplace_exponent(m, 0.0, Complex(0.0, 1.0) * z); }

Complex psi_tilde(const LevyModel& m, double alpha, Complex z) {
  return laplace_exponent(m, alpha, Complex(0.0, 1.0) * z);
}

int RootSet::total_multiplicity() const {
  int n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

bool RootSet::all_simple() const {
  return std::all_of(roots.begin(), roots.end(), [](const Root& r) { return r.multiplicity == 1; });
}

double RootSet::min_real_part() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : roots) m = std::min(m, r.value.real());
  return m;
}

int expected_root_count(const LevyModel& m, double alpha, RootSide side) {
  if (side == RootSide::lower_beta) {
    const int orders = m.lambda_plus > 0.0 ? m.jumps_up.total_order() : 0;
    return (m.sigma == 0.0 && m.mu <= alpha) ? orders : 1 + orders;
  }
  const int orders = m.lambda_minus > 0.0 ? m.jumps_down.total_order() : 0;
  return (m.sigma == 0.0 && m.mu >= 0.0) ? orders : 1 + orders;
}

Polynomial cleared_polynomial(const LevyModel& m, double alpha, Complex q) {
  struct Den {
    Polynomial lin;  // eta - s or theta + s
    int order;
  };
  std::vector<Den> dens;
  if (m.lambda_plus > 0.0) {
    for (const auto& t : m.jumps_up.terms) dens.push_back({Polynomial{t.rate, Complex(-1.0)}, t.order()});
  }
  if (m.lambda_minus > 0.0) {
    for (const auto& t : m.jumps_down.terms) dens.push_back({Polynomial{t.rate, Complex(1.0)}, t.order()});
  }
  const auto pow_lin = [](const Polynomial& p, int k) {
    Polynomial r{Complex(1.0)};
    for (int i = 0; i < k; ++i) r *= p;
    return r;
  };
  // Product of all denominators except index `skip`.
  const auto others = [&](std::size_t skip) {
    Polynomial r{Complex(1.0)};
    for (std::size_t i = 0; i < dens.size(); ++i) {
      if (i != skip) r *= pow_lin(dens[i].lin, dens[i].order);
    }
    return r;
  };

  Polynomial out =
      Polynomial{-(m.lambda_plus + m.lambda_minus) - q, Complex(m.mu - alpha), Complex(0.5 * m.sigma * m.sigma)} *
      others(dens.size());

  std::size_t idx = 0;
  const auto add_side = [&](const RationalJumpDensity& d, double lambda) {
    if (lambda == 0.0) return;
    for (const auto& t : d.terms) {
      const Polynomial rest = others(idx);
      Polynomial part;
      Complex rate_pow = 1.0;
      for (int j = 1; j <= t.order(); ++j) {
        rate_pow *= t.rate;
        part += pow_lin(dens[idx].lin, t.order() - j) * (lambda * t.coeffs[j - 1] * rate_pow);
      }
      out += part * rest;
      ++idx;
    }
  };
  add_side(m.jumps_up, m.lambda_plus);
  add_side(m.jumps_down, m.lambda_minus);
  return out;
}

RootSet roots_beta(const LevyModel& m, double alpha, Complex q) {
  if (q.imag() != 0.0 && !(q.real() > 0.0)) return track_roots(m, alpha, RootSide::lower_beta, q);
  if (!(q.real() > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "q must be positive");
  return solve_half_plane(m, alpha, RootSide::lower_beta, q);
}

RootSet roots_gamma(const LevyModel& m, Complex q) {
  if (q.imag() != 0.0 && !(q.real() > 0.0)) return track_roots(m, 0.0, RootSide::upper_gamma, q);
  if (!(q.real() > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "q must be positive");
  return solve_half_plane(m, 0.0, RootSide::upper_gamma, q);
}

RootSet track_roots(const LevyModel& m, double alpha, RootSide side, Complex q) {
  if (q.real() > 0.0) return solve_half_plane(m, alpha, side, q);
  const double a = side_alpha(side, alpha);
  const Complex q0 = std::abs(q);
  if (!(q0.real() > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "q must be nonzero");

  const RootSet start = solve_half_plane(m, alpha, side, q0);
  if (!start.all_simple()) {
    throw NumericalError(ErrorCode::ComplexRootTrackingFailed, "cannot track a multiple root");
  }
  std::vector<Complex> tracked;
  for (const auto& r : start.roots) tracked.push_back(side == RootSide::lower_beta ? r.value : -r.value);

  // Walk q0 -> q, matching each tracked root to its nearest neighbour at the
  // next point; an ambiguous match halves the step.
  double t = 0.0;
  double h = 1.0 / 32.0;
  int refinements = 0;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + h);
    const Complex qt = q0 + (q - q0) * t_next;
    const auto cand = candidate_roots(m, a, qt);
    std::vector<Complex> next(tracked.size());
    std::vector<bool> taken(cand.size(), false);
    bool ok = true;
    for (std::size_t i = 0; i < tracked.size() && ok; ++i) {
      std::size_t best = cand.size();
      double d1 = 0.0;
      double d2 = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cand.size(); ++j) {
        const double d = std::abs(cand[j] - tracked[i]);
        if (best == cand.size() || d < d1) {
          d2 = d1;
          if (best == cand.size()) d2 = std::numeric_limits<double>::infinity();
          best = j;
          d1 = d;
        } else if (d < d2) {
          d2 = d;
        }
      }
      if (best == cand.size() || taken[best] || !(d1 < 0.25 * d2)) {
        ok = false;
        break;
      }
      taken[best] = true;
      next[i] = polish(m, a, qt, cand[best], 1);
    }
    if (!ok) {
      h *= 0.5;
      if (++refinements > 40 || h < 1e-9) {
        throw NumericalError(ErrorCode::ComplexRootTrackingFailed, "ambiguous root continuation");
      }
      continue;
    }
    tracked = std::move(next);
    t = t_next;
    h = std::min(2.0 * h, 1.0 / 16.0);
  }

  RootSet out;
  out.side = side;
  out.q = q;
  for (Complex s : tracked) {
    check_root(m, a, q, s, 1);
    out.roots.push_back({to_reported(side, s), 1});
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const Root& x, const Root& y) { return cplx_less(x.value, y.value); });
  return out;
}

}  // namespace occtime
