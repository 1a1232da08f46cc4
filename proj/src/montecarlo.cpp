#include "occtime/montecarlo.hpp"

#include "occtime/error.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <random>

namespace occtime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Away from the level a single Gaussian step is taken whenever the level lies
// this many standard deviations (plus the drift excursion) away.
constexpr double kSafetySigmas = 7.0;

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct ErlangChoice {
  double rate;
  int order;
  double cumulative;
};

class JumpSampler {
 public:
  JumpSampler(const LevyModel& m) : up_rate_(m.lambda_plus), down_rate_(m.lambda_minus) {
    if (up_rate_ > 0.0) up_ = table(m.jumps_up);
    if (down_rate_ > 0.0) down_ = table(m.jumps_down);
  }

  double total_rate() const { return up_rate_ + down_rate_; }

  /// Signed jump size.
  double sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const bool up = unif(rng) * total_rate() < up_rate_;
    const auto& tab = up ? up_ : down_;
    const double u = unif(rng);
    std::size_t k = 0;
    while (k + 1 < tab.size() && u >= tab[k].cumulative) ++k;
    std::exponential_distribution<double> e(tab[k].rate);
    double size = 0.0;
    for (int j = 0; j < tab[k].order; ++j) size += e(rng);
    return up ? size : -size;
  }

  /// The same process reflected through 0.
  JumpSampler mirrored() const {
    JumpSampler s = *this;
    std::swap(s.up_rate_, s.down_rate_);
    std::swap(s.up_, s.down_);
    return s;
  }

 private:
  static std::vector<ErlangChoice> table(const RationalJumpDensity& d) {
    if (!d.sampleable()) {
      throw NumericalError(ErrorCode::UnsampleableDensity,
                           "simulation needs real, nonnegative Erlang-mixture coefficients");
    }
    std::vector<ErlangChoice> t;
    double total = 0.0;
    for (const auto& term : d.terms) {
      for (int j = 1; j <= term.order(); ++j) {
        total += term.coeffs[j - 1].real();
        t.push_back({term.rate.real(), j, total});
      }
    }
    for (auto& c : t) c.cumulative /= total;
    t.back().cumulative = 1.0;
    return t;
  }

  double up_rate_;
  double down_rate_;
  std::vector<ErlangChoice> up_;
  std::vector<ErlangChoice> down_;
};

struct PathParams {
  double mu;
  double sigma;
  double alpha;
  double b;
  double dt;
};

// Largest h with  dist - |drift| h - K sigma sqrt(h) >= 0.
double safe_step(double dist, double drift, double sigma) {
  const double a = std::abs(drift);
  const double c = kSafetySigmas * sigma;
  if (a == 0.0) return (dist / c) * (dist / c);
  const double y = (-c + std::sqrt(c * c + 4.0 * a * dist)) / (2.0 * a);
  return y * y;
}

// Moves u over [t, end) without jumps, accumulating time spent below b.
void diffuse(const PathParams& p, double& u, double t, double end, double& occ, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  while (t < end) {
    const double rem = end - t;
    const bool below = u < p.b;
    const double drift = below ? p.mu - p.alpha : p.mu;
    const double big = safe_step(std::abs(u - p.b), drift, p.sigma);
    double h = big >= 4.0 * p.dt ? big : p.dt;
    const bool last = h >= rem;
    if (last) h = rem;
    if (below) occ += h;
    u += drift * h + p.sigma * std::sqrt(h) * normal(rng);
    t = last ? end : t + h;
  }
}

// Exact piecewise-linear motion for sigma = 0. A path sitting at b counts as
// above b; with mu < 0 it leaves downwards at once and the time at b is zero.
void drift_segments(const PathParams& p, double& u, double t, double end, double& occ) {
  while (t < end) {
    const double rem = end - t;
    const bool below = u < p.b || (u == p.b && p.mu < 0.0);
    const double v = below ? p.mu - p.alpha : p.mu;
    double hit = kInf;
    if (u < p.b && v > 0.0) hit = (p.b - u) / v;
    if (u > p.b && v < 0.0) hit = (u - p.b) / -v;
    if (hit < rem) {
      if (below) occ += hit;
      u = p.b;
      t += hit;
    } else {
      if (below) occ += rem;
      u += v * rem;
      t = end;
    }
  }
}

PathSample simulate_path(const PathParams& p, const JumpSampler& jumps, double x, HorizonKind kind, double hv,
                         Rng& rng) {
  std::exponential_distribution<double> unit_exp(1.0);
  const double horizon = kind == HorizonKind::exponential ? unit_exp(rng) / hv : hv;
  const double lambda = jumps.total_rate();
  double u = x;
  double t = 0.0;
  double occ = 0.0;
  while (t < horizon) {
    const double next_jump = lambda > 0.0 ? t + unit_exp(rng) / lambda : kInf;
    const bool jump = next_jump < horizon;
    const double end = jump ? next_jump : horizon;
    if (p.sigma > 0.0) {
      diffuse(p, u, t, end, occ, rng);
    } else {
      drift_segments(p, u, t, end, occ);
    }
    t = end;
    if (jump) u += jumps.sample(rng);
  }
  return {occ, u, horizon};
}

// Discounted first passage of Z above level >= 0 from 0, killed at e(q):
// returns exp(-s * overshoot) on passage before e(q), else 0.
double exit_path(double drift, double sigma, const JumpSampler& jumps, double level, double q, double s, Rng& rng) {
  std::exponential_distribution<double> unit_exp(1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double horizon = unit_exp(rng) / q;
  const double lambda = jumps.total_rate();
  double z = 0.0;
  double t = 0.0;
  while (t < horizon) {
    const double next_jump = lambda > 0.0 ? t + unit_exp(rng) / lambda : kInf;
    const bool jump = next_jump < horizon;
    const double h = (jump ? next_jump : horizon) - t;
    if (sigma > 0.0) {
      const double z1 = z + drift * h + sigma * std::sqrt(h) * normal(rng);
      if (z1 > level) return 1.0;
      // Probability that the Brownian bridge from z to z1 touched the level.
      const double cross = std::exp(-2.0 * (level - z) * (level - z1) / (sigma * sigma * h));
      if (unif(rng) < cross) return 1.0;
      z = z1;
    } else {
      if (drift > 0.0 && (level - z) / drift <= h) return 1.0;
      z += drift * h;
    }
    t += h;
    if (jump) {
      z += jumps.sample(rng);
      if (z > level) return std::exp(-s * (z - level));
    }
  }
  return 0.0;
}

template <class PathFn>
std::vector<double> run_paths(std::size_t n, std::uint64_t seed, Execution exec, PathFn&& fn) {
  std::vector<double> out(n);
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(stream_seed(seed, i));
      out[i] = fn(rng);
    }
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 256)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      Rng rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
      out[static_cast<std::size_t>(i)] = fn(rng);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "dt must be positive");
  if (cfg.n_paths < 1) throw NumericalError(ErrorCode::InvalidArgument, "need at least one path");
  if (!(cfg.horizon_value > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "horizon parameter must be positive");
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

SimEstimate summarize(const std::vector<double>& values) {
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

std::vector<PathSample> simulate_occupation(const ValidatedModel& m, double x, const SimConfig& cfg) {
  check_config(cfg);
  const auto& lv = m.levy();
  const JumpSampler jumps(lv);
  const PathParams p{lv.mu, lv.sigma, m.alpha(), m.b(), cfg.dt};
  std::vector<PathSample> out(cfg.n_paths);
  std::exception_ptr failure;
  const auto body = [&](std::size_t i) {
    Rng rng(stream_seed(cfg.seed, i));
    out[i] = simulate_path(p, jumps, x, cfg.horizon, cfg.horizon_value, rng);
  };
  if (cfg.execution == Execution::serial) {
    for (std::size_t i = 0; i < cfg.n_paths; ++i) body(i);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 256)
  for (long i = 0; i < static_cast<long>(cfg.n_paths); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

SimEstimate estimate_V(const ValidatedModel& m, double x, double p, double q, SimConfig cfg) {
  cfg.horizon = HorizonKind::exponential;
  cfg.horizon_value = q;
  const auto paths = simulate_occupation(m, x, cfg);
  std::vector<double> v(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) v[i] = std::exp(-p * paths[i].occupation);
  return summarize(v);
}

SimEstimate estimate_occupation(const ValidatedModel& m, double x, const SimConfig& cfg) {
  const auto paths = simulate_occupation(m, x, cfg);
  std::vector<double> v(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) v[i] = paths[i].occupation;
  return summarize(v);
}

SimEstimate estimate_below_probability(const ValidatedModel& m, double x, const SimConfig& cfg) {
  const auto paths = simulate_occupation(m, x, cfg);
  std::vector<double> v(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) v[i] = paths[i].terminal < m.b() ? 1.0 : 0.0;
  return summarize(v);
}

SimEstimate estimate_exit(const ValidatedModel& m, double q, double level, ExitDirection direction, double s,
                          SimConfig cfg) {
  cfg.horizon = HorizonKind::exponential;
  cfg.horizon_value = q;
  check_config(cfg);
  const auto& lv = m.levy();
  const JumpSampler jumps(lv);
  double drift = lv.mu - m.alpha();
  double target = level;
  const JumpSampler* sampler = &jumps;
  JumpSampler mirror = jumps.mirrored();
  if (direction == ExitDirection::up_Y) {
    if (level < 0.0) throw NumericalError(ErrorCode::InvalidArgument, "upward level must be >= 0");
  } else {
    if (level > 0.0) throw NumericalError(ErrorCode::InvalidArgument, "downward level must be <= 0");
    // Passage of X below level is passage of -X above -level.
    drift = -lv.mu;
    target = -level;
    sampler = &mirror;
  }
  const double sigma = lv.sigma;
  const auto values = run_paths(cfg.n_paths, cfg.seed, cfg.execution, [&](Rng& rng) {
    return exit_path(drift, sigma, *sampler, target, q, s, rng);
  });
  return summarize(values);
}

}  // namespace occtime
