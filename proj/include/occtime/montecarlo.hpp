#pragma once

#include "occtime/exp_poly.hpp"
#include "occtime/firstpassage.hpp"
#include "occtime/model.hpp"

#include <cstdint>
#include <vector>

namespace occtime {

enum class HorizonKind { fixed, exponential };

struct SimConfig {
  double dt = 1e-3;  ///< Euler step used within reach of the level
  std::size_t n_paths = 100000;
  std::uint64_t seed = 20240601;
  HorizonKind horizon = HorizonKind::exponential;
  double horizon_value = 0.1;  ///< T for fixed, q for exponential
  Execution execution = Execution::parallel;
};

struct PathSample {
  double occupation;  ///< time spent strictly below b
  double terminal;    ///< U at the horizon
  double horizon;     ///< length of the simulated horizon
};

struct SimEstimate {
  double mean;
  double std_error;  ///< one standard error
  std::size_t n_paths;
};

/// Simulates U from x up to the horizon of cfg. Requires real, nonnegative
/// Erlang-mixture jump densities (UnsampleableDensity otherwise).
/// Path i uses its own generator seeded from (seed, i), so the serial and
/// parallel runs give identical samples.
std::vector<PathSample> simulate_occupation(const ValidatedModel& m, double x, const SimConfig& cfg);

/// E_x[exp(-p * time below b up to e(q))]; cfg.horizon is forced to e(q).
SimEstimate estimate_V(const ValidatedModel& m, double x, double p, double q, SimConfig cfg);
/// E_x[time below b up to the configured horizon].
SimEstimate estimate_occupation(const ValidatedModel& m, double x, const SimConfig& cfg);
/// P_x(U at the configured horizon < b).
SimEstimate estimate_below_probability(const ValidatedModel& m, double x, const SimConfig& cfg);

/// E[exp(-q tau - s * overshoot)] for Y = X - alpha t crossing level >= 0
/// (up_Y) or X crossing level <= 0 (down_X), both started at 0. Diffusive
/// crossings between grid points are detected with the exact Brownian-bridge
/// probability, so the estimator carries no time-discretisation bias.
SimEstimate estimate_exit(const ValidatedModel& m, double q, double level, ExitDirection direction, double s,
                          SimConfig cfg);

/// Mean and standard error of a sample, reduced in index order.
SimEstimate summarize(const std::vector<double>& values);

/// Mixes (seed, stream) into a 64-bit generator seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace occtime
