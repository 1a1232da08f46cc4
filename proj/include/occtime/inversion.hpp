#pragma once

#include "occtime/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace occtime {

enum class InversionMethod { gaver_stehfest, talbot };

struct InversionConfig {
  InversionMethod method = InversionMethod::gaver_stehfest;
  int order = 14;         ///< Gaver-Stehfest order: even, 8..20
  int talbot_terms = 24;  ///< fixed Talbot nodes, >= 16
  std::vector<double> t_grid;
};

/// Throws InvalidArgument when the configuration breaks its invariants.
void check_config(const InversionConfig& cfg);

struct InversionResult {
  std::vector<double> t;
  std::vector<double> values;
  /// |f_N - f_{N-2}| for Gaver-Stehfest, |f_M - f_{M-4}| for Talbot.
  std::vector<double> residuals;
  InversionMethod method_used = InversionMethod::gaver_stehfest;
  std::vector<std::string> warnings;
};

/// Gaver-Stehfest inversion of a real transform at t > 0 with weights and
/// summation in 50-digit arithmetic. Optionally reports |f_N - f_{N-2}|.
/// Throws InversionUnstable when the last two orders disagree grossly.
double gaver_stehfest(const std::function<double(double)>& transform, double t, int order,
                      double* residual = nullptr);

/// Fixed-Talbot inversion (Abate-Valko contour) with M nodes.
double talbot(const std::function<Complex(Complex)>& transform, double t, int terms);

/// Inverts on cfg.t_grid; Talbot failures of any kind fall back to
/// Gaver-Stehfest with a warning.
InversionResult invert_transform(const std::function<double(double)>& real_transform,
                                 const std::function<Complex(Complex)>& complex_transform,
                                 const InversionConfig& cfg);

/// t -> E_x[time below b during [0, t]].
InversionResult invert_occupation(const ValidatedModel& m, double x, const InversionConfig& cfg);

/// c * E_x[time below b during [0, T]] for each T in cfg.t_grid.
InversionResult fee_expectation(const ValidatedModel& m, double x, double fee_rate, const InversionConfig& cfg);

}  // namespace occtime
