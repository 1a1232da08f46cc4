#pragma once

#include "occtime/model.hpp"

#include <stdexcept>
#include <string>

namespace occtime::cli {

/// Malformed or unreadable model file (a usage problem, not a model violation).
class ModelFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a YAML model file:
///
///   process:    {mu: 0.1, sigma: 0.2, lambda_plus: 1, lambda_minus: 1}
///   jumps:
///     up:   [{rate_re: 2, rate_im: 0, coeffs: [1]}]
///     down: [{rate_re: 3, coeffs: [[1, 0]]}]
///   refraction: {alpha: 0.05, b: 0}
///
/// Coefficients are listed by Erlang order; each is a number or a [re, im] pair.
/// Missing rate_im, jump sections and refraction entries default to 0.
RefractedModel parse_model(const std::string& yaml_text);
RefractedModel load_model(const std::string& path);

/// Canonical YAML of a model (17 significant digits), readable by parse_model.
std::string emit_model(const RefractedModel& m);

}  // namespace occtime::cli
