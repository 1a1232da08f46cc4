#include "cli/model_file.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace occtime::cli {

namespace {

double number(const YAML::Node& n, const std::string& where) {
  if (!n || !n.IsScalar()) throw ModelFileError(where + ": expected a number");
  const std::string& s = n.Scalar();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) throw ModelFileError(where + ": '" + s + "' is not a number");
  return v;
}

double number_or(const YAML::Node& parent, const char* key, double fallback, const std::string& where) {
  const YAML::Node n = parent[key];
  return n ? number(n, where + "." + key) : fallback;
}

Complex complex_value(const YAML::Node& n, const std::string& where) {
  if (n && n.IsSequence()) {
    if (n.size() != 2) throw ModelFileError(where + ": complex values are [re, im] pairs");
    return {number(n[0], where + "[0]"), number(n[1], where + "[1]")};
  }
  return number(n, where);
}

RationalJumpDensity density(const YAML::Node& list, JumpSide side, const std::string& where) {
  RationalJumpDensity d{side, {}};
  if (!list) return d;
  if (!list.IsSequence()) throw ModelFileError(where + ": expected a list of terms");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const YAML::Node t = list[k];
    const std::string w = where + "[" + std::to_string(k) + "]";
    if (!t.IsMap()) throw ModelFileError(w + ": expected a map");
    ErlangTerm term;
    term.rate = {number(t["rate_re"], w + ".rate_re"), number_or(t, "rate_im", 0.0, w)};
    const YAML::Node cs = t["coeffs"];
    if (!cs || !cs.IsSequence() || cs.size() == 0) throw ModelFileError(w + ".coeffs: expected a nonempty list");
    for (std::size_t j = 0; j < cs.size(); ++j) {
      term.coeffs.push_back(complex_value(cs[j], w + ".coeffs[" + std::to_string(j) + "]"));
    }
    d.terms.push_back(std::move(term));
  }
  return d;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

void emit_density(std::ostringstream& os, const char* name, const RationalJumpDensity& d) {
  os << "  " << name << ":";
  if (d.terms.empty()) {
    os << " []\n";
    return;
  }
  os << "\n";
  for (const auto& t : d.terms) {
    os << "    - rate_re: " << num(t.rate.real()) << "\n";
    os << "      rate_im: " << num(t.rate.imag()) << "\n";
    os << "      coeffs: [";
    for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
      if (j) os << ", ";
      os << "[" << num(t.coeffs[j].real()) << ", " << num(t.coeffs[j].imag()) << "]";
    }
    os << "]\n";
  }
}

}  // namespace

RefractedModel parse_model(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ModelFileError(std::string("YAML parse error: ") + e.what());
  }
  if (!root.IsMap()) throw ModelFileError("model file must be a map");
  const YAML::Node proc = root["process"];
  if (!proc || !proc.IsMap()) throw ModelFileError("missing 'process' section");

  RefractedModel m;
  m.base.mu = number(proc["mu"], "process.mu");
  m.base.sigma = number(proc["sigma"], "process.sigma");
  m.base.lambda_plus = number_or(proc, "lambda_plus", 0.0, "process");
  m.base.lambda_minus = number_or(proc, "lambda_minus", 0.0, "process");
  const YAML::Node jumps = root["jumps"];
  if (jumps) {
    if (!jumps.IsMap()) throw ModelFileError("'jumps' must be a map with 'up' and 'down'");
    m.base.jumps_up = density(jumps["up"], JumpSide::positive, "jumps.up");
    m.base.jumps_down = density(jumps["down"], JumpSide::negative, "jumps.down");
  }
  const YAML::Node refr = root["refraction"];
  if (refr) {
    if (!refr.IsMap()) throw ModelFileError("'refraction' must be a map");
    m.alpha = number_or(refr, "alpha", 0.0, "refraction");
    m.b = number_or(refr, "b", 0.0, "refraction");
  }
  return m;
}

RefractedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string emit_model(const RefractedModel& m) {
  std::ostringstream os;
  os << "process:\n";
  os << "  mu: " << num(m.base.mu) << "\n";
  os << "  sigma: " << num(m.base.sigma) << "\n";
  os << "  lambda_plus: " << num(m.base.lambda_plus) << "\n";
  os << "  lambda_minus: " << num(m.base.lambda_minus) << "\n";
  os << "jumps:\n";
  emit_density(os, "up", m.base.jumps_up);
  emit_density(os, "down", m.base.jumps_down);
  os << "refraction:\n";
  os << "  alpha: " << num(m.alpha) << "\n";
  os << "  b: " << num(m.b) << "\n";
  return os.str();
}

}  // namespace occtime::cli
