#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace cutlab {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bound magnitudes at or beyond this sentinel are treated as infinite by the
// LP layer; the data model keeps true infinities.
constexpr double kBoundInf = 1e20;

inline bool is_finite_bound(double v) { return v > -kBoundInf && v < kBoundInf; }

// Solver tolerances. Shared across modules so that "integral", "feasible"
// and "violated" mean the same thing everywhere.
struct Tols {
  static constexpr double feas = 1e-7;
  static constexpr double dual = 1e-7;
  static constexpr double pivot = 1e-9;
  static constexpr double integrality = 1e-6;
  static constexpr double violation = 1e-6;
  static constexpr double tie = 1e-9;
};

struct CutlabError : std::runtime_error {
  explicit CutlabError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidInstance : CutlabError {
  using CutlabError::CutlabError;
};

struct ParseError : CutlabError {
  int line;
  ParseError(int line_, const std::string& reason)
      : CutlabError("parse error at line " + std::to_string(line_) + ": " + reason),
        line(line_) {}
};

struct UnsupportedMpsFeature : CutlabError {
  std::string feature;
  explicit UnsupportedMpsFeature(const std::string& name)
      : CutlabError("unsupported MPS feature: " + name), feature(name) {}
};

struct NumericalBreakdown : CutlabError {
  using CutlabError::CutlabError;
};

}  // namespace cutlab
