#pragma once

#include <string>
#include <vector>

#include "gmetric/point.hpp"

namespace gmetric {

/// A concrete counterexample: the points it was found at and both sides of
/// the relation that failed there.
struct Witness {
  std::string relation;
  std::vector<Point> points;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Outcome of checking one sample against one property.
struct Probe {
  enum class Status { ok, skipped, violated };
  Status status = Status::ok;
  double excess = 0.0;  // lhs - rhs - tolerance; > 0 on violation
  Witness witness;

  static Probe ok(double ex) { return Probe{Status::ok, ex, {}}; }
  static Probe skipped() { return Probe{Status::skipped, 0.0, {}}; }
};

}  // namespace gmetric
