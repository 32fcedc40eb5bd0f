#pragma once

#include <map>
#include <string>
#include <vector>

#include "curlforge/core.hpp"

namespace curlforge {

using ParamMap = std::map<std::string, double>;

/// Uniformly sampled flattened states. The final step may be shorter so the
/// last sample lands exactly on the requested end time.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::string system_name;
  ParamMap params;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double step() const { return times.size() < 2 ? 0.0 : times[1] - times[0]; }
};

/// Configuration-space samples (q, qdot, z) on a uniform time grid, the input
/// of the Euler-Lagrange residual operators. z is empty when unused.
struct LagrangianPath {
  std::vector<double> times;
  std::vector<Vector> q;
  std::vector<Vector> qdot;
  std::vector<double> z;

  std::size_t size() const { return times.size(); }
};

/// Central difference on a uniform grid; one-sided second-order at the ends.
std::vector<Vector> grid_derivative(const std::vector<Vector>& samples, double dt);

}  // namespace curlforge
