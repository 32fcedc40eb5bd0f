#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curlforge/trajectory.hpp"

namespace curlforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Everything needed to reproduce a simulate run.
struct RunManifest {
  std::string system;
  ParamMap params;
  std::string potential;
  std::vector<double> x0;
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  std::vector<std::string> outputs;
  std::string version;
  std::string timestamp;  // ISO 8601, UTC

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);

  bool operator==(const RunManifest&) const = default;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// CSV with header t,x,y,p_x,p_y[,z], one row per sample.
void write_csv(std::ostream& os, const Trajectory& traj);

/// Entry point shared by the executable and the tests. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curlforge::cli
