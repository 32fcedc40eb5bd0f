#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curlforge/system.hpp"
#include "curlforge/trajectory.hpp"

namespace curlforge {

/// A Runge-Kutta stage or the integrated state became non-finite.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time, std::size_t last_finite_index)
      : std::runtime_error(what), time_(time), last_finite_index_(last_finite_index) {}

  /// Start time of the failing step.
  double time() const { return time_; }
  /// Index of the last finite sample in the partial trajectory.
  std::size_t last_finite_index() const { return last_finite_index_; }

 private:
  double time_;
  std::size_t last_finite_index_;
};

/// Classical four-stage Runge-Kutta step.
Vector rk4_step(const VectorField& rhs, const Vector& x, double t, double dt);

/// Number of steps on [t0, t1] with nominal step dt; the last step may be short.
std::size_t step_count(double t0, double t1, double dt);

Trajectory integrate(const VectorField& rhs, const Vector& x0, double t0, double t1, double dt);

Trajectory integrate(const SystemDefinition& sys, const Vector& x0, double t0, double t1,
                     double dt);

/// Runs fn(0) .. fn(count - 1) on up to `threads` workers (0 picks the hardware
/// concurrency). Results are stored by index, so ordering never depends on
/// scheduling. The first exception by index is rethrown after all jobs finish.
template <class Result>
std::vector<Result> parallel_indexed(std::size_t count,
                                     const std::function<Result(std::size_t)>& fn,
                                     unsigned threads = 0);

struct IntegrationJob {
  const SystemDefinition* system = nullptr;
  Vector x0;
  double t0 = 0.0;
  double t1 = 10.0;
  double dt = 1e-3;
};

std::vector<Trajectory> integrate_many(const std::vector<IntegrationJob>& jobs,
                                       unsigned threads = 0);

}  // namespace curlforge

#include "curlforge/detail/parallel.hpp"
