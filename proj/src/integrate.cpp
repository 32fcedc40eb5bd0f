#include "curlforge/integrate.hpp"

#include <cmath>
#include <sstream>

namespace curlforge {

namespace {

class StageBlowUp : public std::exception {};

Vector checked(const Vector& v) {
  if (!v.allFinite()) throw StageBlowUp();
  return v;
}

std::string blow_up_message(double t) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "blow-up at t = " << t;
  return msg.str();
}

}  // namespace

Vector rk4_step(const VectorField& rhs, const Vector& x, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  try {
    const Vector k1 = checked(rhs(x, t));
    const Vector k2 = checked(rhs(x + 0.5 * dt * k1, t + 0.5 * dt));
    const Vector k3 = checked(rhs(x + 0.5 * dt * k2, t + 0.5 * dt));
    const Vector k4 = checked(rhs(x + dt * k3, t + dt));
    return checked(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  } catch (const StageBlowUp&) {
    throw IntegrationError(blow_up_message(t), t, 0);
  } catch (const EvaluationDomainError&) {
    throw IntegrationError(blow_up_message(t), t, 0);
  }
}

std::size_t step_count(double t0, double t1, double dt) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw std::invalid_argument("integrate: requires finite t1 > t0");
  }
  if (!(dt > 0.0) || dt > (t1 - t0) * (1.0 + 1e-12)) {
    throw std::invalid_argument("integrate: requires 0 < dt <= t1 - t0");
  }
  // Ratios a few ulps above an integer (10 / 1e-3) must not add a sliver step.
  const double ratio = (t1 - t0) / dt;
  return static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

Trajectory integrate(const VectorField& rhs, const Vector& x0, double t0, double t1, double dt) {
  const std::size_t steps = step_count(t0, t1, dt);
  if (!x0.allFinite()) throw std::invalid_argument("integrate: initial state is not finite");
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = traj.times.back();
    const double t_next = (k + 1 == steps) ? t1 : t0 + static_cast<double>(k + 1) * dt;
    try {
      traj.states.push_back(rk4_step(rhs, traj.states.back(), t, t_next - t));
    } catch (const IntegrationError&) {
      throw IntegrationError(blow_up_message(t), t, k);
    }
    traj.times.push_back(t_next);
  }
  return traj;
}

Trajectory integrate(const SystemDefinition& sys, const Vector& x0, double t0, double t1,
                     double dt) {
  if (x0.size() != sys.dim) {
    std::ostringstream msg;
    msg << sys.name << " expects an initial state of dimension " << sys.dim << ", got "
        << x0.size();
    throw DimensionError(msg.str());
  }
  Trajectory traj = integrate(sys.rhs, x0, t0, t1, dt);
  traj.system_name = sys.name;
  traj.params = sys.params;
  return traj;
}

std::vector<Trajectory> integrate_many(const std::vector<IntegrationJob>& jobs, unsigned threads) {
  return parallel_indexed<Trajectory>(
      jobs.size(),
      [&](std::size_t i) {
        const IntegrationJob& job = jobs[i];
        if (job.system == nullptr) throw std::invalid_argument("integrate_many: null system");
        return integrate(*job.system, job.x0, job.t0, job.t1, job.dt);
      },
      threads);
}

}  // namespace curlforge
