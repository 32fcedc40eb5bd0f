#pragma once

#include "curlforge/core.hpp"
#include "curlforge/trajectory.hpp"

namespace curlforge {

/// Contact Hamiltonian in Darboux coordinates (q, p, z), sigma = dz - p dq.
struct ContactSystem {
  Index n = 0;
  ScalarField hamiltonian;  // over the flattened (q, p, z)
};

/// Herglotz Lagrangian L(q, qdot, z, t) over the flattened (q, qdot, z).
struct HerglotzLagrangian {
  Index n = 0;
  ScalarField lagrangian;
};

class IrregularLagrangian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// qdot = dH/dp, pdot = -dH/dq - p dH/dz, zdot = p.dH/dp - H.
Vector contact_vector_field(const ContactSystem& sys, const Vector& state, double t);

/// dH/dt = -H dH/dz along the contact flow.
double contact_energy_rate(const ContactSystem& sys, const Vector& state, double t);

/// I(t_k) = H(t_k) exp(int_0^t_k dH/dz), the integral by the trapezoid rule on
/// the trajectory grid.
std::vector<double> herglotz_invariant_series(const ContactSystem& sys, const Trajectory& traj);

/// Max-norm of dL/dq - d/dt dL/dqdot + dL/dz dL/dqdot at each interior sample.
/// The result has path.size() - 2 entries (endpoints are excluded).
std::vector<double> herglotz_el_residual(const HerglotzLagrangian& lag,
                                         const LagrangianPath& path);

/// Configuration path of a contact trajectory, qdot = dH/dp at each sample.
LagrangianPath contact_path(const ContactSystem& sys, const Trajectory& traj);

/// H(q, p, z, t) = p.qdot(p) - L for Lagrangians quadratic in qdot with a
/// constant invertible velocity Hessian.
ContactSystem legendre_map(const HerglotzLagrangian& lag);

/// L(q, qdot, z, t) = p(qdot).qdot - H for Hamiltonians quadratic in p with a
/// constant invertible momentum Hessian.
HerglotzLagrangian inverse_legendre_map(const ContactSystem& sys);

/// det of the velocity Hessian at a point (unit-step second differences, exact
/// for quadratic velocity dependence).
double velocity_hessian_determinant(const HerglotzLagrangian& lag, const Vector& point,
                                    double t = 0.0);

}  // namespace curlforge
