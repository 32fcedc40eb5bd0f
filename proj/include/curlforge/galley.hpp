#pragma once

#include <complex>

#include "curlforge/core.hpp"
#include "curlforge/trajectory.hpp"

namespace curlforge {

using ComplexVector = Eigen::VectorXcd;

/// Full nonconservative potential K(q+, q-, p+, p-, t). It takes complex
/// arguments so that its physical-limit derivatives can be taken by complex
/// step; it must be real for real arguments.
using NonconservativePotential = std::function<std::complex<double>(
    const ComplexVector& q_plus, const ComplexVector& q_minus, const ComplexVector& p_plus,
    const ComplexVector& p_minus, double t)>;

/// A covector-valued function of the single-copy (q, p, t) at the physical limit.
using PhysicalLimitMap = std::function<Vector(const Vector& q, const Vector& p, double t)>;

/// Doubled-variable system reduced to its physical limit q- -> 0, q+ -> q.
/// Only the physical-limit derivatives of K are stored.
struct GalleySystem {
  Index n = 0;
  ScalarField hamiltonian;      // over the flattened single-copy (q, p)
  PhysicalLimitMap dk_dq_minus;  // [dK/dq-]_PL
  PhysicalLimitMap dk_dp_minus;  // [dK/dp-]_PL; empty means zero
  PhysicalLimitMap dk_dqdot_minus;  // [dK/dqdot-]_PL; empty means zero

  /// Differentiates K at the physical limit once. Throws std::invalid_argument
  /// when K is not antisymmetric under the relabelling q1 <-> q2 (unless the
  /// check is disabled).
  static GalleySystem from_potential(Index n, ScalarField hamiltonian,
                                     NonconservativePotential k,
                                     bool require_antisymmetry = true);
};

struct PlusMinus {
  Vector minus;  // q1 - q2
  Vector plus;   // (q1 + q2) / 2
};

PlusMinus plus_minus_transform(const Vector& q1, const Vector& q2);

/// Inverse of plus_minus_transform: returns (q1, q2).
std::pair<Vector, Vector> plus_minus_inverse(const PlusMinus& pm);

/// qdot = dH/dp - [dK/dp-]_PL, pdot = -dH/dq + [dK/dq-]_PL.
Vector galley_rhs(const GalleySystem& sys, const Vector& state, double t);

/// Max-norm of d/dt(dL/dqdot + [dK/dqdot-]_PL) - dL/dq - [dK/dq-]_PL at each
/// interior sample, with p = dL/dqdot fed to the K maps. L is a field over the
/// flattened (q, qdot).
std::vector<double> galley_el_residual(const ScalarField& lagrangian, const GalleySystem& sys,
                                       const LagrangianPath& path);

/// Same, with qdot taken from the galley_rhs position equation at each sample.
std::vector<double> galley_el_residual(const ScalarField& lagrangian, const GalleySystem& sys,
                                       const Trajectory& traj);

/// Rate of change of H along the flow, evaluated from the nonconservative
/// terms and the supplied velocity:
///   dH/dt = qdot.[dK/dq- - d/dt dK/dqdot-]_PL  (for K independent of p-)
/// plus the exact correction when [dK/dp-]_PL is nonzero.
double galley_energy_rate(const GalleySystem& sys, const Vector& state, const Vector& velocity,
                          double t);

/// max over probes of |K(swap) + K| / max(1, |K|), where swap exchanges the two
/// histories (q-, p- -> -q-, -p-).
double relabel_antisymmetry_defect(const NonconservativePotential& k, Index n,
                                   std::size_t probes = 32);

/// max over probes of the difference between central-difference derivatives of
/// K at q- = p- = 0 and the stored physical-limit maps.
double k_consistency_defect(const GalleySystem& sys, const NonconservativePotential& k,
                            std::size_t probes = 32);

}  // namespace curlforge
