#include "curlforge/galley.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curlforge {

namespace {

constexpr double kComplexStep = 1e-30;

void require_state(const GalleySystem& sys, const Vector& state) {
  if (state.size() != 2 * sys.n) {
    std::ostringstream msg;
    msg << "galley state must have " << 2 * sys.n << " coordinates, got " << state.size();
    throw DimensionError(msg.str());
  }
}

Vector map_or_zero(const PhysicalLimitMap& f, Index n, const Vector& q, const Vector& p,
                   double t) {
  if (!f) return Vector::Zero(n);
  Vector v = f(q, p, t);
  if (v.size() != n) throw DimensionError("physical-limit map returned wrong dimension");
  return v;
}

}  // namespace

GalleySystem GalleySystem::from_potential(Index n, ScalarField hamiltonian,
                                          NonconservativePotential k,
                                          bool require_antisymmetry) {
  if (require_antisymmetry) {
    const double defect = relabel_antisymmetry_defect(k, n);
    if (defect > 1e-12) {
      std::ostringstream msg;
      msg << "K is not antisymmetric under relabelling the histories (defect " << defect << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  // Complex-step derivative in the minus slots at q- = p- = 0.
  auto minus_derivative = [n, k](bool momentum_slot) {
    return [n, k, momentum_slot](const Vector& q, const Vector& p, double t) {
      const ComplexVector qp = q.cast<std::complex<double>>();
      const ComplexVector pp = p.cast<std::complex<double>>();
      Vector out(n);
      for (Index i = 0; i < n; ++i) {
        ComplexVector qm = ComplexVector::Zero(n);
        ComplexVector pm = ComplexVector::Zero(n);
        (momentum_slot ? pm : qm)[i] = std::complex<double>(0.0, kComplexStep);
        out[i] = k(qp, qm, pp, pm, t).imag() / kComplexStep;
      }
      return out;
    };
  };
  GalleySystem sys;
  sys.n = n;
  sys.hamiltonian = std::move(hamiltonian);
  sys.dk_dq_minus = minus_derivative(false);
  sys.dk_dp_minus = minus_derivative(true);
  return sys;
}

PlusMinus plus_minus_transform(const Vector& q1, const Vector& q2) {
  if (q1.size() != q2.size()) throw DimensionError("plus_minus_transform: dimension mismatch");
  return {q1 - q2, 0.5 * (q1 + q2)};
}

std::pair<Vector, Vector> plus_minus_inverse(const PlusMinus& pm) {
  if (pm.minus.size() != pm.plus.size()) {
    throw DimensionError("plus_minus_inverse: dimension mismatch");
  }
  return {pm.plus + 0.5 * pm.minus, pm.plus - 0.5 * pm.minus};
}

Vector galley_rhs(const GalleySystem& sys, const Vector& state, double t) {
  require_state(sys, state);
  const Index n = sys.n;
  const Vector q = state.head(n);
  const Vector p = state.tail(n);
  const Vector g = sys.hamiltonian.gradient(state, t);
  Vector out(2 * n);
  out.head(n) = g.tail(n) - map_or_zero(sys.dk_dp_minus, n, q, p, t);
  out.tail(n) = -g.head(n) + map_or_zero(sys.dk_dq_minus, n, q, p, t);
  return out;
}

std::vector<double> galley_el_residual(const ScalarField& lagrangian, const GalleySystem& sys,
                                       const LagrangianPath& path) {
  const std::size_t m = path.size();
  if (m < 3) throw std::invalid_argument("galley_el_residual: fewer than 3 samples");
  const Index n = sys.n;
  const double dt = path.times[1] - path.times[0];
  std::vector<Vector> grads(m);
  std::vector<Vector> conjugate(m);  // dL/dqdot + [dK/dqdot-]_PL
  for (std::size_t k = 0; k < m; ++k) {
    Vector x(2 * n);
    x.head(n) = path.q[k];
    x.tail(n) = path.qdot[k];
    grads[k] = lagrangian.gradient(x, path.times[k]);
    const Vector p = grads[k].tail(n);
    conjugate[k] = p + map_or_zero(sys.dk_dqdot_minus, n, path.q[k], p, path.times[k]);
  }
  std::vector<double> residual;
  residual.reserve(m - 2);
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const Vector p = grads[k].tail(n);
    const Vector lhs = (conjugate[k + 1] - conjugate[k - 1]) / (2.0 * dt);
    const Vector rhs = grads[k].head(n) + map_or_zero(sys.dk_dq_minus, n, path.q[k], p,
                                                      path.times[k]);
    residual.push_back((lhs - rhs).cwiseAbs().maxCoeff());
  }
  return residual;
}

std::vector<double> galley_el_residual(const ScalarField& lagrangian, const GalleySystem& sys,
                                       const Trajectory& traj) {
  LagrangianPath path;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& s = traj.states[k];
    path.times.push_back(traj.times[k]);
    path.q.push_back(s.head(sys.n));
    path.qdot.push_back(galley_rhs(sys, s, traj.times[k]).head(sys.n));
  }
  return galley_el_residual(lagrangian, sys, path);
}

double galley_energy_rate(const GalleySystem& sys, const Vector& state, const Vector& velocity,
                          double t) {
  require_state(sys, state);
  const Index n = sys.n;
  if (velocity.size() != n) throw DimensionError("galley_energy_rate: velocity dimension");
  const Vector q = state.head(n);
  const Vector p = state.tail(n);
  const Vector kq = map_or_zero(sys.dk_dq_minus, n, q, p, t);
  const Vector kp = map_or_zero(sys.dk_dp_minus, n, q, p, t);
  double rate = velocity.dot(kq);
  if (sys.dk_dp_minus) {
    // Exact for qdot = dH/dp - [dK/dp-]_PL.
    const Vector dh_dq = sys.hamiltonian.gradient(state, t).head(n);
    rate += kp.dot(kq) - dh_dq.dot(kp);
  }
  if (sys.dk_dqdot_minus) {
    // d/dt [dK/dqdot-]_PL along (qdot, pdot).
    const Vector pdot = galley_rhs(sys, state, t).tail(n);
    const double h = default_step(state);
    const Vector ahead = sys.dk_dqdot_minus(q + h * velocity, p + h * pdot, t + h);
    const Vector behind = sys.dk_dqdot_minus(q - h * velocity, p - h * pdot, t - h);
    rate -= velocity.dot((ahead - behind) / (2.0 * h));
  }
  return rate;
}

double relabel_antisymmetry_defect(const NonconservativePotential& k, Index n,
                                   std::size_t probes) {
  double worst = 0.0;
  for (const Vector& x : probe_set(4 * n, probes)) {
    const ComplexVector qp = x.segment(0, n).cast<std::complex<double>>();
    const ComplexVector qm = x.segment(n, n).cast<std::complex<double>>();
    const ComplexVector pp = x.segment(2 * n, n).cast<std::complex<double>>();
    const ComplexVector pm = x.segment(3 * n, n).cast<std::complex<double>>();
    const double t = x[0];
    const double direct = k(qp, qm, pp, pm, t).real();
    const double swapped = k(qp, -qm, pp, -pm, t).real();
    worst = std::max(worst, std::abs(direct + swapped) / std::max(1.0, std::abs(direct)));
  }
  return worst;
}

double k_consistency_defect(const GalleySystem& sys, const NonconservativePotential& k,
                            std::size_t probes) {
  const Index n = sys.n;
  double worst = 0.0;
  for (const Vector& x : probe_set(2 * n, probes)) {
    const Vector q = x.head(n);
    const Vector p = x.tail(n);
    const double t = 0.25;
    const ComplexVector qc = q.cast<std::complex<double>>();
    const ComplexVector pc = p.cast<std::complex<double>>();
    const double h = 1e-6;
    Vector dq(n);
    Vector dp(n);
    for (Index i = 0; i < n; ++i) {
      ComplexVector e = ComplexVector::Zero(n);
      e[i] = h;
      const ComplexVector zero = ComplexVector::Zero(n);
      dq[i] = (k(qc, e, pc, zero, t).real() - k(qc, -e, pc, zero, t).real()) / (2.0 * h);
      dp[i] = (k(qc, zero, pc, e, t).real() - k(qc, zero, pc, -e, t).real()) / (2.0 * h);
    }
    worst = std::max(worst, (dq - map_or_zero(sys.dk_dq_minus, n, q, p, t)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (dp - map_or_zero(sys.dk_dp_minus, n, q, p, t)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace curlforge
