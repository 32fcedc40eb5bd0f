#include "curlforge/contact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curlforge {

namespace {

void require_contact_state(const ContactSystem& sys, const Vector& state) {
  if (state.size() == 2 * sys.n) {
    throw DimensionError("contact state is missing the z coordinate");
  }
  if (state.size() != 2 * sys.n + 1) {
    std::ostringstream msg;
    msg << "contact state must have " << 2 * sys.n + 1 << " coordinates, got " << state.size();
    throw DimensionError(msg.str());
  }
}

// Second-order data of a function f(q, w, z) in the fiber block w = x[n .. 2n).
// Unit-step stencils are exact when f is at most quadratic in w.
struct FiberQuadratic {
  Matrix hessian;
  Vector linear;  // df/dw at w = 0
};

FiberQuadratic fiber_quadratic(const ScalarField& f, Index n, const Vector& point, double t,
                               bool about_zero_fiber = true) {
  Vector base = point;
  if (about_zero_fiber) base.segment(n, n).setZero();
  FiberQuadratic out{Matrix(n, n), Vector(n)};
  const double f0 = f(base, t);
  auto at = [&](Index i, double di, Index j, double dj) {
    Vector x = base;
    x[n + i] += di;
    if (j >= 0) x[n + j] += dj;
    return f(x, t);
  };
  for (Index i = 0; i < n; ++i) {
    const double fp = at(i, 1.0, -1, 0.0);
    const double fm = at(i, -1.0, -1, 0.0);
    out.linear[i] = 0.5 * (fp - fm);
    out.hessian(i, i) = fp - 2.0 * f0 + fm;
    for (Index j = 0; j < i; ++j) {
      const double mixed =
          0.25 * (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) +
                  at(i, -1.0, j, -1.0));
      out.hessian(i, j) = mixed;
      out.hessian(j, i) = mixed;
    }
  }
  return out;
}

// Checks that the fiber Hessian is constant over a few probe points and
// invertible; returns it.
Matrix constant_fiber_hessian(const ScalarField& f, Index n, const char* what) {
  const Index dim = 2 * n + 1;
  const Matrix ref = fiber_quadratic(f, n, Vector::Zero(dim), 0.0).hessian;
  const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
  for (const Vector& probe : probe_set(dim, 4, kDefaultProbeSeed, 2.0)) {
    const Matrix other = fiber_quadratic(f, n, probe, 0.37, false).hessian;
    if ((other - ref).cwiseAbs().maxCoeff() > 1e-8 * scale) {
      throw IrregularLagrangian(std::string("irregular Lagrangian: ") + what +
                                " Hessian is not constant (outside the quadratic class)");
    }
  }
  Eigen::FullPivLU<Matrix> lu(ref);
  if (!lu.isInvertible() || std::abs(ref.determinant()) <= 1e-10) {
    throw IrregularLagrangian(std::string("irregular Lagrangian: ") + what +
                              " Hessian is not invertible");
  }
  return ref;
}

}  // namespace

Vector contact_vector_field(const ContactSystem& sys, const Vector& state, double t) {
  require_contact_state(sys, state);
  const Index n = sys.n;
  const Vector g = sys.hamiltonian.gradient(state, t);
  const double h = sys.hamiltonian(state, t);
  const auto p = state.segment(n, n);
  const auto dh_dq = g.head(n);
  const auto dh_dp = g.segment(n, n);
  const double dh_dz = g[2 * n];
  Vector out(2 * n + 1);
  out.head(n) = dh_dp;
  out.segment(n, n) = -dh_dq - dh_dz * p;
  out[2 * n] = p.dot(dh_dp) - h;
  return out;
}

double contact_energy_rate(const ContactSystem& sys, const Vector& state, double t) {
  require_contact_state(sys, state);
  const Vector g = sys.hamiltonian.gradient(state, t);
  return -sys.hamiltonian(state, t) * g[2 * sys.n];
}

std::vector<double> herglotz_invariant_series(const ContactSystem& sys, const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("herglotz_invariant_series: empty trajectory");
  std::vector<double> out;
  out.reserve(traj.size());
  double integral = 0.0;
  double prev_rate = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& s = traj.states[k];
    require_contact_state(sys, s);
    const double rate = sys.hamiltonian.gradient(s, traj.times[k])[2 * sys.n];
    if (k > 0) integral += 0.5 * (rate + prev_rate) * (traj.times[k] - traj.times[k - 1]);
    prev_rate = rate;
    out.push_back(sys.hamiltonian(s, traj.times[k]) * std::exp(integral));
  }
  return out;
}

std::vector<double> herglotz_el_residual(const HerglotzLagrangian& lag,
                                         const LagrangianPath& path) {
  const std::size_t m = path.size();
  if (m < 3) throw std::invalid_argument("herglotz_el_residual: fewer than 3 samples");
  if (path.q.size() != m || path.qdot.size() != m) {
    throw DimensionError("herglotz_el_residual: path arrays differ in length");
  }
  const Index n = lag.n;
  const double dt = path.times[1] - path.times[0];
  std::vector<Vector> momentum(m);
  std::vector<Vector> gradients(m);
  for (std::size_t k = 0; k < m; ++k) {
    Vector x(2 * n + 1);
    x.head(n) = path.q[k];
    x.segment(n, n) = path.qdot[k];
    x[2 * n] = path.z.empty() ? 0.0 : path.z[k];
    gradients[k] = lag.lagrangian.gradient(x, path.times[k]);
    momentum[k] = gradients[k].segment(n, n);
  }
  std::vector<double> residual;
  residual.reserve(m - 2);
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const Vector dmomentum = (momentum[k + 1] - momentum[k - 1]) / (2.0 * dt);
    const Vector r =
        gradients[k].head(n) - dmomentum + gradients[k][2 * n] * momentum[k];
    residual.push_back(r.cwiseAbs().maxCoeff());
  }
  return residual;
}

LagrangianPath contact_path(const ContactSystem& sys, const Trajectory& traj) {
  LagrangianPath path;
  const Index n = sys.n;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& s = traj.states[k];
    require_contact_state(sys, s);
    path.times.push_back(traj.times[k]);
    path.q.push_back(s.head(n));
    path.qdot.push_back(sys.hamiltonian.gradient(s, traj.times[k]).segment(n, n));
    path.z.push_back(s[2 * n]);
  }
  return path;
}

ContactSystem legendre_map(const HerglotzLagrangian& lag) {
  const Index n = lag.n;
  const Matrix hessian = constant_fiber_hessian(lag.lagrangian, n, "velocity");
  const Eigen::FullPivLU<Matrix> lu(hessian);
  const ScalarField lagrangian = lag.lagrangian;

  // qdot solving p = dL/dqdot, written into the (q, qdot, z) layout.
  auto velocity_point = [n, lu, lagrangian](const Vector& x, double t) {
    const Vector linear = fiber_quadratic(lagrangian, n, x, t).linear;
    Vector y = x;
    y.segment(n, n) = lu.solve(Vector(x.segment(n, n) - linear));
    return y;
  };
  auto eval = [n, lagrangian, velocity_point](const Vector& x, double t) {
    const Vector y = velocity_point(x, t);
    return x.segment(n, n).dot(y.segment(n, n)) - lagrangian(y, t);
  };
  // Envelope identities: dH/dp = qdot, dH/dq = -dL/dq, dH/dz = -dL/dz.
  auto grad = [n, lagrangian, velocity_point](const Vector& x, double t) {
    const Vector y = velocity_point(x, t);
    const Vector gl = lagrangian.gradient(y, t);
    Vector g(2 * n + 1);
    g.head(n) = -gl.head(n);
    g.segment(n, n) = y.segment(n, n);
    g[2 * n] = -gl[2 * n];
    return g;
  };
  return {n, ScalarField("legendre(" + lagrangian.label() + ")", eval, grad)};
}

HerglotzLagrangian inverse_legendre_map(const ContactSystem& sys) {
  const Index n = sys.n;
  const Matrix hessian = constant_fiber_hessian(sys.hamiltonian, n, "momentum");
  const Eigen::FullPivLU<Matrix> lu(hessian);
  const ScalarField hamiltonian = sys.hamiltonian;

  auto momentum_point = [n, lu, hamiltonian](const Vector& x, double t) {
    const Vector linear = fiber_quadratic(hamiltonian, n, x, t).linear;
    Vector y = x;
    y.segment(n, n) = lu.solve(Vector(x.segment(n, n) - linear));
    return y;
  };
  auto eval = [n, hamiltonian, momentum_point](const Vector& x, double t) {
    const Vector y = momentum_point(x, t);
    return y.segment(n, n).dot(x.segment(n, n)) - hamiltonian(y, t);
  };
  auto grad = [n, hamiltonian, momentum_point](const Vector& x, double t) {
    const Vector y = momentum_point(x, t);
    const Vector gh = hamiltonian.gradient(y, t);
    Vector g(2 * n + 1);
    g.head(n) = -gh.head(n);
    g.segment(n, n) = y.segment(n, n);
    g[2 * n] = -gh[2 * n];
    return g;
  };
  return {n, ScalarField("inverse_legendre(" + hamiltonian.label() + ")", eval, grad)};
}

double velocity_hessian_determinant(const HerglotzLagrangian& lag, const Vector& point, double t) {
  return fiber_quadratic(lag.lagrangian, lag.n, point, t).hessian.determinant();
}

}  // namespace curlforge
