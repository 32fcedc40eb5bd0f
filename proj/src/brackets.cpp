#include "curlforge/brackets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curlforge {

namespace {

void require_dim(const char* op, Index expected, Index actual) {
  if (expected != actual) {
    std::ostringstream msg;
    msg << op << ": dimension mismatch (expected " << expected << ", got " << actual << ")";
    throw DimensionError(msg.str());
  }
}

Vector checked_gradient(const char* op, const ScalarField& f, const Vector& z, double t) {
  Vector g = f.gradient(z, t);
  require_dim(op, z.size(), g.size());
  return g;
}

}  // namespace

Matrix MetriplecticStructure::metric(const Vector& z) const {
  const Matrix l = lambda(z);
  return l * l.transpose();
}

Eigen::Matrix2d GyroMetriplecticCoefficients::skew() const {
  Eigen::Matrix2d m;
  m << 0.0, s, -s, 0.0;
  return m;
}

Eigen::Matrix2d GyroMetriplecticCoefficients::symmetric() const {
  return c * Eigen::Matrix2d::Identity();
}

double bivector_bracket(const BivectorField& lambda, const ScalarField& f, const ScalarField& h,
                        const Vector& z, double t) {
  require_dim("bivector_bracket", lambda.dim, z.size());
  const Vector df = checked_gradient("bivector_bracket", f, z, t);
  const Vector dh = checked_gradient("bivector_bracket", h, z, t);
  return df.dot(lambda(z) * dh);
}

Vector hamiltonian_vector_field(const BivectorField& lambda, const ScalarField& h,
                                const Vector& z, double t) {
  require_dim("hamiltonian_vector_field", lambda.dim, z.size());
  return lambda(z) * checked_gradient("hamiltonian_vector_field", h, z, t);
}

BivectorField canonical_bivector(Index n) {
  if (n < 1) throw std::invalid_argument("canonical_bivector: n must be >= 1");
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = Matrix::Identity(n, n);
  m.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return {2 * n, [m](const Vector&) { return m; }};
}

BivectorField heisenberg_bivector(const HeisenbergStructure& h) {
  if (h.n < 1) throw std::invalid_argument("heisenberg_bivector: n must be >= 1");
  const Index n = h.n;
  const Index dim = h.dim();
  return {dim, [n, dim](const Vector& z) {
            const double mu = z[dim - 1];
            Matrix m = Matrix::Zero(dim, dim);
            for (Index i = 0; i < n; ++i) {
              m(i, n + i) = mu;
              m(n + i, i) = -mu;
            }
            return m;
          }};
}

BivectorField gyro_bivector(const GyroMetriplecticCoefficients& coeff) {
  Matrix m = canonical_bivector(2)(Vector());
  m.bottomRightCorner(2, 2) = -coeff.skew();
  return {4, [m](const Vector&) { return m; }};
}

double double_bracket(const MetriplecticStructure& m, const ScalarField& f, const ScalarField& s,
                      const Vector& z, double t) {
  require_dim("double_bracket", m.lambda.dim, z.size());
  const Vector df = checked_gradient("double_bracket", f, z, t);
  const Vector ds = checked_gradient("double_bracket", s, z, t);
  return df.dot(m.metric(z) * ds);
}

Vector metriplectic_rhs(const MetriplecticStructure& m, const Vector& z, double t) {
  require_dim("metriplectic_rhs", m.lambda.dim, z.size());
  const Matrix l = m.lambda(z);
  const Vector dh = checked_gradient("metriplectic_rhs", m.hamiltonian, z, t);
  const Vector ds = checked_gradient("metriplectic_rhs", m.entropy, z, t);
  return l * dh + m.a * (l * (l.transpose() * ds));
}

namespace {

struct SplitGradient {
  Eigen::Vector2d dq;
  Eigen::Vector2d dp;
};

SplitGradient split_gradient(const char* op, const ScalarField& h, const Vector& state,
                             double t) {
  require_dim(op, 4, state.size());
  const Vector g = checked_gradient(op, h, state, t);
  return {g.head<2>(), g.tail<2>()};
}

}  // namespace

Vector gyro_bracket_rhs(const ScalarField& h, const GyroMetriplecticCoefficients& coeff,
                        const Vector& state, double t) {
  if (coeff.c != 0.0) {
    throw std::invalid_argument("gyro_bracket_rhs: dissipative coefficient c must be zero");
  }
  return gyro_metriplectic_rhs(h, coeff, state, t);
}

Vector gyro_metriplectic_rhs(const ScalarField& h, const GyroMetriplecticCoefficients& coeff,
                             const Vector& state, double t) {
  const auto [dq, dp] = split_gradient("gyro_metriplectic_rhs", h, state, t);
  Vector out(4);
  out.head<2>() = dp;
  out.tail<2>() = -dq - coeff.skew() * dp + coeff.symmetric() * dp;
  return out;
}

double jacobi_defect(const BivectorField& lambda, const Vector& z) {
  const Index n = lambda.dim;
  require_dim("jacobi_defect", n, z.size());
  const Matrix l = lambda(z);
  // d_l Lambda for every l, by central differences of the entries.
  std::vector<Matrix> partial(static_cast<std::size_t>(n));
  const double h = default_step(z);
  Vector probe = z;
  for (Index c = 0; c < n; ++c) {
    probe[c] = z[c] + h;
    const Matrix lp = lambda(probe);
    probe[c] = z[c] - h;
    const Matrix lm = lambda(probe);
    probe[c] = z[c];
    partial[static_cast<std::size_t>(c)] = (lp - lm) / (2.0 * h);
  }
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        double sum = 0.0;
        for (Index c = 0; c < n; ++c) {
          const Matrix& d = partial[static_cast<std::size_t>(c)];
          sum += l(c, i) * d(j, k) + l(c, j) * d(k, i) + l(c, k) * d(i, j);
        }
        worst = std::max(worst, std::abs(sum));
      }
    }
  }
  return worst;
}

}  // namespace curlforge
