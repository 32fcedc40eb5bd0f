#include <doctest.h>

#include <random>

#include "curlforge/brackets.hpp"
#include "curlforge/catalog.hpp"
#include "curlforge/integrate.hpp"
#include "support.hpp"

using namespace curlforge;
using namespace testing_support;

namespace {

ScalarField coordinate(Index i) {
  return ScalarField("z" + std::to_string(i), [i](const Vector& z, double) { return z[i]; },
                     [i](const Vector& z, double) {
                       Vector g = Vector::Zero(z.size());
                       g[i] = 1.0;
                       return g;
                     });
}

// Lie-Poisson tensor of the Heisenberg algebra assembled from its structure
// constants: Lambda_ab = sum_c C_ab^c mu_c, [e^i, e_j] = delta^i_j f.
Matrix heisenberg_from_structure_constants(Index n, const Vector& mu) {
  const Index dim = 2 * n + 1;
  auto constant = [n, dim](Index a, Index b, Index c) -> double {
    if (c != dim - 1) return 0.0;
    if (a < n && b == a + n) return 1.0;
    if (b < n && a == b + n) return -1.0;
    return 0.0;
  };
  Matrix l = Matrix::Zero(dim, dim);
  for (Index a = 0; a < dim; ++a)
    for (Index b = 0; b < dim; ++b)
      for (Index c = 0; c < dim; ++c) l(a, b) += constant(a, b, c) * mu[c];
  return l;
}

Vector embed(const Vector& s) {
  Vector z(5);
  z << s, 1.0;
  return z;
}

MetriplecticStructure heisenberg_bateman(const Potential& u, double gamma, double a = 1.0) {
  ScalarField h("H", [u](const Vector& z, double) { return radial_hamiltonian(u)(Vector(z.head(4))); });
  ScalarField s("S", [gamma](const Vector& z, double) {
    return -0.5 * gamma * (z[0] * z[0] + z[1] * z[1]);
  });
  return {heisenberg_bivector({2}), h, s, a};
}

}  // namespace

TEST_CASE("canonical bracket {q, p} = 1 and {F, F} = 0") {
  const BivectorField l = canonical_bivector(1);
  Vector z(2);
  z << 0.4, -1.3;
  CHECK(bivector_bracket(l, coordinate(0), coordinate(1), z) == 1.0);
  ScalarField f("f", [](const Vector& v, double) { return std::sin(v[0]) * v[1] * v[1]; });
  CHECK(std::abs(bivector_bracket(l, f, f, z)) <= 1e-12);
}

TEST_CASE("Heisenberg bracket {mu^1, mu_1} = mu") {
  const BivectorField l = heisenberg_bivector({1});
  Vector z(3);
  z << 0.0, 0.0, 2.0;
  CHECK(bivector_bracket(l, coordinate(0), coordinate(1), z) == 2.0);
}

TEST_CASE("canonical bivector block form") {
  Matrix one(2, 2);
  one << 0, 1, -1, 0;
  CHECK(canonical_bivector(1)(Vector::Zero(2)) == one);
  Matrix two = Matrix::Zero(4, 4);
  two(0, 2) = two(1, 3) = 1.0;
  two(2, 0) = two(3, 1) = -1.0;
  CHECK(canonical_bivector(2)(Vector::Zero(4)) == two);
  CHECK(jacobi_defect(canonical_bivector(2), Vector::Constant(4, 0.3)) == 0.0);
  CHECK_THROWS_AS(canonical_bivector(0), std::invalid_argument);
}

TEST_CASE("Heisenberg bivector reductions and structure constants") {
  const BivectorField l = heisenberg_bivector({2});
  Vector z = Vector::Constant(5, 0.7);
  z[4] = 1.0;
  CHECK(l(z).topLeftCorner(4, 4) == canonical_bivector(2)(Vector::Zero(4)));
  CHECK(l(z).row(4).isZero(0.0));
  z[4] = 0.0;
  CHECK(l(z).isZero(0.0));
  for (const Vector& p : probe_set(5, 32)) {
    CHECK(l(p) == heisenberg_from_structure_constants(2, p));
    CHECK((l(p) + l(p).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(jacobi_defect(l, p) <= 1e-8);
  }
}

TEST_CASE("gyroscopic bivector") {
  const GyroMetriplecticCoefficients coeff{0.8, 0.0};
  const BivectorField l = gyro_bivector(coeff);
  const Vector z = Vector::Constant(4, 0.2);
  CHECK(bivector_bracket(l, coordinate(2), coordinate(3), z) == doctest::Approx(-0.8));
  CHECK(jacobi_defect(l, z) == 0.0);
  CHECK(coeff.skew() == -coeff.skew().transpose());
  CHECK(coeff.symmetric() == coeff.symmetric().transpose());
}

TEST_CASE("double bracket values") {
  MetriplecticStructure canon{canonical_bivector(1), coordinate(0), coordinate(0), 1.0};
  CHECK(double_bracket(canon, coordinate(0), coordinate(0), Vector::Constant(2, 0.5)) == 1.0);

  // Heisenberg n = 2 at mu = 1 with F = S = p_1: G = Lambda Lambda^T from the
  // structure-constant tensor.
  MetriplecticStructure heis{heisenberg_bivector({2}), coordinate(2), coordinate(2), 1.0};
  Vector z = Vector::Constant(5, -0.3);
  z[4] = 1.0;
  const Matrix l = heisenberg_from_structure_constants(2, z);
  const Matrix g = l * l.transpose();
  CHECK(double_bracket(heis, coordinate(2), coordinate(2), z) == doctest::Approx(g(2, 2)));
  CHECK(double_bracket(heis, coordinate(2), coordinate(2), z) == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const ScalarField f = random_polynomial(rng, 5).field();
    const ScalarField s = random_polynomial(rng, 5).field();
    const Vector p = random_point(rng, 5);
    CHECK(std::abs(double_bracket(heis, f, s, p) - double_bracket(heis, s, f, p)) <= 1e-12);
  }
}

TEST_CASE("metric is Lambda Lambda^T, symmetric and positive semidefinite") {
  const MetriplecticStructure m = heisenberg_bateman(Potential::quadratic(), 0.2);
  for (const Vector& z : probe_set(5, 32)) {
    const Matrix g = m.metric(z);
    const Matrix l = m.lambda(z);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((g - l * l.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("metriplectic rhs on the Heisenberg Bateman system") {
  const MetriplecticStructure m = heisenberg_bateman(Potential::linear(), 0.5);
  Vector s(4);
  s << 1.0, 0.0, 2.0, 0.0;
  const Vector v = metriplectic_rhs(m, embed(s));
  CHECK(v[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::abs(v[1]) <= 1e-12);
  CHECK(v[2] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(v[3]) <= 1e-12);
  CHECK(v[4] == 0.0);

  MetriplecticStructure off = m;
  off.a = 0.0;
  MetriplecticStructure flat = m;
  flat.entropy = ScalarField("S0", [](const Vector&, double) { return 1.0; });
  for (const Vector& z : probe_set(5, 8)) {
    const Vector hamiltonian = hamiltonian_vector_field(m.lambda, m.hamiltonian, z);
    CHECK(metriplectic_rhs(off, z) == hamiltonian);
    CHECK((metriplectic_rhs(flat, z) - hamiltonian).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(metriplectic_rhs(m, z)[4] == 0.0);
  }
}

TEST_CASE("coadjoint reduction: mu = 1 Lie-Poisson flow is canonical") {
  const ScalarField h4 = radial_hamiltonian(Potential::sine());
  const MetriplecticStructure m{heisenberg_bivector({2}),
                                ScalarField("H", [h4](const Vector& z, double t) { return h4(Vector(z.head(4)), t); },
                                            [h4](const Vector& z, double t) {
                                              Vector g = Vector::Zero(5);
                                              g.head(4) = h4.gradient(Vector(z.head(4)), t);
                                              return g;
                                            }),
                                coordinate(0), 0.0};
  for (const Vector& s : probe_set(4, 16)) {
    const Vector coadjoint = metriplectic_rhs(m, embed(s));
    const Vector canonical = hamiltonian_vector_field(canonical_bivector(2), h4, s);
    CHECK(coadjoint.head(4) == canonical);
    CHECK(coadjoint[4] == 0.0);
  }
}

TEST_CASE("metriplectic energy rate equals a (H, S)") {
  const MetriplecticStructure m = heisenberg_bateman(Potential::quadratic(), 0.2, 0.7);
  const VectorField rhs = [m](const Vector& z, double t) { return metriplectic_rhs(m, z, t); };
  Vector z0(5);
  z0 << 1.0, 0.2, -0.1, 0.3, 1.0;
  const Trajectory traj = integrate(rhs, z0, 0.0, 2.0, 1e-3);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t k = 2; k + 2 < traj.size(); k += 50) {
    auto h = [&](std::size_t j) { return m.hamiltonian(traj.states[j]); };
    const double slope = (h(k - 2) - 8 * h(k - 1) + 8 * h(k + 1) - h(k + 2)) / (12 * 1e-3);
    const double predicted = m.a * double_bracket(m, m.hamiltonian, m.entropy, traj.states[k]);
    worst = std::max(worst, std::abs(slope - predicted));
    scale = std::max(scale, std::abs(slope));
    CHECK(traj.states[k][4] == 1.0);  // mu is a constant of motion
  }
  CHECK(worst / scale <= 1e-6);
}

TEST_CASE("gyroscopic Hamilton equations") {
  const ScalarField h = radial_hamiltonian(Potential::linear());
  const Vector s = Vector::Ones(4);
  CHECK(gyro_bracket_rhs(h, {0.0, 0.0}, s) == hamiltonian_vector_field(canonical_bivector(2), h, s));
  // pdot = -dH/dq - S dH/dp with dH/dp = (1, -1), s = 2:
  // p_x' = -1 - 2 (-1) = 1, p_y' = 1 + 2 (1) = 3.
  const Vector v = gyro_bracket_rhs(h, {2.0, 0.0}, s);
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v[3] == doctest::Approx(3.0));
  // The same equations come out of the gyroscopic bivector.
  CHECK((v - hamiltonian_vector_field(gyro_bivector({2.0, 0.0}), h, s)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(gyro_bracket_rhs(h, {2.0, 0.1}, s), std::invalid_argument);
  CHECK_THROWS_AS(gyro_bracket_rhs(h, {2.0, 0.0}, Vector::Ones(5)), DimensionError);
}

TEST_CASE("gyro metriplectic equations") {
  const ScalarField h = kapitsa_hamiltonian(1.0, 1.0);
  Vector s(4);
  s << 1.0, 0.0, 0.0, 1.0;
  CHECK(gyro_metriplectic_rhs(h, {0.5, 0.1}, s)[2] == doctest::Approx(-0.5));
  for (const Vector& p : probe_set(4, 8)) {
    CHECK(gyro_metriplectic_rhs(h, {0.0, 0.0}, p) ==
          hamiltonian_vector_field(canonical_bivector(2), h, p));
  }
}

TEST_CASE("gyro metriplectic Newtonian reduction along trajectories") {
  const double a = 1.0, b = 1.0, sk = 0.5, c = 0.1;
  const SystemDefinition sys = build_system("gyro_dissipative_km", {{"a", a}, {"b", b}, {"s", sk}, {"c", c}});
  const Planar start{1.0, 0.2, -0.2, -0.2};
  const Vector x0 = sys.from_velocity({start[0], start[1]}, {start[2], start[3]});
  const Trajectory traj = integrate(sys, x0, 0.0, 10.0, 1e-3);
  // x'' + s y' - c x' + b x + a y = 0, y'' + s x' + c y' + b y - a x = 0.
  const auto twin = newton_twin(
      [=](const Planar& q, double) {
        return std::array<double, 2>{-sk * q[3] + c * q[2] - b * q[0] - a * q[1],
                                     -sk * q[2] - c * q[3] - b * q[1] + a * q[0]};
      },
      start, 0.0, 1e-3, traj.size() - 1);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    worst = std::max({worst, std::abs(traj.states[k][0] - twin[k][0]),
                      std::abs(traj.states[k][1] - twin[k][1])});
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("bracket axioms on random polynomials") {
  std::mt19937_64 rng(11);
  const std::vector<BivectorField> structures{canonical_bivector(2), heisenberg_bivector({2}),
                                              gyro_bivector({0.7, 0.0})};
  for (const BivectorField& l : structures) {
    const int dim = static_cast<int>(l.dim);
    for (int k = 0; k < 25; ++k) {
      const RandomPolynomial pf = random_polynomial(rng, dim);
      const RandomPolynomial pg = random_polynomial(rng, dim);
      const RandomPolynomial ph = random_polynomial(rng, dim);
      const ScalarField f = pf.field(), g = pg.field(), h = ph.field();
      const ScalarField fg("fg", [pf, pg](const Vector& z, double) { return pf(z) * pg(z); });
      const Vector z = random_point(rng, dim);
      CHECK(std::abs(bivector_bracket(l, f, h, z) + bivector_bracket(l, h, f, z)) <= 1e-12);
      const double leibniz = bivector_bracket(l, fg, h, z) -
                             (pf(z) * bivector_bracket(l, g, h, z) + pg(z) * bivector_bracket(l, f, h, z));
      CHECK(std::abs(leibniz) <= 1e-8);
      CHECK(jacobi_defect(l, z) <= 1e-8);
    }
  }
}

TEST_CASE("double bracket positivity over 100 random fields") {
  std::mt19937_64 rng(5);
  const MetriplecticStructure m{heisenberg_bivector({2}), coordinate(0), coordinate(0), 1.0};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ScalarField f = random_polynomial(rng, 5, 6).field();
    const Vector z = random_point(rng, 5, 2.0);
    worst = std::min(worst, double_bracket(m, f, f, z));
  }
  CHECK(worst >= -1e-10);
}

TEST_CASE("dimension mismatches are rejected") {
  const BivectorField l = canonical_bivector(2);
  CHECK_THROWS_AS(bivector_bracket(l, coordinate(0), coordinate(1), Vector::Zero(3)), DimensionError);
  const MetriplecticStructure m = heisenberg_bateman(Potential::linear(), 0.1);
  CHECK_THROWS_AS(metriplectic_rhs(m, Vector::Zero(4)), DimensionError);
  CHECK_THROWS_AS(double_bracket(m, coordinate(0), coordinate(0), Vector::Zero(4)), DimensionError);
}
