#pragma once

// Independent oracles and generators shared by the test binaries. Nothing here
// calls into the library's integrators or eigen-solvers.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "curlforge/core.hpp"

namespace testing_support {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// exp(A) by Taylor series with scaling and squaring.
inline Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd scaled = a / std::pow(2.0, squarings);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Kapitsa characteristic equation (lambda^2 + b)^2 + a^2 = 0 gives
/// lambda^2 = -b +- i a; the largest real part over the four roots.
inline double kapitsa_quartic_max_real(double a, double b) {
  double best = -1e300;
  for (double sign : {1.0, -1.0}) {
    const std::complex<double> root = std::sqrt(std::complex<double>(-b, sign * a));
    best = std::max({best, root.real(), -root.real()});
  }
  return best;
}

/// Hand-rolled RK4 for second-order planar systems r'' = acc(r, r', t),
/// state (x, y, xdot, ydot). Kept separate from the library integrator.
using Planar = std::array<double, 4>;
using PlanarAcc = std::function<std::array<double, 2>(const Planar&, double)>;

inline Planar planar_rhs(const PlanarAcc& acc, const Planar& s, double t) {
  const auto a = acc(s, t);
  return {s[2], s[3], a[0], a[1]};
}

inline std::vector<Planar> newton_twin(const PlanarAcc& acc, Planar s, double t0, double dt,
                                       std::size_t steps) {
  std::vector<Planar> out{s};
  double t = t0;
  auto axpy = [](const Planar& x, double h, const Planar& k) {
    return Planar{x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2], x[3] + h * k[3]};
  };
  for (std::size_t n = 0; n < steps; ++n) {
    const Planar k1 = planar_rhs(acc, s, t);
    const Planar k2 = planar_rhs(acc, axpy(s, 0.5 * dt, k1), t + 0.5 * dt);
    const Planar k3 = planar_rhs(acc, axpy(s, 0.5 * dt, k2), t + 0.5 * dt);
    const Planar k4 = planar_rhs(acc, axpy(s, dt, k3), t + dt);
    for (int i = 0; i < 4; ++i) s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += dt;
    out.push_back(s);
  }
  return out;
}

/// Random polynomial of degree <= 3 in `dim` variables with a handful of
/// monomials, evaluated without any derivative information.
struct RandomPolynomial {
  struct Term {
    double coeff;
    std::vector<int> vars;  // repeated indices encode powers
  };
  std::vector<Term> terms;

  double operator()(const Eigen::VectorXd& z) const {
    double sum = 0.0;
    for (const Term& t : terms) {
      double m = t.coeff;
      for (int v : t.vars) m *= z[v];
      sum += m;
    }
    return sum;
  }

  curlforge::ScalarField field(const std::string& label = "poly") const {
    const RandomPolynomial copy = *this;
    return curlforge::ScalarField(label, [copy](const Eigen::VectorXd& z, double) { return copy(z); });
  }
};

inline RandomPolynomial random_polynomial(std::mt19937_64& rng, int dim, int terms = 5) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> degree(0, 3);
  std::uniform_int_distribution<int> var(0, dim - 1);
  RandomPolynomial p;
  for (int k = 0; k < terms; ++k) {
    RandomPolynomial::Term t{coeff(rng), {}};
    const int d = degree(rng);
    for (int i = 0; i < d; ++i) t.vars.push_back(var(rng));
    p.terms.push_back(t);
  }
  return p;
}

inline Eigen::VectorXd random_point(std::mt19937_64& rng, int dim, double half_width = 1.0) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  Eigen::VectorXd z(dim);
  for (int i = 0; i < dim; ++i) z[i] = u(rng);
  return z;
}

}  // namespace testing_support
