#pragma once

#include "curlforge/core.hpp"

namespace curlforge {

/// Skew matrix field defining {F, H} = dF . Lambda . dH.
struct BivectorField {
  Index dim = 0;
  std::function<Matrix(const Vector&)> entries;

  Matrix operator()(const Vector& z) const { return entries(z); }
};

/// Heisenberg algebra of base dimension n. Coordinates on the dual are ordered
/// (mu^1..mu^n, mu_1..mu_n, mu); the only nonzero structure constants come from
/// [e^i, e_j] = delta^i_j f.
struct HeisenbergStructure {
  Index n = 1;

  Index dim() const { return 2 * n + 1; }
};

/// Lie-Poisson part plus a double-bracket dissipation
///   zdot = Lambda grad H + a G grad S,  G = Lambda Lambda^T.
/// G is always recomputed from Lambda.
struct MetriplecticStructure {
  BivectorField lambda;
  ScalarField hamiltonian;
  ScalarField entropy;
  double a = 1.0;

  Matrix metric(const Vector& z) const;
};

/// 2D magnetic and dissipative coefficients: s_12 = -s_21 = s, c_11 = c_22 = c.
struct GyroMetriplecticCoefficients {
  double s = 0.0;
  double c = 0.0;

  Eigen::Matrix2d skew() const;
  Eigen::Matrix2d symmetric() const;
};

double bivector_bracket(const BivectorField& lambda, const ScalarField& f, const ScalarField& h,
                        const Vector& z, double t = 0.0);

/// Lambda grad H.
Vector hamiltonian_vector_field(const BivectorField& lambda, const ScalarField& h,
                                const Vector& z, double t = 0.0);

/// Constant [[0, I], [-I, 0]] in (q, p) ordering.
BivectorField canonical_bivector(Index n);

BivectorField heisenberg_bivector(const HeisenbergStructure& h);

/// Canonical bivector with the magnetic term -s_ij in the momentum block,
/// generating {F, H}_gyro.
BivectorField gyro_bivector(const GyroMetriplecticCoefficients& coeff);

double double_bracket(const MetriplecticStructure& m, const ScalarField& f, const ScalarField& s,
                      const Vector& z, double t = 0.0);

Vector metriplectic_rhs(const MetriplecticStructure& m, const Vector& z, double t = 0.0);

/// qdot = dH/dp, pdot = -dH/dq - s_ij dH/dp_j on a 2D base. Requires c == 0.
Vector gyro_bracket_rhs(const ScalarField& h, const GyroMetriplecticCoefficients& coeff,
                        const Vector& state, double t = 0.0);

/// The gyroscopic flow plus the symmetric momentum term c_ij dH/dp_j.
Vector gyro_metriplectic_rhs(const ScalarField& h, const GyroMetriplecticCoefficients& coeff,
                             const Vector& state, double t = 0.0);

/// max over (i, j, k) of |sum_l (L_li d_l L_jk + L_lj d_l L_ki + L_lk d_l L_ij)|,
/// derivatives by central differences of the entries.
double jacobi_defect(const BivectorField& lambda, const Vector& z);

}  // namespace curlforge
