#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "curlforge/catalog.hpp"
#include "curlforge/integrate.hpp"

namespace curlforge {

// Invariant reports -----------------------------------------------------------

/// What an entry asserts about its series.
///   conserved: drift stays below tolerance.
///   varies:    absolute variation exceeds tolerance (a negative control).
///   matches:   a predicted rate agrees with a numerical one; drift holds the
///              mismatch.
enum class Expectation { conserved, varies, matches };

std::string_view to_string(Expectation e);

struct InvariantEntry {
  std::string name;
  double initial = 0.0;
  double max_abs_drift = 0.0;
  double max_rel_drift = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Expectation expect = Expectation::conserved;
};

/// Short human-readable outcome, e.g. "not conserved (expected)" for a
/// passing negative control.
std::string status(const InvariantEntry& e);

struct InvariantReport {
  std::string system;
  ParamMap params;
  std::vector<InvariantEntry> entries;
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  std::size_t samples = 0;

  bool verdict() const;
  const InvariantEntry* find(std::string_view name) const;
};

/// Values below this magnitude are compared by absolute drift.
inline constexpr double kRelativeFloor = 1e-8;

/// Drift of a series against its first value.
InvariantEntry drift_entry(std::string name, const std::vector<double>& series, double tolerance);

/// Passes when the series moves by more than `threshold` (absolute).
InvariantEntry variation_entry(std::string name, const std::vector<double>& series,
                               double threshold);

/// Compares predicted against measured rates; relative error is taken against
/// max |measured| over the run.
InvariantEntry rate_entry(std::string name, const std::vector<double>& predicted,
                          const std::vector<double>& measured, double tolerance);

std::string to_json(const InvariantReport& report, int indent = 2);
InvariantReport report_from_json(const std::string& text);

// Series and pointwise diagnostics --------------------------------------------

std::vector<double> observable_series(const SystemDefinition& sys, std::string_view name,
                                      const Trajectory& traj);
std::vector<double> energy_series(const SystemDefinition& sys, const Trajectory& traj);
/// x ydot - y xdot with velocities taken from the system's rhs.
std::vector<double> angular_momentum_series(const SystemDefinition& sys, const Trajectory& traj);

/// Trace of the rhs Jacobian.
double divergence(const SystemDefinition& sys, const Vector& state, double t);

/// Omega(u, w) = sum_i (u_qi w_pi - u_pi w_qi) on (q, p).
double symplectic_pairing(const Vector& u, const Vector& w);

/// Omega(v1(T), v2(T)) / Omega(v1, v2), with the tangents carried by the
/// variational flow dv/dt = J(x(t)) v, J an FD Jacobian of the rhs.
double conformal_factor_check(const SystemDefinition& sys, const Vector& x0, const Vector& v1,
                              const Vector& v2, double T, double dt = 1e-3);

enum class PowerClass { gyroscopic, dissipative, accelerating, indefinite };

std::string_view to_string(PowerClass c);

inline constexpr double kPowerThreshold = 1e-10;

/// Sign pattern of F . v over paired samples.
PowerClass power_classification(const std::vector<Eigen::Vector2d>& forces,
                                const std::vector<Eigen::Vector2d>& velocities,
                                double threshold = kPowerThreshold);

/// The system's position force along the trajectory, with rhs velocities.
PowerClass power_classification(const SystemDefinition& sys, const Trajectory& traj,
                                double threshold = kPowerThreshold);

// Linear stability ------------------------------------------------------------

enum class StabilityClass { stable_center, unstable, asymptotically_stable, marginal };

std::string_view to_string(StabilityClass c);

inline constexpr double kStabilityThreshold = 1e-9;

struct StabilityResult {
  Matrix matrix;
  Eigen::VectorXcd eigenvalues;  // sorted by descending real part, then imaginary part
  double max_real_part = 0.0;
  StabilityClass classification = StabilityClass::marginal;
  /// max_k |det(lambda_k I - A)| / max(1, |A|)^n.
  double characteristic_residual = 0.0;
};

StabilityResult analyze_matrix(const Matrix& a, double threshold = kStabilityThreshold);

/// First-order matrix of a linear catalog system. The rhs is differenced with
/// unit steps about the origin, which is exact for linear fields.
Matrix linear_matrix(const SystemDefinition& sys);

/// Throws std::invalid_argument for systems that are not constant-coefficient
/// linear.
StabilityResult linear_stability(const SystemDefinition& sys,
                                 double threshold = kStabilityThreshold);
StabilityResult linear_stability(std::string_view name, const ParamMap& params,
                                 double threshold = kStabilityThreshold);

/// One result per parameter set, in input order.
std::vector<StabilityResult> stability_sweep(std::string_view name,
                                             const std::vector<ParamMap>& grid,
                                             double threshold = kStabilityThreshold,
                                             unsigned threads = 0);

// Suites ----------------------------------------------------------------------

/// Runs the invariant suite that applies to the system's formulation on an
/// already integrated trajectory.
InvariantReport check_invariants(const SystemDefinition& sys, const Trajectory& traj);

struct PairDivergence {
  std::string first;
  std::string second;
  double max_divergence = 0.0;
  bool pass = false;
};

struct ComparisonResult {
  std::vector<PairDivergence> pairs;
  double tolerance = 0.0;

  bool verdict() const;
};

/// Integrates each system from the same configuration (x, y, xdot, ydot),
/// mapped through its own momentum relations, and reports pairwise max
/// |(x, y)_i(t) - (x, y)_j(t)| over the run.
ComparisonResult compare_configurations(const std::vector<SystemDefinition>& systems,
                                        const Eigen::Vector4d& configuration, double t0,
                                        double t1, double dt, double tolerance);

std::string to_json(const ComparisonResult& result, int indent = 2);

}  // namespace curlforge
