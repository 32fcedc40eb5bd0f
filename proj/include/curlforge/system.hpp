#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "curlforge/brackets.hpp"
#include "curlforge/contact.hpp"
#include "curlforge/core.hpp"
#include "curlforge/galley.hpp"
#include "curlforge/trajectory.hpp"

namespace curlforge {

enum class Formulation { hamiltonian, metriplectic, gyro, gyro_metriplectic, contact, galley, newton };

std::string_view to_string(Formulation f);

/// A named right-hand side on the flattened state (x, y, p_x, p_y[, z]) with
/// the formulation data the diagnostics need.
struct SystemDefinition {
  std::string name;
  Formulation formulation = Formulation::hamiltonian;
  Index dim = 4;
  VectorField rhs;
  ParamMap params;
  std::string potential;  // name of the U choice, empty when none

  /// "energy" and, where defined, "angular_momentum".
  std::map<std::string, ScalarField> observables;

  /// Builds a state from configuration (x, y) and velocity (xdot, ydot) using
  /// this formulation's momentum relations; z starts at 0.
  std::function<Vector(const Eigen::Vector2d& config, const Eigen::Vector2d& velocity)>
      from_velocity;

  /// Position-only force (Newtonian acceleration) for pure curl-force systems.
  std::optional<ForceField2D> force;

  std::optional<MetriplecticStructure> metriplectic;  // on (x, y, p_x, p_y, mu)
  std::optional<ContactSystem> contact;
  std::optional<GalleySystem> galley;
  std::optional<GyroMetriplecticCoefficients> gyro;

  /// a in L_X Omega = a Omega for conformal Hamiltonian flows.
  std::optional<double> conformal_rate;
  /// Constant-coefficient linear first-order system.
  bool linear = false;

  bool has_z() const { return dim == 5; }

  Eigen::Vector2d velocity(const Vector& state, double t) const {
    return rhs(state, t).head<2>();
  }
};

}  // namespace curlforge
