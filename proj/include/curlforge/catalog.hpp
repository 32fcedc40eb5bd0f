#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "curlforge/system.hpp"

namespace curlforge {

class CatalogError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// U(xi) with its first two derivatives.
struct Potential {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;

  static Potential linear();     // U = xi
  static Potential quadratic();  // U = xi^2 / 2
  static Potential sine();       // U = sin xi
  static Potential custom(std::string name, std::function<double(double)> value,
                          std::function<double(double)> first,
                          std::function<double(double)> second);

  /// "linear" | "quadratic" | "sine".
  static Potential named(std::string_view name);
};

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
  std::string description;
};

struct CatalogEntry {
  std::string name;
  Formulation formulation = Formulation::hamiltonian;
  std::vector<ParamSpec> params;
  bool takes_potential = false;
  std::string equations;  // governing equations, human readable

  ParamMap defaults() const;
  /// Defaults overridden by `overrides`; unknown keys raise CatalogError.
  ParamMap with_defaults(const ParamMap& overrides) const;
  bool has_param(std::string_view key) const;
};

/// Alphabetical by name.
const std::vector<CatalogEntry>& list_catalog();

const CatalogEntry& find_entry(std::string_view name);

/// params must match the entry's schema exactly. potential is required for
/// entries that take one and rejected otherwise.
SystemDefinition build_system(std::string_view name, const ParamMap& params,
                              std::optional<Potential> potential = std::nullopt);

/// Schema defaults, quadratic U where a potential is taken.
SystemDefinition build_default(std::string_view name);

/// Initial configuration (x, y, xdot, ydot) used when none is supplied.
inline const Eigen::Vector4d kDefaultConfiguration{1.0, 0.2, -0.2, -0.2};

Vector default_initial_state(const SystemDefinition& sys);

// Builders with explicit time-dependent damping. The catalog entries use the
// constant case.
using TimeFunction = std::function<double(double)>;

SystemDefinition make_bateman_metriplectic(const Potential& u, TimeFunction gamma);
SystemDefinition make_conformal_curl(const Potential& u, TimeFunction gamma);
SystemDefinition make_contact_radial(const Potential& u, TimeFunction gamma);
SystemDefinition make_contact_km(double a, double b, TimeFunction gamma);
SystemDefinition make_galley_forced_km(double a, double b, double kappa,
                                       std::function<Eigen::Vector2d(double)> forcing);

/// Radial curl Hamiltonian 1/2 (p_x^2 - p_y^2) + U((x^2 - y^2)/2) over (x, y, p_x, p_y).
ScalarField radial_hamiltonian(const Potential& u);
/// 1/2 (p_x^2 - p_y^2) + b/2 (x^2 - y^2) + a x y.
ScalarField kapitsa_hamiltonian(double a, double b);

}  // namespace curlforge
