#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace curlforge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when a field evaluates to a non-finite value at a stencil point.
class EvaluationDomainError : public std::domain_error {
 public:
  EvaluationDomainError(const std::string& what, Index coordinate)
      : std::domain_error(what), coordinate_(coordinate) {}

  /// Index of the perturbed coordinate, or -1 for the base point.
  Index coordinate() const { return coordinate_; }

 private:
  Index coordinate_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Positions and momenta of equal length, plus the Herglotz action variable
/// for contact systems. Flattened ordering is (q, p[, z]).
struct PhaseState {
  Vector q;
  Vector p;
  std::optional<double> z;

  Index dof() const { return q.size(); }
  Index size() const { return 2 * q.size() + (z ? 1 : 0); }

  Vector flat() const;
  static PhaseState from_flat(const Vector& x, Index dof, bool with_z);
};

/// A scalar function of the flattened state and time, optionally carrying an
/// analytic gradient. Autonomous fields simply ignore t.
class ScalarField {
 public:
  using Eval = std::function<double(const Vector&, double)>;
  using Grad = std::function<Vector(const Vector&, double)>;

  ScalarField() = default;
  ScalarField(std::string label, Eval eval, Grad grad = {})
      : label_(std::move(label)), eval_(std::move(eval)), grad_(std::move(grad)) {}

  double operator()(const Vector& x, double t = 0.0) const { return eval_(x, t); }
  double operator()(const PhaseState& s, double t = 0.0) const { return eval_(s.flat(), t); }

  /// Analytic gradient when available, central differences otherwise.
  Vector gradient(const Vector& x, double t = 0.0) const;

  bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
  explicit operator bool() const { return static_cast<bool>(eval_); }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  Eval eval_;
  Grad grad_;
};

using VectorField = std::function<Vector(const Vector&, double)>;

struct ForceField2D {
  std::function<Eigen::Vector2d(double x, double y, double t)> components;

  Eigen::Vector2d operator()(double x, double y, double t = 0.0) const {
    return components(x, y, t);
  }
};

/// h = 1e-6 * max(1, |x|_inf).
double default_step(const Vector& x);

Vector fd_gradient(const ScalarField& f, const Vector& x, double t,
                   std::optional<double> h = std::nullopt);

/// Column j holds the central difference of v along coordinate j.
Matrix fd_jacobian(const VectorField& v, const Vector& x, double t,
                   std::optional<double> h = std::nullopt);

/// k-component of the curl, dF_y/dx - dF_x/dy.
double curl2d(const ForceField2D& force, double x, double y, double t,
              std::optional<double> h = std::nullopt);

// Probe points ---------------------------------------------------------------

inline constexpr std::uint64_t kDefaultProbeSeed = 20240611;

/// CURLFORGE_SEED when set to an integer, kDefaultProbeSeed otherwise.
std::uint64_t probe_seed();

/// Deterministic points uniform in [-half_width, half_width]^dim.
std::vector<Vector> probe_set(Index dim, std::size_t count = 32,
                              std::optional<std::uint64_t> seed = std::nullopt,
                              double half_width = 1.0);

struct GradientCheck {
  double max_rel_error = 0.0;
  bool pass = true;
};

/// Compares the analytic gradient of f with fd_gradient on the probe set.
/// Error is measured as |g - g_fd|_inf / max(1, |g|_inf).
GradientCheck check_gradient(const ScalarField& f, Index dim, double t = 0.0,
                             double tolerance = 1e-5,
                             std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace curlforge
