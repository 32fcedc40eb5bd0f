#include "curlforge/core.hpp"
#include "curlforge/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

namespace curlforge {

Vector PhaseState::flat() const {
  if (q.size() != p.size()) {
    throw DimensionError("PhaseState: dim(q) != dim(p)");
  }
  Vector x(size());
  x.head(q.size()) = q;
  x.segment(q.size(), p.size()) = p;
  if (z) x[x.size() - 1] = *z;
  return x;
}

PhaseState PhaseState::from_flat(const Vector& x, Index dof, bool with_z) {
  if (x.size() != 2 * dof + (with_z ? 1 : 0)) {
    std::ostringstream msg;
    msg << "PhaseState: flat vector of size " << x.size() << " does not hold " << dof
        << " degrees of freedom" << (with_z ? " plus z" : "");
    throw DimensionError(msg.str());
  }
  PhaseState s;
  s.q = x.head(dof);
  s.p = x.segment(dof, dof);
  if (with_z) s.z = x[2 * dof];
  return s;
}

Vector ScalarField::gradient(const Vector& x, double t) const {
  if (grad_) return grad_(x, t);
  return fd_gradient(*this, x, t);
}

double default_step(const Vector& x) {
  const double scale = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  return 1e-6 * std::max(1.0, scale);
}

namespace {

void require_positive_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("finite-difference step must be positive");
  }
}

[[noreturn]] void domain_failure(const std::string& what, Index coordinate) {
  std::ostringstream msg;
  msg << "evaluation domain error: " << what << " is non-finite when perturbing coordinate "
      << coordinate;
  throw EvaluationDomainError(msg.str(), coordinate);
}

}  // namespace

Vector fd_gradient(const ScalarField& f, const Vector& x, double t, std::optional<double> h) {
  const double step = h.value_or(default_step(x));
  require_positive_step(step);
  Vector grad(x.size());
  Vector probe = x;
  for (Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + step;
    const double fp = f(probe, t);
    probe[j] = x[j] - step;
    const double fm = f(probe, t);
    probe[j] = x[j];
    if (!std::isfinite(fp) || !std::isfinite(fm)) domain_failure("scalar field", j);
    grad[j] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

Matrix fd_jacobian(const VectorField& v, const Vector& x, double t, std::optional<double> h) {
  const double step = h.value_or(default_step(x));
  require_positive_step(step);
  Vector probe = x;
  Matrix jac;
  for (Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + step;
    const Vector vp = v(probe, t);
    probe[j] = x[j] - step;
    const Vector vm = v(probe, t);
    probe[j] = x[j];
    if (!vp.allFinite() || !vm.allFinite()) domain_failure("vector field", j);
    if (j == 0) jac.resize(vp.size(), x.size());
    jac.col(j) = (vp - vm) / (2.0 * step);
  }
  return jac;
}

double curl2d(const ForceField2D& force, double x, double y, double t, std::optional<double> h) {
  const double step = h.value_or(1e-6 * std::max({1.0, std::abs(x), std::abs(y)}));
  require_positive_step(step);
  const Eigen::Vector2d fxp = force(x + step, y, t);
  const Eigen::Vector2d fxm = force(x - step, y, t);
  const Eigen::Vector2d fyp = force(x, y + step, t);
  const Eigen::Vector2d fym = force(x, y - step, t);
  if (!fxp.allFinite() || !fxm.allFinite()) domain_failure("force field", 0);
  if (!fyp.allFinite() || !fym.allFinite()) domain_failure("force field", 1);
  const double dfy_dx = (fxp.y() - fxm.y()) / (2.0 * step);
  const double dfx_dy = (fyp.x() - fym.x()) / (2.0 * step);
  return dfy_dx - dfx_dy;
}

std::uint64_t probe_seed() {
  if (const char* env = std::getenv("CURLFORGE_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return value;
  }
  return kDefaultProbeSeed;
}

std::vector<Vector> probe_set(Index dim, std::size_t count, std::optional<std::uint64_t> seed,
                              double half_width) {
  std::mt19937_64 rng(seed.value_or(probe_seed()));
  std::uniform_real_distribution<double> uniform(-half_width, half_width);
  std::vector<Vector> probes;
  probes.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = uniform(rng);
    probes.push_back(std::move(v));
  }
  return probes;
}

GradientCheck check_gradient(const ScalarField& f, Index dim, double t, double tolerance,
                             std::optional<std::uint64_t> seed) {
  GradientCheck result;
  if (!f.has_analytic_gradient()) return result;
  for (const Vector& x : probe_set(dim, 32, seed)) {
    const Vector analytic = f.gradient(x, t);
    const Vector numeric = fd_gradient(f, x, t);
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    result.max_rel_error =
        std::max(result.max_rel_error, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
  }
  result.pass = result.max_rel_error <= tolerance;
  return result;
}

std::vector<Vector> grid_derivative(const std::vector<Vector>& samples, double dt) {
  const std::size_t n = samples.size();
  if (n < 3) throw std::invalid_argument("grid_derivative needs at least 3 samples");
  std::vector<Vector> out(n);
  out[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * dt);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    out[k] = (samples[k + 1] - samples[k - 1]) / (2.0 * dt);
  }
  out[n - 1] = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * dt);
  return out;
}

}  // namespace curlforge
