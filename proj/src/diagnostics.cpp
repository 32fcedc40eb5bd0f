#include "curlforge/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace curlforge {

using nlohmann::json;

// Enumerations ----------------------------------------------------------------

std::string_view to_string(Expectation e) {
  switch (e) {
    case Expectation::conserved: return "conserved";
    case Expectation::varies: return "varies";
    case Expectation::matches: return "matches";
  }
  return "unknown";
}

std::string_view to_string(PowerClass c) {
  switch (c) {
    case PowerClass::gyroscopic: return "gyroscopic";
    case PowerClass::dissipative: return "dissipative";
    case PowerClass::accelerating: return "accelerating";
    case PowerClass::indefinite: return "indefinite";
  }
  return "unknown";
}

std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::stable_center: return "stable-center";
    case StabilityClass::unstable: return "unstable";
    case StabilityClass::asymptotically_stable: return "asymptotically-stable";
    case StabilityClass::marginal: return "marginal";
  }
  return "unknown";
}

namespace {

Expectation expectation_from(std::string_view s) {
  if (s == "conserved") return Expectation::conserved;
  if (s == "varies") return Expectation::varies;
  if (s == "matches") return Expectation::matches;
  throw std::invalid_argument("unknown expectation '" + std::string(s) + "'");
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

// Reports ---------------------------------------------------------------------

bool InvariantReport::verdict() const {
  return std::all_of(entries.begin(), entries.end(), [](const InvariantEntry& e) { return e.pass; });
}

const InvariantEntry* InvariantReport::find(std::string_view name) const {
  for (const InvariantEntry& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

InvariantEntry drift_entry(std::string name, const std::vector<double>& series, double tolerance) {
  if (series.empty()) throw std::invalid_argument("drift_entry: empty series");
  InvariantEntry e;
  e.name = std::move(name);
  e.initial = series.front();
  e.tolerance = tolerance;
  e.expect = Expectation::conserved;
  for (double v : series) e.max_abs_drift = std::max(e.max_abs_drift, std::abs(v - e.initial));
  const bool absolute = std::abs(e.initial) < kRelativeFloor;
  e.max_rel_drift = absolute ? e.max_abs_drift : e.max_abs_drift / std::abs(e.initial);
  e.pass = std::isfinite(e.max_rel_drift) && e.max_rel_drift <= tolerance;
  return e;
}

InvariantEntry variation_entry(std::string name, const std::vector<double>& series,
                               double threshold) {
  InvariantEntry e = drift_entry(std::move(name), series, threshold);
  e.expect = Expectation::varies;
  e.pass = e.max_abs_drift > threshold;
  return e;
}

InvariantEntry rate_entry(std::string name, const std::vector<double>& predicted,
                          const std::vector<double>& measured, double tolerance) {
  if (predicted.size() != measured.size() || predicted.empty()) {
    throw std::invalid_argument("rate_entry: series must be non-empty and of equal length");
  }
  InvariantEntry e;
  e.name = std::move(name);
  e.initial = predicted.front();
  e.tolerance = tolerance;
  e.expect = Expectation::matches;
  double scale = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    e.max_abs_drift = std::max(e.max_abs_drift, std::abs(predicted[k] - measured[k]));
    scale = std::max(scale, std::abs(measured[k]));
  }
  e.max_rel_drift = scale < kRelativeFloor ? e.max_abs_drift : e.max_abs_drift / scale;
  e.pass = std::isfinite(e.max_rel_drift) && e.max_rel_drift <= tolerance;
  return e;
}

std::string status(const InvariantEntry& e) {
  switch (e.expect) {
    case Expectation::conserved: return e.pass ? "conserved" : "not conserved";
    case Expectation::varies: return e.pass ? "not conserved (expected)" : "unexpectedly conserved";
    case Expectation::matches: return e.pass ? "rate matches" : "rate mismatch";
  }
  return "unknown";
}

std::string to_json(const InvariantReport& report, int indent) {
  json j;
  j["system"] = report.system;
  j["params"] = json::object();
  for (const auto& [k, v] : report.params) j["params"][k] = number(v);
  j["invariants"] = json::array();
  for (const InvariantEntry& e : report.entries) {
    j["invariants"].push_back({{"name", e.name},
                               {"initial", number(e.initial)},
                               {"max_abs_drift", number(e.max_abs_drift)},
                               {"max_rel_drift", number(e.max_rel_drift)},
                               {"tolerance", number(e.tolerance)},
                               {"pass", e.pass},
                               {"expect", std::string(to_string(e.expect))},
                               {"status", status(e)}});
  }
  j["t0"] = report.t0;
  j["t1"] = report.t1;
  j["dt"] = report.dt;
  j["samples"] = report.samples;
  j["verdict"] = report.verdict() ? "pass" : "fail";
  return j.dump(indent);
}

InvariantReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  InvariantReport r;
  r.system = j.at("system").get<std::string>();
  for (const auto& [k, v] : j.at("params").items()) r.params[k] = number_from(v);
  for (const json& e : j.at("invariants")) {
    InvariantEntry entry;
    entry.name = e.at("name").get<std::string>();
    entry.initial = number_from(e.at("initial"));
    entry.max_abs_drift = number_from(e.at("max_abs_drift"));
    entry.max_rel_drift = number_from(e.at("max_rel_drift"));
    entry.tolerance = number_from(e.at("tolerance"));
    entry.pass = e.at("pass").get<bool>();
    entry.expect = expectation_from(e.value("expect", std::string("conserved")));
    r.entries.push_back(std::move(entry));
  }
  r.t0 = j.value("t0", 0.0);
  r.t1 = j.value("t1", 0.0);
  r.dt = j.value("dt", 0.0);
  r.samples = j.value("samples", std::size_t{0});
  return r;
}

// Series ----------------------------------------------------------------------

std::vector<double> observable_series(const SystemDefinition& sys, std::string_view name,
                                      const Trajectory& traj) {
  const auto it = sys.observables.find(std::string(name));
  if (it == sys.observables.end()) {
    throw std::invalid_argument("system '" + sys.name + "' has no observable '" +
                                std::string(name) + "'");
  }
  std::vector<double> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) out.push_back(it->second(traj.states[k], traj.times[k]));
  return out;
}

std::vector<double> energy_series(const SystemDefinition& sys, const Trajectory& traj) {
  return observable_series(sys, "energy", traj);
}

std::vector<double> angular_momentum_series(const SystemDefinition& sys, const Trajectory& traj) {
  if (!sys.rhs) throw std::invalid_argument("angular momentum needs the system velocity map");
  std::vector<double> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& s = traj.states[k];
    const Eigen::Vector2d v = sys.velocity(s, traj.times[k]);
    out.push_back(s[0] * v.y() - s[1] * v.x());
  }
  return out;
}

double divergence(const SystemDefinition& sys, const Vector& state, double t) {
  return fd_jacobian(sys.rhs, state, t).trace();
}

double symplectic_pairing(const Vector& u, const Vector& w) {
  if (u.size() != w.size() || u.size() % 2 != 0) {
    throw DimensionError("symplectic_pairing: expects two (q, p) vectors of equal even size");
  }
  const Index n = u.size() / 2;
  return u.head(n).dot(w.tail(n)) - u.tail(n).dot(w.head(n));
}

double conformal_factor_check(const SystemDefinition& sys, const Vector& x0, const Vector& v1,
                              const Vector& v2, double T, double dt) {
  if (!sys.conformal_rate && sys.formulation != Formulation::hamiltonian) {
    throw std::invalid_argument("system '" + sys.name + "' is not in the conformal family");
  }
  const Index d = sys.dim;
  if (x0.size() != d || v1.size() != d || v2.size() != d) {
    throw DimensionError("conformal_factor_check: state and tangents must match the system");
  }
  const VectorField rhs = sys.rhs;
  const VectorField joint = [rhs, d](const Vector& y, double t) {
    const Vector x = y.head(d);
    const Matrix jac = fd_jacobian(rhs, x, t);
    Vector out(3 * d);
    out.head(d) = rhs(x, t);
    out.segment(d, d) = jac * y.segment(d, d);
    out.tail(d) = jac * y.tail(d);
    return out;
  };
  Vector y0(3 * d);
  y0 << x0, v1, v2;
  const Trajectory traj = integrate(joint, y0, 0.0, T, std::min(dt, T));
  const Vector& y1 = traj.states.back();
  const double before = symplectic_pairing(v1, v2);
  if (before == 0.0) throw std::invalid_argument("conformal_factor_check: tangents have zero area");
  return symplectic_pairing(y1.segment(d, d), y1.tail(d)) / before;
}

PowerClass power_classification(const std::vector<Eigen::Vector2d>& forces,
                                const std::vector<Eigen::Vector2d>& velocities,
                                double threshold) {
  if (forces.empty() || forces.size() != velocities.size()) {
    throw std::invalid_argument("power_classification: needs equal, non-empty samples");
  }
  bool positive = false;
  bool negative = false;
  for (std::size_t k = 0; k < forces.size(); ++k) {
    const double power = forces[k].dot(velocities[k]);
    positive = positive || power > threshold;
    negative = negative || power < -threshold;
  }
  if (positive && negative) return PowerClass::indefinite;
  if (positive) return PowerClass::accelerating;
  if (negative) return PowerClass::dissipative;
  return PowerClass::gyroscopic;
}

PowerClass power_classification(const SystemDefinition& sys, const Trajectory& traj,
                                double threshold) {
  if (!sys.force) throw std::invalid_argument("system '" + sys.name + "' has no position force");
  std::vector<Eigen::Vector2d> forces;
  std::vector<Eigen::Vector2d> velocities;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& s = traj.states[k];
    forces.push_back((*sys.force)(s[0], s[1], traj.times[k]));
    velocities.push_back(sys.velocity(s, traj.times[k]));
  }
  return power_classification(forces, velocities, threshold);
}

// Stability -------------------------------------------------------------------

namespace {

bool semisimple_on_axis(const Matrix& a, const Eigen::VectorXcd& eig) {
  const Index n = a.rows();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Index i = 0; i < n; ++i) {
    if (std::abs(eig[i]) <= 1e-9 * scale) return false;  // zero eigenvalue
    Index algebraic = 0;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(eig[i] - eig[j]) < 1e-6 * scale) ++algebraic;
    }
    const Eigen::MatrixXcd shifted =
        a.cast<std::complex<double>>() - eig[i] * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    const Eigen::VectorXd sv = svd.singularValues();
    Index geometric = 0;
    for (Index k = 0; k < sv.size(); ++k) {
      if (sv[k] < 1e-7 * scale) ++geometric;
    }
    if (geometric < algebraic) return false;
  }
  return true;
}

}  // namespace

StabilityResult analyze_matrix(const Matrix& a, double threshold) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("analyze_matrix: expects a non-empty square matrix");
  }
  if (!a.allFinite()) throw std::invalid_argument("analyze_matrix: matrix is not finite");
  const Index n = a.rows();
  StabilityResult r;
  r.matrix = a;
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-solver did not converge");
  std::vector<std::complex<double>> eig(solver.eigenvalues().data(),
                                        solver.eigenvalues().data() + n);
  std::sort(eig.begin(), eig.end(), [](const auto& l, const auto& r) {
    return l.real() != r.real() ? l.real() > r.real() : l.imag() > r.imag();
  });
  r.eigenvalues = Eigen::Map<Eigen::VectorXcd>(eig.data(), n);
  r.max_real_part = eig.front().real();

  const double scale = std::pow(std::max(1.0, a.norm()), static_cast<double>(n));
  for (const std::complex<double>& lambda : eig) {
    const Eigen::MatrixXcd shifted =
        lambda * Eigen::MatrixXcd::Identity(n, n) - a.cast<std::complex<double>>();
    r.characteristic_residual =
        std::max(r.characteristic_residual, std::abs(shifted.partialPivLu().determinant()) / scale);
  }

  if (r.max_real_part > threshold) {
    r.classification = StabilityClass::unstable;
  } else if (r.max_real_part < -threshold) {
    r.classification = StabilityClass::asymptotically_stable;
  } else {
    const bool on_axis = std::all_of(eig.begin(), eig.end(), [threshold](const auto& l) {
      return std::abs(l.real()) <= threshold;
    });
    r.classification = on_axis && semisimple_on_axis(a, r.eigenvalues)
                           ? StabilityClass::stable_center
                           : StabilityClass::marginal;
  }
  return r;
}

Matrix linear_matrix(const SystemDefinition& sys) {
  if (!sys.linear) {
    throw std::invalid_argument("system '" + sys.name +
                                "' is not a constant-coefficient linear system");
  }
  return fd_jacobian(sys.rhs, Vector::Zero(sys.dim), 0.0, 1.0);
}

StabilityResult linear_stability(const SystemDefinition& sys, double threshold) {
  return analyze_matrix(linear_matrix(sys), threshold);
}

StabilityResult linear_stability(std::string_view name, const ParamMap& params, double threshold) {
  const CatalogEntry& entry = find_entry(name);
  return linear_stability(build_system(name, entry.with_defaults(params)), threshold);
}

std::vector<StabilityResult> stability_sweep(std::string_view name,
                                             const std::vector<ParamMap>& grid, double threshold,
                                             unsigned threads) {
  const std::string key(name);
  return parallel_indexed<StabilityResult>(
      grid.size(), [&](std::size_t i) { return linear_stability(key, grid[i], threshold); },
      threads);
}

// Suites ----------------------------------------------------------------------

namespace {

constexpr double kConservedTolerance = 1e-7;
constexpr double kVariationThreshold = 1e-2;
constexpr double kVolumeTolerance = 1e-10;
constexpr double kDivergenceTolerance = 1e-8;
constexpr double kMetriplecticRateTolerance = 1e-6;
constexpr double kHerglotzTolerance = 1e-6;
constexpr double kSlopeTolerance = 1e-4;
constexpr double kConformalTolerance = 1e-4;

// Indices whose five-point stencil lies on the uniform part of the grid.
std::vector<std::size_t> stencil_indices(const Trajectory& traj) {
  const std::size_t m = traj.size();
  const double dt = traj.step();
  std::size_t last = m - 1;
  if (m >= 2 && std::abs((traj.times[m - 1] - traj.times[m - 2]) - dt) > 1e-12 * std::max(1.0, dt)) {
    last = m - 2;  // short final step
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 2; k + 2 <= last; ++k) out.push_back(k);
  return out;
}

double slope5(const std::vector<double>& f, std::size_t k, double dt) {
  return (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * dt);
}

double partial_t(const ScalarField& f, const Vector& x, double t) {
  const double h = 1e-6 * std::max(1.0, std::abs(t));
  return (f(x, t + h) - f(x, t - h)) / (2.0 * h);
}

// Compares a predicted rate of an observable against its five-point slope
// along the trajectory.
InvariantEntry slope_check(std::string name, const ScalarField& f, const Trajectory& traj,
                           const std::function<double(const Vector&, double)>& predicted_rate,
                           double tolerance) {
  const std::vector<std::size_t> idx = stencil_indices(traj);
  if (idx.empty()) throw std::invalid_argument("rate checks need at least 5 uniform samples");
  std::vector<double> values;
  values.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) values.push_back(f(traj.states[k], traj.times[k]));
  std::vector<double> predicted;
  std::vector<double> measured;
  for (std::size_t k : idx) {
    predicted.push_back(predicted_rate(traj.states[k], traj.times[k]));
    measured.push_back(slope5(values, k, traj.step()));
  }
  return rate_entry(std::move(name), predicted, measured, tolerance);
}

std::vector<std::size_t> sample_indices(const Trajectory& traj, std::size_t max_count) {
  std::vector<std::size_t> out;
  const std::size_t stride = std::max<std::size_t>(1, traj.size() / max_count);
  for (std::size_t k = 0; k < traj.size(); k += stride) out.push_back(k);
  return out;
}

Vector embed_unit_mu(const Vector& s) {
  Vector z(s.size() + 1);
  z << s, 1.0;
  return z;
}

void add_divergence_entries(const SystemDefinition& sys, const Trajectory& traj,
                            InvariantReport& report) {
  std::vector<double> div;
  for (std::size_t k : sample_indices(traj, 64)) {
    div.push_back(divergence(sys, traj.states[k], traj.times[k]));
  }
  if (sys.force && sys.formulation == Formulation::hamiltonian) {
    InvariantEntry e;
    e.name = "volume_preservation";
    e.initial = div.front();
    for (double d : div) e.max_abs_drift = std::max(e.max_abs_drift, std::abs(d));
    e.max_rel_drift = e.max_abs_drift;
    e.tolerance = kVolumeTolerance;
    e.pass = e.max_abs_drift <= kVolumeTolerance;
    report.entries.push_back(e);
  } else if (sys.formulation == Formulation::metriplectic) {
    InvariantEntry e = drift_entry("divergence", div, kDivergenceTolerance);
    // A constant trace is the claim here, so the drift is judged absolutely.
    e.max_rel_drift = e.max_abs_drift;
    e.pass = e.max_abs_drift <= kDivergenceTolerance;
    report.entries.push_back(e);
  }
}

}  // namespace

InvariantReport check_invariants(const SystemDefinition& sys, const Trajectory& traj) {
  if (traj.size() < 2) throw std::invalid_argument("check_invariants: trajectory too short");
  InvariantReport report;
  report.system = sys.name;
  report.params = sys.params;
  report.t0 = traj.times.front();
  report.t1 = traj.times.back();
  report.dt = traj.step();
  report.samples = traj.size();

  const ScalarField& energy = sys.observables.at("energy");
  switch (sys.formulation) {
    case Formulation::hamiltonian:
    case Formulation::gyro:
      report.entries.push_back(drift_entry("energy", energy_series(sys, traj), kConservedTolerance));
      break;
    case Formulation::newton:
      report.entries.push_back(slope_check(
          "energy_rate", energy, traj,
          [&](const Vector& x, double t) { return partial_t(energy, x, t); }, kSlopeTolerance));
      break;
    case Formulation::metriplectic: {
      const MetriplecticStructure& m = *sys.metriplectic;
      report.entries.push_back(slope_check(
          "metriplectic_energy_rate", energy, traj,
          [&](const Vector& x, double t) {
            return m.a * double_bracket(m, m.hamiltonian, m.entropy, embed_unit_mu(x), t) +
                   partial_t(energy, x, t);
          },
          kMetriplecticRateTolerance));
      break;
    }
    case Formulation::gyro_metriplectic: {
      const double c = sys.gyro->c;
      report.entries.push_back(slope_check(
          "gyro_energy_rate", energy, traj,
          [&](const Vector& x, double t) {
            return c * energy.gradient(x, t).tail<2>().squaredNorm() + partial_t(energy, x, t);
          },
          kMetriplecticRateTolerance));
      break;
    }
    case Formulation::contact: {
      const ContactSystem& contact = *sys.contact;
      std::vector<double> invariant = herglotz_invariant_series(contact, traj);
      report.entries.push_back(drift_entry("herglotz_invariant", invariant, kHerglotzTolerance));
      report.entries.push_back(slope_check(
          "contact_energy_rate", energy, traj,
          [&](const Vector& x, double t) {
            return contact_energy_rate(contact, x, t) + partial_t(energy, x, t);
          },
          kSlopeTolerance));
      break;
    }
    case Formulation::galley: {
      const GalleySystem& g = *sys.galley;
      report.entries.push_back(slope_check(
          "galley_energy_rate", energy, traj,
          [&](const Vector& x, double t) {
            const Vector v = galley_rhs(g, x, t).head(g.n);
            return galley_energy_rate(g, x, v, t) + partial_t(energy, x, t);
          },
          kSlopeTolerance));
      break;
    }
  }

  if (sys.name == "radial_curl") {
    report.entries.push_back(
        drift_entry("angular_momentum", angular_momentum_series(sys, traj), kConservedTolerance));
  } else if (sys.name == "azimuthal_curl") {
    report.entries.push_back(variation_entry("angular_momentum",
                                             angular_momentum_series(sys, traj),
                                             kVariationThreshold));
  }

  add_divergence_entries(sys, traj, report);

  if (sys.conformal_rate) {
    const double span = std::min(1.0, report.t1 - report.t0);
    const Index d = sys.dim;
    Vector v1 = Vector::Zero(d);
    Vector v2 = Vector::Zero(d);
    v1[0] = 1.0;
    v2[d / 2] = 1.0;
    const double ratio =
        conformal_factor_check(sys, traj.states.front(), v1, v2, span, report.dt);
    report.entries.push_back(rate_entry("conformal_factor", {ratio},
                                        {std::exp(*sys.conformal_rate * span)},
                                        kConformalTolerance));
  }
  return report;
}

bool ComparisonResult::verdict() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const PairDivergence& p) { return p.pass; });
}

ComparisonResult compare_configurations(const std::vector<SystemDefinition>& systems,
                                        const Eigen::Vector4d& configuration, double t0,
                                        double t1, double dt, double tolerance) {
  if (systems.size() < 2) throw std::invalid_argument("compare needs at least two systems");
  std::vector<IntegrationJob> jobs;
  for (const SystemDefinition& sys : systems) {
    if (!sys.from_velocity) {
      throw std::invalid_argument("system '" + sys.name + "' has no velocity map");
    }
    jobs.push_back({&sys, sys.from_velocity(configuration.head<2>(), configuration.tail<2>()), t0,
                    t1, dt});
  }
  const std::vector<Trajectory> runs = integrate_many(jobs);
  ComparisonResult result;
  result.tolerance = tolerance;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      PairDivergence pair{systems[i].name, systems[j].name, 0.0, false};
      for (std::size_t k = 0; k < runs[i].size(); ++k) {
        const double d =
            (runs[i].states[k].head<2>() - runs[j].states[k].head<2>()).cwiseAbs().maxCoeff();
        pair.max_divergence = std::max(pair.max_divergence, d);
      }
      pair.pass = pair.max_divergence <= tolerance;
      result.pairs.push_back(pair);
    }
  }
  return result;
}

std::string to_json(const ComparisonResult& result, int indent) {
  json j;
  j["tolerance"] = result.tolerance;
  j["pairs"] = json::array();
  for (const PairDivergence& p : result.pairs) {
    j["pairs"].push_back({{"first", p.first},
                          {"second", p.second},
                          {"max_divergence", number(p.max_divergence)},
                          {"pass", p.pass}});
  }
  j["verdict"] = result.verdict() ? "pass" : "fail";
  return j.dump(indent);
}

}  // namespace curlforge
