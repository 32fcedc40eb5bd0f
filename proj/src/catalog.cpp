#include "curlforge/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curlforge {

std::string_view to_string(Formulation f) {
  switch (f) {
    case Formulation::hamiltonian: return "hamiltonian";
    case Formulation::metriplectic: return "metriplectic";
    case Formulation::gyro: return "gyro";
    case Formulation::gyro_metriplectic: return "gyro_metriplectic";
    case Formulation::contact: return "contact";
    case Formulation::galley: return "galley";
    case Formulation::newton: return "newton";
  }
  return "unknown";
}

// Potentials ------------------------------------------------------------------

Potential Potential::linear() {
  return {"linear", [](double xi) { return xi; }, [](double) { return 1.0; },
          [](double) { return 0.0; }};
}

Potential Potential::quadratic() {
  return {"quadratic", [](double xi) { return 0.5 * xi * xi; }, [](double xi) { return xi; },
          [](double) { return 1.0; }};
}

Potential Potential::sine() {
  return {"sine", [](double xi) { return std::sin(xi); }, [](double xi) { return std::cos(xi); },
          [](double xi) { return -std::sin(xi); }};
}

Potential Potential::custom(std::string name, std::function<double(double)> value,
                            std::function<double(double)> first,
                            std::function<double(double)> second) {
  return {std::move(name), std::move(value), std::move(first), std::move(second)};
}

Potential Potential::named(std::string_view name) {
  if (name == "linear") return linear();
  if (name == "quadratic") return quadratic();
  if (name == "sine") return sine();
  throw CatalogError("unknown potential '" + std::string(name) +
                     "' (expected linear, quadratic or sine)");
}

// Schema ----------------------------------------------------------------------

ParamMap CatalogEntry::defaults() const {
  ParamMap out;
  for (const ParamSpec& p : params) out[p.name] = p.default_value;
  return out;
}

bool CatalogEntry::has_param(std::string_view key) const {
  return std::any_of(params.begin(), params.end(),
                     [&](const ParamSpec& p) { return p.name == key; });
}

ParamMap CatalogEntry::with_defaults(const ParamMap& overrides) const {
  ParamMap out = defaults();
  for (const auto& [key, value] : overrides) {
    if (!has_param(key)) {
      throw CatalogError("system '" + name + "' has no parameter '" + key + "'");
    }
    out[key] = value;
  }
  return out;
}

namespace {

const ParamSpec kA{"a", 1.0, "curl (nonconservative positional) coupling"};
const ParamSpec kB{"b", 1.0, "saddle curvature of the potential part"};
const ParamSpec kGamma{"gamma", 0.2, "damping coefficient"};
const ParamSpec kKappa{"kappa", 0.2, "Galley coupling coefficient"};
const ParamSpec kS{"s", 0.5, "magnetic (skew) coefficient"};
const ParamSpec kC{"c", 0.1, "symmetric dissipation coefficient"};
const ParamSpec kFx{"f_x", 0.0, "constant external force, x component"};
const ParamSpec kFy{"f_y", 0.0, "constant external force, y component"};
const ParamSpec kOmega{"omega", 1.0, "saddle drive frequency"};

std::vector<CatalogEntry> make_entries() {
  std::vector<CatalogEntry> entries{
      {"radial_curl", Formulation::hamiltonian, {}, true,
       "x'' = -x U'(xi), y'' = -y U'(xi), xi = (x^2 - y^2)/2"},
      {"azimuthal_curl", Formulation::hamiltonian, {}, true,
       "x'' = -y U'(xy), y'' = x U'(xy)"},
      {"kapitsa", Formulation::hamiltonian, {kA, kB}, false,
       "x'' + a y + b x = 0, y'' - a x + b y = 0"},
      {"rotating_saddle", Formulation::newton, {kOmega}, false,
       "r'' = -grad U, U = (x^2 - y^2)/2 cos(2 omega t) - x y sin(2 omega t)"},
      {"bateman_metriplectic", Formulation::metriplectic, {kGamma}, true,
       "x' = p_x - gamma x, y' = -p_y - gamma y, p_x' = -x U', p_y' = y U'"},
      {"conformal_curl", Formulation::metriplectic, {kGamma}, true,
       "x' = p_x, y' = -p_y, p_x' = -gamma p_x - x U', p_y' = -gamma p_y + y U'"},
      {"gyro_curl", Formulation::gyro, {kS}, true,
       "x' = p_x, y' = -p_y, p_x' = -x U' + s p_y, p_y' = y U' + s p_x"},
      {"gyro_dissipative_km", Formulation::gyro_metriplectic, {kA, kB, kS, kC}, false,
       "x'' + s y' - c x' + b x + a y = 0, y'' + s x' + c y' + b y - a x = 0"},
      {"contact_radial", Formulation::contact, {kGamma}, true,
       "H = (p_x^2 - p_y^2)/2 + U(xi) + gamma z; x'' + gamma x' + x U' = 0, "
       "y'' + gamma y' + y U' = 0"},
      {"contact_km", Formulation::contact, {kA, kB, kGamma}, false,
       "H = (p_x^2 - p_y^2)/2 + b(x^2 - y^2)/2 + a x y + gamma z"},
      {"galley_bateman", Formulation::galley, {kKappa}, false,
       "H = (p_x^2 - p_y^2)/2 + (x^2 - y^2)/2, K = kappa p+ . q-; x'' - kappa x' + x = 0"},
      {"galley_forced_km", Formulation::galley, {kA, kB, kKappa, kFx, kFy}, false,
       "K = -kappa p+ . q- + f . q-; p_x' = -b x - a y - kappa p_x + f_x, "
       "p_y' = b y - a x - kappa p_y + f_y"},
  };
  std::sort(entries.begin(), entries.end(),
            [](const CatalogEntry& l, const CatalogEntry& r) { return l.name < r.name; });
  return entries;
}

// Shared pieces ---------------------------------------------------------------

Vector anisotropic_from_velocity(const Eigen::Vector2d& q, const Eigen::Vector2d& v,
                                 bool with_z) {
  Vector s = Vector::Zero(with_z ? 5 : 4);
  s << q.x(), q.y(), v.x(), -v.y(), (with_z ? Vector::Zero(1) : Vector());
  return s;
}

ScalarField angular_momentum_observable(const VectorField& rhs) {
  return ScalarField("angular_momentum", [rhs](const Vector& s, double t) {
    const Vector v = rhs(s, t);
    return s[0] * v[1] - s[1] * v[0];
  });
}

void finish(SystemDefinition& sys) {
  sys.observables.emplace("angular_momentum", angular_momentum_observable(sys.rhs));
}

// Appends a z-linear term gamma(t) z to a 4-coordinate Hamiltonian.
ScalarField with_contact_term(const ScalarField& h4, TimeFunction gamma) {
  return ScalarField(
      h4.label() + " + gamma z",
      [h4, gamma](const Vector& s, double t) { return h4(Vector(s.head(4)), t) + gamma(t) * s[4]; },
      [h4, gamma](const Vector& s, double t) {
        Vector g(5);
        g.head(4) = h4.gradient(Vector(s.head(4)), t);
        g[4] = gamma(t);
        return g;
      });
}

// Lifts a 4-coordinate field onto the Heisenberg dual (x, y, p_x, p_y, mu).
ScalarField lift_to_heisenberg(const ScalarField& f4) {
  return ScalarField(
      f4.label(), [f4](const Vector& s, double t) { return f4(Vector(s.head(4)), t); },
      [f4](const Vector& s, double t) {
        Vector g = Vector::Zero(5);
        g.head(4) = f4.gradient(Vector(s.head(4)), t);
        return g;
      });
}

Vector embed_unit_mu(const Vector& s) {
  Vector z(5);
  z << s, 1.0;
  return z;
}

SystemDefinition metriplectic_on_heisenberg(std::string name, const Potential& u,
                                            ScalarField entropy) {
  MetriplecticStructure m{heisenberg_bivector({2}), lift_to_heisenberg(radial_hamiltonian(u)),
                          std::move(entropy), 1.0};
  SystemDefinition sys;
  sys.name = std::move(name);
  sys.formulation = Formulation::metriplectic;
  sys.dim = 4;
  sys.potential = u.name;
  sys.rhs = [m](const Vector& s, double t) { return Vector(metriplectic_rhs(m, embed_unit_mu(s), t).head(4)); };
  sys.observables.emplace("energy", radial_hamiltonian(u));
  sys.metriplectic = m;
  return sys;
}

double param(const ParamMap& params, const std::string& key) { return params.at(key); }

// Unconjugated u . v; Eigen's dot conjugates its left operand.
std::complex<double> bilinear(const ComplexVector& u, const ComplexVector& v) {
  return (u.array() * v.array()).sum();
}

}  // namespace

const std::vector<CatalogEntry>& list_catalog() {
  static const std::vector<CatalogEntry> entries = make_entries();
  return entries;
}

const CatalogEntry& find_entry(std::string_view name) {
  for (const CatalogEntry& e : list_catalog()) {
    if (e.name == name) return e;
  }
  throw CatalogError("unknown system '" + std::string(name) + "'");
}

// Hamiltonians ----------------------------------------------------------------

ScalarField radial_hamiltonian(const Potential& u) {
  return ScalarField(
      "radial_curl_hamiltonian",
      [u](const Vector& s, double) {
        const double xi = 0.5 * (s[0] * s[0] - s[1] * s[1]);
        return 0.5 * (s[2] * s[2] - s[3] * s[3]) + u.value(xi);
      },
      [u](const Vector& s, double) {
        const double xi = 0.5 * (s[0] * s[0] - s[1] * s[1]);
        const double du = u.first(xi);
        Vector g(4);
        g << s[0] * du, -s[1] * du, s[2], -s[3];
        return g;
      });
}

namespace {

ScalarField azimuthal_hamiltonian(const Potential& u) {
  return ScalarField(
      "azimuthal_curl_hamiltonian",
      [u](const Vector& s, double) {
        return 0.5 * (s[2] * s[2] - s[3] * s[3]) + u.value(s[0] * s[1]);
      },
      [u](const Vector& s, double) {
        const double du = u.first(s[0] * s[1]);
        Vector g(4);
        g << s[1] * du, s[0] * du, s[2], -s[3];
        return g;
      });
}

}  // namespace

ScalarField kapitsa_hamiltonian(double a, double b) {
  return ScalarField(
      "kapitsa_hamiltonian",
      [a, b](const Vector& s, double) {
        return 0.5 * (s[2] * s[2] - s[3] * s[3]) + 0.5 * b * (s[0] * s[0] - s[1] * s[1]) +
               a * s[0] * s[1];
      },
      [a, b](const Vector& s, double) {
        Vector g(4);
        g << b * s[0] + a * s[1], -b * s[1] + a * s[0], s[2], -s[3];
        return g;
      });
}

// Builders --------------------------------------------------------------------

namespace {

SystemDefinition canonical_system(std::string name, ScalarField h, ForceField2D force) {
  SystemDefinition sys;
  sys.name = std::move(name);
  sys.formulation = Formulation::hamiltonian;
  sys.dim = 4;
  const BivectorField lambda = canonical_bivector(2);
  sys.rhs = [lambda, h](const Vector& s, double t) {
    return hamiltonian_vector_field(lambda, h, s, t);
  };
  sys.observables.emplace("energy", std::move(h));
  sys.from_velocity = [](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    return anisotropic_from_velocity(q, v, false);
  };
  sys.force = std::move(force);
  return sys;
}

SystemDefinition make_radial_curl(const Potential& u) {
  SystemDefinition sys = canonical_system(
      "radial_curl", radial_hamiltonian(u), ForceField2D{[u](double x, double y, double) {
        const double du = u.first(0.5 * (x * x - y * y));
        return Eigen::Vector2d(-x * du, -y * du);
      }});
  sys.potential = u.name;
  return sys;
}

SystemDefinition make_azimuthal_curl(const Potential& u) {
  SystemDefinition sys = canonical_system(
      "azimuthal_curl", azimuthal_hamiltonian(u), ForceField2D{[u](double x, double y, double) {
        const double du = u.first(x * y);
        return Eigen::Vector2d(-y * du, x * du);
      }});
  sys.potential = u.name;
  return sys;
}

SystemDefinition make_kapitsa(double a, double b) {
  SystemDefinition sys = canonical_system(
      "kapitsa", kapitsa_hamiltonian(a, b), ForceField2D{[a, b](double x, double y, double) {
        return Eigen::Vector2d(-b * x - a * y, a * x - b * y);
      }});
  sys.linear = true;
  return sys;
}

SystemDefinition make_rotating_saddle(double omega) {
  SystemDefinition sys;
  sys.name = "rotating_saddle";
  sys.formulation = Formulation::newton;
  sys.dim = 4;
  const ForceField2D force{[omega](double x, double y, double t) {
    const double c = std::cos(2.0 * omega * t);
    const double s = std::sin(2.0 * omega * t);
    return Eigen::Vector2d(-x * c + y * s, y * c + x * s);
  }};
  sys.rhs = [force](const Vector& s, double t) {
    Vector out(4);
    out << s[2], s[3], force(s[0], s[1], t);
    return out;
  };
  sys.observables.emplace(
      "energy", ScalarField("rotating_saddle_energy", [omega](const Vector& s, double t) {
        const double c = std::cos(2.0 * omega * t);
        const double sn = std::sin(2.0 * omega * t);
        return 0.5 * (s[2] * s[2] + s[3] * s[3]) + 0.5 * (s[0] * s[0] - s[1] * s[1]) * c -
               s[0] * s[1] * sn;
      }));
  sys.from_velocity = [](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    Vector s(4);
    s << q, v;
    return s;
  };
  sys.force = force;
  return sys;
}

SystemDefinition make_gyro_curl(const Potential& u, double s) {
  const ScalarField h = radial_hamiltonian(u);
  const GyroMetriplecticCoefficients coeff{s, 0.0};
  SystemDefinition sys;
  sys.name = "gyro_curl";
  sys.formulation = Formulation::gyro;
  sys.dim = 4;
  sys.potential = u.name;
  sys.rhs = [h, coeff](const Vector& x, double t) { return gyro_bracket_rhs(h, coeff, x, t); };
  sys.observables.emplace("energy", h);
  sys.from_velocity = [](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    return anisotropic_from_velocity(q, v, false);
  };
  sys.gyro = coeff;
  return sys;
}

SystemDefinition make_gyro_dissipative_km(double a, double b, double s, double c) {
  const ScalarField h = kapitsa_hamiltonian(a, b);
  const GyroMetriplecticCoefficients coeff{s, c};
  SystemDefinition sys;
  sys.name = "gyro_dissipative_km";
  sys.formulation = Formulation::gyro_metriplectic;
  sys.dim = 4;
  sys.rhs = [h, coeff](const Vector& x, double t) {
    return gyro_metriplectic_rhs(h, coeff, x, t);
  };
  sys.observables.emplace("energy", h);
  sys.from_velocity = [](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    return anisotropic_from_velocity(q, v, false);
  };
  sys.gyro = coeff;
  sys.linear = true;
  return sys;
}

SystemDefinition make_contact(std::string name, ScalarField h4, TimeFunction gamma) {
  const ContactSystem contact{2, with_contact_term(h4, std::move(gamma))};
  SystemDefinition sys;
  sys.name = std::move(name);
  sys.formulation = Formulation::contact;
  sys.dim = 5;
  sys.rhs = [contact](const Vector& s, double t) { return contact_vector_field(contact, s, t); };
  sys.observables.emplace("energy", contact.hamiltonian);
  sys.from_velocity = [](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    return anisotropic_from_velocity(q, v, true);
  };
  sys.contact = contact;
  return sys;
}

SystemDefinition galley_system(std::string name, GalleySystem g) {
  SystemDefinition sys;
  sys.name = std::move(name);
  sys.formulation = Formulation::galley;
  sys.dim = 4;
  sys.rhs = [g](const Vector& s, double t) { return galley_rhs(g, s, t); };
  sys.observables.emplace("energy", g.hamiltonian);
  sys.from_velocity = [](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    return anisotropic_from_velocity(q, v, false);
  };
  sys.galley = std::move(g);
  return sys;
}

SystemDefinition make_galley_bateman(double kappa) {
  NonconservativePotential k = [kappa](const ComplexVector&, const ComplexVector& q_minus,
                                       const ComplexVector& p_plus, const ComplexVector&,
                                       double) { return kappa * bilinear(p_plus, q_minus); };
  return galley_system("galley_bateman",
                       GalleySystem::from_potential(2, kapitsa_hamiltonian(0.0, 1.0), k));
}

}  // namespace

SystemDefinition make_bateman_metriplectic(const Potential& u, TimeFunction gamma) {
  ScalarField entropy(
      "entropy", [gamma](const Vector& s, double t) { return -0.5 * gamma(t) * (s[0] * s[0] + s[1] * s[1]); },
      [gamma](const Vector& s, double t) {
        Vector g = Vector::Zero(5);
        g[0] = -gamma(t) * s[0];
        g[1] = -gamma(t) * s[1];
        return g;
      });
  SystemDefinition sys = metriplectic_on_heisenberg("bateman_metriplectic", u, std::move(entropy));
  const double gamma0 = gamma(0.0);
  sys.from_velocity = [gamma0](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    Vector s(4);
    s << q.x(), q.y(), v.x() + gamma0 * q.x(), -v.y() - gamma0 * q.y();
    return s;
  };
  finish(sys);
  return sys;
}

SystemDefinition make_conformal_curl(const Potential& u, TimeFunction gamma) {
  ScalarField entropy(
      "entropy", [gamma](const Vector& s, double t) { return -0.5 * gamma(t) * (s[2] * s[2] + s[3] * s[3]); },
      [gamma](const Vector& s, double t) {
        Vector g = Vector::Zero(5);
        g[2] = -gamma(t) * s[2];
        g[3] = -gamma(t) * s[3];
        return g;
      });
  SystemDefinition sys = metriplectic_on_heisenberg("conformal_curl", u, std::move(entropy));
  sys.from_velocity = [](const Eigen::Vector2d& q, const Eigen::Vector2d& v) {
    return anisotropic_from_velocity(q, v, false);
  };
  sys.conformal_rate = -gamma(0.0);
  finish(sys);
  return sys;
}

SystemDefinition make_contact_radial(const Potential& u, TimeFunction gamma) {
  SystemDefinition sys = make_contact("contact_radial", radial_hamiltonian(u), std::move(gamma));
  sys.potential = u.name;
  finish(sys);
  return sys;
}

SystemDefinition make_contact_km(double a, double b, TimeFunction gamma) {
  SystemDefinition sys = make_contact("contact_km", kapitsa_hamiltonian(a, b), std::move(gamma));
  finish(sys);
  return sys;
}

SystemDefinition make_galley_forced_km(double a, double b, double kappa,
                                       std::function<Eigen::Vector2d(double)> forcing) {
  NonconservativePotential k = [kappa, forcing](const ComplexVector&, const ComplexVector& q_minus,
                                                const ComplexVector& p_plus, const ComplexVector&,
                                                double t) {
    const Eigen::Vector2d f = forcing(t);
    return -kappa * bilinear(p_plus, q_minus) + bilinear(f.cast<std::complex<double>>(), q_minus);
  };
  SystemDefinition sys = galley_system(
      "galley_forced_km", GalleySystem::from_potential(2, kapitsa_hamiltonian(a, b), k));
  finish(sys);
  return sys;
}

SystemDefinition build_system(std::string_view name, const ParamMap& params,
                              std::optional<Potential> potential) {
  const CatalogEntry& entry = find_entry(name);
  for (const ParamSpec& spec : entry.params) {
    const auto it = params.find(spec.name);
    if (it == params.end()) {
      throw CatalogError("system '" + entry.name + "' is missing parameter '" + spec.name + "'");
    }
    if (!std::isfinite(it->second)) {
      throw CatalogError("parameter '" + spec.name + "' must be finite");
    }
  }
  for (const auto& [key, value] : params) {
    if (!entry.has_param(key)) {
      throw CatalogError("system '" + entry.name + "' has no parameter '" + key + "'");
    }
  }
  if (entry.takes_potential && !potential) {
    throw CatalogError("system '" + entry.name + "' requires a potential U");
  }
  if (!entry.takes_potential && potential) {
    throw CatalogError("system '" + entry.name + "' does not take a potential");
  }

  auto constant = [](double v) { return TimeFunction([v](double) { return v; }); };
  SystemDefinition sys;
  if (entry.name == "radial_curl") {
    sys = make_radial_curl(*potential);
  } else if (entry.name == "azimuthal_curl") {
    sys = make_azimuthal_curl(*potential);
  } else if (entry.name == "kapitsa") {
    sys = make_kapitsa(param(params, "a"), param(params, "b"));
  } else if (entry.name == "rotating_saddle") {
    sys = make_rotating_saddle(param(params, "omega"));
  } else if (entry.name == "bateman_metriplectic") {
    sys = make_bateman_metriplectic(*potential, constant(param(params, "gamma")));
  } else if (entry.name == "conformal_curl") {
    sys = make_conformal_curl(*potential, constant(param(params, "gamma")));
  } else if (entry.name == "gyro_curl") {
    sys = make_gyro_curl(*potential, param(params, "s"));
  } else if (entry.name == "gyro_dissipative_km") {
    sys = make_gyro_dissipative_km(param(params, "a"), param(params, "b"), param(params, "s"),
                                   param(params, "c"));
  } else if (entry.name == "contact_radial") {
    sys = make_contact_radial(*potential, constant(param(params, "gamma")));
  } else if (entry.name == "contact_km") {
    sys = make_contact_km(param(params, "a"), param(params, "b"), constant(param(params, "gamma")));
  } else if (entry.name == "galley_bateman") {
    sys = make_galley_bateman(param(params, "kappa"));
  } else if (entry.name == "galley_forced_km") {
    const Eigen::Vector2d f(param(params, "f_x"), param(params, "f_y"));
    sys = make_galley_forced_km(param(params, "a"), param(params, "b"), param(params, "kappa"),
                                [f](double) { return f; });
    sys.linear = f.isZero(0.0);
  }
  if (!sys.observables.count("angular_momentum")) finish(sys);
  sys.params = params;
  return sys;
}

SystemDefinition build_default(std::string_view name) {
  const CatalogEntry& entry = find_entry(name);
  return build_system(name, entry.defaults(),
                      entry.takes_potential ? std::optional<Potential>(Potential::quadratic())
                                            : std::nullopt);
}

Vector default_initial_state(const SystemDefinition& sys) {
  return sys.from_velocity(kDefaultConfiguration.head<2>(), kDefaultConfiguration.tail<2>());
}

}  // namespace curlforge
