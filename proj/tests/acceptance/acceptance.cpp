// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
// here and printed next to the measured values.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "curlforge/brackets.hpp"
#include "curlforge/catalog.hpp"
#include "curlforge/contact.hpp"
#include "curlforge/diagnostics.hpp"
#include "curlforge/galley.hpp"
#include "curlforge/integrate.hpp"
#include "support.hpp"

using namespace curlforge;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [failed]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Trajectory run(const SystemDefinition& sys, double t1 = 10.0, double dt = 1e-3) {
  return integrate(sys, default_initial_state(sys), 0.0, t1, dt);
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

double planar_gap(const Trajectory& tr, const std::vector<Planar>& twin) {
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    worst = std::max({worst, std::abs(tr.states[k][0] - twin[k][0]),
                      std::abs(tr.states[k][1] - twin[k][1])});
  }
  return worst;
}

// 1. Analytic curl of the radial force against the FD curl.
Outcome curl_formula() {
  Outcome o;
  for (const Potential& u : {Potential::linear(), Potential::quadratic(), Potential::sine()}) {
    const SystemDefinition sys = build_system("radial_curl", {}, u);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double x = -1.0 + 0.5 * i, y = -1.0 + 0.5 * j;
        const double analytic = -2.0 * x * y * u.second(0.5 * (x * x - y * y));
        worst = std::max(worst, rel_err(curl2d(*sys.force, x, y, 0.0), analytic));
      }
    }
    o.require(worst <= 1e-5, u.name + " rel err " + fmt(worst) + " <= 1e-5");
  }
  return o;
}

// 2. Conservation suite.
Outcome conservation() {
  Outcome o;
  const SystemDefinition radial = build_default("radial_curl");
  const Trajectory tr = run(radial);
  const InvariantEntry e = drift_entry("energy", energy_series(radial, tr), 1e-7);
  const InvariantEntry l = drift_entry("L", angular_momentum_series(radial, tr), 1e-7);
  o.require(e.pass, "radial energy drift " + fmt(e.max_rel_drift) + " <= 1e-7");
  o.require(l.pass, "radial L drift " + fmt(l.max_rel_drift) + " <= 1e-7");
  const SystemDefinition azimuthal = build_default("azimuthal_curl");
  const Trajectory ta = run(azimuthal);
  const InvariantEntry ea = drift_entry("energy", energy_series(azimuthal, ta), 1e-7);
  const InvariantEntry la = variation_entry("L", angular_momentum_series(azimuthal, ta), 1e-2);
  o.require(ea.pass, "azimuthal energy drift " + fmt(ea.max_rel_drift) + " <= 1e-7");
  o.require(la.pass, "azimuthal L variation " + fmt(la.max_abs_drift) + " > 1e-2");
  return o;
}

// 3. Divergence of every pure curl-force entry.
Outcome volume() {
  Outcome o;
  for (const CatalogEntry& entry : list_catalog()) {
    const SystemDefinition sys = build_default(entry.name);
    if (!sys.force) continue;
    double worst = 0.0;
    for (const Vector& x : probe_set(sys.dim, 32)) {
      worst = std::max(worst, std::abs(divergence(sys, x, 0.3)));
    }
    o.require(worst <= 1e-10, entry.name + " |div| " + fmt(worst) + " <= 1e-10");
  }
  return o;
}

// 4. Three damped formulations, one configuration trajectory.
Outcome triple_equivalence() {
  Outcome o;
  const Potential u = Potential::quadratic();
  const ComparisonResult r = compare_configurations(
      {build_system("bateman_metriplectic", {{"gamma", 0.2}}, u),
       build_system("contact_radial", {{"gamma", 0.2}}, u),
       build_system("conformal_curl", {{"gamma", 0.2}}, u)},
      kDefaultConfiguration, 0.0, 10.0, 1e-3, 1e-7);
  for (const PairDivergence& p : r.pairs) {
    o.require(p.pass, p.first + "/" + p.second + " " + fmt(p.max_divergence) + " <= 1e-7");
  }
  return o;
}

// 5. Herglotz invariant and the contact energy rate.
Outcome herglotz_invariant() {
  Outcome o;
  for (const std::string name : {"contact_radial", "contact_km"}) {
    const SystemDefinition sys = build_default(name);
    const InvariantReport report = check_invariants(sys, run(sys));
    const InvariantEntry* inv = report.find("herglotz_invariant");
    const InvariantEntry* rate = report.find("contact_energy_rate");
    o.require(inv && inv->max_rel_drift <= 1e-6,
              name + " I drift " + fmt(inv ? inv->max_rel_drift : NAN) + " <= 1e-6");
    o.require(rate && rate->max_rel_drift <= 1e-4,
              name + " dH/dt err " + fmt(rate ? rate->max_rel_drift : NAN) + " <= 1e-4");
  }
  return o;
}

// 6. Generalized Euler-Lagrange residual on contact trajectories.
Outcome herglotz_legendre() {
  Outcome o;
  const Potential u = Potential::quadratic();
  struct Case {
    std::string name;
    std::function<double(double, double)> potential;
  };
  const std::vector<Case> cases{
      {"contact_radial", [u](double x, double y) { return u.value(0.5 * (x * x - y * y)); }},
      {"contact_km", [](double x, double y) { return 0.5 * (x * x - y * y) + x * y; }},
  };
  for (const Case& c : cases) {
    const SystemDefinition sys = build_default(c.name);
    const double gamma = sys.params.at("gamma");
    const HerglotzLagrangian lag{2, ScalarField("L", [c, gamma](const Vector& s, double) {
                                   return 0.5 * (s[2] * s[2] - s[3] * s[3]) -
                                          c.potential(s[0], s[1]) - gamma * s[4];
                                 })};
    const LagrangianPath path = contact_path(*sys.contact, run(sys));
    const double on = max_of(herglotz_el_residual(lag, path));
    o.require(on <= 1e-4, c.name + " residual " + fmt(on) + " <= 1e-4");

    LagrangianPath bent = path;
    for (std::size_t k = 0; k < bent.size(); ++k) {
      const double t = bent.times[k];
      bent.q[k][0] += 0.1 * std::sin(2.0 * t);
      bent.qdot[k][0] += 0.2 * std::cos(2.0 * t);
    }
    const double off = max_of(herglotz_el_residual(lag, bent));
    o.require(off > 1e-1, c.name + " perturbed " + fmt(off) + " > 1e-1");
  }
  return o;
}

// 7. Galley reduction.
Outcome galley_reduction() {
  Outcome o;
  const double kappa = 0.2;
  const SystemDefinition bateman = build_system("galley_bateman", {{"kappa", kappa}});
  const Trajectory tb = run(bateman);
  const auto twin = newton_twin(
      [kappa](const Planar& s, double) {
        return std::array<double, 2>{kappa * s[2] - s[0], kappa * s[3] - s[1]};
      },
      {kDefaultConfiguration[0], kDefaultConfiguration[1], kDefaultConfiguration[2],
       kDefaultConfiguration[3]},
      0.0, 1e-3, tb.size() - 1);
  const double gap = planar_gap(tb, twin);
  o.require(gap <= 1e-8, "bateman vs x''-kx'+x=0 " + fmt(gap) + " <= 1e-8");

  const SystemDefinition forced = build_system(
      "galley_forced_km", {{"a", 1.0}, {"b", 1.0}, {"kappa", 0.0}, {"f_x", 0.0}, {"f_y", 0.0}});
  const SystemDefinition kapitsa = build_system("kapitsa", {{"a", 1.0}, {"b", 1.0}});
  const Trajectory tf = run(forced);
  const Trajectory tk = run(kapitsa);
  double worst = 0.0;
  for (std::size_t k = 0; k < tf.size(); ++k) {
    worst = std::max(worst, (tf.states[k] - tk.states[k]).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-9, "forced_km(f=0,k=0) vs kapitsa " + fmt(worst) + " <= 1e-9");

  auto bilinear = [](const ComplexVector& u, const ComplexVector& v) {
    return (u.array() * v.array()).sum();
  };
  const ScalarField h = kapitsa_hamiltonian(1.0, 1.0);
  const GalleySystem plain = GalleySystem::from_potential(
      2, h, [=](const ComplexVector&, const ComplexVector& qm, const ComplexVector& pp,
                const ComplexVector&, double) { return kappa * bilinear(pp, qm); });
  const GalleySystem augmented = GalleySystem::from_potential(
      2, h,
      [=](const ComplexVector& qp, const ComplexVector& qm, const ComplexVector& pp,
          const ComplexVector&, double) { return kappa * bilinear(pp, qm) + bilinear(pp, qp); },
      false);
  bool identical = true;
  for (const Vector& x : probe_set(4, 32)) {
    identical = identical && galley_rhs(plain, x, 0.0) == galley_rhs(augmented, x, 0.0);
  }
  o.require(identical, "p+.q+ augmented K rhs identical at 32 probes");
  return o;
}

// 8. Linear stability, including the Thomson-Tait witness search.
Outcome stability() {
  Outcome o;
  const double center = linear_stability("kapitsa", {{"a", 0.0}, {"b", 1.0}}).max_real_part;
  o.require(center <= 1e-9, "kapitsa(0,1) max Re " + fmt(center) + " <= 1e-9");
  const double flat = linear_stability("kapitsa", {{"a", 1.0}, {"b", 0.0}}).max_real_part;
  const double oracle = kapitsa_quartic_max_real(1.0, 0.0);
  o.require(std::abs(flat - std::sqrt(0.5)) <= 1e-9 && std::abs(flat - oracle) <= 1e-9,
            "kapitsa(1,0) max Re - 2^-1/2 = " + fmt(flat - std::sqrt(0.5)) + " within 1e-9");
  const StabilityResult merkin = linear_stability("kapitsa", {{"a", 1.0}, {"b", 1.0}});
  o.require(merkin.classification == StabilityClass::unstable,
            "kapitsa(1,1) " + std::string(to_string(merkin.classification)));

  // Thomson-Tait fixture: a gyroscopically stabilized negative stiffness
  // (b < 0, c = 0, max Re <= 1e-9) destabilized by c = 0.01 (max Re > 1e-6).
  std::vector<ParamMap> grid;
  for (int ib = 1; ib <= 40; ++ib) {
    for (int ia = 0; ia <= 8; ++ia) {
      for (int is = 0; is <= 40; ++is) {
        grid.push_back({{"a", 0.25 * ia}, {"b", -0.05 * ib}, {"s", 0.25 * is}, {"c", 0.0}});
      }
    }
  }
  const std::vector<StabilityResult> sweep = stability_sweep("gyro_dissipative_km", grid);
  double least = INFINITY;
  const ParamMap* witness = nullptr;
  for (std::size_t i = 0; i < grid.size() && !witness; ++i) {
    least = std::min(least, sweep[i].max_real_part);
    if (sweep[i].max_real_part > 1e-9) continue;
    ParamMap damped = grid[i];
    damped["c"] = 0.01;
    if (linear_stability("gyro_dissipative_km", damped).max_real_part > 1e-6) witness = &grid[i];
  }
  if (witness) {
    o.require(true, "TT witness a=" + fmt(witness->at("a")) + " b=" + fmt(witness->at("b")) +
                        " s=" + fmt(witness->at("s")));
  } else {
    o.require(false, "TT witness: none among " + std::to_string(grid.size()) +
                         " b<0 points, smallest c=0 max Re " + fmt(least));
  }
  return o;
}

// 9. Bracket axioms, double-bracket positivity, metriplectic energy rate.
Outcome bracket_axioms() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  const std::vector<std::pair<std::string, BivectorField>> structures{
      {"canonical", canonical_bivector(2)},
      {"heisenberg", heisenberg_bivector({2})},
      {"gyro", gyro_bivector({0.7, 0.0})}};
  for (const auto& [label, l] : structures) {
    const int dim = static_cast<int>(l.dim);
    double anti = 0.0, leibniz = 0.0, jacobi = 0.0;
    for (int k = 0; k < 50; ++k) {
      const RandomPolynomial pf = random_polynomial(rng, dim);
      const RandomPolynomial pg = random_polynomial(rng, dim);
      const RandomPolynomial ph = random_polynomial(rng, dim);
      const ScalarField f = pf.field(), g = pg.field(), h = ph.field();
      const ScalarField fg("fg", [pf, pg](const Vector& z, double) { return pf(z) * pg(z); });
      const Vector z = random_point(rng, dim);
      anti = std::max(anti, std::abs(bivector_bracket(l, f, h, z) + bivector_bracket(l, h, f, z)));
      leibniz = std::max(leibniz, std::abs(bivector_bracket(l, fg, h, z) -
                                           pf(z) * bivector_bracket(l, g, h, z) -
                                           pg(z) * bivector_bracket(l, f, h, z)));
      jacobi = std::max(jacobi, jacobi_defect(l, z));
    }
    o.require(anti <= 1e-8 && leibniz <= 1e-8 && jacobi <= 1e-8,
              label + " anti " + fmt(anti) + " leibniz " + fmt(leibniz) + " jacobi " + fmt(jacobi));
  }

  const SystemDefinition bateman = build_default("bateman_metriplectic");
  const MetriplecticStructure& m = *bateman.metriplectic;
  double lowest = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ScalarField f = random_polynomial(rng, 5, 6).field();
    lowest = std::min(lowest, double_bracket(m, f, f, random_point(rng, 5, 2.0)));
  }
  o.require(lowest >= -1e-10, "(F,F) min " + fmt(lowest) + " >= -1e-10");

  const InvariantEntry* rate = check_invariants(bateman, run(bateman)).find("metriplectic_energy_rate");
  o.require(rate && rate->max_rel_drift <= 1e-6,
            "dH/dt = a(H,S) err " + fmt(rate ? rate->max_rel_drift : NAN) + " <= 1e-6");
  return o;
}

// 10. Conformal factor of the tangent flow.
Outcome conformal_scaling() {
  Outcome o;
  const SystemDefinition sys =
      build_system("conformal_curl", {{"gamma", 0.3}}, Potential::quadratic());
  Vector x0(4), v1(4), v2(4);
  x0 << 1.0, 0.2, -0.2, 0.2;
  v1 << 1.0, 0.0, 0.0, 0.0;
  v2 << 0.0, 0.0, 1.0, 0.0;
  for (double T : {1.0, 2.0}) {
    const double ratio = conformal_factor_check(sys, x0, v1, v2, T);
    const double err = std::abs(ratio - std::exp(-0.3 * T));
    o.require(err <= 1e-4, "T=" + fmt(T) + " |ratio - e^-0.3T| " + fmt(err) + " <= 1e-4");
  }
  return o;
}

// 11. Integrator order and the matrix-exponential oracle.
Outcome integrator() {
  Outcome o;
  const VectorField harmonic = [](const Vector& s, double) {
    Vector v(2);
    v << s[1], -s[0];
    return v;
  };
  Vector x0(2);
  x0 << 1.0, 0.0;
  auto error = [&](double dt) {
    return (integrate(harmonic, x0, 0.0, 2.0 * std::numbers::pi, dt).states.back() - x0).norm();
  };
  const double ratio = error(2e-2) / error(1e-2);
  o.require(std::abs(ratio - 16.0) <= 3.0, "harmonic ratio " + fmt(ratio) + " in 16+-3");

  const SystemDefinition kapitsa = build_system("kapitsa", {{"a", 1.0}, {"b", 1.0}});
  const Vector s0 = default_initial_state(kapitsa);
  const Vector end = run(kapitsa, 1.0).states.back();
  const double gap =
      (end - matrix_exponential(linear_matrix(kapitsa)) * s0).cwiseAbs().maxCoeff();
  o.require(gap <= 1e-8, "kapitsa(1,1) vs exp(A) at t=1 " + fmt(gap) + " <= 1e-8");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"curl formula", curl_formula},
      {"conservation suite", conservation},
      {"volume preservation", volume},
      {"triple equivalence", triple_equivalence},
      {"Herglotz invariant", herglotz_invariant},
      {"Herglotz/Legendre correspondence", herglotz_legendre},
      {"Galley reduction", galley_reduction},
      {"stability", stability},
      {"bracket axioms", bracket_axioms},
      {"conformal scaling", conformal_scaling},
      {"integrator", integrator},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
