#include "geolab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace geolab {

namespace {

constexpr cplx kI{0.0, 1.0};

// Real inner product of complex vectors, i.e. the Euclidean pairing after
// forgetting the complex structure.
double rip(const CVec& a, const CVec& b) { return std::real(a.dot(b)); }

void require_unitary(const CMat& g, const char* who) {
  if (g.rows() != g.cols()) throw std::invalid_argument(std::string(who) + ": position not square");
  if (unitarity_residual(g) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": position must be unitary");
}

void require_skew(const CMat& x, const char* who) {
  if (skew_residual(x) > 1e-8 * (1.0 + x.norm()))
    throw std::invalid_argument(std::string(who) + ": velocity must be skew-Hermitian");
}

void require_step_plan(double dt, int steps, const char* who) {
  if (!(std::isfinite(dt)) || dt == 0.0)
    throw std::invalid_argument(std::string(who) + ": dt must be finite and nonzero");
  if (steps < 0) throw std::invalid_argument(std::string(who) + ": steps must be >= 0");
}

void matrix_labels(std::vector<std::string>& out, const std::string& tag, int n) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.push_back(tag + "_re_" + std::to_string(i) + std::to_string(j));
      out.push_back(tag + "_im_" + std::to_string(i) + std::to_string(j));
    }
}

void matrix_values(std::vector<double>& out, const CMat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      out.push_back(m(i, j).real());
      out.push_back(m(i, j).imag());
    }
}

void vector_labels(std::vector<std::string>& out, const std::string& tag, int n) {
  for (int i = 0; i < n; ++i) {
    out.push_back(tag + "_re_" + std::to_string(i));
    out.push_back(tag + "_im_" + std::to_string(i));
  }
}

void vector_values(std::vector<double>& out, const CVec& v) {
  for (int i = 0; i < v.size(); ++i) {
    out.push_back(v[i].real());
    out.push_back(v[i].imag());
  }
}

RVec as_rvec(const std::vector<double>& vals) {
  return Eigen::Map<const RVec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void push(Trajectory& tr, const std::string& key, double v) { tr.monitors[key].push_back(v); }

}  // namespace

std::string trajectory_to_csv(const Trajectory& tr) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "time";
  for (const auto& l : tr.state_labels) os << ',' << l;
  for (const auto& [name, vals] : tr.monitors) {
    (void)vals;
    os << ',' << name;
  }
  os << '\n';
  for (size_t k = 0; k < tr.times.size(); ++k) {
    os << tr.times[k];
    const RVec& st = tr.states[k];
    for (Eigen::Index i = 0; i < st.size(); ++i) os << ',' << st[i];
    for (const auto& [name, vals] : tr.monitors) {
      (void)name;
      os << ',' << vals[k];
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json trajectory_summary(const Trajectory& tr) {
  nlohmann::json j;
  j["samples"] = tr.times.size();
  j["truncated"] = tr.truncated;
  j["seam_crossings"] = tr.seam_crossings;
  j["final_unitarity_residual"] = tr.final_unitarity_residual;
  nlohmann::json mons = nlohmann::json::object();
  for (const auto& [name, vals] : tr.monitors) {
    double drift = 0.0;
    for (double v : vals) drift = std::max(drift, std::abs(v - vals.front()));
    mons[name] = {{"first", vals.empty() ? 0.0 : vals.front()},
                  {"last", vals.empty() ? 0.0 : vals.back()},
                  {"max_drift", drift}};
  }
  j["monitors"] = mons;
  nlohmann::json jumps = nlohmann::json::object();
  for (const auto& [name, v] : tr.seam_jumps) jumps[name] = v;
  j["seam_jumps"] = jumps;
  return j;
}

// ---- bi-invariant -------------------------------------------------------------

GroupGeodesicState geodesic_biinvariant(const CMat& g0, const CMat& x, double t) {
  require_unitary(g0, "geodesic_biinvariant");
  require_skew(x, "geodesic_biinvariant");
  return {CMat(g0 * exp_skew(t * x)), x, t};
}

// ---- left-invariant -----------------------------------------------------------

void validate_metric(const LeftInvariantMetric& met) {
  const int d = met.algebra.dim();
  if (met.inertia.rows() != d || met.inertia.cols() != d)
    throw std::invalid_argument("inertia size does not match the algebra dimension");
  if ((met.inertia - met.inertia.transpose()).norm() > 1e-10 * (1.0 + met.inertia.norm()))
    throw std::invalid_argument("inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(met.inertia);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("inertia must be positive definite");
}

Trajectory integrate_euler_arnold(const LeftInvariantMetric& met, const CMat& g0,
                                  const CMat& x0, double dt, int steps, OdeMethod method) {
  validate_metric(met);
  require_unitary(g0, "integrate_euler_arnold");
  require_skew(x0, "integrate_euler_arnold");
  require_step_plan(dt, steps, "integrate_euler_arnold");
  const auto& basis = met.algebra.basis;
  if (from_coords(basis, coords(basis, x0)).isApprox(x0, 1e-8) == false)
    throw std::invalid_argument("integrate_euler_arnold: initial velocity outside the algebra");

  Eigen::LLT<RMat> llt(met.inertia);
  auto velocity_of = [&](const CMat& m) { return from_coords(basis, llt.solve(coords(basis, m))); };

  CMat g = g0;
  CMat m = from_coords(basis, met.inertia * coords(basis, x0));
  const CMat spatial0 = g0 * m * g0.adjoint();
  const int n = met.algebra.n;

  Trajectory tr;
  matrix_labels(tr.state_labels, "g", n);
  matrix_labels(tr.state_labels, "x", n);

  auto record = [&](double t) {
    CMat x = velocity_of(m);
    std::vector<double> st;
    matrix_values(st, g);
    matrix_values(st, x);
    tr.times.push_back(t);
    tr.states.push_back(as_rvec(st));
    push(tr, "energy", 0.5 * inner(m, x));
    push(tr, "casimir", inner(m, m));
    push(tr, "spatial_drift", norm(CMat(g * m * g.adjoint() - spatial0)));
    push(tr, "body_momentum_1", inner(m, basis[0]));
  };
  record(0.0);

  for (int k = 0; k < steps; ++k) {
    if (method == OdeMethod::implicit_midpoint) {
      // half-step momentum by fixed point: y = m + dt/2 [y, inertia^{-1} y]
      CMat y = m;
      const double tol = 1e-14 * std::max(1.0, norm(m));
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        CMat ynew = m + (0.5 * dt) * bracket(y, velocity_of(y));
        double delta = norm(CMat(ynew - y));
        y = ynew;
        if (delta <= tol) {
          converged = true;
          break;
        }
      }
      if (!converged)
        throw std::runtime_error(
            "integrate_euler_arnold: implicit midpoint did not converge within 50 iterations");
      CMat xh = velocity_of(y);
      g = g * exp_skew(dt * xh);
      m = 2.0 * y - m;
    } else {
      auto deriv = [&](const CMat& gg, const CMat& mm) {
        CMat x = velocity_of(mm);
        return std::pair<CMat, CMat>(gg * x, bracket(mm, x));
      };
      auto [k1g, k1m] = deriv(g, m);
      auto [k2g, k2m] = deriv(g + 0.5 * dt * k1g, m + 0.5 * dt * k1m);
      auto [k3g, k3m] = deriv(g + 0.5 * dt * k2g, m + 0.5 * dt * k2m);
      auto [k4g, k4m] = deriv(g + dt * k3g, m + dt * k3m);
      g += (dt / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
      m += (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    }
    record((k + 1) * dt);
  }
  tr.final_unitarity_residual = unitarity_residual(g);
  return tr;
}

// ---- squashed spheres -----------------------------------------------------------

CMat sphere_moment_matrix(const CVec& z, const CVec& p) {
  CMat mu = p * z.adjoint() - z * p.adjoint();
  cplx tr = mu.trace();
  mu -= (tr / static_cast<double>(mu.rows())) * CMat::Identity(mu.rows(), mu.cols());
  return mu;
}

namespace {

struct SpherePhase {
  CVec z, p;
};

// Hamiltonian vector field of H = |p|^2/2 + kappa s^2/2 with s = <iz, p>,
// plus the sphere-constraint force. kappa = 1/t^2 - 1.
SpherePhase sphere_deriv(const SpherePhase& ph, double kappa) {
  double s = rip(CVec(kI * ph.z), ph.p);
  CVec zdot = ph.p + (kappa * s) * (kI * ph.z);
  CVec pdot = (kappa * s) * (kI * ph.p) - ph.p.squaredNorm() * ph.z;
  return {zdot, pdot};
}

// One RK4 step; returns the constraint residual before reprojection.
double sphere_step(SpherePhase& ph, double h, double kappa) {
  SpherePhase k1 = sphere_deriv(ph, kappa);
  SpherePhase k2 = sphere_deriv({ph.z + 0.5 * h * k1.z, ph.p + 0.5 * h * k1.p}, kappa);
  SpherePhase k3 = sphere_deriv({ph.z + 0.5 * h * k2.z, ph.p + 0.5 * h * k2.p}, kappa);
  SpherePhase k4 = sphere_deriv({ph.z + h * k3.z, ph.p + h * k3.p}, kappa);
  ph.z += (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
  ph.p += (h / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
  double residual = std::abs(ph.z.squaredNorm() - 1.0) + std::abs(rip(ph.z, ph.p));
  ph.z /= ph.z.norm();
  ph.p -= rip(ph.z, ph.p) * ph.z;
  return residual;
}

void require_sphere_state(const CVec& z, const CVec& v, const char* who) {
  if (std::abs(z.norm() - 1.0) > 1e-10)
    throw std::invalid_argument(std::string(who) + ": base point must lie on the unit sphere");
  if (std::abs(rip(z, v)) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": velocity must be tangent to the sphere");
}

}  // namespace

Trajectory integrate_berger_sphere(int n, double t, const SphereState& s0, double dt,
                                   int steps) {
  if (n < 1) throw std::invalid_argument("integrate_berger_sphere: n must be >= 1");
  if (t <= 0.0) throw std::invalid_argument("integrate_berger_sphere: t must be positive");
  if (s0.z.size() != n + 1 || s0.v.size() != n + 1)
    throw std::invalid_argument("integrate_berger_sphere: state size must be n + 1");
  require_sphere_state(s0.z, s0.v, "integrate_berger_sphere");
  require_step_plan(dt, steps, "integrate_berger_sphere");

  const double kappa = 1.0 / (t * t) - 1.0;
  IntegralFamily chain = build_family("berger_chain(" + std::to_string(n) + ")");

  SpherePhase ph;
  ph.z = s0.z;
  double s_v = rip(CVec(kI * s0.z), s0.v);
  ph.p = s0.v + ((t * t - 1.0) * s_v) * (kI * s0.z);
  const CMat mu0 = sphere_moment_matrix(ph.z, ph.p);

  Trajectory tr;
  vector_labels(tr.state_labels, "z", n + 1);
  vector_labels(tr.state_labels, "v", n + 1);

  auto record = [&](double time, double residual) {
    double s = rip(CVec(kI * ph.z), ph.p);
    CVec v = ph.p + (kappa * s) * (kI * ph.z);
    std::vector<double> st;
    vector_values(st, ph.z);
    vector_values(st, v);
    tr.times.push_back(time);
    tr.states.push_back(as_rvec(st));
    CMat mu = sphere_moment_matrix(ph.z, ph.p);
    push(tr, "energy", 0.5 * (ph.p.squaredNorm() + kappa * s * s));
    push(tr, "fiber_moment", s);
    push(tr, "constraint", residual);
    push(tr, "moment_drift", (mu - mu0).norm());
    for (size_t i = 0; i < chain.specs.size(); ++i)
      push(tr, "f" + std::to_string(i + 1), eval_integral(chain.specs[i], mu));
  };
  record(0.0, 0.0);

  for (int k = 0; k < steps; ++k) {
    double residual = sphere_step(ph, dt, kappa);
    record((k + 1) * dt, residual);
  }
  return tr;
}

// ---- surfaces of revolution -----------------------------------------------------

RevolutionProfile constant_profile(double c) {
  if (c <= 0.0) throw std::invalid_argument("constant_profile: radius must be positive");
  RevolutionProfile p;
  p.f = [c](double) { return c; };
  p.df = [](double) { return 0.0; };
  return p;
}

RevolutionProfile glued_profile(double t, double takeoff) {
  if (t <= 1.0) throw std::invalid_argument("glued_profile: parameter must exceed 1");
  if (takeoff <= 0.0) throw std::invalid_argument("glued_profile: takeoff must be positive");
  const double plateau = 2.0 * kPi * t * t / std::sqrt(t * t * t * t - 1.0);
  const double a = 0.5 * takeoff;
  RevolutionProfile p;
  // r below takeoff/2, plateau above takeoff, quintic C^2 blend between.
  p.f = [plateau, a, takeoff](double r) {
    if (r <= a) return r;
    if (r >= takeoff) return plateau;
    double x = (r - a) / a;
    double w = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    return r + w * (plateau - r);
  };
  p.df = [plateau, a, takeoff](double r) {
    if (r <= a) return 1.0;
    if (r >= takeoff) return 0.0;
    double x = (r - a) / a;
    double w = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    double dw = 30.0 * x * x * (1.0 + x * (-2.0 + x)) / a;
    return 1.0 - w + dw * (plateau - r);
  };
  return p;
}

namespace {

struct SurfacePhase {
  double r, th, rd, thd;
};

SurfacePhase surface_deriv(const SurfacePhase& ph, const RevolutionProfile& prof) {
  double f = prof.f(ph.r);
  double df = prof.df(ph.r);
  return {ph.rd, ph.thd, f * df * ph.thd * ph.thd, -2.0 * (df / f) * ph.rd * ph.thd};
}

void surface_step(SurfacePhase& ph, double h, const RevolutionProfile& prof) {
  SurfacePhase k1 = surface_deriv(ph, prof);
  auto shift = [&](const SurfacePhase& k, double a) {
    return SurfacePhase{ph.r + a * k.r, ph.th + a * k.th, ph.rd + a * k.rd, ph.thd + a * k.thd};
  };
  SurfacePhase k2 = surface_deriv(shift(k1, 0.5 * h), prof);
  SurfacePhase k3 = surface_deriv(shift(k2, 0.5 * h), prof);
  SurfacePhase k4 = surface_deriv(shift(k3, h), prof);
  ph.r += (h / 6.0) * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
  ph.th += (h / 6.0) * (k1.th + 2.0 * k2.th + 2.0 * k3.th + k4.th);
  ph.rd += (h / 6.0) * (k1.rd + 2.0 * k2.rd + 2.0 * k3.rd + k4.rd);
  ph.thd += (h / 6.0) * (k1.thd + 2.0 * k2.thd + 2.0 * k3.thd + k4.thd);
}

bool surface_in_domain(const SurfacePhase& ph, const RevolutionProfile& prof) {
  if (!(ph.r >= prof.r_min && ph.r <= prof.r_max)) return false;
  return prof.f(ph.r) > 1e-9;
}

}  // namespace

Trajectory integrate_revolution(const RevolutionProfile& prof, const SurfaceState& s0,
                                double dt, int steps) {
  require_step_plan(dt, steps, "integrate_revolution");
  SurfacePhase ph{s0.r, s0.theta, s0.rdot, s0.thetadot};
  if (!surface_in_domain(ph, prof))
    throw std::invalid_argument("integrate_revolution: initial point outside the profile domain");

  Trajectory tr;
  tr.state_labels = {"r", "theta", "rdot", "thetadot"};
  auto record = [&](double time) {
    double f = prof.f(ph.r);
    tr.times.push_back(time);
    tr.states.push_back(as_rvec({ph.r, ph.th, ph.rd, ph.thd}));
    push(tr, "energy", 0.5 * (ph.rd * ph.rd + f * f * ph.thd * ph.thd));
    push(tr, "clairaut", f * f * ph.thd);
  };
  record(0.0);

  for (int k = 0; k < steps; ++k) {
    SurfacePhase trial = ph;
    surface_step(trial, dt, prof);
    if (!surface_in_domain(trial, prof)) {
      tr.truncated = true;
      break;
    }
    ph = trial;
    record((k + 1) * dt);
  }
  return tr;
}

// ---- quotient flows --------------------------------------------------------------

CMat horizontal_velocity(const BiquotientAction& act, const CMat& g0, std::uint64_t seed) {
  require_unitary(g0, "horizontal_velocity");
  // Pairing of (Ad_{g0} x, -x) against (a_i, b_i) equals <x, Ad_{g0}^{-1} a_i - b_i>.
  std::vector<CMat> constraints;
  constraints.reserve(act.u_basis.size());
  for (const auto& ab : act.u_basis)
    constraints.push_back(ad_group(g0.adjoint(), ab.left) - ab.right);
  constraints = orthonormalize(constraints);
  CMat x = random_element(act.g.basis, seed);
  for (const CMat& c : constraints) x -= inner(x, c) * c;
  return x;
}

Trajectory integrate_quotient(const BiquotientAction& act, const IntegralFamily& fam,
                              const CMat& g0, const CMat& x, double dt, int steps) {
  require_unitary(g0, "integrate_quotient");
  require_skew(x, "integrate_quotient");
  require_step_plan(dt, steps, "integrate_quotient");
  const CMat id = CMat::Identity(g0.rows(), g0.cols());
  const MomentPair mp0 = moment_bi(g0, id, x);
  const double scale = std::max(1.0, norm(mp0));

  auto worst_pairing = [&](const MomentPair& mp) {
    double worst = 0.0;
    for (const auto& ab : act.u_basis) worst = std::max(worst, std::abs(inner(mp, ab)));
    return worst;
  };
  if (worst_pairing(mp0) > 1e-10 * scale)
    throw std::invalid_argument(
        "integrate_quotient: initial vector is not horizontal for the action");

  Trajectory tr;
  const int n = act.g.n;
  matrix_labels(tr.state_labels, "g", n);
  matrix_labels(tr.state_labels, "x", n);

  // one eigendecomposition serves every sample: x = i U L U* with L real, so
  // exp(t x) = U diag(e^{i t l}) U* with U unitary
  Eigen::SelfAdjointEigenSolver<CMat> es(CMat(-kI * x));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("integrate_quotient: eigendecomposition failed");
  const CMat evec = es.eigenvectors();
  const RVec eigs = es.eigenvalues();
  auto position_at = [&](double time) {
    CVec phases(eigs.size());
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
      phases[i] = std::exp(kI * (time * eigs[i]));
    return CMat(g0 * evec * phases.asDiagonal() * evec.adjoint());
  };
  const double energy = 0.5 * inner(x, x);

  CMat g = g0;
  auto record = [&](double time) {
    MomentPair mp = moment_bi(g, id, x);
    double horiz = worst_pairing(mp);
    if (horiz > 1e-6 * scale)
      throw std::runtime_error("integrate_quotient: horizontality drift exceeded 1e-6");
    std::vector<double> st;
    matrix_values(st, g);
    matrix_values(st, x);
    tr.times.push_back(time);
    tr.states.push_back(as_rvec(st));
    push(tr, "energy", energy);
    push(tr, "horizontality", horiz);
    push(tr, "moment_drift", norm(mp - mp0));
    for (size_t i = 0; i < fam.specs.size(); ++i)
      push(tr, "f" + std::to_string(i + 1), eval_integral(fam.specs[i], mp));
  };
  record(0.0);
  for (int k = 0; k < steps; ++k) {
    g = position_at((k + 1) * dt);
    record((k + 1) * dt);
  }
  tr.final_unitarity_residual = unitarity_residual(g);
  return tr;
}

Trajectory integrate_su2_surface_quotient(const RevolutionProfile& prof,
                                          const Su2SurfaceState& s0, double dt, int steps) {
  require_unitary(s0.g, "integrate_su2_surface_quotient");
  require_skew(s0.x, "integrate_su2_surface_quotient");
  require_step_plan(dt, steps, "integrate_su2_surface_quotient");
  if (s0.g.rows() != 2)
    throw std::invalid_argument("integrate_su2_surface_quotient: group factor must be 2x2");

  const AmbientAlgebra su2 = ambient_su(2);
  CMat fiber = CMat::Zero(2, 2);
  fiber(0, 0) = kI;
  fiber(1, 1) = -kI;
  fiber /= norm(fiber);

  SurfacePhase ph{s0.surf.r, s0.surf.theta, s0.surf.rdot, s0.surf.thetadot};
  if (!surface_in_domain(ph, prof))
    throw std::invalid_argument(
        "integrate_su2_surface_quotient: initial point outside the profile domain");

  const double fiber_mom = inner(s0.x, fiber);
  double f0 = prof.f(ph.r);
  const double scale = std::max(1.0, std::abs(fiber_mom) + f0 * f0 * std::abs(ph.thd));
  if (std::abs(fiber_mom + f0 * f0 * ph.thd) > 1e-10 * scale)
    throw std::invalid_argument(
        "integrate_su2_surface_quotient: initial vector is not horizontal for the circle");

  Trajectory tr;
  matrix_labels(tr.state_labels, "g", 2);
  matrix_labels(tr.state_labels, "x", 2);
  for (const char* l : {"r", "theta", "rdot", "thetadot"}) tr.state_labels.push_back(l);

  Eigen::SelfAdjointEigenSolver<CMat> es(CMat(-kI * s0.x));
  const CMat evec = es.eigenvectors();
  const RVec eigs = es.eigenvalues();
  auto position_at = [&](double time) {
    CVec phases(eigs.size());
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
      phases[i] = std::exp(kI * (time * eigs[i]));
    return CMat(s0.g * evec * phases.asDiagonal() * evec.adjoint());
  };
  CMat g = s0.g;
  const double group_energy = 0.5 * inner(s0.x, s0.x);

  auto record = [&](double time) {
    double f = prof.f(ph.r);
    std::vector<double> st;
    matrix_values(st, g);
    matrix_values(st, s0.x);
    st.insert(st.end(), {ph.r, ph.th, ph.rd, ph.thd});
    tr.times.push_back(time);
    tr.states.push_back(as_rvec(st));
    CMat spatial = g * s0.x * g.adjoint();
    double clairaut = f * f * ph.thd;
    push(tr, "energy", group_energy + 0.5 * (ph.rd * ph.rd + f * f * ph.thd * ph.thd));
    for (int i = 0; i < 3; ++i)
      push(tr, "m" + std::to_string(i + 1), inner(spatial, su2.basis[static_cast<size_t>(i)]));
    push(tr, "clairaut", clairaut);
    push(tr, "horizontality", std::abs(fiber_mom + clairaut));
  };
  record(0.0);

  for (int k = 0; k < steps; ++k) {
    SurfacePhase trial = ph;
    surface_step(trial, dt, prof);
    if (!surface_in_domain(trial, prof)) {
      tr.truncated = true;
      break;
    }
    ph = trial;
    g = position_at((k + 1) * dt);
    record((k + 1) * dt);
  }
  tr.final_unitarity_residual = unitarity_residual(g);
  return tr;
}

// ---- glued disk bundles -----------------------------------------------------------

namespace {

struct GluedPhase {
  CVec z, p;
  SurfacePhase surf;
};

double glued_step(GluedPhase& ph, double h, double kappa, const RevolutionProfile& prof) {
  double residual = 0.0;
  // product metric: the factors advance independently
  SpherePhase sp{ph.z, ph.p};
  residual = sphere_step(sp, h, kappa);
  ph.z = sp.z;
  ph.p = sp.p;
  surface_step(ph.surf, h, prof);
  return residual;
}

}  // namespace

Trajectory glued_flow(double t_param, int n, const GluedState& s0, double dt, int steps,
                      double takeoff, double seam_radius) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("glued_flow: n must be even and at least 2");
  require_step_plan(dt, steps, "glued_flow");
  if (s0.z.size() != n + 1 || s0.v.size() != n + 1)
    throw std::invalid_argument("glued_flow: sphere state size must be n + 1");
  require_sphere_state(s0.z, s0.v, "glued_flow");

  RevolutionProfile prof = glued_profile(t_param, takeoff);
  const double plateau = prof.f(takeoff);
  if (seam_radius <= takeoff || std::abs(prof.f(seam_radius) - plateau) > 1e-12 * plateau)
    throw std::invalid_argument("glued_flow: the seam must lie in the plateau region");

  const double kappa = 1.0 / (t_param * t_param) - 1.0;
  IntegralFamily fam = build_family("connected_sum(" + std::to_string(n) + ")");
  IntegralSpec first_raw = fam.specs[0];
  first_raw.square = false;

  GluedPhase ph;
  ph.z = s0.z;
  double s_v = rip(CVec(kI * s0.z), s0.v);
  ph.p = s0.v + ((t_param * t_param - 1.0) * s_v) * (kI * s0.z);
  ph.surf = {s0.surf.r, s0.surf.theta, s0.surf.rdot, s0.surf.thetadot};
  int side = s0.side;

  if (!surface_in_domain(ph.surf, prof) || ph.surf.r > seam_radius)
    throw std::invalid_argument("glued_flow: initial disk point outside the chart");

  {
    double f = prof.f(ph.surf.r);
    double s = rip(CVec(kI * ph.z), ph.p);
    double horiz = s + f * f * ph.surf.thd;
    double scale = std::max(1.0, std::abs(s) + f * f * std::abs(ph.surf.thd));
    if (std::abs(horiz) > 1e-10 * scale)
      throw std::invalid_argument("glued_flow: initial vector is not horizontal for the circle");
  }

  auto channels = [&](const GluedPhase& q) {
    std::map<std::string, double> out;
    double f = prof.f(q.surf.r);
    double s = rip(CVec(kI * q.z), q.p);
    CMat mu = sphere_moment_matrix(q.z, q.p);
    out["energy"] = 0.5 * (q.p.squaredNorm() + kappa * s * s) +
                    0.5 * (q.surf.rd * q.surf.rd + f * f * q.surf.thd * q.surf.thd);
    for (size_t i = 0; i < fam.specs.size(); ++i)
      out["c" + std::to_string(i + 1)] = eval_integral(fam.specs[i], mu);
    out["fiber_sq"] = s * s;
    out["disk_energy"] = 0.5 * (q.surf.rd * q.surf.rd + f * f * q.surf.thd * q.surf.thd);
    out["h1_raw"] = eval_integral(first_raw, mu);
    out["clairaut"] = f * f * q.surf.thd;
    out["horizontality"] = std::abs(s + f * f * q.surf.thd);
    return out;
  };
  auto registered = [](const std::string& name) {
    return name == "energy" || name == "fiber_sq" || name == "disk_energy" ||
           (!name.empty() && name[0] == 'c' && name != "clairaut");
  };

  Trajectory tr;
  vector_labels(tr.state_labels, "z", n + 1);
  vector_labels(tr.state_labels, "v", n + 1);
  for (const char* l : {"r", "theta", "rdot", "thetadot", "side"}) tr.state_labels.push_back(l);

  auto record = [&](double time, double residual) {
    auto ch = channels(ph);
    double s = rip(CVec(kI * ph.z), ph.p);
    CVec v = ph.p + (kappa * s) * (kI * ph.z);
    std::vector<double> st;
    vector_values(st, ph.z);
    vector_values(st, v);
    st.insert(st.end(),
              {ph.surf.r, ph.surf.th, ph.surf.rd, ph.surf.thd, static_cast<double>(side)});
    tr.times.push_back(time);
    tr.states.push_back(as_rvec(st));
    for (const auto& [name, val] : ch) push(tr, name, val);
    push(tr, "constraint", residual);
  };
  record(0.0, 0.0);

  // conjugation on the sphere factor, angle reversal on the disk factor; the
  // radial coordinate restarts inward on the other side
  auto cross_seam = [&](GluedPhase& q) {
    auto before = channels(q);
    q.z = q.z.conjugate();
    q.p = q.p.conjugate();
    q.surf.th = -q.surf.th;
    q.surf.thd = -q.surf.thd;
    q.surf.rd = -q.surf.rd;
    side = 1 - side;
    auto after = channels(q);
    for (const auto& [name, b] : before) {
      double jump = std::abs(after[name] - b);
      auto it = tr.seam_jumps.find(name);
      if (it == tr.seam_jumps.end())
        tr.seam_jumps[name] = jump;
      else
        it->second = std::max(it->second, jump);
      if (registered(name) && jump > 1e-8 * std::max(1.0, std::abs(b)))
        throw std::runtime_error("glued_flow: seam continuity violated for " + name);
    }
    ++tr.seam_crossings;
  };

  for (int k = 0; k < steps; ++k) {
    GluedPhase saved = ph;
    double residual = glued_step(ph, dt, kappa, prof);
    if (ph.surf.r >= seam_radius) {
      // bisect the crossing time within [0, dt] from the saved phase
      double lo = 0.0, hi = dt;
      while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        GluedPhase probe = saved;
        glued_step(probe, mid, kappa, prof);
        (probe.surf.r >= seam_radius ? hi : lo) = mid;
      }
      double tau = 0.5 * (lo + hi);
      ph = saved;
      residual = glued_step(ph, tau, kappa, prof);
      cross_seam(ph);
      if (dt - tau > 0.0) residual += glued_step(ph, dt - tau, kappa, prof);
    }
    if (!surface_in_domain(ph.surf, prof)) {
      tr.truncated = true;
      break;
    }
    record((k + 1) * dt, residual);
  }
  return tr;
}

// ---- canonical cross-check ---------------------------------------------------------

double canonical_bracket_fd(const IntegralSpec& a, const IntegralSpec& b, const CMat& g,
                            const CMat& x, const AmbientAlgebra& amb, double h) {
  require_unitary(g, "canonical_bracket_fd");
  require_skew(x, "canonical_bracket_fd");
  const CMat id = CMat::Identity(g.rows(), g.cols());
  auto value = [&](const IntegralSpec& s, const CMat& gg, const CMat& xx) {
    return eval_integral(s, moment_bi(gg, id, xx));
  };

  const int d = amb.dim();
  const RVec xc = coords(amb.basis, x);
  auto momentum_partial = [&](const IntegralSpec& s) {
    RVec out(d);
    for (int i = 0; i < d; ++i) {
      RVec cp = xc, cm = xc;
      cp[i] += h;
      cm[i] -= h;
      out[i] = (value(s, g, from_coords(amb.basis, cp)) -
                value(s, g, from_coords(amb.basis, cm))) /
               (2.0 * h);
    }
    return out;
  };
  auto position_partial = [&](const IntegralSpec& s) {
    RVec out(d);
    for (int i = 0; i < d; ++i) {
      const CMat& bi = amb.basis[static_cast<size_t>(i)];
      out[i] = (value(s, CMat(g * exp_skew(h * bi)), x) -
                value(s, CMat(g * exp_skew(-h * bi)), x)) /
               (2.0 * h);
    }
    return out;
  };

  RVec xi_a = momentum_partial(a), xi_b = momentum_partial(b);
  RVec dg_a = position_partial(a), dg_b = position_partial(b);
  CMat xa = from_coords(amb.basis, xi_a), xb = from_coords(amb.basis, xi_b);
  return dg_a.dot(xi_b) - dg_b.dot(xi_a) - inner(x, bracket(xa, xb));
}

}  // namespace geolab
