#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "geolab/integrals.hpp"
#include "geolab/moment.hpp"

namespace geolab {

// Sampled flow with aligned per-state monitor channels. "energy" is always
// present; the other channels depend on the integrator.
struct Trajectory {
  std::vector<double> times;
  std::vector<RVec> states;
  std::vector<std::string> state_labels;
  std::map<std::string, std::vector<double>> monitors;
  int seam_crossings = 0;
  std::map<std::string, double> seam_jumps;  // max |after - before| per channel
  bool truncated = false;
  double final_unitarity_residual = 0.0;
};

std::string trajectory_to_csv(const Trajectory& tr);
// Max drift per monitor channel plus bookkeeping fields.
nlohmann::json trajectory_summary(const Trajectory& tr);

// ---- bi-invariant group flows -------------------------------------------------

struct GroupGeodesicState {
  CMat position;
  CMat velocity;  // body frame
  double time = 0.0;
};

// Exact: position g0 exp(t x), body velocity constant.
GroupGeodesicState geodesic_biinvariant(const CMat& g0, const CMat& x, double t);

// ---- left-invariant group flows ------------------------------------------------

// Inertia acts on velocity coordinates in the algebra's orthonormal basis.
struct LeftInvariantMetric {
  AmbientAlgebra algebra;
  RMat inertia;
};

// Symmetric positive definite inertia of matching size.
void validate_metric(const LeftInvariantMetric& met);

enum class OdeMethod { implicit_midpoint, rk4 };

// Body momentum m = inertia(x) obeys dm/dt = [m, x]; position dg/dt = g x.
// Implicit midpoint solves the half-step by fixed point (max 50 iterations).
// Channels: energy, casimir, spatial_drift, body_momentum_1.
Trajectory integrate_euler_arnold(const LeftInvariantMetric& met, const CMat& g0,
                                  const CMat& x0, double dt, int steps,
                                  OdeMethod method = OdeMethod::implicit_midpoint);

// ---- squashed odd spheres ------------------------------------------------------

struct SphereState {
  CVec z;  // unit vector in complex (n+1)-space
  CVec v;  // tangent: Re<z, v> = 0
};

// Metric <v,w> + (t^2 - 1) <v,iz><w,iz> on the unit sphere, integrated as a
// constrained Hamiltonian system with per-step position/momentum projection.
// Channels: energy, fiber_moment, constraint, and the tail-chain values
// f1..f{2n} of the moment matrix.
Trajectory integrate_berger_sphere(int n, double t, const SphereState& s0, double dt,
                                   int steps);

// Skew-Hermitian traceless moment matrix of a sphere tangent vector: pairs
// with xi as the Killing pairing of the metric-dual momentum against xi z.
CMat sphere_moment_matrix(const CVec& z, const CVec& p);

// ---- surfaces of revolution ----------------------------------------------------

struct RevolutionProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
};

RevolutionProfile constant_profile(double c);
// r near the origin, then a C^2 quintic blend on [takeoff/2, takeoff] into the
// plateau 2 pi t^2 / sqrt(t^4 - 1); needs t > 1.
RevolutionProfile glued_profile(double t, double takeoff = 5.0);

struct SurfaceState {
  double r = 0.0, theta = 0.0, rdot = 0.0, thetadot = 0.0;
};

// dr^2 + f(r)^2 dtheta^2 by RK4. Channels: energy, clairaut. Leaving the
// profile domain truncates the trajectory and sets the flag.
Trajectory integrate_revolution(const RevolutionProfile& prof, const SurfaceState& s0,
                                double dt, int steps);

// ---- quotient flows ------------------------------------------------------------

// Horizontal bi-invariant geodesic pushed to the two-sided quotient: the
// moment pair is constant, so every family value is monitored directly.
// Throws when the initial vector is not horizontal to 1e-10, or if the
// horizontality monitor ever exceeds 1e-6. Channels: energy, horizontality,
// moment_drift, f1..fk.
Trajectory integrate_quotient(const BiquotientAction& act, const IntegralFamily& fam,
                              const CMat& g0, const CMat& x, double dt, int steps);

// Diagonal-circle quotient of SU(2) times a revolution surface. The circle
// turns the group fiber and the surface angle together; horizontality couples
// the fiber momentum to the angular momentum. Channels: energy, m1, m2, m3
// (spatial momentum), clairaut, horizontality.
struct Su2SurfaceState {
  CMat g;
  CMat x;  // body velocity
  SurfaceState surf;
};

Trajectory integrate_su2_surface_quotient(const RevolutionProfile& prof,
                                          const Su2SurfaceState& s0, double dt,
                                          int steps);

// ---- glued disk bundles --------------------------------------------------------

// State in one disk-bundle chart: squashed-sphere factor, disk factor, side tag.
struct GluedState {
  CVec z;
  CVec v;
  SurfaceState surf;
  int side = 0;
};

// Two disk bundles over complex projective space glued along the boundary
// sphere by complex conjugation; the neck is a metric product, so the seam
// transition is an isometry. Crossing times are bisected to 1e-10, the
// conjugation is applied to the sphere factor and the disk angle, and the
// jump of every channel across the seam is recorded. Channels: energy,
// c1..c{2n} (the conjugation-invariant modified family), fiber_sq,
// disk_energy, h1_raw, clairaut, horizontality.
Trajectory glued_flow(double t_param, int n, const GluedState& s0, double dt, int steps,
                      double takeoff = 5.0, double seam_radius = 6.0);

// Random algebra element whose moment pair at g0 pairs to zero with every
// generator of the action (projection of a seeded Gaussian draw).
CMat horizontal_velocity(const BiquotientAction& act, const CMat& g0, std::uint64_t seed);

// ---- canonical cross-check -----------------------------------------------------

// Finite-difference canonical bracket of two pulled-back observables on the
// left-trivialized tangent bundle at (g, body velocity x). Used to confirm
// zero-vs-nonzero agreement with the pair-space bracket.
double canonical_bracket_fd(const IntegralSpec& a, const IntegralSpec& b, const CMat& g,
                            const CMat& x, const AmbientAlgebra& amb, double h = 1e-5);

}  // namespace geolab
