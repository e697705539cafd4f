#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geolab/moment.hpp"
#include "geolab/subalgebras.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace geolab;

namespace {

const cplx I{0, 1};

double span_residual(const std::vector<MomentPair>& basis, const MomentPair& v) {
  MomentPair r = v;
  for (const MomentPair& b : basis) r = r - inner(v, b) * b;
  return norm(r);
}

}  // namespace

TEST_CASE("moment of the identity translate is the pair (X, -X)") {
  CMat p = eschenburg_velocity();
  CMat id = CMat::Identity(3, 3);
  MomentPair mp = moment_bi(id, id, p);
  CHECK(norm(CMat(mp.left - p)) < 1e-14);
  CHECK(norm(CMat(mp.right + p)) < 1e-14);
}

TEST_CASE("moment_bi is equivariant and always lands in the image manifold") {
  auto amb = ambient_su(3);
  GaussianRng rng(3);
  for (int it = 0; it < 40; ++it) {
    CMat x = random_element(amb.basis, rng);
    CMat g1 = random_group_element(amb.basis, 500 + it);
    CMat g2 = random_group_element(amb.basis, 900 + it);
    MomentPair mp = moment_bi(g1, g2, x);
    CHECK(in_moment_image(mp));
    CMat h = random_group_element(amb.basis, 1300 + it);
    CMat k = random_group_element(amb.basis, 1700 + it);
    MomentPair shifted = moment_bi(CMat(h * g1), CMat(k * g2), x);
    const double scale = 1 + norm(mp);
    CHECK(norm(CMat(shifted.left - ad_group(h, mp.left))) < 1e-10 * scale);
    CHECK(norm(CMat(shifted.right - ad_group(k, mp.right))) < 1e-10 * scale);
  }
}

TEST_CASE("moment_bi validates inputs") {
  CMat p = eschenburg_velocity();
  CHECK_THROWS(moment_bi(CMat::Identity(2, 2), CMat::Identity(3, 3), p));
  CMat bad = CMat::Identity(3, 3);
  bad(0, 0) = 2;
  CHECK_THROWS(moment_bi(bad, CMat::Identity(3, 3), p));
}

TEST_CASE("the stored base point matches the moment of the conjugator translate") {
  CMat q = quaternion_embed(gromoll_meyer_conjugator());
  CMat p = quaternion_embed(gromoll_meyer_velocity());
  MomentPair mp = moment_bi(q, CMat(CMat::Identity(4, 4)), p);
  MomentPair base = gromoll_meyer_base_point();
  CHECK(norm(CMat(mp.left - base.left)) < 1e-12);
  // the stored point keeps +P in the right slot; the identity-translate moment
  // carries -P
  CHECK(norm(CMat(mp.right + base.right)) < 1e-12);
  CHECK(skew_residual(base.left) < 1e-12);
  CHECK(quaternion_pattern_residual(base.left) < 1e-12);
}

TEST_CASE("moment_homogeneous conjugates and rejects outside elements") {
  Subalgebra m = subalgebra_by_name("su3.u2_block");
  auto amb = ambient_su(3);
  GaussianRng rng(5);
  CMat b = project(m, random_element(amb.basis, rng));
  CHECK(norm(CMat(moment_homogeneous(CMat(CMat::Identity(3, 3)), b, m) - b)) < 1e-14);
  for (int it = 0; it < 20; ++it) {
    CMat a = random_group_element(amb.basis, 40 + it);
    CMat out = moment_homogeneous(a, b, m);
    CHECK(inner(out, out) == doctest::Approx(inner(b, b)).epsilon(1e-10));
    CHECK(same_spectrum(out, b));
  }
  CMat outside = CMat::Zero(3, 3);
  outside(0, 2) = 1;
  outside(2, 0) = -1;
  CHECK_THROWS_WITH_AS(moment_homogeneous(CMat(CMat::Identity(3, 3)), outside, m),
                       doctest::Contains("residual"), std::invalid_argument);
}

TEST_CASE("moment_isometric pairs velocities with action fields") {
  auto rotation_field = [](const RVec& x) {
    RVec f(3);
    f << -x[1], x[0], 0.0;
    return f;
  };
  std::vector<std::function<RVec(const RVec&)>> fields{rotation_field};
  auto sphere = [](const RVec& x) { return x.squaredNorm() - 1.0; };

  const double r = 0.8, z = 0.6, s = 1.7;
  RVec p(3), v(3);
  p << r, 0, z;
  v << 0, s, 0;
  RVec mu = moment_isometric(p, v, fields, sphere);
  REQUIRE(mu.size() == 1);
  CHECK(mu[0] == doctest::Approx(r * s).epsilon(1e-14));

  RVec zero = RVec::Zero(3);
  CHECK(moment_isometric(p, zero, fields, sphere)[0] == doctest::Approx(0.0));

  RVec meridian(3);
  meridian << -z * s, 0, r * s;
  CHECK(moment_isometric(p, meridian, fields, sphere)[0] == doctest::Approx(0.0).epsilon(1e-14));

  RVec off(3);
  off << 1.1, 0, 0;
  CHECK_THROWS_WITH_AS(moment_isometric(off, v, fields, sphere),
                       doctest::Contains("constraint"), std::invalid_argument);
}

TEST_CASE("biquotient action factories produce orthonormal closed generators") {
  for (int m : {0, 1, 2}) {
    BiquotientAction act = eschenburg_action(m);
    CHECK(act.u_dim() == 1);
    CHECK(act.group_dim() == 8);
    CHECK(norm(act.u_basis[0]) == doctest::Approx(1.0).epsilon(1e-12));
  }
  BiquotientAction gm = gromoll_meyer_action();
  CHECK(gm.u_dim() == 3);
  CHECK(gm.group_dim() == 10);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(inner(gm.u_basis[i], gm.u_basis[j]) ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("make_biquotient_action rejects generators outside the algebra") {
  auto amb = ambient_su(3);
  CMat h = CMat::Zero(3, 3);
  h(0, 1) = 1;
  h(1, 0) = 1;
  CMat z = CMat::Zero(3, 3);
  CHECK_THROWS_AS(make_biquotient_action(amb, {MomentPair{h, z}}), std::invalid_argument);
  CHECK_THROWS_AS(make_biquotient_action(amb, {MomentPair{z, CMat::Identity(4, 4)}}),
                  std::invalid_argument);
}

TEST_CASE("the eschenburg base point is horizontal for every weight") {
  MomentPair p = eschenburg_base_point();
  for (int m : {0, 1, 2}) {
    BiquotientAction act = eschenburg_action(m);
    CHECK(is_horizontal(p, act, 1e-12));
  }
  CMat d = CMat::Zero(3, 3);
  d(0, 0) = I;
  d(1, 1) = -I;
  MomentPair vertical{d, CMat(-d)};
  CHECK_FALSE(is_horizontal(vertical, eschenburg_action(1), 1e-8));
}

TEST_CASE("the gromoll-meyer base point lies in the image manifold and in u-perp") {
  MomentPair p = gromoll_meyer_base_point();
  BiquotientAction act = gromoll_meyer_action();
  CHECK(in_moment_image(p));
  CHECK(is_horizontal(p, act, 1e-8 * norm(p)));
}

TEST_CASE("horizontality verdict is unchanged by composing with the acting subgroup") {
  BiquotientAction act = eschenburg_action(1);
  auto amb = ambient_su(3);
  const MomentPair& u = act.u_basis[0];
  for (int it = 0; it < 10; ++it) {
    CMat x = it == 0 ? eschenburg_velocity() : random_element(amb.basis, 77 + it);
    CMat g1 = random_group_element(amb.basis, 200 + it);
    CMat g2 = random_group_element(amb.basis, 300 + it);
    MomentPair mp = moment_bi(g1, g2, x);
    const double tol = 1e-8 * std::max(1.0, norm(mp));
    bool verdict = is_horizontal(mp, act, tol);
    const double s = 0.37 + 0.11 * it;
    CMat h1 = exp_skew(CMat(s * u.left));
    CMat h2 = exp_skew(CMat(s * u.right));
    MomentPair shifted = moment_bi(CMat(h1 * g1), CMat(h2 * g2), x);
    CHECK(is_horizontal(shifted, act, tol) == verdict);
  }
}

TEST_CASE("horizontality verdict survives the non-abelian acting subgroup") {
  BiquotientAction act = gromoll_meyer_action();
  auto amb = ambient_sp2();
  GaussianRng rng(404);
  for (int it = 0; it < 10; ++it) {
    CMat x = it == 0 ? gromoll_meyer_base_point().right : random_element(amb.basis, 500 + it);
    CMat g1 = random_group_element(amb.basis, 600 + it);
    CMat g2 = random_group_element(amb.basis, 700 + it);
    MomentPair mp = moment_bi(g1, g2, x);
    const double tol = 1e-8 * std::max(1.0, norm(mp));
    bool verdict = is_horizontal(mp, act, tol);
    RVec c(3);
    c << rng.normal(), rng.normal(), rng.normal();
    auto [h1, h2] = action_group_element(act, c);
    MomentPair shifted = moment_bi(CMat(h1 * g1), CMat(h2 * g2), x);
    CHECK(is_horizontal(shifted, act, tol) == verdict);
    CHECK(unitarity_residual(h1) < 1e-12);
    CHECK(quaternion_pattern_residual(h2) < 1e-10);

    MomentPair base = gromoll_meyer_base_point();
    MomentPair moved{ad_group(h1, base.left), ad_group(h2, base.right)};
    CHECK(is_horizontal(moved, act, 1e-8 * norm(base)));
  }
}

TEST_CASE("conjugator_to matches spectra on su(3)") {
  auto amb = ambient_su(3);
  for (int it = 0; it < 20; ++it) {
    CMat x = random_element(amb.basis, 10 + it);
    CMat g = random_group_element(amb.basis, 60 + it);
    CMat y = ad_group(g, x);
    CMat c = conjugator_to(x, y, AlgebraKind::special_unitary);
    CHECK(norm(CMat(ad_group(c, x) - y)) < 1e-8 * std::max(1.0, norm(x)));
  }
  CMat x = random_element(amb.basis, 5);
  CHECK_THROWS_AS(conjugator_to(x, CMat(1.1 * x), AlgebraKind::special_unitary),
                  std::runtime_error);
}

TEST_CASE("conjugator_to stays inside the quaternionic unitary group") {
  auto amb = ambient_sp2();
  for (int it = 0; it < 20; ++it) {
    CMat x = random_element(amb.basis, 20 + it);
    CMat g = random_group_element(amb.basis, 80 + it);
    CMat y = ad_group(g, x);
    CMat c = conjugator_to(x, y, AlgebraKind::quaternion_unitary);
    CHECK(quaternion_pattern_residual(c) < 1e-8);
    CHECK(norm(CMat(ad_group(c, x) - y)) < 1e-8 * std::max(1.0, norm(x)));
  }
}

TEST_CASE("pair coordinates round-trip") {
  auto amb = ambient_sp2();
  GaussianRng rng(9);
  for (int it = 0; it < 10; ++it) {
    MomentPair mp{random_element(amb.basis, rng), random_element(amb.basis, rng)};
    RVec c = pair_coords(amb.basis, mp);
    MomentPair back = pair_from_coords(amb.basis, c);
    CHECK(norm(back - mp) < 1e-12);
    CHECK(inner(mp, mp) == doctest::Approx(c.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("tangent space at the eschenburg point: dimension, orthonormality, u-perp") {
  MomentPair p = eschenburg_base_point();
  for (int m : {0, 1, 2}) {
    BiquotientAction act = eschenburg_action(m);
    auto basis = tangent_space_R_cap_uperp(p, act);
    CHECK(basis.size() == 13);
    for (size_t i = 0; i < basis.size(); ++i)
      for (size_t j = 0; j < basis.size(); ++j)
        CHECK(inner(basis[i], basis[j]) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    for (const MomentPair& v : basis)
      CHECK(std::abs(inner(v, act.u_basis[0])) < 1e-10);

    CMat dp1 = CMat::Zero(3, 3);
    dp1(0, 2) = 1;
    dp1(2, 0) = -1;
    MomentPair v1{dp1, CMat(-dp1)};
    CHECK(span_residual(basis, v1) < 1e-8 * norm(v1));

    CMat dp2 = CMat::Zero(3, 3);
    dp2(1, 2) = I;
    dp2(2, 1) = I;
    MomentPair v2{dp2, CMat(-dp2)};
    CHECK(span_residual(basis, v2) < 1e-8 * norm(v2));
  }
}

TEST_CASE("the left-rotation by the symmetric off-diagonal direction is not horizontal") {
  MomentPair p = eschenburg_base_point();
  BiquotientAction act = eschenburg_action(1);
  CMat a = CMat::Zero(3, 3);
  a(0, 1) = I;
  a(1, 0) = I;
  MomentPair w{bracket(a, p.left), CMat::Zero(3, 3)};
  CHECK_FALSE(is_horizontal(w, act, 1e-8 * norm(w)));
  auto basis = tangent_space_R_cap_uperp(p, act);
  CHECK(span_residual(basis, w) > 0.1 * norm(w));
}

TEST_CASE("tangent space at the gromoll-meyer point has dimension 15") {
  MomentPair p = gromoll_meyer_base_point();
  BiquotientAction act = gromoll_meyer_action();
  auto basis = tangent_space_R_cap_uperp(p, act);
  CHECK(basis.size() == 15);
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j)
      CHECK(inner(basis[i], basis[j]) ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
  for (const MomentPair& v : basis)
    for (const MomentPair& u : act.u_basis) CHECK(std::abs(inner(v, u)) < 1e-10);

  // the point itself is a tangent direction (the image manifold is a cone)
  CHECK(span_residual(basis, p) < 1e-8 * norm(p));

  // right-rotation by the block rotation generator
  CMat d5 = std::sqrt(2.0) * subalgebra_by_name("sp2.so2").basis[0];
  MomentPair v3{CMat::Zero(4, 4), bracket(d5, p.right)};
  CHECK(span_residual(basis, v3) < 1e-8 * norm(v3));
}

TEST_CASE("tangent space construction rejects bad points") {
  BiquotientAction act = eschenburg_action(1);
  CMat d = CMat::Zero(3, 3);
  d(0, 0) = I;
  d(1, 1) = 2.0 * I;
  d(2, 2) = -3.0 * I;
  CHECK_THROWS_AS(tangent_space_R_cap_uperp(MomentPair{d, d}, act), std::invalid_argument);

  MomentPair vertical{d, CMat(-d)};
  CHECK_THROWS_AS(tangent_space_R_cap_uperp(vertical, act), std::invalid_argument);

  CMat degen = CMat::Zero(3, 3);
  degen(0, 0) = I;
  degen(1, 1) = I;
  degen(2, 2) = -2.0 * I;
  // horizontal for the weight-0 action but spectrally degenerate
  CHECK_THROWS_AS(tangent_space_R_cap_uperp(MomentPair{degen, CMat(-degen)}, eschenburg_action(0)),
                  std::runtime_error);
}
