#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geolab/algebra.hpp"
#include "geolab/expr.hpp"
#include "geolab/subalgebras.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace geolab;

namespace {

CMat mat3(std::initializer_list<cplx> entries) {
  CMat m(3, 3);
  int k = 0;
  for (cplx v : entries) m(k / 3, k % 3) = v, ++k;
  return m;
}

const cplx I{0, 1};

CMat pilot3() {
  return mat3({0, 2, 1, -2, 0, 0, -1, 0, 0});
}

double span_distance(const Subalgebra& a, const Subalgebra& b) {
  double worst = 0;
  for (const CMat& x : a.basis) worst = std::max(worst, norm(CMat(x - project(b, x))));
  for (const CMat& y : b.basis) worst = std::max(worst, norm(CMat(y - project(a, y))));
  return worst;
}

}  // namespace

TEST_CASE("bracket of the arrow pattern with a diagonal matrix") {
  CMat x = mat3({0, 1, 1, -1, 0, 0, -1, 0, 0});
  CMat y = CMat::Zero(3, 3);
  y(0, 0) = I;
  y(1, 1) = 2.0 * I;
  y(2, 2) = -3.0 * I;
  CMat expect = mat3({0, I, -4.0 * I, I, 0, 0, -4.0 * I, 0, 0});
  CHECK(norm(CMat(bracket(x, y) - expect)) < 1e-14);
}

TEST_CASE("bracket is bilinear, antisymmetric, satisfies Jacobi") {
  GaussianRng rng(7);
  auto amb = ambient_su(3);
  for (int it = 0; it < 200; ++it) {
    CMat x = random_element(amb.basis, rng);
    CMat y = random_element(amb.basis, rng);
    CMat z = random_element(amb.basis, rng);
    CHECK(norm(CMat(bracket(x, y) + bracket(y, x))) < 1e-12);
    CMat jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) +
               bracket(z, bracket(x, y));
    CHECK(norm(jac) < 1e-11);
    double lhs = inner(bracket(x, y), z);
    double rhs = -inner(y, bracket(x, z));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("inner product normalization") {
  CMat d = CMat::Zero(3, 3);
  d(0, 0) = I;
  d(1, 1) = -I;
  CHECK(inner(d, d) == doctest::Approx(1.0));
  CMat e = mat3({0, 1, 0, -1, 0, 0, 0, 0, 0});
  CHECK(inner(e, e) == doctest::Approx(1.0));
  CHECK(inner(d, e) == doctest::Approx(0.0));
}

TEST_CASE("spectrum sorting and the pilot matrix eigenvalues") {
  auto s = spectrum(pilot3());
  REQUIRE(s.size() == 3);
  const double r5 = std::sqrt(5.0);
  CHECK(std::abs(s[0] - cplx(0, r5)) < 1e-12);
  CHECK(std::abs(s[1]) < 1e-12);
  CHECK(std::abs(s[2] - cplx(0, -r5)) < 1e-12);

  CMat d = CMat::Zero(3, 3);
  d(0, 0) = I;
  d(1, 1) = -3.0 * I;
  d(2, 2) = 2.0 * I;
  auto sd = spectrum(d);
  CHECK(std::abs(sd[0] - 2.0 * I) < 1e-14);
  CHECK(std::abs(sd[1] - I) < 1e-14);
  CHECK(std::abs(sd[2] + 3.0 * I) < 1e-14);

  CMat t = CMat::Zero(2, 2);
  t(0, 0) = cplx(1, 1);
  t(1, 1) = cplx(-1, 1);
  auto st = spectrum(t);
  CHECK(std::abs(st[0] - cplx(-1, 1)) < 1e-14);
  CHECK(std::abs(st[1] - cplx(1, 1)) < 1e-14);
}

TEST_CASE("perturbed pilot matrix satisfies its cubic characteristic relation") {
  for (double t : {-1.0, 0.5, 2.0}) {
    CMat p = pilot3();
    p(1, 2) = I * t;
    p(2, 1) = I * t;
    for (cplx lam : spectrum(p)) {
      cplx resid = -lam * lam * lam - lam * (t * t + 5.0) - 4.0 * I * t;
      CHECK(std::abs(resid) < 1e-9);
    }
  }
}

TEST_CASE("one-parameter deformation of the pilot matrix keeps a real spectrum scale") {
  for (double t : {-2.0, 0.0, 1.0, 3.5}) {
    CMat p = pilot3();
    p(0, 2) = cplx(1 + t, 0);
    p(2, 0) = cplx(-(1 + t), 0);
    auto s = spectrum(p);
    const double r = std::sqrt(4.0 + (1 + t) * (1 + t));
    CHECK(std::abs(s[0] - cplx(0, r)) < 1e-10);
    CHECK(std::abs(s[1]) < 1e-10);
    CHECK(std::abs(s[2] + cplx(0, r)) < 1e-10);
  }
}

TEST_CASE("exp_skew on diagonal and rotation generators") {
  CMat d = CMat::Zero(3, 3);
  d(0, 0) = I * kPi;
  d(1, 1) = -I * kPi;
  CMat e = exp_skew(d);
  CMat expect = CMat::Identity(3, 3);
  expect(0, 0) = -1;
  expect(1, 1) = -1;
  CHECK(norm(CMat(e - expect)) < 1e-12);

  CMat r = CMat::Zero(2, 2);
  r(0, 1) = 1;
  r(1, 0) = -1;
  for (double t : {0.3, 1.0, -2.2}) {
    CMat g = exp_skew(CMat(t * r));
    CHECK(std::abs(g(0, 0) - cplx(std::cos(t), 0)) < 1e-13);
    CHECK(std::abs(g(0, 1) - cplx(std::sin(t), 0)) < 1e-13);
  }
}

TEST_CASE("exp_skew is a one-parameter homomorphism into the unitary group") {
  GaussianRng rng(11);
  auto amb = ambient_su(3);
  for (int it = 0; it < 50; ++it) {
    CMat x = random_element(amb.basis, rng);
    double s = rng.normal(), t = rng.normal();
    CMat lhs = exp_skew(CMat((s + t) * x));
    CMat rhs = exp_skew(CMat(s * x)) * exp_skew(CMat(t * x));
    CHECK(norm(CMat(lhs - rhs)) < 1e-10 * (1 + norm(lhs)));
    CHECK(unitarity_residual(exp_skew(x)) < 1e-12);
  }
}

TEST_CASE("group conjugation preserves the inner product and the bracket") {
  GaussianRng rng(13);
  auto amb = ambient_su(3);
  for (int it = 0; it < 100; ++it) {
    CMat g = random_group_element(amb.basis, 1000 + it);
    CMat x = random_element(amb.basis, rng);
    CMat y = random_element(amb.basis, rng);
    CHECK(inner(ad_group(g, x), ad_group(g, y)) == doctest::Approx(inner(x, y)).epsilon(1e-10));
    CMat lhs = ad_group(g, bracket(x, y));
    CMat rhs = bracket(ad_group(g, x), ad_group(g, y));
    CHECK(norm(CMat(lhs - rhs)) < 1e-10 * (1 + norm(lhs)));
    CHECK(same_spectrum(x, ad_group(g, x)));
    CHECK_FALSE(same_spectrum(x, CMat(1.1 * x)));
  }
}

TEST_CASE("ad_group rejects non-unitary conjugators") {
  CMat g = CMat::Identity(3, 3);
  g(0, 0) = 2.0;
  CHECK_THROWS(ad_group(g, pilot3()));
}

TEST_CASE("projection onto a subalgebra is the orthogonal one") {
  GaussianRng rng(17);
  auto amb = ambient_su(3);
  Subalgebra h = su3_u2_traceless();
  for (int it = 0; it < 100; ++it) {
    CMat x = random_element(amb.basis, rng);
    CMat p = project(h, x);
    CHECK(norm(CMat(project(h, p) - p)) < 1e-12);
    CHECK(norm(CMat(p - project(h, p))) < 1e-12);
    CMat q = project(h, random_element(amb.basis, rng));
    CHECK(inner(CMat(x - p), q) == doctest::Approx(0.0).epsilon(1e-10));
  }
  for (const CMat& b : h.basis) CHECK(norm(CMat(project(h, b) - b)) < 1e-12);
}

TEST_CASE("projection onto a corner block zeroes the complement rows and columns") {
  GaussianRng rng(19);
  auto amb = ambient_su(3);
  Subalgebra head = corner_u(3, 2, false);
  Subalgebra tail = corner_u(3, 2, true);
  for (int it = 0; it < 100; ++it) {
    CMat x = random_element(amb.basis, rng);
    CMat ph = x;
    ph.row(2).setZero();
    ph.col(2).setZero();
    CHECK(norm(CMat(project(head, x) - ph)) < 1e-12);
    CMat pt = x;
    pt.row(0).setZero();
    pt.col(0).setZero();
    CHECK(norm(CMat(project(tail, x) - pt)) < 1e-12);
  }
}

TEST_CASE("make_subalgebra rejects a non-closed span") {
  CMat a = CMat::Zero(3, 3), b = CMat::Zero(3, 3);
  a(0, 1) = 1;
  a(1, 0) = -1;
  b(1, 2) = 1;
  b(2, 1) = -1;
  CHECK_THROWS(make_subalgebra("bad", {a, b}));
}

TEST_CASE("ambient algebra bases are orthonormal and closed") {
  for (const AmbientAlgebra& amb : {ambient_su(3), ambient_su(4), ambient_so(4), ambient_sp2()}) {
    const int d = amb.dim();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double expect = (i == j) ? 1.0 : 0.0;
        CHECK(inner(amb.basis[i], amb.basis[j]) == doctest::Approx(expect).epsilon(1e-12));
      }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        CMat br = bracket(amb.basis[i], amb.basis[j]);
        CHECK(norm(CMat(br - project(amb.basis, br))) < 1e-10);
      }
  }
  CHECK(ambient_su(3).dim() == 8);
  CHECK(ambient_su(4).dim() == 15);
  CHECK(ambient_so(4).dim() == 6);
  CHECK(ambient_sp2().dim() == 10);
}

TEST_CASE("algebra_index recovers the rank of the classical algebras") {
  CHECK(algebra_index(ambient_su(2).basis) == 1);
  CHECK(algebra_index(ambient_su(3).basis) == 2);
  CHECK(algebra_index(ambient_so(4).basis) == 2);
  CHECK(algebra_index(ambient_sp2().basis) == 2);
  CHECK(ambient_su(3).rank == 2);
  CHECK(ambient_so(5).rank == 2);
  CHECK(ambient_sp2().rank == 2);
}

TEST_CASE("quaternion arithmetic follows the Hamilton rules") {
  CHECK(norm_quat(q_i() * q_i() + q_one()) < 1e-15);
  CHECK(norm_quat(q_i() * q_j() - q_k()) < 1e-15);
  CHECK(norm_quat(q_j() * q_i() + q_k()) < 1e-15);
  CHECK(norm_quat(q_j() * q_k() - q_i()) < 1e-15);
  CHECK(norm_quat(q_k() * q_i() - q_j()) < 1e-15);
  Quat q{1, 2, -3, 0.5};
  CHECK(norm_quat(q * q.conj() - Quat{1 + 4 + 9 + 0.25, 0, 0, 0}) < 1e-13);
}

TEST_CASE("quaternion embedding is an algebra homomorphism") {
  Quat k = q_k();
  Eigen::Matrix2cd ek = quaternion_embed(k);
  CHECK(std::abs(ek(0, 0)) < 1e-15);
  CHECK(std::abs(ek(0, 1) - I) < 1e-15);
  CHECK(std::abs(ek(1, 0) - I) < 1e-15);
  CHECK(std::abs(ek(1, 1)) < 1e-15);

  GaussianRng rng(23);
  auto rand_q = [&rng]() { return Quat{rng.normal(), rng.normal(), rng.normal(), rng.normal()}; };
  for (int it = 0; it < 100; ++it) {
    QMat2 a, b;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        a.e[r][c] = rand_q();
        b.e[r][c] = rand_q();
      }
    CMat ea = quaternion_embed(a), eb = quaternion_embed(b);
    CHECK(norm(CMat(quaternion_embed(a * b) - ea * eb)) < 1e-11);
    CHECK(norm(CMat(quaternion_embed(a.conj_transpose()) - ea.adjoint())) < 1e-12);
    CHECK(quaternion_pattern_residual(ea) < 1e-13);

    Quat tr = (a * b).e[0][0] + (a * b).e[1][1];
    CHECK(inner(ea, eb) == doctest::Approx(-tr.a).epsilon(1e-10));
  }
  CMat not_pattern = CMat::Zero(4, 4);
  not_pattern(0, 0) = 1;
  CHECK(quaternion_pattern_residual(not_pattern) > 0.1);
}

TEST_CASE("block rotation and circle factors are symplectic-unitary") {
  CMat f = quaternion_embed(sp2_rotation(0.5));
  CHECK(std::abs(f(0, 0)) < 1e-14);
  CHECK(std::abs(f(0, 2) - cplx(1, 0)) < 1e-14);
  CHECK(std::abs(f(2, 0) - cplx(-1, 0)) < 1e-14);
  CMat g = quaternion_embed(sp2_circle_factor(0.25));
  const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  CHECK(std::abs(g(0, 0) - cplx(1, 0)) < 1e-14);
  CHECK(std::abs(g(2, 2) - cplx(c, 0)) < 1e-14);
  CHECK(std::abs(g(2, 3) - cplx(s, 0)) < 1e-14);
  CHECK(std::abs(g(3, 2) + cplx(s, 0)) < 1e-14);
  for (double t : {0.2, 1.0 / 3, 0.25, 0.8}) {
    CHECK(unitarity_residual(quaternion_embed(sp2_rotation(t))) < 1e-13);
    CHECK(unitarity_residual(quaternion_embed(sp2_circle_factor(t))) < 1e-13);
    CHECK(quaternion_pattern_residual(quaternion_embed(sp2_rotation(t))) < 1e-13);
    CHECK(quaternion_pattern_residual(quaternion_embed(sp2_circle_factor(t))) < 1e-13);
  }
}

TEST_CASE("orthonormalize spans the input and drops dependent vectors") {
  GaussianRng rng(29);
  auto amb = ambient_su(3);
  CMat v = random_element(amb.basis, rng);
  CMat w = random_element(amb.basis, rng);
  auto on = orthonormalize({v, CMat(2.0 * v), w});
  REQUIRE(on.size() == 2);
  CHECK(inner(on[0], on[0]) == doctest::Approx(1.0));
  CHECK(inner(on[0], on[1]) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(norm(CMat(v - project(on, v))) < 1e-12);
  CHECK(norm(CMat(w - project(on, w))) < 1e-12);
}

TEST_CASE("coords and from_coords invert each other") {
  GaussianRng rng(31);
  auto amb = ambient_sp2();
  for (int it = 0; it < 20; ++it) {
    CMat x = random_element(amb.basis, rng);
    RVec c = coords(amb.basis, x);
    CHECK(norm(CMat(from_coords(amb.basis, c) - x)) < 1e-12);
  }
}

TEST_CASE("seeded gaussian stream is reproducible and roughly standard") {
  GaussianRng a(42), b(42), c(43);
  bool differ = false;
  double mean = 0, var = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    double x = a.normal();
    CHECK(x == b.normal());
    if (x != c.normal()) differ = true;
    mean += x;
    var += x * x;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(differ);
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("random elements live in the span and are skew") {
  auto amb = ambient_su(3);
  for (int s = 0; s < 10; ++s) {
    CMat x = random_element(amb.basis, 100 + s);
    CHECK(skew_residual(x) < 1e-13);
    CHECK(norm(CMat(x - project(amb.basis, x))) < 1e-12);
    CHECK(std::abs(x.trace()) < 1e-13);
  }
}

TEST_CASE("expression parser evaluates exact numeric strings") {
  CHECK(parse_expr("3") == doctest::Approx(3.0));
  CHECK(parse_expr("2+2*2") == doctest::Approx(6.0));
  CHECK(parse_expr("(1+2)*(3-5)/4") == doctest::Approx(-1.5));
  CHECK(parse_expr("pi") == doctest::Approx(kPi));
  CHECK(parse_expr("-sqrt(4)") == doctest::Approx(-2.0));
  CHECK(parse_expr("1e-3") == doctest::Approx(0.001));
  const double v = (149.0 + 18.0 * std::sqrt(6.0)) / 9.0;
  CHECK(parse_expr("(149+18*sqrt(2)*sqrt(3))/9") == doctest::Approx(v).epsilon(1e-14));
  CHECK_THROWS(parse_expr("2+"));
  CHECK_THROWS(parse_expr("sqrt(-1)"));
  CHECK_THROWS(parse_expr("1/0"));
  CHECK_THROWS(parse_expr("foo"));
  CHECK_THROWS(parse_expr("2 2"));
}

TEST_CASE("catalog names resolve to validated subalgebras of the expected size") {
  struct Row {
    const char* name;
    int dim;
    int ambient;
  };
  const Row rows[] = {
      {"su3.t2", 2, 3},        {"su3.u1", 1, 3},        {"su3.u2", 4, 3},
      {"su3.u1_block", 1, 3},  {"su3.u2_block", 4, 3},  {"su3.u2_tail", 4, 3},
      {"su4.u2_block", 4, 4},  {"su4.u3_tail", 9, 4},   {"so4.so2_tail", 1, 4},
      {"so5.so3_tail", 3, 5},  {"sp2.so2", 1, 4},       {"sp2.sp1x1", 3, 4},
      {"sp2.1xsp1", 3, 4},     {"sp2.sp1xsp1", 6, 4},   {"sp2.diag_sp1", 3, 4},
      {"sp2.line_l", 1, 4},
  };
  for (const Row& r : rows) {
    Subalgebra h = subalgebra_by_name(r.name);
    CHECK(h.dim() == r.dim);
    CHECK(h.ambient_dim() == r.ambient);
    for (int i = 0; i < h.dim(); ++i)
      for (int j = 0; j < h.dim(); ++j)
        CHECK(inner(h.basis[i], h.basis[j]) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
  CHECK_THROWS(subalgebra_by_name("nonsense"));
  for (const std::string& n : catalog_names()) CHECK(subalgebra_by_name(n).dim() > 0);
}

TEST_CASE("the balanced and block u(2) embeddings differ but overlap in u(2)-block traces") {
  Subalgebra bal = su3_u2_traceless();
  Subalgebra blk = corner_u(3, 2, false);
  CHECK(span_distance(bal, blk) > 0.1);
  GaussianRng rng(37);
  auto amb = ambient_su(3);
  for (int it = 0; it < 50; ++it) {
    CMat x = random_element(amb.basis, rng);
    cplx tb = project(blk, x).trace();
    cplx tt = CMat(project(bal, x)).topLeftCorner(2, 2).trace();
    CHECK(std::abs(tb - tt) < 1e-11);
  }
}

TEST_CASE("line and plane subalgebras in sp(2) have the stated generators") {
  Subalgebra l = sp2_line_l();
  CMat gen = l.basis[0];
  CHECK(std::abs(gen(2, 3) - I) < 1e-14);
  CHECK(std::abs(gen(3, 2) - I) < 1e-14);
  CHECK(std::abs(gen(0, 0)) < 1e-14);
  Subalgebra so2 = sp2_so2();
  const double r2 = std::sqrt(2.0);
  CHECK(std::abs(so2.basis[0](0, 2) - cplx(1 / r2, 0)) < 1e-12);
  CHECK(std::abs(so2.basis[0](2, 0) + cplx(1 / r2, 0)) < 1e-12);
}

TEST_CASE("subalgebra json round-trips and accepts expression entries") {
  Subalgebra h = su3_u2_traceless();
  nlohmann::json doc = subalgebra_to_json(h);
  Subalgebra back = subalgebra_from_json(doc);
  CHECK(back.name == h.name);
  CHECK(back.dim() == h.dim());
  CHECK(span_distance(h, back) < 1e-12);

  nlohmann::json manual;
  manual["name"] = "expr-line";
  manual["ambient_dim"] = 2;
  manual["basis"] = nlohmann::json::array();
  nlohmann::json m = {
      {{0.0, "1/2"}, {0.0, 0.0}},
      {{0.0, 0.0}, {"0", "-sqrt(4)/4"}},
  };
  manual["basis"].push_back(m);
  Subalgebra e = subalgebra_from_json(manual);
  CHECK(e.dim() == 1);
  CHECK(std::abs(e.basis[0](0, 0) - cplx(0, 1)) < 1e-12);
  CHECK(std::abs(e.basis[0](1, 1) - cplx(0, -1)) < 1e-12);

  nlohmann::json bad = manual;
  bad["basis"][0][0][0] = nlohmann::json::array({1.0});
  CHECK_THROWS(subalgebra_from_json(bad));
}

TEST_CASE("product and diagonal subalgebras sit block-diagonally") {
  Subalgebra u1 = su3_u1_traceless();
  Subalgebra p = product_subalgebra("1xU1", {}, u1.basis, 3, 3);
  CHECK(p.dim() == 1);
  CHECK(p.ambient_dim() == 6);
  CHECK(norm(CMat(p.basis[0].topLeftCorner(3, 3))) < 1e-14);

  auto su3 = ambient_su(3);
  Subalgebra diag = diagonal_subalgebra("delta.su3", su3.basis);
  CHECK(diag.dim() == 8);
  for (const CMat& b : diag.basis) {
    CMat tl = b.topLeftCorner(3, 3), br = b.bottomRightCorner(3, 3);
    CHECK(norm(CMat(tl - br)) < 1e-13);
  }
}
