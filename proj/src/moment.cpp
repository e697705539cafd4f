#include "geolab/moment.hpp"

#include "geolab/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace geolab {

double inner(const MomentPair& a, const MomentPair& b) {
  return inner(a.left, b.left) + inner(a.right, b.right);
}

double norm(const MomentPair& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

MomentPair moment_bi(const CMat& g1, const CMat& g2, const CMat& x) {
  if (g1.rows() != x.rows() || g2.rows() != x.rows())
    throw std::invalid_argument("moment_bi: dimension mismatch");
  return {ad_group(g1, x), CMat(-ad_group(g2, x))};
}

CMat moment_homogeneous(const CMat& a, const CMat& b, const Subalgebra& m) {
  const double resid = norm(CMat(b - project(m, b)));
  if (resid > 1e-10 * std::max(1.0, norm(b))) {
    std::ostringstream msg;
    msg << "moment_homogeneous: element outside " << m.name << " (residual " << resid << ")";
    throw std::invalid_argument(msg.str());
  }
  return ad_group(a, b);
}

RVec moment_isometric(const RVec& point, const RVec& velocity,
                      const std::vector<std::function<RVec(const RVec&)>>& killing_fields,
                      const std::function<double(const RVec&)>& constraint) {
  if (point.size() != velocity.size())
    throw std::invalid_argument("moment_isometric: point/velocity size mismatch");
  if (constraint) {
    const double resid = std::abs(constraint(point));
    if (resid > 1e-8) {
      std::ostringstream msg;
      msg << "moment_isometric: point off the manifold (constraint residual " << resid << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  RVec out(killing_fields.size());
  for (size_t i = 0; i < killing_fields.size(); ++i) {
    RVec field = killing_fields[i](point);
    if (field.size() != point.size())
      throw std::invalid_argument("moment_isometric: field dimension mismatch");
    out[static_cast<Eigen::Index>(i)] = velocity.dot(field);
  }
  return out;
}

namespace {

std::vector<MomentPair> pair_orthonormalize(std::vector<MomentPair> v, double drop_tol = 1e-10) {
  std::vector<MomentPair> out;
  for (MomentPair& x : v) {
    for (const MomentPair& b : out) x = x - inner(x, b) * b;
    const double n = norm(x);
    if (n > drop_tol) out.push_back((1.0 / n) * x);
  }
  return out;
}

}  // namespace

BiquotientAction make_biquotient_action(AmbientAlgebra g, std::vector<MomentPair> u_raw) {
  for (const MomentPair& u : u_raw) {
    if (u.left.rows() != g.n || u.right.rows() != g.n)
      throw std::invalid_argument("make_biquotient_action: generator dimension mismatch");
    if (skew_residual(u.left) > 1e-10 || skew_residual(u.right) > 1e-10)
      throw std::invalid_argument("make_biquotient_action: generator is not skew-Hermitian");
  }
  // u need not be bracket-closed in g + g: when the printed right-hand
  // multiplier carries a conjugation, its derivative spans an anti-isomorphic
  // image.  Only orthonormality is required.
  return BiquotientAction{std::move(g), pair_orthonormalize(std::move(u_raw))};
}

std::pair<CMat, CMat> action_group_element(const BiquotientAction& act, const RVec& coeffs) {
  if (coeffs.size() != act.u_dim())
    throw std::invalid_argument("action_group_element: coefficient count mismatch");
  CMat a = CMat::Zero(act.g.n, act.g.n), b = CMat::Zero(act.g.n, act.g.n);
  for (int i = 0; i < act.u_dim(); ++i) {
    a += coeffs[i] * act.u_basis[static_cast<size_t>(i)].left;
    b -= coeffs[i] * act.u_basis[static_cast<size_t>(i)].right;
  }
  return {exp_skew(a), exp_skew(b)};
}

BiquotientAction circle_biquotient_action(int k, int l, int p, int q) {
  const cplx im(0, 1);
  CMat a = CMat::Zero(3, 3), b = CMat::Zero(3, 3);
  a(0, 0) = im * double(k);
  a(1, 1) = im * double(l);
  a(2, 2) = im * double(-k - l);
  b(0, 0) = im * double(p);
  b(1, 1) = im * double(q);
  b(2, 2) = im * double(-p - q);
  return make_biquotient_action(ambient_su(3), {MomentPair{a, b}});
}

BiquotientAction eschenburg_action(int m) { return circle_biquotient_action(1, -1, 2 * m, 2 * m); }

BiquotientAction gromoll_meyer_action() {
  std::vector<MomentPair> gen;
  // right factor multiplies by diag(conj q, conj q); its generator is the
  // conjugate, hence the negation
  for (const Quat& w : {q_i(), q_j(), q_k()}) {
    QMat2 dl, dr;
    dl.e[0][0] = w;
    dr.e[0][0] = (-1.0) * w;
    dr.e[1][1] = (-1.0) * w;
    gen.push_back(MomentPair{quaternion_embed(dl), quaternion_embed(dr)});
  }
  return make_biquotient_action(ambient_sp2(), std::move(gen));
}

bool in_moment_image(const MomentPair& mp, double rtol) {
  return same_spectrum(mp.left, CMat(-mp.right), rtol);
}

bool is_horizontal(const MomentPair& mp, const BiquotientAction& act, double tol) {
  for (const MomentPair& u : act.u_basis)
    if (std::abs(inner(mp, u)) > tol) return false;
  return true;
}

namespace {

// quaternionic structure map on 4x4 embedded matrices: v -> J conj(v)
RMat quaternion_J() {
  RMat j = RMat::Zero(4, 4);
  j(0, 1) = -1;
  j(1, 0) = 1;
  j(2, 3) = -1;
  j(3, 2) = 1;
  return j;
}

void verify_conjugator(const CMat& c, const CMat& from, const CMat& to, bool quaternionic) {
  const double scale = std::max(1.0, norm(from));
  if (unitarity_residual(c) > 1e-8)
    throw std::runtime_error("conjugator_to: produced a non-unitary conjugator");
  if (quaternionic && quaternion_pattern_residual(c) > 1e-8)
    throw std::runtime_error("conjugator_to: conjugator leaves the quaternionic group");
  const double resid = norm(CMat(ad_group(c, from) - to));
  if (resid > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "conjugator_to: matching failed (residual " << resid
        << "); spectra may be degenerate or distinct";
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

CMat conjugator_to(const CMat& from, const CMat& to, AlgebraKind kind) {
  if (from.rows() != to.rows())
    throw std::invalid_argument("conjugator_to: dimension mismatch");
  if (norm(CMat(from - to)) < 1e-14 * std::max(1.0, norm(from)))
    return CMat::Identity(from.rows(), from.cols());

  if (kind == AlgebraKind::quaternion_unitary) {
    // Eigenvalues of a quaternionic skew matrix come in pairs (i mu, -i mu) with
    // the antilinear map v -> J conj(v) exchanging them; build bases respecting it
    // so the conjugator stays in the quaternionic unitary group.
    const RMat j = quaternion_J();
    auto adapted = [&j](const CMat& x) {
      Eigen::SelfAdjointEigenSolver<CMat> es(CMat(cplx(0, -1) * x));
      if (es.info() != Eigen::Success)
        throw std::runtime_error("conjugator_to: eigensolver failure");
      CMat w(4, 4);
      CVec v1 = es.eigenvectors().col(2), v2 = es.eigenvectors().col(3);
      w.col(0) = v1;
      w.col(1) = v2;
      w.col(2) = j * v1.conjugate();
      w.col(3) = j * v2.conjugate();
      return w;
    };
    CMat c = adapted(to) * adapted(from).adjoint();
    verify_conjugator(c, from, to, true);
    return c;
  }

  Eigen::SelfAdjointEigenSolver<CMat> src(CMat(cplx(0, -1) * from));
  Eigen::SelfAdjointEigenSolver<CMat> tgt(CMat(cplx(0, -1) * to));
  if (src.info() != Eigen::Success || tgt.info() != Eigen::Success)
    throw std::runtime_error("conjugator_to: eigensolver failure");
  CMat c = tgt.eigenvectors() * src.eigenvectors().adjoint();
  verify_conjugator(c, from, to, false);
  return c;
}

RVec pair_coords(const std::vector<CMat>& basis, const MomentPair& mp) {
  const int d = static_cast<int>(basis.size());
  RVec c(2 * d);
  for (int i = 0; i < d; ++i) {
    c[i] = inner(mp.left, basis[i]);
    c[d + i] = inner(mp.right, basis[i]);
  }
  return c;
}

MomentPair pair_from_coords(const std::vector<CMat>& basis, const RVec& c) {
  const int d = static_cast<int>(basis.size());
  if (c.size() != 2 * d) throw std::invalid_argument("pair_from_coords: size mismatch");
  MomentPair mp{CMat::Zero(basis[0].rows(), basis[0].cols()),
                CMat::Zero(basis[0].rows(), basis[0].cols())};
  for (int i = 0; i < d; ++i) {
    mp.left += c[i] * basis[i];
    mp.right += c[d + i] * basis[i];
  }
  return mp;
}

std::vector<MomentPair> tangent_space_R_cap_uperp(const MomentPair& p,
                                                  const BiquotientAction& act) {
  const int d = act.group_dim();
  if (p.left.rows() != act.g.n || p.right.rows() != act.g.n)
    throw std::invalid_argument("tangent_space: point dimension mismatch");
  const double scale = std::max(1.0, norm(p));
  if (!in_moment_image(p))
    throw std::invalid_argument("tangent_space: point is not in the image manifold");
  if (!is_horizontal(p, act, 1e-8 * scale))
    throw std::invalid_argument("tangent_space: point pairs non-trivially with u");

  CMat conj_c;
  if (norm(CMat(p.right + p.left)) < 1e-12 * scale)
    conj_c = CMat::Identity(act.g.n, act.g.n);
  else
    conj_c = conjugator_to(p.left, CMat(-p.right), act.g.kind);

  // Derivatives of (Ad_{g1} X, -Ad_{g2} X) at (e, C, X0): left rotations, right
  // rotations, and velocity changes transported through the conjugator.
  std::vector<MomentPair> gen;
  gen.reserve(3 * d);
  for (const CMat& e : act.g.basis) {
    gen.push_back({bracket(e, p.left), CMat::Zero(act.g.n, act.g.n)});
    gen.push_back({CMat::Zero(act.g.n, act.g.n), bracket(e, p.right)});
    gen.push_back({e, CMat(-ad_group(conj_c, e))});
  }

  RMat m(static_cast<int>(gen.size()), 2 * d);
  for (size_t i = 0; i < gen.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = pair_coords(act.g.basis, gen[i]).transpose();

  Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeFullV);
  const RVec sv = svd.singularValues();
  const double cutoff = 1e-10 * (sv.size() > 0 ? sv[0] : 0.0);
  int r1 = 0;
  while (r1 < sv.size() && sv[r1] > cutoff) ++r1;

  const int expected_r = 2 * d - act.g.rank;
  if (r1 != expected_r) {
    std::ostringstream msg;
    msg << "tangent_space: generator span has dimension " << r1 << ", expected " << expected_r
        << " (degenerate point)";
    throw std::runtime_error(msg.str());
  }

  // pairings of the span basis with u, then the null space of that map
  RMat k(act.u_dim(), r1);
  for (int j = 0; j < act.u_dim(); ++j) {
    RVec uc = pair_coords(act.g.basis, act.u_basis[static_cast<size_t>(j)]);
    for (int i = 0; i < r1; ++i) k(j, i) = uc.dot(svd.matrixV().col(i));
  }
  RMat null_basis;
  if (k.rows() == 0) {
    null_basis = RMat::Identity(r1, r1);
  } else {
    Eigen::JacobiSVD<RMat> ksvd(k, Eigen::ComputeFullV);
    const RVec ks = ksvd.singularValues();
    const double kcut = 1e-10 * (ks.size() > 0 ? ks[0] : 0.0);
    int krank = 0;
    while (krank < ks.size() && ks[krank] > kcut) ++krank;
    null_basis = ksvd.matrixV().rightCols(r1 - krank);
  }

  const int expected_dim = expected_r - act.u_dim();
  if (static_cast<int>(null_basis.cols()) != expected_dim) {
    std::ostringstream msg;
    msg << "tangent_space: intersection with u-perp has dimension " << null_basis.cols()
        << ", expected " << expected_dim << " (regularity failure)";
    throw std::runtime_error(msg.str());
  }

  std::vector<MomentPair> out;
  out.reserve(static_cast<size_t>(expected_dim));
  for (int c = 0; c < null_basis.cols(); ++c) {
    RVec y = svd.matrixV().leftCols(r1) * null_basis.col(c);
    out.push_back(pair_from_coords(act.g.basis, y));
  }
  return out;
}

nlohmann::json tangent_basis_to_json(const std::vector<MomentPair>& basis) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MomentPair& mp : basis) {
    nlohmann::json entry;
    for (const char* side : {"left", "right"}) {
      const CMat& x = side == std::string("left") ? mp.left : mp.right;
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < x.cols(); ++c)
          row.push_back({x(r, c).real(), x(r, c).imag()});
        rows.push_back(row);
      }
      entry[side] = rows;
    }
    arr.push_back(entry);
  }
  return arr;
}

CMat eschenburg_velocity() {
  CMat p = CMat::Zero(3, 3);
  p(0, 1) = 2;
  p(1, 0) = -2;
  p(0, 2) = 1;
  p(2, 0) = -1;
  return p;
}

MomentPair eschenburg_base_point() {
  CMat p = eschenburg_velocity();
  return {p, CMat(-p)};
}

QMat2 gromoll_meyer_conjugator() {
  return sp2_rotation(1.0 / 3.0) * sp2_circle_factor(1.0 / 4.0);
}

QMat2 gromoll_meyer_velocity() {
  const double r6 = parse_expr("sqrt(2)*sqrt(3)");
  QMat2 p;
  p.e[0][0] = Quat{0, 2, -2, -parse_expr("(149+18*sqrt(2)*sqrt(3))/9")};
  p.e[0][1] = Quat{1, 3, 2, -3};
  p.e[1][0] = Quat{-1, 3, 2, -3};
  p.e[1][1] = Quat{0, 5, 6 + r6, parse_expr("26/3")};
  return p;
}

MomentPair gromoll_meyer_base_point() {
  QMat2 q = gromoll_meyer_conjugator();
  QMat2 p = gromoll_meyer_velocity();
  QMat2 r = q * p * q.conj_transpose();
  return {quaternion_embed(r), quaternion_embed(p)};
}

}  // namespace geolab
