#include "geolab/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace geolab {

double skew_residual(const CMat& x) { return (x + x.adjoint()).norm(); }

double unitarity_residual(const CMat& g) {
  return (g * g.adjoint() - CMat::Identity(g.rows(), g.cols())).norm();
}

CMat ad_group(const CMat& g, const CMat& x) {
  detail::require_square_same(g, x, "ad_group");
  double r = unitarity_residual(g);
  if (r > 1e-8)
    throw std::invalid_argument("ad_group: group element not unitary, residual " +
                                std::to_string(r));
  return g * x * g.adjoint();
}

CMat exp_skew(const CMat& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("exp_skew: matrix not square");
  // X = iH with H Hermitian, so exp X = V diag(exp(i lambda)) V^*.
  CMat h = cplx(0, -1) * x;
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("exp_skew: eigensolver failed");
  CVec phase = (cplx(0, 1) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<cplx> spectrum(const CMat& x) {
  Eigen::ComplexEigenSolver<CMat> es(x, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + x.rows());
  std::sort(ev.begin(), ev.end(), [](const cplx& p, const cplx& q) {
    if (p.imag() != q.imag()) return p.imag() > q.imag();
    return p.real() < q.real();
  });
  return ev;
}

bool same_spectrum(const CMat& x, const CMat& y, double rtol) {
  if (x.rows() != y.rows()) return false;
  std::vector<cplx> a = spectrum(x), b = spectrum(y);
  double scale = 0;
  for (const cplx& v : a) scale = std::max(scale, std::abs(v));
  for (const cplx& v : b) scale = std::max(scale, std::abs(v));
  double tol = rtol * std::max(1.0, scale);
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

Subalgebra make_subalgebra(std::string name, std::vector<CMat> basis, double tol) {
  Subalgebra h{std::move(name), std::move(basis)};
  for (size_t i = 0; i < h.basis.size(); ++i) {
    if (h.basis[i].rows() != h.basis[i].cols() || h.basis[i].rows() != h.basis[0].rows())
      throw std::invalid_argument("make_subalgebra(" + h.name + "): ragged basis");
    for (size_t j = 0; j <= i; ++j) {
      double want = (i == j) ? 1.0 : 0.0;
      double got = inner(h.basis[i], h.basis[j]);
      if (std::abs(got - want) > tol)
        throw std::invalid_argument("make_subalgebra(" + h.name + "): basis not orthonormal at (" +
                                    std::to_string(i) + "," + std::to_string(j) + "), <.,.> = " +
                                    std::to_string(got));
    }
  }
  for (size_t i = 0; i < h.basis.size(); ++i)
    for (size_t j = i + 1; j < h.basis.size(); ++j) {
      CMat br = bracket(h.basis[i], h.basis[j]);
      double res = (br - project(h.basis, br)).norm();
      if (res > tol * (1.0 + br.norm()))
        throw std::invalid_argument("make_subalgebra(" + h.name +
                                    "): bracket closure fails at (" + std::to_string(i) + "," +
                                    std::to_string(j) + "), residual " + std::to_string(res));
    }
  return h;
}

CMat from_coords(const std::vector<CMat>& basis, const RVec& c) {
  if (static_cast<size_t>(c.size()) != basis.size())
    throw std::invalid_argument("from_coords: coordinate count mismatch");
  CMat out = CMat::Zero(basis[0].rows(), basis[0].cols());
  for (size_t i = 0; i < basis.size(); ++i) out += c[static_cast<int>(i)] * basis[i];
  return out;
}

std::vector<CMat> orthonormalize(const std::vector<CMat>& vectors, double drop_tol) {
  std::vector<CMat> out;
  for (const CMat& v : vectors) {
    CMat w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const CMat& b : out) w -= inner(w, b) * b;
    double n = norm(w);
    if (n > drop_tol) out.push_back(w / n);
  }
  return out;
}

AmbientAlgebra ambient_su(int n) {
  if (n < 2) throw std::invalid_argument("ambient_su: need n >= 2");
  AmbientAlgebra g;
  g.name = "su(" + std::to_string(n) + ")";
  g.n = n;
  g.kind = AlgebraKind::special_unitary;
  g.rank = n - 1;
  for (int r = 0; r < n; ++r)
    for (int s = r + 1; s < n; ++s) {
      CMat a = CMat::Zero(n, n), b = CMat::Zero(n, n);
      a(r, s) = 1;
      a(s, r) = -1;
      b(r, s) = cplx(0, 1);
      b(s, r) = cplx(0, 1);
      g.basis.push_back(a);
      g.basis.push_back(b);
    }
  for (int k = 1; k < n; ++k) {
    CMat d = CMat::Zero(n, n);
    double c = std::sqrt(2.0 / (k * (k + 1.0)));
    for (int s = 0; s < k; ++s) d(s, s) = cplx(0, c);
    d(k, k) = cplx(0, -k * c);
    g.basis.push_back(d);
  }
  return g;
}

AmbientAlgebra ambient_so(int n) {
  if (n < 2) throw std::invalid_argument("ambient_so: need n >= 2");
  AmbientAlgebra g;
  g.name = "so(" + std::to_string(n) + ")";
  g.n = n;
  g.kind = AlgebraKind::orthogonal;
  g.rank = n / 2;
  for (int r = 0; r < n; ++r)
    for (int s = r + 1; s < n; ++s) {
      CMat a = CMat::Zero(n, n);
      a(r, s) = 1;
      a(s, r) = -1;
      g.basis.push_back(a);
    }
  return g;
}

AmbientAlgebra ambient_sp2() {
  AmbientAlgebra g;
  g.name = "sp(2)";
  g.n = 4;
  g.kind = AlgebraKind::quaternion_unitary;
  g.rank = 2;
  const Quat units[3] = {q_i(), q_j(), q_k()};
  for (const Quat& q : units) {
    QMat2 m{};
    m.e[0][0] = q;
    g.basis.push_back(quaternion_embed(m));
  }
  for (const Quat& q : units) {
    QMat2 m{};
    m.e[1][1] = q;
    g.basis.push_back(quaternion_embed(m));
  }
  const Quat offs[4] = {q_one(), q_i(), q_j(), q_k()};
  for (const Quat& q : offs) {
    QMat2 m{};
    m.e[0][1] = q;
    m.e[1][0] = {-q.a, q.b, q.c, q.d};  // -conj(q)
    g.basis.push_back(quaternion_embed(m) / std::sqrt(2.0));
  }
  return g;
}

int algebra_index(const std::vector<CMat>& basis, std::uint64_t seed) {
  const int d = static_cast<int>(basis.size());
  int best_rank = 0;
  for (int sample = 0; sample < 5; ++sample) {
    CMat x = random_element(basis, seed + static_cast<std::uint64_t>(sample));
    RMat ad(d, d);
    for (int k = 0; k < d; ++k) ad.col(k) = coords(basis, bracket(x, basis[k]));
    Eigen::JacobiSVD<RMat> svd(ad);
    double thresh = 1e-10 * std::max(1.0, svd.singularValues()[0]);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > thresh) ++rank;
    best_rank = std::max(best_rank, rank);
  }
  return d - best_rank;
}

Eigen::Matrix2cd quaternion_embed(const Quat& q) {
  Eigen::Matrix2cd m;
  m << cplx(q.a, q.b), cplx(q.c, q.d), cplx(-q.c, q.d), cplx(q.a, -q.b);
  return m;
}

CMat quaternion_embed(const QMat2& m) {
  CMat out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = quaternion_embed(m.e[i][j]);
  return out;
}

double quaternion_pattern_residual(const CMat& x) {
  if (x.rows() != 4 || x.cols() != 4)
    throw std::invalid_argument("quaternion_pattern_residual: need a 4x4 matrix");
  double r = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      // Block must look like [[alpha, beta], [-conj(beta), conj(alpha)]].
      Eigen::Matrix2cd b = x.block<2, 2>(2 * i, 2 * j);
      r += std::abs(b(1, 1) - std::conj(b(0, 0)));
      r += std::abs(b(1, 0) + std::conj(b(0, 1)));
    }
  return r;
}

QMat2 sp2_rotation(double t) {
  QMat2 m{};
  double c = std::cos(kPi * t), s = std::sin(kPi * t);
  m.e[0][0] = {c, 0, 0, 0};
  m.e[0][1] = {s, 0, 0, 0};
  m.e[1][0] = {-s, 0, 0, 0};
  m.e[1][1] = {c, 0, 0, 0};
  return m;
}

QMat2 sp2_circle_factor(double t) {
  QMat2 m{};
  m.e[0][0] = q_one();
  m.e[1][1] = {std::cos(kPi * t), 0, std::sin(kPi * t), 0};
  return m;
}

double GaussianRng::uniform() {
  // 53-bit mantissa in [0, 1).
  return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0);
}

double GaussianRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0;
  do {
    u1 = uniform();
  } while (u1 <= 0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

CMat random_element(const std::vector<CMat>& basis, GaussianRng& rng) {
  CMat out = CMat::Zero(basis[0].rows(), basis[0].cols());
  for (const CMat& b : basis) out += rng.normal() * b;
  return out;
}

CMat random_element(const std::vector<CMat>& basis, std::uint64_t seed) {
  GaussianRng rng(seed);
  return random_element(basis, rng);
}

CMat random_group_element(const std::vector<CMat>& basis, std::uint64_t seed) {
  return exp_skew(random_element(basis, seed));
}

}  // namespace geolab
