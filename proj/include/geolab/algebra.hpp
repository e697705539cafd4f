#ifndef GEOLAB_ALGEBRA_HPP
#define GEOLAB_ALGEBRA_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace geolab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

namespace detail {
inline void require_square_same(const CMat& x, const CMat& y, const char* who) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                " vs " + std::to_string(y.rows()) + "x" +
                                std::to_string(y.cols()) + ")");
}
}  // namespace detail

// Commutator XY - YX.
template <typename DA, typename DB>
CMat bracket(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw std::invalid_argument("bracket: dimension mismatch");
  return x.derived() * y.derived() - y.derived() * x.derived();
}

// -1/2 Re tr(XY).  Positive definite on skew-Hermitian matrices.
template <typename DA, typename DB>
double inner(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw std::invalid_argument("inner: dimension mismatch");
  // tr(XY) = sum_ij X_ij Y_ji without forming the product.
  cplx t = x.derived().cwiseProduct(y.derived().transpose()).sum();
  return -0.5 * t.real();
}

template <typename DA>
double norm(const Eigen::MatrixBase<DA>& x) {
  return std::sqrt(std::max(0.0, inner(x, x)));
}

// ||X + X^H||, zero for algebra elements.
double skew_residual(const CMat& x);
// ||g g^H - I||, zero for group elements.
double unitarity_residual(const CMat& g);

// g X g^*.  Throws if g is not unitary to 1e-8.
CMat ad_group(const CMat& g, const CMat& x);

// Matrix exponential of a skew-Hermitian matrix via unitary eigendecomposition.
CMat exp_skew(const CMat& x);

// Eigenvalues with multiplicity, sorted by decreasing imaginary part,
// ties by increasing real part.
std::vector<cplx> spectrum(const CMat& x);

// Multiset equality of spectra, tolerance relative to the largest magnitude.
bool same_spectrum(const CMat& x, const CMat& y, double rtol = 1e-8);

// A subspace closed under the commutator, given by an orthonormal basis.
struct Subalgebra {
  std::string name;
  std::vector<CMat> basis;

  int dim() const { return static_cast<int>(basis.size()); }
  int ambient_dim() const { return basis.empty() ? 0 : static_cast<int>(basis[0].rows()); }
};

// Validates orthonormality and bracket closure (residuals above tol throw).
Subalgebra make_subalgebra(std::string name, std::vector<CMat> basis, double tol = 1e-10);

// Orthogonal projection onto the span of an orthonormal list.
template <typename D>
CMat project(const std::vector<CMat>& basis, const Eigen::MatrixBase<D>& x) {
  if (basis.empty()) return x.derived();
  CMat out = CMat::Zero(x.rows(), x.cols());
  for (const CMat& b : basis) out += inner(x, b) * b;
  return out;
}

template <typename D>
CMat project(const Subalgebra& h, const Eigen::MatrixBase<D>& x) {
  if (!h.basis.empty() && h.basis[0].rows() != x.rows())
    throw std::invalid_argument("project: ambient dimension mismatch for " + h.name);
  return project(h.basis, x);
}

// Coordinates of x in an orthonormal list, and the inverse.
template <typename D>
RVec coords(const std::vector<CMat>& basis, const Eigen::MatrixBase<D>& x) {
  RVec c(basis.size());
  for (size_t i = 0; i < basis.size(); ++i) c[i] = inner(x, basis[i]);
  return c;
}

CMat from_coords(const std::vector<CMat>& basis, const RVec& c);

// Modified Gram-Schmidt; vectors with residual norm below drop_tol are discarded.
std::vector<CMat> orthonormalize(const std::vector<CMat>& vectors, double drop_tol = 1e-10);

enum class AlgebraKind { special_unitary, orthogonal, quaternion_unitary };

// A compact matrix algebra with a fixed orthonormal basis.
struct AmbientAlgebra {
  std::string name;
  int n = 0;  // matrices are n x n
  AlgebraKind kind = AlgebraKind::special_unitary;
  int rank = 0;
  std::vector<CMat> basis;

  int dim() const { return static_cast<int>(basis.size()); }
};

AmbientAlgebra ambient_su(int n);
AmbientAlgebra ambient_so(int n);
// sp(2) realized as 4x4 complex matrices through quaternion_embed.
AmbientAlgebra ambient_sp2();

// Codimension of a generic commutator orbit: dim g - max_X rank(ad_X).
int algebra_index(const std::vector<CMat>& basis, std::uint64_t seed = 42);

// ---- quaternions ------------------------------------------------------------

struct Quat {
  double a = 0, b = 0, c = 0, d = 0;  // a + b i + c j + d k

  friend Quat operator+(const Quat& p, const Quat& q) {
    return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
  }
  friend Quat operator-(const Quat& p, const Quat& q) {
    return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
  }
  friend Quat operator*(double s, const Quat& q) { return {s * q.a, s * q.b, s * q.c, s * q.d}; }
  friend Quat operator*(const Quat& p, const Quat& q) {
    return {p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a};
  }
  Quat conj() const { return {a, -b, -c, -d}; }
};

inline Quat q_one() { return {1, 0, 0, 0}; }
inline Quat q_i() { return {0, 1, 0, 0}; }
inline Quat q_j() { return {0, 0, 1, 0}; }
inline Quat q_k() { return {0, 0, 0, 1}; }

inline double norm_quat(const Quat& q) {
  return std::sqrt(q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d);
}

// 2x2 quaternion matrix, row major.
struct QMat2 {
  Quat e[2][2];

  friend QMat2 operator*(const QMat2& p, const QMat2& q) {
    QMat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.e[i][j] = p.e[i][0] * q.e[0][j] + p.e[i][1] * q.e[1][j];
    return r;
  }
  QMat2 conj_transpose() const {
    QMat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.e[i][j] = e[j][i].conj();
    return r;
  }
};

// q = a+bi+cj+dk  ->  [[a+bi, c+di], [-c+di, a-bi]].
Eigen::Matrix2cd quaternion_embed(const Quat& q);
// Per-entry block embedding of a 2x2 quaternion matrix into 4x4 complex.
CMat quaternion_embed(const QMat2& m);

// Residual of the block symmetry that characterizes embedded quaternion matrices.
double quaternion_pattern_residual(const CMat& x);

// Block rotation diag-free orthogonal element of Sp(2).
QMat2 sp2_rotation(double t);   // [[cos pi t, sin pi t], [-sin pi t, cos pi t]]
QMat2 sp2_circle_factor(double t);  // diag(1, cos pi t + j sin pi t)

// ---- randomness -------------------------------------------------------------

// Deterministic Gaussian source (Box-Muller over mt19937_64), identical
// across platforms for a fixed seed.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  double normal();
  double uniform();  // in [0, 1)
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

// Gaussian coordinates in the given orthonormal basis.
CMat random_element(const std::vector<CMat>& basis, GaussianRng& rng);
CMat random_element(const std::vector<CMat>& basis, std::uint64_t seed);

// exp of a random algebra element; unitary.
CMat random_group_element(const std::vector<CMat>& basis, std::uint64_t seed);

}  // namespace geolab

#endif
