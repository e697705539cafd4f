#ifndef GEOLAB_MOMENT_HPP
#define GEOLAB_MOMENT_HPP

#include "geolab/algebra.hpp"

#include <json.hpp>

#include <functional>
#include <vector>

namespace geolab {

// Value of the two-sided moment map, or a tangent vector to its image.
struct MomentPair {
  CMat left, right;

  friend MomentPair operator+(const MomentPair& a, const MomentPair& b) {
    return {a.left + b.left, a.right + b.right};
  }
  friend MomentPair operator-(const MomentPair& a, const MomentPair& b) {
    return {a.left - b.left, a.right - b.right};
  }
  friend MomentPair operator*(double s, const MomentPair& a) {
    return {s * a.left, s * a.right};
  }
};

double inner(const MomentPair& a, const MomentPair& b);
double norm(const MomentPair& a);

// (Ad_{g1} X, -Ad_{g2} X): the moment value of the two-sided translate of (X, -X).
MomentPair moment_bi(const CMat& g1, const CMat& g2, const CMat& x);

// Ad_A B for B in the horizontal complement m; throws (with the residual) otherwise.
CMat moment_homogeneous(const CMat& a, const CMat& b, const Subalgebra& m);

// Pairings <v, xi_i(p)> of a velocity with the action fields at the foot point.
// constraint, if given, must vanish at p (residual above 1e-8 throws).
RVec moment_isometric(const RVec& point, const RVec& velocity,
                      const std::vector<std::function<RVec(const RVec&)>>& killing_fields,
                      const std::function<double(const RVec&)>& constraint = {});

// A subgroup of G x G acting two-sidedly, recorded by an orthonormal basis of
// its algebra u inside g + g.
struct BiquotientAction {
  AmbientAlgebra g;
  std::vector<MomentPair> u_basis;

  int group_dim() const { return g.dim(); }
  int u_dim() const { return static_cast<int>(u_basis.size()); }
};

// Orthonormalizes the generators; u is a subspace of g + g, not necessarily
// bracket-closed (the right slot may be an anti-isomorphic image).
BiquotientAction make_biquotient_action(AmbientAlgebra g, std::vector<MomentPair> u_raw);

// Group pair (exp sum c_i a_i, exp -sum c_i b_i) for u_basis pairs (a_i, b_i).
// Two-sided translation by this pair preserves horizontality verdicts.
std::pair<CMat, CMat> action_group_element(const BiquotientAction& act, const RVec& coeffs);

// One-parameter subgroup exp 2 pi i t (diag(k,l,-k-l), diag(p,q,-p-q)) in SU(3) x SU(3).
BiquotientAction circle_biquotient_action(int k, int l, int p, int q);
// The (1, -1, 2m, 2m) member of the family above.
BiquotientAction eschenburg_action(int m);
// (q, Q) -> diag(q,1) Q diag(conj q, conj q):
// u = {(diag(w,0), -diag(w,w)) : w imaginary}.
BiquotientAction gromoll_meyer_action();

// Membership in the image manifold: spectrum(left) equals spectrum(-right).
bool in_moment_image(const MomentPair& mp, double rtol = 1e-8);

// True iff mp pairs to less than tol with every basis element of u.
bool is_horizontal(const MomentPair& mp, const BiquotientAction& act, double tol);

// Unitary C with Ad_C from = to, structure-preserving for the given kind.
// Throws when the matching fails (degenerate spectra, mismatched spectra).
CMat conjugator_to(const CMat& from, const CMat& to, AlgebraKind kind);

// Orthonormal basis of the tangent space at p to (image manifold) intersect u-perp.
// Errors when p is outside, when the generator span is rank-deficient, or when the
// resulting dimension differs from dim R - dim u (regularity failure).
std::vector<MomentPair> tangent_space_R_cap_uperp(const MomentPair& p,
                                                  const BiquotientAction& act);

// Coordinates of a pair in {(b_i, 0)} + {(0, b_i)} over an orthonormal basis, and back.
RVec pair_coords(const std::vector<CMat>& basis, const MomentPair& mp);
MomentPair pair_from_coords(const std::vector<CMat>& basis, const RVec& c);

nlohmann::json tangent_basis_to_json(const std::vector<MomentPair>& basis);

// ---- distinguished base points ----------------------------------------------

// The 3x3 arrow matrix with second column weight 2.
CMat eschenburg_velocity();
// (P, -P) for the matrix above.
MomentPair eschenburg_base_point();

// Q = F(1/3) G(1/4): block rotation times circle factor.
QMat2 gromoll_meyer_conjugator();
// The quaternionic velocity matrix with the (149+18*sqrt(6))/9 entry.
QMat2 gromoll_meyer_velocity();
// (R, P) with R = Q P Q^*, embedded as 4x4 complex matrices.
MomentPair gromoll_meyer_base_point();

}  // namespace geolab

#endif
