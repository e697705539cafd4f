#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geolab/integrals.hpp"
#include "geolab/moment.hpp"

namespace geolab {

// Evidence that the family restricted to the constrained image manifold has a
// given number of independent members at one point. By real-analyticity a
// full-rank certificate at a single point settles almost-everywhere
// independence, so the certificate stores everything needed for an audit.
struct RankCertificate {
  MomentPair point;
  std::string family;
  RMat differential;                    // specs x tangent directions
  std::vector<double> singular_values;  // descending
  int rank = 0;
  double threshold = 1e-8;  // relative to the largest singular value
};

nlohmann::json certificate_to_json(const RankCertificate& c);

// Entry (i, j) = directional derivative of spec i along basis vector j at p.
RMat differential_matrix(const IntegralFamily& fam, const MomentPair& p,
                         const std::vector<MomentPair>& basis);

// Count of singular values above rel_threshold times the largest.
int svd_rank(const RMat& m, double rel_threshold = 1e-8);
std::vector<double> singular_values_desc(const RMat& m);

// Tangent basis, differential matrix, SVD, certified rank at p.
RankCertificate rank_certificate(const IntegralFamily& fam, const MomentPair& p,
                                 const BiquotientAction& act);

// Richardson-extrapolated central difference of a pair-valued curve at 0.
MomentPair curve_derivative(const std::function<MomentPair(double)>& curve, double h = 1e-5);

struct StepResult {
  int step = 0;
  bool pass = false;
  std::string detail;
};

struct ReplayReport {
  std::string name;
  bool pass = false;
  std::vector<StepResult> steps;
};

nlohmann::json replay_to_json(const ReplayReport& r);

// Seven-step coefficient elimination for the su(3) biquotient family: each
// step differentiates a curve through the base point, checks the expected
// zero/nonzero pattern of the directional derivatives, and eliminates one
// coefficient of a hypothetical linear relation. A final step re-certifies
// the same conclusion with one SVD.
ReplayReport replay_eschenburg_steps(int m);

// The seven distinguished tangent vectors at the sp(2) base point, in order.
std::vector<MomentPair> gromoll_meyer_tangent_vectors();

// Membership of each distinguished vector in the constrained tangent space
// plus nonsingularity of the 7x7 evaluation matrix, then the SVD certificate.
ReplayReport replay_gromoll_meyer();

// Dimension count and the generic-bracket condition for a homogeneous space
// G / K: dim g = 2 dim k + ind g + 2, and dim [X, k] = dim k for the given X.
// The index of a semisimple algebra is its rank.
struct HomogeneousReport {
  int dim_g = 0;
  int dim_k = 0;
  int ind_g = 0;
  bool dim_identity = false;
  int bracket_rank = 0;
  bool bracket_condition = false;
  bool pass = false;
};

// Throws when x is not orthogonal to k.
HomogeneousReport check_homogeneous_conditions(const AmbientAlgebra& g, const Subalgebra& k,
                                               const CMat& x);

nlohmann::json homogeneous_to_json(const HomogeneousReport& r);

}  // namespace geolab
