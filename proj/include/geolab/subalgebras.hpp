#ifndef GEOLAB_SUBALGEBRAS_HPP
#define GEOLAB_SUBALGEBRAS_HPP

#include "geolab/algebra.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace geolab {

// ---- named catalog ----------------------------------------------------------
//
// Catalog names understood by subalgebra_by_name:
//   su3.t2            diagonal torus of su(3)
//   su3.u1            u(1) in su(3), last diagonal entry balancing the trace
//   su3.u2            u(2) in su(3), same convention
//   su3.u1_block      top-left 1x1 skew block of 3x3 matrices
//   su3.u2_block      top-left 2x2 skew block
//   suN.uJ_block      general top-left block, e.g. su4.u2_block
//   suN.uJ_tail       bottom-right block, e.g. su3.u2_tail
//   soN.soJ_tail      bottom-right block of so(N), e.g. so4.so2_tail
//   sp2.so2           span of the block rotation generator
//   sp2.sp1x1         quaternion-imaginary (1,1) entry
//   sp2.1xsp1         quaternion-imaginary (2,2) entry
//   sp2.sp1xsp1       both diagonal entries
//   sp2.diag_sp1      equal diagonal entries (q, q)
//   sp2.line_l        span of diag(0, k)

Subalgebra su3_t2();
Subalgebra su3_u1_traceless();
Subalgebra su3_u2_traceless();

// u(j) as a corner block of n x n skew-Hermitian matrices; tail = bottom-right.
Subalgebra corner_u(int n, int j, bool tail);
// so(j) as the bottom-right block of so(n).
Subalgebra corner_so_tail(int n, int j);

Subalgebra sp2_so2();
Subalgebra sp2_sp1x1();
Subalgebra sp2_1xsp1();
Subalgebra sp2_sp1xsp1();
Subalgebra sp2_diag_sp1();
Subalgebra sp2_line_l();

Subalgebra subalgebra_by_name(const std::string& name);
std::vector<std::string> catalog_names();

// ---- product algebras -------------------------------------------------------
// Elements of g1 + g2 are stored block-diagonally as (n1+n2) x (n1+n2) matrices;
// the block inner product is then the sum of the factor inner products.

CMat direct_sum(const CMat& a, const CMat& b);

// Product subalgebra h1 x h2; pass an empty basis for a trivial factor.
Subalgebra product_subalgebra(std::string name, const std::vector<CMat>& left,
                              const std::vector<CMat>& right, int n_left, int n_right);

// Diagonal copy {(X, X)} of an algebra inside its square.
Subalgebra diagonal_subalgebra(std::string name, const std::vector<CMat>& basis);

// ---- serialization ----------------------------------------------------------
// Document shape: { "name": ..., "ambient_dim": n,
//                   "basis": [ [ [re, im], ... n entries ] ... n rows ] x dim }
// where re / im are numbers or exact-expression strings such as
// "sqrt(2)*sqrt(3)" or "(149+18*sqrt(2)*sqrt(3))/9".

nlohmann::json subalgebra_to_json(const Subalgebra& h);
Subalgebra subalgebra_from_json(const nlohmann::json& doc);

}  // namespace geolab

#endif
