#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geolab/algebra.hpp"
#include "geolab/moment.hpp"
#include "geolab/subalgebras.hpp"

namespace geolab {

enum class Factor { left, right, both_as_given };

// One trace-power observable: select a factor, optionally project onto a
// subalgebra, trace the k-th matrix power, take the imaginary part when
// flagged (k odd), optionally square the result.
struct IntegralSpec {
  Factor factor = Factor::left;
  std::optional<Subalgebra> proj;
  int power = 1;
  bool imag_multiplier = false;
  bool square = false;
};

// Real-valuedness needs (odd k, imag) or (even k, no imag); power >= 1.
void validate_spec(const IntegralSpec& s);

struct IntegralFamily {
  std::string name;
  std::vector<IntegralSpec> specs;
  int expected_independent = 0;
  AmbientAlgebra ambient;
  // product families evaluate on pairs over ambient + ambient; otherwise the
  // right slot is ignored and sampling keeps it zero
  bool product = false;
};

// Uniform result record for the certification routines below.
struct CheckReport {
  std::string check;
  bool pass = false;
  double worst = 0.0;
  double tol = 0.0;
  int samples = 0;
  unsigned seed = 0;
  std::string detail;
};

nlohmann::json report_to_json(const CheckReport& r);

double eval_integral(const IntegralSpec& s, const CMat& b);
double eval_integral(const IntegralSpec& s, const MomentPair& mp);

// Riesz representative of the differential with respect to the pair inner
// product: eval(s, mp + t v) = eval(s, mp) + t inner(gradient, v) + O(t^2).
MomentPair gradient(const IntegralSpec& s, const MomentPair& mp);

// inner(left, [grad1.left, grad2.left]) + inner(right, [grad1.right, grad2.right])
double lie_poisson_bracket(const IntegralSpec& s1, const IntegralSpec& s2,
                           const MomentPair& mp);

// Max over samples and spec pairs of |bracket| / scale with
// scale = (1 + |f|)(1 + |g|) max(1, |mp|); pass iff below tol (1e-8).
CheckReport check_involution(const IntegralFamily& fam, int samples, unsigned seed);

// Max over samples of |eval(Ad_tau mp) - eval(mp)| / scale, tau acting
// componentwise; pass iff below 1e-10.
CheckReport check_invariance(const IntegralSpec& s, const CMat& tau_left,
                             const CMat& tau_right, const AmbientAlgebra& amb,
                             int samples, unsigned seed);

// Compares eval at B and at -B^T (plain transpose); detects which observables
// can be glued across an orientation flip.
CheckReport check_conjugation_invariance(const IntegralSpec& s, const AmbientAlgebra& amb,
                                         int samples, unsigned seed);

// Registry: eschenburg, gromoll_meyer, berger_chain(n), sun_chain(n),
// son_chain(n), connected_sum(n).
IntegralFamily build_family(const std::string& label);

nlohmann::json family_to_json(const IntegralFamily& fam);
IntegralFamily family_from_json(const nlohmann::json& j);

// Seeded sample in the family's evaluation domain (right slot zero for
// non-product families).
MomentPair random_family_point(const IntegralFamily& fam, unsigned seed);

// Point guaranteed to lie in the image manifold: moment of a random velocity
// at random group translates.
MomentPair random_image_point(const AmbientAlgebra& amb, unsigned seed);

// Thread cap for sample fan-out: GEOLAB_THREADS if set, else hardware count.
int thread_budget();

}  // namespace geolab
