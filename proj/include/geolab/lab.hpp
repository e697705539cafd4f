#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geolab/flows.hpp"
#include "geolab/independence.hpp"
#include "geolab/integrals.hpp"
#include "geolab/moment.hpp"
#include "geolab/subalgebras.hpp"

namespace geolab {

// How the flow-conservation check realizes the scenario's metric.
enum class FlowKind { none, quotient, sphere, group_surface, glued };

struct FlowPlan {
  FlowKind kind = FlowKind::none;
  double dt = 1e-3;
  int steps = 10000;
  double squash = 2.0;  // circle-direction rescaling for the sphere and glued metrics
  int sphere_n = 2;     // odd sphere S^{2n+1}
  double drift_tol = 1e-8;
};

// A named verification target: the family under test plus whatever geometric
// data its checks need. Chains must ascend (each basis inside the span of the
// next); every referenced registry name must resolve.
struct Scenario {
  std::string name;
  std::string worked_example;  // anchor id echoed in every report header
  IntegralFamily family;
  std::optional<BiquotientAction> action;
  std::optional<Subalgebra> isotropy;  // for the homogeneous condition checks
  CMat condition_probe;                // generic direction orthogonal to the isotropy
  std::vector<Subalgebra> chain;
  // one-parameter subgroups tau(s) = (exp(2 pi s a), exp(2 pi s b)) the family
  // must be invariant under
  std::vector<MomentPair> invariance_generators;
  std::vector<std::string> checks;
  FlowPlan flow;
  unsigned seed = 42;
  int twist = 0;  // integer parameter m where the scenario family has one
};

// Built-in labels, defaults spelled out.
std::vector<std::string> builtin_scenarios();

// "eschenburg" + m -> "eschenburg(1)"; "berger_cp" + (n, t) -> "berger_cp(2,2)".
// Names that already carry parameters pass through unchanged.
std::string scenario_label(const std::string& base, std::optional<int> m,
                           std::optional<int> n, std::optional<double> t);

// Accepts a built-in label (bare names get default parameters) or a path to a
// JSON scenario file. File documents either extend a builtin
// ({"builtin": "...", "seed": 7, ...}) or define family/checks directly.
// Throws invalid_argument naming the unresolved reference or violated
// invariant; JSON syntax errors propagate with their line/column location.
Scenario load_scenario(const std::string& name_or_path);

// Scenario-level outcome: one CheckReport per requested check, canonical
// order, plus the reproducibility fingerprint.
struct LabReport {
  std::string schema = "geolab-report/1";
  std::string scenario;
  std::string worked_example;
  unsigned seed = 42;
  double dt = 1e-3;
  int steps = 10000;
  nlohmann::json thresholds;  // tolerance per requested check
  std::string timestamp;      // ISO-8601 UTC; excluded from determinism comparisons
  std::vector<CheckReport> checks;
  bool pass = false;
};

// Runs the requested checks in canonical order: invariance, involution, rank,
// conditions, flow, conjugation, seam. A check that throws becomes a failed
// entry with the message in `detail`; the remaining checks still run.
LabReport run_checks(const Scenario& s);

nlohmann::json report_to_json(const LabReport& r);
LabReport report_from_json(const nlohmann::json& j);
std::string report_to_text(const LabReport& r);

// format "json" or "text"; path "-" writes to stdout.
void emit_report(const LabReport& r, const std::string& format, const std::string& path);

// The trajectory behind the scenario's flow model, for CSV export. Throws for
// scenarios without one.
Trajectory run_flow(const Scenario& s, double dt, int steps);

// Step-by-step reproduction by anchor id: "4.7" (uses the twist m) or "4.8".
ReplayReport run_replay(const std::string& example_id, int m);

// Seam-continuity audit for the glued metric on S^{2n+1} x disk charts:
// `geodesics` seeded seam-crossing trajectories. Registered channels must glue
// below 1e-8 everywhere while the raw linear observable must jump above 1e-3
// on at least one crossing.
CheckReport seam_check(int n, double squash, int geodesics, unsigned seed);

// Orientation-flip audit for the modified family: plain odd traces must
// detect the flip, their squares and the even traces must be blind to it.
CheckReport conjugation_pattern_check(int n, unsigned seed);

}  // namespace geolab
