#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "geolab/lab.hpp"

using namespace geolab;

namespace {

void write_file(const std::string& path, const std::string& payload) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << payload;
  if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geolab: invariance, involution, rank, and flow checks for "
               "families of commuting integrals"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run a scenario's checks and emit a report");
  std::string v_scen;
  std::optional<int> v_m, v_n;
  std::optional<double> v_t;
  std::optional<unsigned> v_seed;
  std::optional<std::string> v_out, v_format, v_csv;
  verify->add_option("--scenario", v_scen, "builtin label or path to a JSON scenario")
      ->required();
  verify->add_option("--m", v_m, "integer twist parameter");
  verify->add_option("--n", v_n, "dimension parameter");
  verify->add_option("--t", v_t, "metric squashing parameter");
  verify->add_option("--seed", v_seed, "random seed (default 42, echoed in the report)");
  verify->add_option("--out", v_out, "report file path (default: stdout)");
  verify->add_option("--format", v_format, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--csv", v_csv, "also export the flow-check trajectory as CSV");

  auto* flow = app.add_subcommand("flow", "integrate a scenario's flow and export it");
  std::string f_scen;
  std::optional<int> f_m, f_n;
  std::optional<double> f_t;
  std::optional<unsigned> f_seed;
  std::optional<double> f_dt;
  std::optional<int> f_steps;
  std::optional<std::string> f_csv;
  flow->add_option("--scenario", f_scen, "builtin label or path to a JSON scenario")
      ->required();
  flow->add_option("--m", f_m, "integer twist parameter");
  flow->add_option("--n", f_n, "dimension parameter");
  flow->add_option("--t", f_t, "metric squashing parameter");
  flow->add_option("--seed", f_seed, "random seed for the initial data");
  flow->add_option("--dt", f_dt, "step size (default: scenario's)");
  flow->add_option("--steps", f_steps, "step count (default: scenario's)");
  flow->add_option("--csv", f_csv, "trajectory CSV path (default: summary JSON on stdout)");

  auto* replay = app.add_subcommand("replay", "step-by-step worked-example reproduction");
  std::string r_example;
  int r_m = 1;
  std::optional<std::string> r_out;
  replay->add_option("--example", r_example, "worked example id (4.7 or 4.8)")->required();
  replay->add_option("--m", r_m, "integer twist parameter for 4.7");
  replay->add_option("--out", r_out, "write the replay record as JSON");

  auto* list = app.add_subcommand("list", "show the builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const std::string& label : builtin_scenarios()) {
        Scenario s = load_scenario(label);
        std::string checks;
        for (size_t i = 0; i < s.checks.size(); ++i)
          checks += (i ? ", " : "") + s.checks[i];
        std::printf("%-24s worked example %-5s checks: %s\n", s.name.c_str(),
                    s.worked_example.c_str(), checks.c_str());
      }
      return 0;
    }
    if (*verify) {
      Scenario s = load_scenario(scenario_label(v_scen, v_m, v_n, v_t));
      if (v_seed) s.seed = *v_seed;
      LabReport rep = run_checks(s);
      std::string format = v_format.value_or(v_out ? "json" : "text");
      emit_report(rep, format, v_out.value_or("-"));
      if (v_out) std::cout << report_to_text(rep);
      if (v_csv) write_file(*v_csv, trajectory_to_csv(run_flow(s, s.flow.dt, s.flow.steps)));
      return rep.pass ? 0 : 1;
    }
    if (*flow) {
      Scenario s = load_scenario(scenario_label(f_scen, f_m, f_n, f_t));
      if (f_seed) s.seed = *f_seed;
      Trajectory tr = run_flow(s, f_dt.value_or(s.flow.dt), f_steps.value_or(s.flow.steps));
      if (f_csv) {
        write_file(*f_csv, trajectory_to_csv(tr));
        std::cout << trajectory_summary(tr).dump(2) << "\n";
      } else {
        std::cout << trajectory_summary(tr).dump(2) << "\n";
      }
      return 0;
    }
    if (*replay) {
      ReplayReport rep = run_replay(r_example, r_m);
      std::printf("replay %s: %s\n", r_example.c_str(), rep.name.c_str());
      for (const StepResult& st : rep.steps)
        std::printf("  step %d  %s  %s\n", st.step, st.pass ? "PASS" : "FAIL",
                    st.detail.c_str());
      std::printf("overall: %s\n", rep.pass ? "PASS" : "FAIL");
      if (r_out) write_file(*r_out, replay_to_json(rep).dump(2) + "\n");
      return rep.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "geolab: %s\n", e.what());
    return 2;
  }
  return 0;
}
