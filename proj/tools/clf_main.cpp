#include <CLI11.hpp>

#include "clf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Complex-Laplacian formation control: stabilizer design, cascade "
      "assembly, trajectory simulation and failure experiments"};
  app.require_subcommand(1);

  std::string scenario, out_dir = "out", design_path, mode = "conventional";
  clf::CommandOptions opts;
  std::uint64_t seed_value = 0;
  double tol_value = 0.0;

  auto add_common = [&](CLI::App* cmd, bool with_mode) {
    cmd->add_option("--scenario", scenario, "Scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "Output directory");
    if (with_mode)
      cmd->add_option("--mode", mode, "conventional or cascade")
          ->check(CLI::IsMember({"conventional", "cascade"}));
    cmd->add_option("--seed", seed_value, "Override the scenario seed")
        ->each([&](const std::string&) { opts.seed = seed_value; });
    cmd->add_option("--tol", tol_value, "Override the convergence tolerance")
        ->each([&](const std::string&) { opts.tol = tol_value; });
    cmd->add_option("--failure", opts.failures,
                    "Append a failure event, KIND:ARGS:TIME (e.g. link:3-7:5.0 "
                    "or actuator:4:2.5)");
  };

  CLI::App* design = app.add_subcommand(
      "design", "Synthesize weights and a stabilizing diagonal; write design.json");
  add_common(design, true);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Integrate the closed loop for a prior design; write CSV series");
  add_common(simulate, false);
  simulate->add_option("--design", design_path, "design.json from the design command")
      ->required();

  CLI::App* compare = app.add_subcommand(
      "compare", "Run conventional and cascade pipelines on the same scenario");
  add_common(compare, false);
  compare->add_option("--seeds", opts.compare_seeds,
                      "Number of initial-condition seeds per pipeline");

  CLI::App* robustness = app.add_subcommand(
      "robustness", "Run the four canonical failure cases on the cascade design");
  add_common(robustness, false);

  CLI11_PARSE(app, argc, argv);

  if (design->parsed()) return clf::cmd_design(scenario, out_dir, mode, opts);
  if (simulate->parsed())
    return clf::cmd_simulate(scenario, design_path, out_dir, opts);
  if (compare->parsed()) return clf::cmd_compare(scenario, out_dir, opts);
  if (robustness->parsed()) return clf::cmd_robustness(scenario, out_dir, opts);
  return clf::kExitValidation;
}
