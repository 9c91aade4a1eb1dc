#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clf/scenario_file.hpp"

namespace clf {

// Stable exit-code contract for test harnesses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitDesign = 2;
inline constexpr int kExitSimulation = 3;

struct CommandOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  std::optional<double> tol;          // overrides the convergence tolerance
  std::vector<std::string> failures;  // extra events, "kind:args:time"
  int compare_seeds = 5;
};

int cmd_design(const std::string& scenario_path, const std::string& out_dir,
               const std::string& mode, const CommandOptions& opts);
int cmd_simulate(const std::string& scenario_path, const std::string& design_path,
                 const std::string& out_dir, const CommandOptions& opts);
int cmd_compare(const std::string& scenario_path, const std::string& out_dir,
                const CommandOptions& opts);
int cmd_robustness(const std::string& scenario_path, const std::string& out_dir,
                   const CommandOptions& opts);

}  // namespace clf
