#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmot/coulomb.hpp"
#include "mmot/fermion.hpp"
#include "mmot/grid.hpp"
#include "mmot/solver.hpp"

namespace mmot {

enum class Command { Solve, Smooth, Fermionize, Sweep, Constants };

struct RunConfig {
  Command command = Command::Solve;
  GridSpec grid;
  DensitySpec density;
  std::string density_file;  // when the density comes from a DGF1 path
  int arity = 2;
  CoulombCost cost;
  SolveMethod method = SolveMethod::ExactLp;
  SolverParams solver;
  std::vector<double> eps_schedule;   // smooth
  std::vector<double> hbar_schedule;  // sweep
  Statistics statistics = Statistics::Bosonic;
  AuxVariant aux_variant = AuxVariant::Trig;
  double fermion_alpha = 0.0;  // 0 = auto (measured support gap)
  double fermion_eps = 0.0;    // smoothing width for fermionize
  std::vector<int> constant_dims = {1, 2, 3, 4};
  bool dump_fields = false;
  std::string plan_source = "solve";  // solve | product | file
  std::string plan_file;

  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
};

// Parses and validates a JSON config document; rejects unknown keys and
// missing referenced paths. Throws config_error.
RunConfig parse_config(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

// Executes the configured command, writing summary.json / report.csv (and
// optional DGF1 dumps) into config.out_dir. Returns the process exit status:
// 0 success, 3 cap exceeded, 4 solver non-convergence, 1 other errors.
// On nonzero status an error.json record is written when possible.
int run(const RunConfig& config);

}  // namespace mmot
