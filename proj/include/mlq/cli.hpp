#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlq/beta_arith.hpp"

namespace mlq::cli {

struct RunConfig {
  double beta = 1.0;
  double hbar = 1.0;
  double lambda = 0.5;
  bool lambda_set = false;
  int grid_n = 256;
  std::uint64_t seed = 42;
  double tol_scale = 1.0;
  std::string out = ".";
  bool json = false;

  BetaContext ctx() const { return {beta, hbar, lambda}; }
};

struct MlstateOptions {
  double xi = 0.0;
  double q_min = -10.0, q_max = 10.0;
  double p_min = -10.0, p_max = 10.0;
  int nq = 201, np = 201;
};

// One (q, p) window for one ordering; evaluator = closed form, wigner = sampled W(psi, psi).
struct MlstateGrid {
  double lambda = 0.0;
  std::string evaluator_csv, wigner_csv;
  double max_diff = 0.0;          // max |evaluator - wigner|
  double max_imag_evaluator = 0.0;
  double max_imag_wigner = 0.0;
  double max_real = 0.0;
  double odd_residual_evaluator = 0.0;  // max |Im f(q,p) + Im f(q,-p)|
  double odd_residual_wigner = 0.0;
  double origin_value = 0.0;      // closed form Re at (0, 0)
};

std::vector<double> linspace(double a, double b, int count);

// Writes ml_lambda0.5 and ml_lambda0 grids when lambda is unset, else one grid.
std::vector<MlstateGrid> cmd_mlstate(const RunConfig& cfg, const MlstateOptions& opt);

int run(int argc, char** argv);

}  // namespace mlq::cli
