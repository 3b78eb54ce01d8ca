#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mlq/star_algebra.hpp"

namespace mlq {

using CMatrix = Eigen::MatrixXcd;

// k(alpha_a, alpha_b), a kernel with respect to d mu in the second slot.
struct OperatorKernel {
  BetaContext ctx;
  int n = 0;
  double twist = 0.0;
  CMatrix values;

  double weight() const { return (kPi / n) / ctx.sqrt_beta(); }
  CMatrix weighted() const { return weight() * values; }
};

OperatorKernel kernel_of(const AlgebraElement& f);
AlgebraElement element_of(const OperatorKernel& k);

Wavefunction apply_kernel(const OperatorKernel& k, const Wavefunction& psi);
Wavefunction apply_operator(const AlgebraElement& f, const Wavefunction& psi);
cplx trace_op(const OperatorKernel& k);
double operator_norm(const OperatorKernel& k, std::uint64_t seed = 42, double tol = 1e-8,
                     int max_iter = 10000);

AlgebraElement wigner(const Wavefunction& phi, const Wavefunction& psi);
// The Wigner integral evaluated directly by an nodes-point midpoint rule in p'.
cplx wigner_at(const Wavefunction& phi, const Wavefunction& psi, double q, double p, int nodes);
// Row-major over (qs, ps); phi_c and psi_c evaluate the continuations at any real angle.
CVec wigner_grid(const BetaContext& ctx, const std::function<cplx(double)>& phi_c,
                 const std::function<cplx(double)>& psi_c, const std::vector<double>& qs,
                 const std::vector<double>& ps, int nodes);
CVec wigner_grid(const Wavefunction& phi, const Wavefunction& psi, const std::vector<double>& qs,
                 const std::vector<double>& ps, int nodes);
std::vector<double> marginal_momentum(const AlgebraElement& rho_pure);

Wavefunction qhat_apply(const Wavefunction& psi);
Wavefunction phat_apply(const Wavefunction& psi);
std::function<Wavefunction(const Wavefunction&)> lambda_ordered_operator(const BetaContext& ctx,
                                                                         const SymbolObservable& sym);

struct DensityState {
  std::vector<std::pair<double, Wavefunction>> mixture;
  AlgebraElement rho() const;
};

struct StateReport {
  bool hermitian = false;
  double hermiticity_residual = 0.0;
  cplx trace = 0.0;
  double min_eig = 0.0;
  bool pass = false;
};
StateReport state_check(const AlgebraElement& rho);

struct UncertaintyReport {
  double mean_q = 0, mean_p = 0, dq = 0, dp = 0, gup_slack = 0;
};
UncertaintyReport uncertainty(const Wavefunction& psi);

}  // namespace mlq
