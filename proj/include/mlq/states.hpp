#pragma once

#include <vector>

#include "mlq/star_algebra.hpp"

namespace mlq {

// sin(pi x) / (pi x)
double sinc(double x);

enum class StateKind { position_eigenvector, max_localization };

// Exact evaluators, free of grid error.
struct ClosedFormState {
  StateKind kind = StateKind::max_localization;
  double xi = 0.0;
  BetaContext ctx;

  // Boundary phase of psi: psi(alpha + pi) = e^{-i twist pi} psi(alpha).
  double twist() const;
  cplx psi(double alpha) const;  // analytic continuation to every real angle
  cplx rho(double q, const ExtReal& p) const;
  cplx rho_tilde(double alpha_prime, double alpha) const;

  Wavefunction wavefunction(int n) const;
  AlgebraElement element(int n) const;  // samples rho_tilde
};

struct PositionEigenvector {
  ClosedFormState closed;
  Wavefunction psi;
  AlgebraElement rho;  // W(psi, psi); not a state
};
PositionEigenvector position_eigenvector(const BetaContext& ctx, double xi, int n);

Wavefunction ml_wavefunction(const BetaContext& ctx, double xi, int n);

struct MLPhaseState {
  ClosedFormState closed;
  AlgebraElement rho;  // W(psi_ml, psi_ml)
};
MLPhaseState ml_phase_state(const BetaContext& ctx, double xi, int n);

// The three-term closed form for general lambda, and the lambda = 1/2 and 0 forms.
cplx ml_phase_closed(const BetaContext& ctx, double xi, double q, const ExtReal& p);
double ml_phase_half(const BetaContext& ctx, double xi, double q, const ExtReal& p);
cplx ml_phase_zero(const BetaContext& ctx, double xi, double q, const ExtReal& p);

// <p^2> of the grid position eigenvector over several n; a positive log-log
// slope means the moment diverges in the continuum.
struct MomentGrowth {
  std::vector<int> ns;
  std::vector<double> p2;
  double slope = 0.0;
  bool divergent = false;
};
MomentGrowth p2_moment_slope(const BetaContext& ctx, double xi, const std::vector<int>& ns = {128, 256, 512});

}  // namespace mlq
