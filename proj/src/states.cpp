#include "mlq/states.hpp"

#include <cmath>
#include <stdexcept>

#include "mlq/operator_rep.hpp"

namespace mlq {

double sinc(double x) {
  const double y = kPi * std::abs(x);
  return y == 0.0 ? 1.0 : std::sin(y) / y;
}

namespace {

// cos 2 alpha and sin 2 alpha / 2 stand in for the p-dependent prefactors
struct PFactors {
  double c2, s2;
};
PFactors p_factors(const BetaContext& ctx, const ExtReal& p) {
  const double a = principal_alpha(ctx, p);
  return {std::cos(2 * a), 0.5 * std::sin(2 * a)};
}

}  // namespace

double ClosedFormState::twist() const {
  const double theta = xi / ctx.min_dq();
  return kind == StateKind::position_eigenvector ? theta : theta + 1.0;
}

cplx ClosedFormState::psi(double alpha) const {
  const double sb = ctx.sqrt_beta();
  const cplx phase = std::polar(1.0, -xi * alpha / ctx.min_dq());
  if (kind == StateKind::position_eigenvector) return std::sqrt(sb / kPi) * phase;
  return std::sqrt(2 * sb / kPi) * std::cos(alpha) * phase;
}

cplx ClosedFormState::rho(double q, const ExtReal& p) const {
  if (kind == StateKind::position_eigenvector) return sinc((q - xi) / (2 * ctx.min_dq()));
  return ml_phase_closed(ctx, xi, q, p);
}

cplx ClosedFormState::rho_tilde(double alpha_prime, double alpha) const {
  // G(t, a) = 2 pi hbar psi(a) conj psi(a - t), read at a = alpha + lambda t
  const double a = alpha + ctx.lambda * alpha_prime;
  return 2 * kPi * ctx.hbar * psi(a) * std::conj(psi(a - alpha_prime));
}

Wavefunction ClosedFormState::wavefunction(int n) const {
  return Wavefunction::from_function(ctx, n, [this](double a) { return psi(a); }, twist());
}

AlgebraElement ClosedFormState::element(int n) const {
  return AlgebraElement(TorusField::from_function(
      ctx, n, [this](double t, double a) { return rho_tilde(t, a); }, twist()));
}

PositionEigenvector position_eigenvector(const BetaContext& ctx, double xi, int n) {
  ClosedFormState c{StateKind::position_eigenvector, xi, ctx};
  Wavefunction psi = c.wavefunction(n);
  AlgebraElement rho = wigner(psi, psi);
  return {c, std::move(psi), std::move(rho)};
}

Wavefunction ml_wavefunction(const BetaContext& ctx, double xi, int n) {
  return ClosedFormState{StateKind::max_localization, xi, ctx}.wavefunction(n);
}

MLPhaseState ml_phase_state(const BetaContext& ctx, double xi, int n) {
  ClosedFormState c{StateKind::max_localization, xi, ctx};
  const Wavefunction psi = c.wavefunction(n);
  return {c, wigner(psi, psi)};
}

cplx ml_phase_closed(const BetaContext& ctx, double xi, double q, const ExtReal& p) {
  const double x = (q - xi) / (2 * ctx.min_dq());
  const double l = ctx.lambda;
  const auto [c2, s2] = p_factors(ctx, p);
  const double a = sinc(0.5 - l - x), b = sinc(0.5 - l + x);
  const double re = 0.5 * c2 * (a + b) + 0.5 * (sinc(0.5 - x) + sinc(0.5 + x));
  return {re, s2 * (a - b)};
}

double ml_phase_half(const BetaContext& ctx, double xi, double q, const ExtReal& p) {
  const double x = (q - xi) / (2 * ctx.min_dq());
  return p_factors(ctx, p).c2 * sinc(x) + 0.5 * (sinc(0.5 - x) + sinc(0.5 + x));
}

cplx ml_phase_zero(const BetaContext& ctx, double xi, double q, const ExtReal& p) {
  const double x = (q - xi) / (2 * ctx.min_dq());
  const double a = principal_alpha(ctx, p);
  const double c = std::cos(a) * std::cos(a);  // 1 / (1 + beta p^2)
  const double s = std::sin(a) * std::cos(a);  // sqrt(beta) p / (1 + beta p^2)
  const double u = sinc(0.5 - x), v = sinc(0.5 + x);
  return {c * (u + v), s * (u - v)};
}

MomentGrowth p2_moment_slope(const BetaContext& ctx, double xi, const std::vector<int>& ns) {
  if (ns.size() < 2) throw std::invalid_argument("p2_moment_slope: need two grids");
  MomentGrowth g;
  g.ns = ns;
  for (int n : ns) {
    const Wavefunction psi = ClosedFormState{StateKind::position_eigenvector, xi, ctx}.wavefunction(n);
    const Wavefunction pp = phat_apply(psi);
    g.p2.push_back(inner(pp, pp).real());
  }
  // least-squares slope of log <p^2> against log n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(double(ns[i])), y = std::log(g.p2[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  g.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  g.divergent = g.slope > 0.5;
  return g;
}

}  // namespace mlq
