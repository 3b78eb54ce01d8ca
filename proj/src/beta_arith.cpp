#include "mlq/beta_arith.hpp"

#include <cstdio>
#include <stdexcept>

namespace mlq {

BetaContext::BetaContext(double beta_, double hbar_, double lambda_)
    : beta(beta_), hbar(hbar_), lambda(lambda_) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("beta must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar))
    throw std::invalid_argument("hbar must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda must lie in [0,1]");
}

ExtReal::ExtReal(double p) : v_(p) {
  if (!std::isfinite(p)) throw std::invalid_argument("ExtReal: non-finite value");
}

ExtReal ExtReal::infinity() {
  ExtReal r;
  r.inf_ = true;
  return r;
}

double ExtReal::value() const {
  if (inf_) throw std::domain_error("ExtReal: value() of the point at infinity");
  return v_;
}

bool ExtReal::operator==(const ExtReal& o) const {
  if (inf_ || o.inf_) return inf_ == o.inf_;
  return v_ == o.v_;
}

std::string ExtReal::str() const {
  if (inf_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v_);
  return buf;
}

double canonical_angle(double a) {
  double r = a - kPi * std::floor((a + kPi / 2) / kPi);
  if (r >= kPi / 2) r -= kPi;
  if (r < -kPi / 2) r += kPi;
  return r;
}

double principal_angle(double a) {
  double r = a - kPi * std::ceil((a - kPi / 2) / kPi);
  if (r <= -kPi / 2) r += kPi;
  if (r > kPi / 2) r -= kPi;
  return r;
}

Angle::Angle(double a) : alpha(canonical_angle(a)) {}

ExtReal negate(const ExtReal& x) {
  if (x.is_infinite()) return x;
  return ExtReal(-x.value());
}

ExtReal oplus(const BetaContext& ctx, const ExtReal& x, const ExtReal& y) {
  const double b = ctx.beta;
  if (x.is_infinite() && y.is_infinite()) return ExtReal(0.0);
  if (x.is_infinite() || y.is_infinite()) {
    const double f = x.is_infinite() ? y.value() : x.value();
    if (f == 0.0) return ExtReal::infinity();
    return ExtReal(-1.0 / (b * f));
  }
  const double u = x.value(), v = y.value();
  const double den = 1.0 - b * u * v;
  if (den == 0.0) return ExtReal::infinity();
  return ExtReal((u + v) / den);
}

ExtReal ominus(const BetaContext& ctx, const ExtReal& x, const ExtReal& y) {
  return oplus(ctx, x, negate(y));
}

double principal_alpha(const BetaContext& ctx, const ExtReal& p) {
  if (p.is_infinite()) return kPi / 2;
  return std::atan(ctx.sqrt_beta() * p.value());
}

ExtReal circ(const BetaContext& ctx, double lam, const ExtReal& x) {
  if (!(std::abs(lam) <= 1.0))
    throw std::domain_error("circ: scalar must satisfy |lambda| <= 1");
  const double a = lam * principal_alpha(ctx, x);
  if (std::abs(a) == kPi / 2) return ExtReal::infinity();
  return ExtReal(std::tan(a) / ctx.sqrt_beta());
}

double pairing(const BetaContext& ctx, double q, const ExtReal& p) {
  return q * principal_alpha(ctx, p) / ctx.sqrt_beta();
}

Angle angle_of(const BetaContext& ctx, const ExtReal& p) {
  if (p.is_infinite()) return Angle(-kPi / 2);
  return Angle(std::atan(ctx.sqrt_beta() * p.value()));
}

ExtReal momentum_of(const BetaContext& ctx, const Angle& a) {
  if (a.alpha == -kPi / 2) return ExtReal::infinity();
  return ExtReal(std::tan(a.alpha) / ctx.sqrt_beta());
}

}  // namespace mlq
