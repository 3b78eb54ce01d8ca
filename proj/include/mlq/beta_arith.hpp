#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace mlq {

inline constexpr double kPi = std::numbers::pi;

// Deformation parameters of the minimal-length product.
struct BetaContext {
  double beta = 1.0;
  double hbar = 1.0;
  double lambda = 0.5;

  BetaContext() = default;
  BetaContext(double beta_, double hbar_, double lambda_);

  double sqrt_beta() const { return std::sqrt(beta); }
  double min_dq() const { return hbar * std::sqrt(beta); }
  double q_lattice_step() const { return 2.0 * min_dq(); }
  static constexpr double angle_halfwidth = kPi / 2;

  BetaContext with_lambda(double l) const { return {beta, hbar, l}; }
  bool operator==(const BetaContext&) const = default;
};

// Point of the projectively extended real line.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(double p);  // NOLINT: finite values convert implicitly
  static ExtReal infinity();

  bool is_infinite() const { return inf_; }
  double value() const;
  bool operator==(const ExtReal& o) const;
  std::string str() const;

 private:
  double v_ = 0.0;
  bool inf_ = false;
};

// Canonical representative in [-pi/2, pi/2).
struct Angle {
  double alpha = 0.0;
  Angle() = default;
  explicit Angle(double a);
};

double canonical_angle(double a);  // [-pi/2, pi/2)
double principal_angle(double a);  // (-pi/2, pi/2]

ExtReal negate(const ExtReal& x);
ExtReal oplus(const BetaContext& ctx, const ExtReal& x, const ExtReal& y);
ExtReal ominus(const BetaContext& ctx, const ExtReal& x, const ExtReal& y);
ExtReal circ(const BetaContext& ctx, double lam, const ExtReal& x);
double pairing(const BetaContext& ctx, double q, const ExtReal& p);

Angle angle_of(const BetaContext& ctx, const ExtReal& p);
ExtReal momentum_of(const BetaContext& ctx, const Angle& a);

// arctan(sqrt(beta) p) with p = infinity sent to +pi/2.
double principal_alpha(const BetaContext& ctx, const ExtReal& p);

}  // namespace mlq
