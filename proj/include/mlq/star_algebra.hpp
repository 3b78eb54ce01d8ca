#pragma once

#include <cstdint>

#include "mlq/sampling.hpp"

namespace mlq {

// Element of the algebra, carried by its f~ representation.
struct AlgebraElement {
  TorusField field;

  AlgebraElement() = default;
  explicit AlgebraElement(TorusField f) : field(std::move(f)) {}

  const BetaContext& ctx() const { return field.ctx; }
  int n() const { return field.n; }
  double twist() const { return field.twist; }

  AlgebraElement& operator+=(const AlgebraElement& o) { field += o.field; return *this; }
  AlgebraElement& operator-=(const AlgebraElement& o) { field -= o.field; return *this; }
  AlgebraElement& operator*=(cplx s) { field *= s; return *this; }
};
inline AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
inline AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
inline AlgebraElement operator*(cplx s, AlgebraElement a) { return a *= s; }

// The symbol q^power * phi(p), phi sampled on the AngleGrid.
struct SymbolObservable {
  int power = 0;
  CVec phi;

  static SymbolObservable q_power(int power, int n);
  static SymbolObservable from_function(int power, int n, const std::function<cplx(double)>& phi_of_alpha);
};

AlgebraElement star(const AlgebraElement& f, const AlgebraElement& g);
// Same product as a direct quadrature over p'' with per-term row shifts.
AlgebraElement star_direct(const AlgebraElement& f, const AlgebraElement& g);

AlgebraElement involution(const AlgebraElement& f);
AlgebraElement s_operator(const AlgebraElement& f);  // result carries lambda -> 1 - lambda
cplx trace(const AlgebraElement& f);
cplx inner(const AlgebraElement& f, const AlgebraElement& g);
double norm2(const AlgebraElement& f);
double cstar_norm_estimate(const AlgebraElement& f, std::uint64_t seed = 42, double tol = 1e-8,
                           int max_iter = 10000);

AlgebraElement star_symbol_left(const SymbolObservable& sym, const AlgebraElement& g);
AlgebraElement star_symbol_right(const AlgebraElement& g, const SymbolObservable& sym);

cplx expectation(const SymbolObservable& sym, const AlgebraElement& rho);
cplx expectation(const AlgebraElement& f, const AlgebraElement& rho);

}  // namespace mlq
