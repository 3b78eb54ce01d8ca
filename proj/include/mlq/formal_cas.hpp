#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <functional>
#include <map>
#include <string>

#include "mlq/sampling.hpp"

namespace mlq {

using Rational = boost::multiprecision::cpp_rational;

// a + b i with exact rational parts.
struct GaussRational {
  Rational re, im;

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational operator+(const GaussRational& o) const { return {re + o.re, im + o.im}; }
  GaussRational operator-(const GaussRational& o) const { return {re - o.re, im - o.im}; }
  GaussRational operator*(const GaussRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  bool operator==(const GaussRational&) const = default;
};

// q^q p^p s^s beta^beta hbar^hbar lambda^lambda / (1 + beta p^2)^d with s = sqrt(1 + beta p^2).
struct Monomial {
  int q = 0, p = 0, s = 0, beta = 0, hbar = 0, lambda = 0, d = 0;
  auto operator<=>(const Monomial&) const = default;
};

class FormalPoly {
 public:
  using Terms = std::map<Monomial, GaussRational>;

  FormalPoly() = default;
  static FormalPoly constant(const Rational& re, const Rational& im = 0);
  static FormalPoly monomial(const Monomial& m, const GaussRational& c = {1, 0});
  static FormalPoly q() { return monomial({.q = 1}); }
  static FormalPoly p() { return monomial({.p = 1}); }
  static FormalPoly s() { return monomial({.s = 1}); }
  static FormalPoly beta() { return monomial({.beta = 1}); }
  static FormalPoly hbar() { return monomial({.hbar = 1}); }
  static FormalPoly lambda() { return monomial({.lambda = 1}); }
  static FormalPoly i() { return constant(0, 1); }
  static FormalPoly one_plus_beta_p2();

  const Terms& terms() const { return terms_; }
  bool is_zero() const;
  // Common denominator (1 + beta p^2)^D with every removable factor cancelled.
  FormalPoly canonical() const;
  std::string str() const;

  int degree_q() const;
  int max_hbar() const;
  FormalPoly hbar_coefficient(int k) const;  // coefficient of hbar^k, as a polynomial
  cplx eval(double q, double p, double beta, double hbar, double lambda) const;

  FormalPoly& operator+=(const FormalPoly& o);
  FormalPoly& operator-=(const FormalPoly& o);
  FormalPoly& operator*=(const FormalPoly& o);
  FormalPoly operator-() const;
  bool operator==(const FormalPoly& o) const { return (*this - o).is_zero(); }

  friend FormalPoly operator+(FormalPoly a, const FormalPoly& b) { return a += b; }
  friend FormalPoly operator-(FormalPoly a, const FormalPoly& b) { return a -= b; }
  friend FormalPoly operator*(const FormalPoly& a, const FormalPoly& b);

  // Derivatives that keep the ring closed.
  FormalPoly d_q() const;
  FormalPoly d_p() const;

 private:
  void add(const Monomial& m, const GaussRational& c);
  Terms terms_;
};

FormalPoly pow(const FormalPoly& f, int k);

// Two commuting derivations A (position-like) and B (momentum-like).
struct DerivationPair {
  std::string name;
  std::function<FormalPoly(const FormalPoly&)> a, b;

  static DerivationPair main();  // d_q, (1 + beta p^2) d_p
  static DerivationPair alt();   // s^-1 d_q, -beta q p s d_q + s^3 d_p
};

struct FormalStarResult {
  FormalPoly value;
  bool terminated = false;  // every term beyond the returned order vanishes
  int order = 0;            // highest hbar order actually summed
};

FormalStarResult formal_star(const DerivationPair& pair, const FormalPoly& f, const FormalPoly& g, int K);
FormalPoly formal_commutator(const DerivationPair& pair, const FormalPoly& f, const FormalPoly& g, int K);
// Coefficient of hbar in the commutator, divided by i.
FormalPoly classical_limit(const DerivationPair& pair, const FormalPoly& f, const FormalPoly& g);

// Samples on the lattice q_m = 2 hbar sqrt(beta) m, m in [-M, M], at the AngleGrid momenta.
LatticeField eval_on_grid(const FormalPoly& f, const BetaContext& ctx, int n, int M);

}  // namespace mlq
