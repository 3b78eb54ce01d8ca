#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mlq/operator_rep.hpp"
#include "mlq/oracle.hpp"

namespace testing {

// splitmix64; every property test owns one, seeded explicitly.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double cauchy(double scale = 1.0) { return scale * std::tan(mlq::kPi * (uniform() - 0.5)); }
  double normal() {
    const double u = std::max(uniform(), 1e-300), v = uniform();
    return std::sqrt(-2 * std::log(u)) * std::cos(2 * mlq::kPi * v);
  }
  mlq::cplx cnormal() {
    const double a = normal();
    return {a, normal()};
  }
  int integer(int lo, int hi) { return lo + int(next() % std::uint64_t(hi - lo + 1)); }
  std::uint64_t seed() const { return s_; }

 private:
  std::uint64_t s_;
};

inline double rel(const mlq::CVec& a, const mlq::CVec& b) {
  return mlq::max_abs_diff(a, b) / std::max(mlq::max_abs(b), 1e-300);
}
inline double rel(const mlq::AlgebraElement& a, const mlq::AlgebraElement& b) { return rel(a.field.values, b.field.values); }
inline double rel(const mlq::Wavefunction& a, const mlq::Wavefunction& b) { return rel(a.values, b.values); }
inline double rel(mlq::cplx a, mlq::cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline mlq::Wavefunction random_vector(const mlq::BetaContext& c, int n, double twist, Gen& g) {
  mlq::Wavefunction w(c, n, twist);
  for (auto& x : w.values) x = g.cnormal();
  w *= 1.0 / mlq::norm(w);
  return w;
}

inline mlq::AlgebraElement random_element(const mlq::BetaContext& c, int n, double twist, Gen& g) {
  mlq::OperatorKernel k{c, n, twist, mlq::CMatrix(n, n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) k.values(a, b) = g.cnormal();
  return mlq::element_of(k);
}

inline const nlohmann::json& frozen() {
  static const nlohmann::json j = [] {
    std::ifstream in(MLQ_ORACLE_FILE);
    REQUIRE_MESSAGE(in.good(), "missing " MLQ_ORACLE_FILE);
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline mlq::cplx as_cplx(const nlohmann::json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

}  // namespace testing
