#include "mlq/oracle.hpp"
#include "mlq/states.hpp"
#include "mlq/transforms.hpp"
#include "support.hpp"

using namespace mlq;
using testing::Gen;
using testing::rel;

namespace {

const double kTwist = 0.37;

std::vector<Wavefunction> orthonormal(const BetaContext& c, int n, double tw, int count, Gen& g) {
  std::vector<Wavefunction> out;
  while (int(out.size()) < count) {
    Wavefunction v = testing::random_vector(c, n, tw, g);
    for (const auto& u : out) v -= inner(u, v) * u;
    v *= 1.0 / norm(v);
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_SUITE("star_algebra") {
  TEST_CASE("pure states are idempotent") {
    for (double lam : {0.0, 0.5, 1.0}) {
      const BetaContext c(1.0, 1.0, lam);
      const AlgebraElement r = ml_phase_state(c, 0.0, 64).rho;
      CHECK(rel(star(r, r), r) < 1e-10);
      const AlgebraElement r0 = position_eigenvector(c, 0.0, 64).rho;
      CHECK(rel(star(r0, r0), r0) < 1e-10);
    }
  }

  TEST_CASE("involution from the Fourier-side integral") {
    // lattice sum in q', midpoint rule in the angle of p'; f~ must vanish at the seam
    for (double lam : {0.0, 0.3, 0.5, 0.8}) {
      const BetaContext c(1.3, 0.7, lam);
      const int n = 64, N = 512;
      const TorusField f = oracle::random_kernel_element(c, n, 3, 0.15, 11).field;
      TorusField bar(c, n);  // conj f(q, p) has tilde conj f~(-p', p)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) bar.at(j, k) = std::conj(f.at((2 * n - 2 - j) % n, k));
      const FieldEvaluator ev(symplectic_fourier(bar));
      const double sb = c.sqrt_beta(), h = c.hbar, dq = c.q_lattice_step();
      std::vector<double> qs, ab, ps;
      for (int m = -n / 2 + 1; m <= n / 2; ++m) qs.push_back(dq * m);
      for (int k = 0; k < N; ++k) {
        ab.push_back(-kPi / 2 + kPi * (k + 0.5) / N);
        ps.push_back(std::tan(ab.back()) / sb);
      }
      const CVec v = ev.grid(qs, ps);
      const TorusField fs = involution(AlgebraElement(f)).field;
      for (double q : {0.0, 2 * dq, 0.37})
        for (double p : {-0.7, 1.2}) {
          const double a = std::atan(sb * p);
          cplx sum = 0;
          for (std::size_t m = 0; m < qs.size(); ++m)
            for (int k = 0; k < N; ++k)
              sum += v[m * N + k] * std::polar(1.0, ((1 - 2 * lam) * qs[m] * ab[k] + q * ab[k] - qs[m] * a) / (h * sb));
          sum *= dq * (kPi / N) / sb / (2 * kPi * h);
          CHECK(std::abs(sum - synth(fs, q, p)) < 1e-12);
        }
    }
  }

  TEST_CASE("star against the double-integral definition") {
    for (double lam : {0.0, 0.3, 0.5, 1.0}) {
      const BetaContext c(1.3, 0.7, lam);
      const TorusField f = oracle::random_band_limited(c, 8, 1, 31), g = oracle::random_band_limited(c, 8, 1, 32);
      const TorusField h = star(AlgebraElement(f), AlgebraElement(g)).field;
      double e = 0, s = 0;
      for (int m = -4; m < 4; ++m)
        for (double p : {-2.0, 0.0, 0.8, 5.0}) {
          const cplx o = oracle::star_double_integral(f, g, c.q_lattice_step() * m, p);
          e = std::max(e, std::abs(o - synth(h, c.q_lattice_step() * m, p)));
          s = std::max(s, std::abs(o));
        }
      CAPTURE(lam);
      CHECK(e / s < 1e-8);
    }
  }

  TEST_CASE("Wigner products contract") {
    Gen g(41);
    const BetaContext c(1.0, 1.0, 0.25);
    const auto v = orthonormal(c, 32, kTwist, 4, g);
    const AlgebraElement lhs = star(wigner(v[0], v[1]), wigner(v[2], v[3]));
    CHECK(max_abs(lhs.field.values) < 1e-12);
    const AlgebraElement self = star(wigner(v[0], v[1]), wigner(v[2], v[0]));
    CHECK(rel(self, wigner(v[2], v[1])) < 1e-10);
  }

  TEST_CASE("involution") {
    Gen g(42);
    for (double lam : {0.0, 0.3, 0.5, 1.0}) {
      const BetaContext c(1.0, 1.0, lam);
      const AlgebraElement f = testing::random_element(c, 32, kTwist, g), h = testing::random_element(c, 32, kTwist, g);
      CAPTURE(lam);
      CHECK(rel(involution(involution(f)), f) < 1e-10);
      CHECK(rel(involution(star(f, h)), star(involution(h), involution(f))) < 1e-8);
      CHECK(norm2(involution(f)) == doctest::Approx(norm2(f)).epsilon(1e-12));
    }
    const BetaContext half(1.0, 1.0, 0.5);
    const AlgebraElement real_rho = ml_phase_state(half, 0.3, 64).rho;
    CHECK(rel(involution(real_rho), real_rho) < 1e-10);
  }

  TEST_CASE("S operator") {
    Gen g(43);
    const BetaContext c(1.0, 1.0, 0.3);
    const AlgebraElement f = testing::random_element(c, 32, 0.0, g), h = testing::random_element(c, 32, 0.0, g);
    CHECK(s_operator(f).ctx().lambda == doctest::Approx(0.7));
    CHECK(rel(s_operator(s_operator(f)), f) < 1e-12);
    CHECK(rel(trace(s_operator(f)), trace(f)) < 1e-12);
    CHECK(rel(s_operator(star(f, h)), star(s_operator(f), s_operator(h))) < 1e-8);
    const AlgebraElement fh = testing::random_element(c.with_lambda(0.5), 32, 0.0, g);
    CHECK(rel(s_operator(fh), fh) < 1e-13);
  }

  TEST_CASE("trace, inner product and norms") {
    Gen g(44);
    const BetaContext c(1.5, 0.6, 0.7);
    const AlgebraElement r = ml_phase_state(c, 0.0, 64).rho;
    CHECK(std::abs(trace(r) - 1.0) < 1e-12);
    CHECK(std::abs(inner(r, r) - 1.0) < 1e-12);
    CHECK(cstar_norm_estimate(r) == doctest::Approx(1.0).epsilon(1e-9));
    const AlgebraElement f = testing::random_element(c, 32, kTwist, g), h = testing::random_element(c, 32, kTwist, g);
    CHECK(std::abs(trace(star(f, h)) - trace(star(h, f))) < 1e-9 * norm2(f) * norm2(h));
    CHECK(rel(trace(star(involution(f), h)), inner(f, h)) < 1e-9);
    CHECK(inner(f, f).real() > 0);
    CHECK(std::abs(inner(f, f).imag()) < 1e-12 * inner(f, f).real());
    const double nf = cstar_norm_estimate(f);
    CHECK(nf <= norm2(f) * (1 + 1e-12));
    CHECK(cstar_norm_estimate(star(involution(f), f)) == doctest::Approx(nf * nf).epsilon(1e-6));
    CHECK(norm2(star(f, h)) <= norm2(f) * norm2(h) * (1 + 1e-12));
  }

  TEST_CASE("trace of a product at lambda 1/2 is the overlap") {
    const BetaContext c(1.0, 1.0, 0.5);
    const AlgebraElement a = oracle::random_kernel_element(c, 64, 3, 0.15, 45), b = oracle::random_kernel_element(c, 64, 3, 0.15, 46);
    CHECK(rel(trace(star(a, b)), trace(AlgebraElement(pointwise_product(a.field, b.field)))) < 1e-8);
  }

  TEST_CASE("symbols") {
    const int n = 64;
    const BetaContext c(1.0, 0.9, 0.4);
    const AlgebraElement g = oracle::random_kernel_element(c, n, 3, 0.15, 47);
    CHECK(rel(star_symbol_left(SymbolObservable::q_power(0, n), g), g) < 1e-14);
    CHECK(rel(star_symbol_right(g, SymbolObservable::q_power(0, n)), g) < 1e-14);
    const auto q = SymbolObservable::q_power(1, n);
    for (double xi : {0.0, 1.0, 3.7}) {
      const AlgebraElement r = position_eigenvector(c, xi, n).rho;
      CHECK(rel(star_symbol_left(q, r), cplx(xi) * r) < 1e-9);
      CHECK(rel(star_symbol_right(r, q), cplx(xi) * r) < 1e-9);
    }
    const AlgebraElement comm = star_symbol_left(q, g) - star_symbol_right(g, q);
    CHECK(rel(comm, cplx(0, c.hbar) * AlgebraElement(d_p(g.field))) < 1e-8);
    // q^2 * g = q * (q * g)
    const AlgebraElement qq = star_symbol_left(SymbolObservable::q_power(2, n), g);
    CHECK(rel(qq, star_symbol_left(q, star_symbol_left(q, g))) < 1e-9);
  }

  TEST_CASE("expectations") {
    const BetaContext c(1.0, 1.0, 0.5);
    const AlgebraElement r = ml_phase_state(c, 0.6, 256).rho;
    CHECK(std::abs(expectation(SymbolObservable::q_power(0, 256), r) - 1.0) < 1e-12);
    CHECK(std::abs(expectation(SymbolObservable::q_power(1, 256), r) - 0.6) < 1e-8);
    const AlgebraElement r0 = ml_phase_state(c, 0.0, 256).rho;
    const auto odd = SymbolObservable::from_function(0, 256, [](double a) { return cplx(std::sin(2 * a) + a); });
    CHECK(std::abs(expectation(odd, r0)) < 1e-12);
    CHECK(std::abs(expectation(r0, r0) - 1.0) < 1e-10);
  }

  TEST_CASE("associativity and derivations on random data") {
    for (std::uint64_t seed : {51u, 52u, 53u}) {
      Gen g(seed);
      const BetaContext c(g.uniform(0.5, 2.0), g.uniform(0.5, 1.5), g.uniform());
      const AlgebraElement f = testing::random_element(c, 32, kTwist, g), h = testing::random_element(c, 32, kTwist, g),
                           k = testing::random_element(c, 32, kTwist, g);
      CAPTURE(seed);
      CHECK(norm2(star(star(f, h), k) - star(f, star(h, k))) < 1e-8 * norm2(f) * norm2(h) * norm2(k));
      const AlgebraElement a = oracle::random_kernel_element(c, 64, 3, 0.15, seed),
                           b = oracle::random_kernel_element(c, 64, 3, 0.15, seed + 100);
      const auto dp = [](const AlgebraElement& x) { return AlgebraElement(d_p(x.field)); };
      const auto dq = [](const AlgebraElement& x) { return AlgebraElement(d_q(x.field)); };
      CHECK(rel(dp(star(a, b)), star(dp(a), b) + star(a, dp(b))) < 1e-8);
      CHECK(rel(dq(star(a, b)), star(dq(a), b) + star(a, dq(b))) < 1e-8);
    }
  }

  TEST_CASE("direct quadrature star agrees on smooth data") {
    const BetaContext c(1.0, 1.0, 0.3);
    const AlgebraElement a = oracle::random_kernel_element(c, 64, 3, 0.15, 61), b = oracle::random_kernel_element(c, 64, 3, 0.15, 62);
    CHECK(rel(star_direct(a, b), star(a, b)) < 1e-8);
  }

  TEST_CASE("mismatched operands are rejected") {
    Gen g(63);
    const BetaContext c(1.0, 1.0, 0.5);
    const AlgebraElement a = testing::random_element(c, 16, 0.0, g);
    CHECK_THROWS(star(a, testing::random_element(c.with_lambda(0.2), 16, 0.0, g)));
    CHECK_THROWS(star(a, testing::random_element(c, 32, 0.0, g)));
  }
}
