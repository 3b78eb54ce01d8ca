#include <cmath>

#include "support.hpp"

using namespace mlq;
using testing::Gen;

namespace {

const BetaContext unit(1.0, 1.0, 0.5);

double angle_gap(const BetaContext& c, const ExtReal& x, const ExtReal& y) {
  return std::abs(std::remainder(angle_of(c, x).alpha - angle_of(c, y).alpha, kPi));
}

ExtReal draw(Gen& g) { return g.integer(0, 15) == 0 ? ExtReal::infinity() : ExtReal(g.cauchy(2.0)); }

}  // namespace

TEST_SUITE("beta_arith") {
  TEST_CASE("oplus examples") {
    CHECK(oplus(unit, 0.0, 7.0).value() == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(oplus(unit, ExtReal::infinity(), ExtReal::infinity()) == ExtReal(0.0));
    CHECK(oplus(unit, 2.0, 3.0).value() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(oplus(unit, 1.0, ExtReal::infinity()).value() == doctest::Approx(-1.0));
    CHECK(oplus(unit, 2.0, 0.5).is_infinite());
  }

  TEST_CASE("ominus examples") {
    CHECK(ominus(unit, 5.0, 5.0).value() == 0.0);
    CHECK(ominus(unit, 1.0, ExtReal::infinity()).value() == doctest::Approx(-1.0));
    CHECK(ominus(unit, 3.0, 2.0).value() == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  }

  TEST_CASE("circ examples") {
    CHECK(circ(unit, 1.0, 2.5).value() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(circ(unit, 0.5, 1.0).value() == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    CHECK(circ(unit, 0.5, circ(unit, 0.5, 3.0)).value() == doctest::Approx(circ(unit, 0.25, 3.0).value()).epsilon(1e-14));
    CHECK(circ(unit, 0.0, 4.0).value() == 0.0);
    CHECK(circ(unit, -1.0, 4.0).value() == doctest::Approx(-4.0));
  }

  TEST_CASE("pairing and angles") {
    CHECK(pairing(unit, 0.0, 4.0) == 0.0);
    CHECK(pairing(unit, 0.0, ExtReal::infinity()) == 0.0);
    CHECK(pairing(unit, 1.0, 1.0) == doctest::Approx(kPi / 4).epsilon(1e-15));
    CHECK(angle_of(unit, 0.0).alpha == 0.0);
    CHECK(momentum_of(unit, Angle(0.0)).value() == 0.0);
    CHECK(angle_of(unit, 1.0).alpha == doctest::Approx(kPi / 4).epsilon(1e-15));
    CHECK(momentum_of(unit, Angle(-kPi / 2)).is_infinite());
    CHECK(angle_of(unit, ExtReal::infinity()).alpha == -kPi / 2);
    CHECK(principal_alpha(unit, ExtReal::infinity()) == kPi / 2);
    CHECK(canonical_angle(kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(principal_angle(-kPi / 2) == doctest::Approx(kPi / 2));
  }

  TEST_CASE("beta scales the arithmetic") {
    const BetaContext c(4.0, 1.0, 0.5);
    CHECK(oplus(c, 0.5, 0.25).value() == doctest::Approx(0.75 / 0.5));
    CHECK(angle_of(c, 0.5).alpha == doctest::Approx(kPi / 4));
    CHECK(pairing(c, 2.0, 0.5) == doctest::Approx(2.0 * (kPi / 4) / 2.0));
    CHECK(oplus(c, 1.0, 0.25).is_infinite());
  }

  TEST_CASE("group laws on random triples") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      Gen g(seed);
      const BetaContext c(g.uniform(0.2, 3.0), 1.0, 0.5);
      CAPTURE(seed);
      for (int i = 0; i < 500; ++i) {
        const ExtReal x = draw(g), y = draw(g), z = draw(g);
        CHECK(angle_gap(c, oplus(c, x, oplus(c, y, z)), oplus(c, oplus(c, x, y), z)) < 1e-12);
        CHECK(angle_gap(c, oplus(c, x, y), oplus(c, y, x)) < 1e-12);
        CHECK(angle_gap(c, oplus(c, x, negate(x)), 0.0) < 1e-12);
        CHECK(angle_gap(c, ominus(c, oplus(c, x, y), y), x) < 1e-12);
      }
    }
  }

  TEST_CASE("angle_of is a homomorphism onto addition mod pi") {
    Gen g(11);
    const BetaContext c(1.7, 1.0, 0.5);
    for (int i = 0; i < 10000; ++i) {
      const ExtReal x = g.cauchy(3.0), y = g.cauchy(3.0);
      const double d = angle_of(c, oplus(c, x, y)).alpha - angle_of(c, x).alpha - angle_of(c, y).alpha;
      REQUIRE(std::abs(std::remainder(d, kPi)) < 1e-12);
    }
  }

  TEST_CASE("momentum round trip") {
    Gen g(12);
    const BetaContext c(0.3, 1.0, 0.5);
    for (int i = 0; i < 1000; ++i) {
      const double x = g.cauchy(5.0);
      CHECK(momentum_of(c, angle_of(c, x)).value() == doctest::Approx(x).epsilon(1e-12));
    }
  }

  TEST_CASE("circ scaling laws") {
    Gen g(13);
    const BetaContext c(2.0, 1.0, 0.5);
    for (int i = 0; i < 1000; ++i) {
      const ExtReal x = g.cauchy(2.0), y = g.cauchy(2.0);
      const double a = g.uniform(-1, 1), b = g.uniform(-1, 1) * (1 - std::abs(a));
      CHECK(angle_gap(c, oplus(c, circ(c, a, x), circ(c, b, x)), circ(c, a + b, x)) < 1e-12);
      CHECK(angle_gap(c, circ(c, a, circ(c, b, x)), circ(c, a * b, x)) < 1e-12);
      if (std::abs(angle_of(c, x).alpha + angle_of(c, y).alpha) < kPi / 2)
        CHECK(angle_gap(c, circ(c, a, oplus(c, x, y)), oplus(c, circ(c, a, x), circ(c, a, y))) < 1e-12);
    }
  }

  TEST_CASE("pairing is additive in p") {
    Gen g(14);
    const BetaContext c(1.3, 1.0, 0.5);
    for (int i = 0; i < 1000; ++i) {
      const double q = g.uniform(-5, 5);
      const ExtReal x = g.cauchy(), y = g.cauchy();
      if (std::abs(angle_of(c, x).alpha + angle_of(c, y).alpha) >= kPi / 2) continue;
      CHECK(pairing(c, q, oplus(c, x, y)) == doctest::Approx(pairing(c, q, x) + pairing(c, q, y)).epsilon(1e-12).scale(1));
    }
  }

  TEST_CASE("context validation") {
    CHECK_THROWS(BetaContext(0.0, 1.0, 0.5));
    CHECK_THROWS(BetaContext(1.0, -1.0, 0.5));
    CHECK(unit.q_lattice_step() == 2.0);
  }
}
