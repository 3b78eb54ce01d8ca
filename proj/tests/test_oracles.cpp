// Comparisons against tests/oracles/frozen.json (regenerate with generate.py).
#include <map>

#include "mlq/formal_cas.hpp"
#include "mlq/states.hpp"
#include "support.hpp"

using namespace mlq;
using testing::as_cplx;
using testing::frozen;

namespace {

FormalPoly poly_of(const nlohmann::json& terms) {
  FormalPoly f;
  for (const auto& t : terms) {
    const std::string r = t[0].get<std::string>();
    const auto slash = r.find('/');
    const Rational c(std::stoll(r.substr(0, slash)), std::stoll(r.substr(slash + 1)));
    f += FormalPoly::monomial({.q = t[1].get<int>(), .p = t[2].get<int>()}, {c, 0});
  }
  return f;
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("constants") {
    const BetaContext c(1.0, 1.0, 0.5);
    CHECK(ml_phase_closed(c, 0.0, 0.0, 0.0).real() == doctest::Approx(frozen()["one_plus_two_over_pi"].get<double>()).epsilon(1e-15));
    CHECK(circ(c, 0.5, 1.0).value() == doctest::Approx(frozen()["sqrt2_minus_1"].get<double>()).epsilon(1e-15));
    CHECK(pairing(c, 1.0, 1.0) == doctest::Approx(frozen()["pi_over_4"].get<double>()).epsilon(1e-15));
    for (const auto& s : frozen()["sinc"]) CHECK(std::abs(sinc(s[0].get<double>()) - s[1].get<double>()) < 1e-15);
  }

  TEST_CASE("arithmetic") {
    for (const auto& r : frozen()["arithmetic"]) {
      const BetaContext c(r["beta"].get<double>(), 1.0, 0.5);
      const double x = r["x"], y = r["y"];
      CAPTURE(r.dump());
      CHECK(oplus(c, x, y).value() == doctest::Approx(r["oplus"].get<double>()).epsilon(1e-13));
      CHECK(ominus(c, x, y).value() == doctest::Approx(r["ominus"].get<double>()).epsilon(1e-13));
      CHECK(circ(c, 0.5, x).value() == doctest::Approx(r["circ_half"].get<double>()).epsilon(1e-13));
      CHECK(circ(c, 1.0 / 3.0, y).value() == doctest::Approx(r["circ_third"].get<double>()).epsilon(1e-13));
      CHECK(pairing(c, x, y) == doctest::Approx(r["pairing"].get<double>()).epsilon(1e-13));
    }
  }

  TEST_CASE("maximally localized Wigner function from its definition") {
    double worst_closed = 0, worst_integral = 0;
    for (const auto& r : frozen()["ml_wigner"]) {
      const BetaContext c(r["beta"].get<double>(), r["hbar"].get<double>(), r["lambda"].get<double>());
      const double xi = r["xi"], q = r["q"], p = r["p"];
      const cplx want = as_cplx(r["value"]);
      worst_closed = std::max(worst_closed, std::abs(ml_phase_closed(c, xi, q, p) - want));
      worst_integral = std::max(worst_integral, std::abs(oracle::ml_phase_integral(c, xi, q, p) - want));
    }
    CHECK(worst_closed < 1e-12);
    CHECK(worst_integral < 1e-10);
  }

  TEST_CASE("grid Wigner function against the definition") {
    std::map<double, FieldEvaluator> by_lambda;
    for (const auto& r : frozen()["ml_wigner"]) {
      if (r["beta"].get<double>() != 2.5 || r["hbar"].get<double>() != 0.4 || r["xi"].get<double>() != 0.7) continue;
      const BetaContext c(2.5, 0.4, r["lambda"].get<double>());
      auto it = by_lambda.find(c.lambda);
      if (it == by_lambda.end())
        it = by_lambda.emplace(c.lambda, FieldEvaluator(ml_phase_state(c, 0.7, 1024).rho.field, true)).first;
      CAPTURE(r.dump());
      CHECK(std::abs(it->second(r["q"].get<double>(), r["p"].get<double>()) - as_cplx(r["value"])) < 1e-4);
    }
  }

  TEST_CASE("literal real-number amplitudes differ away from p = 0") {
    // |cos| instead of the continued cos: only rows where no angle crosses a pole agree
    double at_zero = 0, elsewhere = 0;
    for (const auto& r : frozen()["ml_wigner_literal"]) {
      const BetaContext c(r["beta"].get<double>(), r["hbar"].get<double>(), r["lambda"].get<double>());
      const double p = r["p"];
      const double d = std::abs(ml_phase_closed(c, r["xi"], r["q"], p) - as_cplx(r["value"]));
      double& worst = p == 0 ? at_zero : elsewhere;
      worst = std::max(worst, d);
    }
    CHECK(at_zero < 1e-12);
    CHECK(elsewhere > 0.1);
  }

  TEST_CASE("position eigenvector") {
    for (const auto& r : frozen()["position"]) {
      const BetaContext c(r["beta"].get<double>(), r["hbar"].get<double>(), 0.5);
      const ClosedFormState s{StateKind::position_eigenvector, r["xi"].get<double>(), c};
      CHECK(std::abs(s.rho(r["q"].get<double>(), 0.7) - as_cplx(r["value"])) < 1e-14);
    }
  }

  TEST_CASE("formal products as tensor words") {
    for (const auto& r : frozen()["formal"]) {
      const auto pair = r["pair"] == "main" ? DerivationPair::main() : DerivationPair::alt();
      const FormalPoly val = formal_star(pair, poly_of(r["f"]), poly_of(r["g"]), r["K"].get<int>()).value;
      for (std::size_t i = 0; i < r["points"].size(); ++i) {
        const auto& pt = r["points"][i];
        const cplx got = val.eval(pt[0], pt[1], pt[2], pt[3], pt[4]);
        const cplx want = as_cplx(r["values"][i]);
        CAPTURE(r["text"].get<std::string>());
        CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }

  TEST_CASE("ALT q*q second-order coefficient") {
    // the exact coefficient is lambda (1 - lambda) beta^2 p^2: twice the printed value
    CHECK(frozen()["alt_qq"]["ratio_to_printed"] == "2");
    const FormalPoly c2 = formal_star(DerivationPair::alt(), FormalPoly::q(), FormalPoly::q(), 4).value.hbar_coefficient(2);
    const FormalPoly want = FormalPoly::lambda() * (FormalPoly::constant(1) - FormalPoly::lambda()) * FormalPoly::beta() *
                            FormalPoly::beta() * FormalPoly::p() * FormalPoly::p();
    CHECK(c2 == want);
  }
}
