// Invariant suites of every module, swept over parameters and seeds.
#include <sstream>

#include "mlq/verify.hpp"
#include "support.hpp"

namespace {

std::string failures(const mlq::verify::Suite& s) {
  std::ostringstream os;
  for (const auto& c : s.checks)
    if (!c.skipped && c.pass == c.expected_fail)
      os << "  " << c.name << ": " << c.measured << " " << c.relation << " " << c.tolerance << "\n";
  return os.str();
}

void run(const mlq::verify::Config& cfg) {
  for (const auto& s : mlq::verify::module_suites(cfg)) {
    INFO("suite " << s.name << ", seed " << cfg.seed << ", n " << cfg.n << ", lambda " << cfg.ctx.lambda << "\n"
                  << failures(s));
    CHECK(s.pass());
  }
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("default configuration") { run({}); }

  TEST_CASE("ordering endpoints") {
    for (double lam : {0.0, 1.0}) run({mlq::BetaContext(1.0, 1.0, lam), 128, 42, 1.0});
  }

  TEST_CASE("other parameters") {
    run({mlq::BetaContext(2.3, 0.4, 0.7), 128, 5, 1.0});
    run({mlq::BetaContext(0.5, 1.7, 0.2), 64, 6, 1.0});
  }

  TEST_CASE("seed sweep") {
    for (std::uint64_t seed : {1u, 2u, 3u}) run({mlq::BetaContext(1.0, 1.0, 0.5), 64, seed, 1.0});
  }

  TEST_CASE("coarse grid skips spectral checks") {
    const mlq::verify::Config cfg{mlq::BetaContext(1.0, 1.0, 0.5), 8, 42, 1.0};
    int skipped = 0;
    for (const auto& s : mlq::verify::module_suites(cfg)) {
      CHECK(s.pass());
      for (const auto& c : s.checks)
        if (c.skipped) {
          ++skipped;
          CHECK(c.note == "insufficient resolution");
        }
    }
    CHECK(skipped > 0);
  }

  TEST_CASE("bad configuration is rejected") {
    CHECK_THROWS(mlq::verify::module_suites({mlq::BetaContext(), 6 - 3, 42, 1.0}));
  }

  TEST_CASE("report schema") {
    const auto suites = mlq::verify::module_suites({mlq::BetaContext(), 8, 42, 1.0});
    const auto j = mlq::verify::to_json(suites.front());
    for (const auto& c : j["checks"])
      for (const char* key : {"name", "measured", "tolerance", "pass"}) CHECK(c.contains(key));
  }
}
