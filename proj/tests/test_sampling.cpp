#include <filesystem>
#include <fstream>
#include <sstream>

#include "mlq/states.hpp"
#include "support.hpp"

using namespace mlq;
using testing::Gen;

namespace {
const BetaContext ctx(1.3, 0.7, 0.3);
}

TEST_SUITE("sampling") {
  TEST_CASE("grids") {
    const AngleGrid ag(8);
    CHECK(ag.node(0) == doctest::Approx(-kPi / 2 + kPi / 16));
    CHECK(ag.node(7) == doctest::Approx(kPi / 2 - kPi / 16));
    const DiffGrid tg(8);
    CHECK(tg.node(tg.zero_index()) == 0.0);
    CHECK(tg.node(7) == doctest::Approx(kPi / 2));
    CHECK(tg.index_of(0) == tg.zero_index());
    CHECK(tg.index_of(4) == 7);
    CHECK(tg.index_of(-4) == 7);
    CHECK(tg.index_of(-3) == 0);
    CHECK(tg.index_of(11) == tg.index_of(3));
    CHECK_THROWS(AngleGrid(3));
  }

  TEST_CASE("quad_mu examples") {
    const int n = 64;
    const AngleGrid ag(n);
    CHECK(std::abs(quad_mu(ctx, ag, CVec(n, 1.0)) - kPi / ctx.sqrt_beta()) < 1e-14);
    CVec osc(n);
    for (int k = 0; k < n; ++k) osc[k] = std::polar(1.0, 2 * ag.node(k));
    CHECK(std::abs(quad_mu(ctx, ag, osc)) < 1e-14);
    CHECK(norm(position_eigenvector(ctx, 0.0, n).psi) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("twisted derivative is exact on twisted modes") {
    const int n = 32;
    const double x0 = -kPi / 2 + kPi / (2 * n);
    for (double tau : {0.0, 0.37, -1.2}) {
      for (int k : {-5, 0, 3}) {
        CVec v(n), want(n);
        for (int j = 0; j < n; ++j) {
          const double x = x0 + j * kPi / n;
          v[j] = std::polar(1.0, (2.0 * k - tau) * x);
          want[j] = cplx(0.0, 2.0 * k - tau) * v[j];
        }
        twisted_derivative(v.data(), n, x0, tau, 1);
        CAPTURE(tau);
        CAPTURE(k);
        CHECK(max_abs_diff(v, want) < 1e-12);
      }
    }
  }

  TEST_CASE("shift_field examples") {
    const int n = 32;
    const TorusField f = oracle::random_band_limited(ctx, n, 6, 5);
    CHECK(max_abs_diff(shift_field(f, 0.0, 0.0).values, f.values) == 0.0);
    const TorusField s = shift_field(f, kPi / n, 0.0);
    double e = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) e = std::max(e, std::abs(s.at(j, k) - f.at(j, (k + 1) % n)));
    CHECK(e < 1e-13);
    CHECK(max_abs_diff(shift_field(f, kPi, 0.0).values, f.values) < 1e-13);
    CHECK(max_abs_diff(shift_field(f, 0.0, kPi).values, f.values) < 1e-13);
  }

  TEST_CASE("shifts compose") {
    Gen g(21);
    const int n = 32;
    const TorusField f = oracle::random_band_limited(ctx, n, 5, 21);
    for (int i = 0; i < 20; ++i) {
      const double a = g.uniform(-2, 2), b = g.uniform(-2, 2), c = g.uniform(-2, 2), d = g.uniform(-2, 2);
      const TorusField two = shift_field(shift_field(f, a, b), c, d);
      CHECK(testing::rel(two.values, shift_field(f, a + c, b + d).values) < 1e-12);
    }
  }

  TEST_CASE("synth examples") {
    const int n = 16;
    TorusField one(ctx, n);
    for (auto& x : one.values) x = ctx.q_lattice_step();
    CHECK(std::abs(synth(one, 0.0, 0.4) - 1.0) < 1e-14);
    CHECK(std::abs(synth(one, ctx.q_lattice_step(), -2.0)) < 1e-14);
    CHECK(std::abs(synth(one, 0.0, ExtReal::infinity()) - 1.0) < 1e-14);
    const FieldEvaluator ev(one);
    const CVec grid = ev.grid({0.0, ctx.q_lattice_step()}, {-1.0, 0.0, 3.0});
    CHECK(std::abs(grid[1] - 1.0) < 1e-14);
    CHECK(std::abs(grid[4]) < 1e-14);
  }

  TEST_CASE("analyze examples and lattice round trip") {
    const int n = 16;
    LatticeField lat(ctx, n, 3);
    for (int k = 0; k < n; ++k) lat.at(0, k) = 1.0;
    const TorusField f = analyze(lat);
    for (const auto& v : f.values) CHECK(std::abs(v - ctx.q_lattice_step()) < 1e-14);
    CHECK(max_abs(analyze(LatticeField(ctx, n, 3)).values) == 0.0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const TorusField r = oracle::random_band_limited(ctx, n, 3, seed);
      CHECK(testing::rel(analyze(lattice_of(r, n / 2 - 1)).values, r.values) < 1e-12);
    }
  }

  TEST_CASE("seminorm examples") {
    const int n = 16;
    TorusField c(ctx, n);
    for (auto& x : c.values) x = 2.5;
    CHECK(seminorm(c, 0, 0) == doctest::Approx(2.5));
    CHECK(seminorm(c, 1, 0) < 1e-12);
    CHECK(seminorm(c, 0, 2) < 1e-12);
    const TorusField e = TorusField::from_function(ctx, n, [](double, double a) { return std::polar(1.0, 4 * a); });
    CHECK(seminorm(e, 0, 1) == doctest::Approx(4 * ctx.sqrt_beta()).epsilon(1e-12));
  }

  TEST_CASE("diagonal frame round trip") {
    const TorusField f = oracle::random_band_limited(ctx, 16, 3, 9);
    TorusField t = f;
    t.twist = 0.37;
    CHECK(testing::rel(from_diag(ctx, 16, 0.37, to_diag(t)).values, t.values) < 1e-13);
  }

  TEST_CASE("wavefunction algebra") {
    Gen g(22);
    const Wavefunction a = testing::random_vector(ctx, 16, 0.2, g), b = testing::random_vector(ctx, 16, 0.2, g);
    CHECK(std::abs(inner(a, a) - 1.0) < 1e-14);
    CHECK(std::abs(inner(a, cplx(0, 2) * b) - cplx(0, 2) * inner(a, b)) < 1e-14);
    CHECK(std::abs(inner(cplx(0, 2) * a, b) - cplx(0, -2) * inner(a, b)) < 1e-14);
    CHECK(norm(a - a) == 0.0);
    CHECK_THROWS(a + testing::random_vector(ctx, 16, 0.0, g));
  }

  TEST_CASE("csv output") {
    const TorusField f = oracle::random_band_limited(ctx, 4, 1, 3);
    const std::string t = torus_csv(f), l = lattice_csv(lattice_of(f, 1));
    CHECK(t.rfind("alpha_prime,alpha,re,im\n", 0) == 0);
    CHECK(l.rfind("q,p,re,im\n", 0) == 0);
    CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 16);
    CHECK(std::count(l.begin(), l.end(), '\n') == 1 + 12);
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");

    const auto dir = std::filesystem::temp_directory_path() / "mlq_sampling_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "f.csv").string();
    write_file_atomic(path, t);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == t);
    std::filesystem::remove_all(dir);
    CHECK_THROWS(write_file_atomic("/proc/nonexistent/y.csv", t));
  }
}
