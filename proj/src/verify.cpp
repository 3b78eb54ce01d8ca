#include "mlq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "mlq/cli.hpp"
#include "mlq/formal_cas.hpp"
#include "mlq/operator_rep.hpp"
#include "mlq/oracle.hpp"
#include "mlq/states.hpp"
#include "mlq/transforms.hpp"

namespace mlq::verify {

namespace {

constexpr const char* kCoarse = "insufficient resolution";

class Recorder {
 public:
  Recorder(std::string name, double scale) : scale_(scale) { suite_.name = std::move(name); }

  void le(const std::string& name, double measured, double tol, std::string note = {}) {
    Check c;
    c.name = name;
    c.measured = measured;
    c.tolerance = tol;
    c.pass = std::isfinite(measured) && measured <= tol * scale_;
    c.note = std::move(note);
    suite_.checks.push_back(std::move(c));
  }
  void ge(const std::string& name, double measured, double bound, std::string note = {}) {
    Check c;
    c.name = name;
    c.measured = measured;
    c.tolerance = bound;
    c.relation = ">=";
    c.pass = std::isfinite(measured) && measured >= bound;
    c.note = std::move(note);
    suite_.checks.push_back(std::move(c));
  }
  void flag(const std::string& name, bool ok, std::string note = {}) {
    le(name, ok ? 0.0 : 1.0, 0.0, std::move(note));
  }
  // A printed value the exact computation does not reproduce.
  void printed_red(const std::string& name, double measured, double tol, std::string note) {
    le(name, measured, tol, std::move(note));
    suite_.checks.back().expected_fail = true;
  }
  void skip(const std::string& name, double tol, std::string note = kCoarse) {
    Check c;
    c.name = name;
    c.tolerance = tol;
    c.skipped = true;
    c.note = std::move(note);
    suite_.checks.push_back(std::move(c));
  }
  Suite take() { return std::move(suite_); }

 private:
  Suite suite_;
  double scale_;
};

double rel(const CVec& a, const CVec& b) {
  const double s = std::max(max_abs(b), 1e-300);
  return max_abs_diff(a, b) / s;
}
double rel(const AlgebraElement& a, const AlgebraElement& b) { return rel(a.field.values, b.field.values); }
double rel(const Wavefunction& a, const Wavefunction& b) { return rel(a.values, b.values); }
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Distance of two angles modulo pi.
double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, kPi)); }
double angle_gap(const BetaContext& c, const ExtReal& x, const ExtReal& y) {
  return angle_gap(angle_of(c, x).alpha, angle_of(c, y).alpha);
}

cplx gauss(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const double a = nd(rng);
  return {a, nd(rng)};
}

AlgebraElement random_element(const BetaContext& c, int n, double twist, std::mt19937_64& rng) {
  OperatorKernel k{c, n, twist, CMatrix(n, n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) k.values(a, b) = gauss(rng);
  return element_of(k);
}

Wavefunction random_vector(const BetaContext& c, int n, double twist, std::mt19937_64& rng) {
  Wavefunction w(c, n, twist);
  for (auto& x : w.values) x = gauss(rng);
  w *= 1.0 / norm(w);
  return w;
}

std::vector<Wavefunction> orthonormal(const BetaContext& c, int n, double twist, int count,
                                      std::mt19937_64& rng) {
  std::vector<Wavefunction> out;
  while (int(out.size()) < count) {
    Wavefunction v = random_vector(c, n, twist, rng);
    for (const auto& u : out) v -= inner(u, v) * u;
    v *= 1.0 / norm(v);
    out.push_back(std::move(v));
  }
  return out;
}

// Twist-0 field concentrated near (0, 0), negligible on both seams.
TorusField windowed(const BetaContext& c, int n, int modes, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = 2 * modes + 1;
  CVec co(std::size_t(m) * m);
  for (auto& x : co) x = gauss(rng) / double(m);
  return TorusField::from_function(c, n, [&](double t, double a) {
    cplx s = 0.0;
    for (int l = -modes; l <= modes; ++l)
      for (int k = -modes; k <= modes; ++k)
        s += co[std::size_t(l + modes) * m + (k + modes)] * std::polar(1.0, 2.0 * (l * t + k * a));
    return s * std::exp(-(t * t + a * a) / (2 * sigma * sigma));
  });
}

AlgebraElement smooth(const BetaContext& c, int n, std::uint64_t seed) {
  return oracle::random_kernel_element(c, n, 3, 0.15, seed);
}

AlgebraElement column_derivative(const AlgebraElement& f) {
  // D_{p'} = sqrt(beta) d/dalpha' = mult_by_q / (i hbar)
  AlgebraElement out(mult_by_q(f.field));
  out *= cplx(0.0, -1.0 / f.ctx().hbar);
  return out;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---- beta_arith

Suite beta_arith_suite(const Config& cfg) {
  Recorder r("beta_arith", cfg.tol_scale);
  const BetaContext c1(1.0, cfg.ctx.hbar, cfg.ctx.lambda);
  const ExtReal inf = ExtReal::infinity();
  auto val = [](const ExtReal& x) { return x.is_infinite() ? 1e300 : x.value(); };

  r.le("oplus(0,7) = 7", std::abs(val(oplus(c1, 0.0, 7.0)) - 7.0), 1e-14);
  r.flag("oplus(inf,inf) = 0", oplus(c1, inf, inf) == ExtReal(0.0));
  r.le("oplus(2,3) = -1", std::abs(val(oplus(c1, 2.0, 3.0)) + 1.0), 1e-14);
  r.le("ominus(5,5) = 0", std::abs(val(ominus(c1, 5.0, 5.0))), 1e-14);
  r.le("ominus(1,inf) = -1", std::abs(val(ominus(c1, 1.0, inf)) + 1.0), 1e-14);
  r.le("ominus(3,2) = 1/7", std::abs(val(ominus(c1, 3.0, 2.0)) - 1.0 / 7.0), 1e-14);
  r.le("circ(1,x) = x", std::abs(val(circ(c1, 1.0, 2.5)) - 2.5), 1e-14);
  r.le("circ(1/2,1) = sqrt2 - 1", std::abs(val(circ(c1, 0.5, 1.0)) - (std::sqrt(2.0) - 1.0)), 1e-12);
  r.le("circ(1/2,circ(1/2,3)) = circ(1/4,3)",
       std::abs(val(circ(c1, 0.5, circ(c1, 0.5, 3.0))) - val(circ(c1, 0.25, 3.0))), 1e-12);
  r.le("pairing(0,p) = 0", std::abs(pairing(c1, 0.0, 4.0)), 0.0);
  r.le("pairing(1,1) = pi/4", std::abs(pairing(c1, 1.0, 1.0) - kPi / 4), 1e-15);
  r.le("pairing bilinear in p", std::abs(pairing(c1, 2.0, oplus(c1, 1.0, 0.5)) -
                                         pairing(c1, 2.0, 1.0) - pairing(c1, 2.0, 0.5)),
       1e-12);
  r.le("p=1 -> alpha=pi/4", std::abs(angle_of(c1, 1.0).alpha - kPi / 4), 1e-15);
  r.flag("alpha=-pi/2 <-> infinity",
         momentum_of(c1, Angle(-kPi / 2)).is_infinite() && angle_of(c1, inf).alpha == -kPi / 2);

  const BetaContext& c = cfg.ctx;
  std::mt19937_64 rng(cfg.seed);
  std::cauchy_distribution<double> cd(0.0, 2.0);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  auto draw = [&](int i) -> ExtReal {
    if (i % 17 == 0) return inf;
    return cd(rng);
  };
  double assoc = 0, comm = 0, neutral = 0, inverse = 0;
  for (int i = 0; i < 2000; ++i) {
    const ExtReal x = draw(i), y = draw(i + 5), z = draw(i + 11);
    assoc = std::max(assoc, angle_gap(c, oplus(c, x, oplus(c, y, z)), oplus(c, oplus(c, x, y), z)));
    comm = std::max(comm, angle_gap(c, oplus(c, x, y), oplus(c, y, x)));
    neutral = std::max(neutral, angle_gap(c, oplus(c, x, 0.0), x));
    inverse = std::max(inverse, angle_gap(c, oplus(c, x, negate(x)), 0.0));
  }
  // beta x y = 1 lands on infinity
  const double x0 = 1.7;
  const ExtReal at_inf = oplus(c, x0, 1.0 / (c.beta * x0));
  r.le("oplus associative", assoc, 1e-12);
  r.le("oplus commutative", comm, 1e-12);
  r.le("0 neutral", neutral, 1e-12);
  r.le("-x inverse", inverse, 1e-12);
  r.flag("beta x y = 1 gives infinity", at_inf.is_infinite() || std::abs(val(at_inf)) > 1e12);

  double hom = 0;
  for (int i = 0; i < 10000; ++i) {
    const ExtReal x = cd(rng), y = cd(rng);
    hom = std::max(hom, angle_gap(angle_of(c, oplus(c, x, y)).alpha, angle_of(c, x).alpha + angle_of(c, y).alpha));
  }
  r.le("angle_of homomorphism", hom, 1e-12);

  double dist = 0, add = 0, half = 0, compose = 0;
  for (int i = 0; i < 2000; ++i) {
    const ExtReal x = cd(rng), y = cd(rng);
    const double l = ud(rng), l1 = ud(rng), l2 = ud(rng) * (1.0 - std::abs(l1));
    // distributivity needs the angle sum to stay on the principal branch
    if (std::abs(angle_of(c, x).alpha + angle_of(c, y).alpha) < kPi / 2)
      dist = std::max(dist, angle_gap(c, circ(c, l, oplus(c, x, y)), oplus(c, circ(c, l, x), circ(c, l, y))));
    add = std::max(add, angle_gap(c, oplus(c, circ(c, l1, x), circ(c, l2, x)), circ(c, l1 + l2, x)));
    compose = std::max(compose, angle_gap(c, circ(c, l1, circ(c, l, x)), circ(c, l1 * l, x)));
    const double xv = val(x);
    if (xv != 0.0) {
      const double want = xv / (std::sqrt(1 + c.beta * xv * xv) + 1);
      half = std::max(half, std::abs(val(circ(c, 0.5, x)) - want) / std::max(std::abs(want), 1e-300));
    }
  }
  r.le("circ distributes over oplus", dist, 1e-12);
  r.le("circ(l1,x) + circ(l2,x) = circ(l1+l2,x)", add, 1e-12);
  r.le("circ(l1,circ(l2,x)) = circ(l1 l2,x)", compose, 1e-12);
  r.le("circ(1/2,x) half-angle formula", half, 1e-12);
  return r.take();
}

// ---- sampling

Suite sampling_suite(const Config& cfg) {
  Recorder r("sampling", cfg.tol_scale);
  const BetaContext& c = cfg.ctx;
  const int n = cfg.n;
  const AngleGrid ag(n);
  const double sb = c.sqrt_beta();

  r.le("quad_mu(1) = pi/sqrt(beta)", std::abs(quad_mu(c, ag, CVec(n, 1.0)) - kPi / sb) * sb / kPi, 1e-14);
  if (n >= 4) {
    CVec osc(n);
    for (int k = 0; k < n; ++k) osc[k] = std::polar(1.0, 2 * ag.node(k));
    r.le("quad_mu(e^{2i alpha}) = 0", std::abs(quad_mu(c, ag, osc)), 1e-14);
  } else {
    r.skip("quad_mu(e^{2i alpha}) = 0", 1e-14);
  }
  const Wavefunction psi0 = position_eigenvector(c, 0.0, n).psi;
  r.le("|psi_0|^2 integrates to 1", std::abs(norm(psi0) - 1.0), 1e-14);

  std::mt19937_64 rng(cfg.seed);
  const int modes = std::max(1, std::min(6, n / 4 - 1));
  if (n >= 8) {
    double tr = 0;
    for (int i = 0; i < 10; ++i) {
      const Wavefunction w = oracle::random_state(c, n, modes, 0, cfg.seed + i);
      const double eta = std::uniform_real_distribution<double>(-kPi / 2, kPi / 2)(rng);
      CVec v = w.values;
      shift_samples(v.data(), n, -eta);
      tr = std::max(tr, rel(quad_mu(c, ag, v), quad_mu(c, ag, w.values)));
    }
    r.le("quad_mu translation invariant", tr, 1e-12);

    CVec v = oracle::random_state(c, n, modes, 0, cfg.seed).values, a = v, b = v;
    const double eta = 0.37;
    shift_samples(a.data(), n, eta);
    derivative_samples(a.data(), n, 1);
    derivative_samples(b.data(), n, 1);
    shift_samples(b.data(), n, eta);
    r.le("D_p commutes with generalized translation", rel(a, b), 1e-10);
  } else {
    r.skip("quad_mu translation invariant", 1e-12);
    r.skip("D_p commutes with generalized translation", 1e-10);
  }

  const TorusField F = oracle::random_band_limited(c, n, std::max(1, std::min(4, n / 2 - 1)), cfg.seed);
  r.le("shift by 0 is identity", max_abs_diff(shift_field(F, 0.0, 0.0).values, F.values), 0.0);
  {
    const TorusField s = shift_field(F, kPi / n, 0.0);
    double e = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) e = std::max(e, std::abs(s.at(j, k) - F.at(j, (k + 1) % n)));
    r.le("shift by pi/n rotates columns", e, 1e-13);
  }
  r.le("shift by pi is identity", max_abs_diff(shift_field(F, kPi, 0.0).values, F.values), 1e-13);

  const double unit = 2 * c.min_dq();
  const TorusField rho0(c, n);
  TorusField one = rho0;
  for (auto& x : one.values) x = unit;
  r.le("synth(2 hbar sqrt(beta)) at q=0 is 1", std::abs(synth(one, 0.0, 0.3) - 1.0), 1e-14);
  r.le("synth(2 hbar sqrt(beta)) at q=2 hbar sqrt(beta) is 0", std::abs(synth(one, unit, 0.3)), 1e-14);
  {
    const TorusField G = oracle::random_band_limited(c, n, 1, cfg.seed + 1);
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    const cplx lhs = synth(a * F + b * G, 0.7, -1.1);
    const cplx rhs = a * synth(F, 0.7, -1.1) + b * synth(G, 0.7, -1.1);
    r.le("synth linear", rel(lhs, rhs), 1e-13);
  }
  {
    LatticeField lat(c, n, 4);
    for (int k = 0; k < n; ++k) lat.at(0, k) = 1.0;
    r.le("lattice delta analyzes to 2 hbar sqrt(beta)", max_abs_diff(analyze(lat).values, one.values) / unit, 1e-14);
    const LatticeField z(c, n, 4);
    r.le("zero lattice analyzes to zero", max_abs(analyze(z).values), 0.0);
    r.le("analyze(lattice_of(F)) = F", rel(analyze(lattice_of(F, n / 2 - 1)).values, F.values), 1e-10);
  }
  r.le("seminorm of constant", seminorm(one, 1, 0) + seminorm(one, 0, 1) + seminorm(one, 1, 1), 1e-12);
  if (n >= 8) {
    const TorusField e2 = TorusField::from_function(c, n, [](double t, double) { return std::polar(1.0, 2 * t); });
    r.le("||e^{2i alpha'}||_{1,0} = 2 sqrt(beta)", std::abs(seminorm(e2, 1, 0) - 2 * sb) / (2 * sb), 1e-12);
  } else {
    r.skip("||e^{2i alpha'}||_{1,0} = 2 sqrt(beta)", 1e-12);
  }
  r.le("||f||_{0,0} = max |f~|", std::abs(seminorm(F, 0, 0) - max_abs(F.values)), 0.0);
  return r.take();
}

// ---- transforms

Suite transforms_suite(const Config& cfg) {
  Recorder r("transforms", cfg.tol_scale);
  const BetaContext& c = cfg.ctx;
  const int n = cfg.n;
  const bool coarse = n < 64;  // the windowed test fields need 64 points
  const TorusField F = oracle::random_band_limited(c, n, std::max(1, n / 4 - 1 > 4 ? 4 : n / 4 - 1), cfg.seed);

  const SymplecticPair sp{F};
  const SymplecticPair back = sp.fourier().fourier();
  r.flag("fourier toggles the tag", sp.fourier().transformed && !back.transformed);
  r.le("fourier applied twice is identity", rel(back.field.values, F.values), 1e-12);
  {
    const TorusField sym = TorusField::from_function(c, n, [](double t, double a) {
      return std::cos(2 * t) * std::cos(2 * a) + cplx(0.0, 0.5) * std::cos(2 * (t + a));
    });
    r.le("symmetric field is fixed", rel(symplectic_fourier(sym).values, sym.values), 1e-12);
  }
  if (n <= 16) {
    double e = 0, s = 0;
    const TorusField Ff = symplectic_fourier(F);
    for (int m = -2; m <= 2; ++m)
      for (double p : {-1.5, 0.2, 2.5}) {
        const double q = c.q_lattice_step() * m;
        const cplx o = oracle::fourier_direct(F, q, p);
        e = std::max(e, std::abs(o - synth(Ff, q, p)));
        s = std::max(s, std::abs(o));
      }
    r.le("fourier vs direct quadrature", e / s, 1e-8);
  } else {
    const TorusField f8 = oracle::random_band_limited(c, 8, 1, cfg.seed);
    const TorusField Ff = symplectic_fourier(f8);
    double e = 0, s = 0;
    for (int m = -2; m <= 2; ++m)
      for (double p : {-1.5, 0.2, 2.5}) {
        const double q = c.q_lattice_step() * m;
        const cplx o = oracle::fourier_direct(f8, q, p);
        e = std::max(e, std::abs(o - synth(Ff, q, p)));
        s = std::max(s, std::abs(o));
      }
    r.le("fourier vs direct quadrature", e / s, 1e-8, "8x8 grid");
  }

  if (coarse) {
    for (const char* name : {"Parseval for fourier", "fourier of q f is a D_p derivative", "fourier of arctan f is a d_q derivative", "q times fourier is fourier of D_p",
                             "arctan times fourier is fourier of d_q", "generalized convolution commutes",
                             "generalized convolution unit", "convolution theorem", "twisted convolution",
                             "twisted convolution associative", "mult_by_q on rho_xi"})
      r.skip(name, 1e-8);
    r.le("mult_by_q on constant", max_abs(mult_by_q(TorusField(c, n)).values), 0.0);
    return r.take();
  }

  const double sigma = 0.2;
  const TorusField A = windowed(c, n, 2, sigma, cfg.seed + 3), B = windowed(c, n, 2, sigma, cfg.seed + 4);
  const TorusField FA = symplectic_fourier(A), FB = symplectic_fourier(B);
  r.le("Parseval for fourier",
       rel(inner(AlgebraElement(FA), AlgebraElement(FB)), inner(AlgebraElement(A), AlgebraElement(B))), 1e-10);
  const double h = c.hbar;
  r.le("fourier of q f is a D_p derivative", rel(d_p(FA).values, (cplx(0, -1 / h) * symplectic_fourier(mult_by_q(A))).values), 1e-8);
  r.le("fourier of arctan f is a d_q derivative", rel(d_q(FA).values, (cplx(0, 1 / h) * symplectic_fourier(mult_by_atan_p(A))).values), 1e-8);
  r.le("q times fourier is fourier of D_p", rel(mult_by_q(FA).values, (cplx(0, h) * symplectic_fourier(d_p(A))).values), 1e-8);
  r.le("arctan times fourier is fourier of d_q", rel(mult_by_atan_p(FA).values, (cplx(0, -h) * symplectic_fourier(d_q(A))).values),
       1e-8);

  const TorusField P = oracle::random_band_limited(c, n, 4, cfg.seed + 5), Q = oracle::random_band_limited(c, n, 4, cfg.seed + 6);
  r.le("generalized convolution commutes", rel(conv_generalized(P, Q).values, conv_generalized(Q, P).values), 1e-10);
  {
    // the unit of (*) solved for by brute force on a 16 x 16 grid
    const int m = 16;
    const TorusField X = oracle::random_band_limited(c, m, 3, cfg.seed + 7);
    const TorusField Y = oracle::random_band_limited(c, m, 3, cfg.seed + 8);
    CMatrix M(m * m, m * m);
    for (int i = 0; i < m * m; ++i) {
      TorusField e(c, m);
      e.values[i] = 1.0;
      const TorusField col = conv_generalized(X, e);
      for (int k = 0; k < m * m; ++k) M(k, i) = col.values[k];
    }
    const Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(X.values.data(), m * m);
    const Eigen::VectorXcd u = M.completeOrthogonalDecomposition().solve(rhs);
    TorusField U(c, m);
    for (int k = 0; k < m * m; ++k) U.values[k] = u[k];
    r.le("generalized convolution unit", rel(conv_generalized(Y, U).values, Y.values), 1e-10);
  }
  r.le("convolution theorem",
       rel(symplectic_fourier(pointwise_product(A, B)).values,
           (cplx(1 / (2 * kPi * h)) * conv_generalized(FA, FB)).values),
       1e-8);
  {
    const int m = 128;
    const TorusField a = windowed(c, m, 1, 0.15, cfg.seed + 9), b = windowed(c, m, 1, 0.15, cfg.seed + 10),
                     d = windowed(c, m, 1, 0.15, cfg.seed + 11);
    const TorusField lhs = symplectic_fourier(star(AlgebraElement(a), AlgebraElement(b)).field);
    const TorusField rhs =
        cplx(1 / (2 * kPi * h)) * twisted_conv(symplectic_fourier(a), symplectic_fourier(b));
    r.le("twisted convolution", rel(lhs.values, rhs.values), 1e-8, "128x128 grid");
    const TorusField x = twisted_conv(twisted_conv(a, b), d), y = twisted_conv(a, twisted_conv(b, d));
    const double na = norm2(AlgebraElement(a)), nb = norm2(AlgebraElement(b)), nd = norm2(AlgebraElement(d));
    r.le("twisted convolution associative",
         norm2(AlgebraElement(x - y)) / (na * nb * nd) / std::pow(2 * kPi * h, 2), 1e-8, "128x128 grid");
  }
  {
    const double xi = 0.7;
    const AlgebraElement rx = position_eigenvector(c, xi, n).rho;
    r.le("mult_by_q on rho_xi", rel(mult_by_q(rx.field).values, (cplx(xi) * rx.field).values), 1e-10);
  }
  r.le("mult_by_q on constant", max_abs(mult_by_q(TorusField::from_function(c, n, [](double, double) {
                                          return cplx(2.0);
                                        })).values),
       1e-12);
  return r.take();
}

// ---- star_algebra

Suite star_suite(const Config& cfg) {
  Recorder r("star_algebra", cfg.tol_scale);
  const BetaContext& c = cfg.ctx;
  const int n = cfg.n;
  const bool coarse = n < 32;
  std::mt19937_64 rng(cfg.seed);

  const AlgebraElement rho0 = position_eigenvector(c, 0.0, n).rho;
  {
    const MLPhaseState ml = ml_phase_state(c, 0.0, n);
    r.le("rho_0 idempotent", rel(star(ml.rho, ml.rho), ml.rho), 1e-10, "maximally localized rho_0");
  }
  {
    const TorusField f = oracle::random_band_limited(c, 8, 1, cfg.seed), g = oracle::random_band_limited(c, 8, 1, cfg.seed + 1);
    const TorusField h = star(AlgebraElement(f), AlgebraElement(g)).field;
    double e = 0, s = 0;
    for (int m = -4; m < 4; ++m)
      for (double p : {-2.0, -0.3, 0.0, 0.8, 5.0}) {
        const double q = c.q_lattice_step() * m;
        const cplx o = oracle::star_double_integral(f, g, q, p);
        e = std::max(e, std::abs(o - synth(h, q, p)));
        s = std::max(s, std::abs(o));
      }
    r.le("star vs double-integral quadrature", e / s, 1e-8, "8x8 grid");
  }
  const double tw = 0.37;
  {
    const auto v = orthonormal(c, n, tw, 4, rng);
    const AlgebraElement lhs = star(wigner(v[0], v[1]), wigner(v[2], v[3]));
    const AlgebraElement rhs = inner(v[0], v[3]) * wigner(v[2], v[1]);
    r.le("W(a,b) * W(c,d) = (a,d) W(c,b)", max_abs_diff(lhs.field.values, rhs.field.values) / max_abs(wigner(v[2], v[1]).field.values), 1e-10);
  }

  const AlgebraElement f = random_element(c, n, tw, rng), g = random_element(c, n, tw, rng),
                       h = random_element(c, n, tw, rng);
  const AlgebraElement fs = involution(f), gs = involution(g);
  r.le("(f*)* = f", rel(involution(fs), f), 1e-10);
  r.le("(f g)* = g* f*", rel(involution(star(f, g)), star(gs, fs)), 1e-8);
  r.le("||f*||_2 = ||f||_2", std::abs(norm2(fs) - norm2(f)) / norm2(f), 1e-12);
  {
    const BetaContext ch = c.with_lambda(0.5);
    const AlgebraElement real_f(TorusField::from_function(ch, n, [](double t, double a) {
      return 2.0 * std::exp(-40 * t * t) * (1.0 + 0.3 * std::cos(2 * a)) * std::polar(1.0, 3 * t);
    }));
    // real f(q, p) means f~(-t, a) = conj f~(t, a); symmetrize onto that class
    TorusField sym = real_f.field;
    const DiffGrid tg(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int d = j - n / 2 + 1;
        sym.at(j, k) = 0.5 * (real_f.field.at(j, k) + std::conj(real_f.field.at(tg.index_of(-d), k)));
      }
    const AlgebraElement x(sym);
    if (coarse)
      r.skip("lambda=1/2: real f is self-adjoint", 1e-10);
    else
      r.le("lambda=1/2: real f is self-adjoint", rel(involution(x), x), 1e-10);
  }

  {
    const AlgebraElement a = random_element(c.with_lambda(0.5), n, tw, rng);
    r.le("S = identity at lambda=1/2", rel(s_operator(a), a), 1e-13);
  }
  r.le("trace(S f) = trace(f)", rel(trace(s_operator(f)), trace(f)), 1e-12);
  {
    const AlgebraElement sfg = s_operator(star(f, g));
    const AlgebraElement rhs = star(s_operator(f), s_operator(g));
    r.le("S(f *_l g) = Sf *_{1-l} Sg", rel(sfg, rhs), 1e-8);
  }
  r.le("trace(rho_0 ML) = 1", std::abs(trace(ml_phase_state(c, 0.0, n).rho) - 1.0), 1e-12);
  r.le("trace(f g) = trace(g f)", std::abs(trace(star(f, g)) - trace(star(g, f))) / (norm2(f) * norm2(g)), 1e-9);
  if (coarse) {
    r.skip("lambda=1/2: trace(f g) = trace of pointwise product", 1e-8);
  } else {
    const BetaContext ch = c.with_lambda(0.5);
    const AlgebraElement a = smooth(ch, n, cfg.seed + 20), b = smooth(ch, n, cfg.seed + 21);
    r.le("lambda=1/2: trace(f g) = trace of pointwise product",
         std::abs(trace(star(a, b)) - trace(AlgebraElement(pointwise_product(a.field, b.field)))) / (norm2(a) * norm2(b)),
         1e-8);
  }
  {
    const MLPhaseState ml = ml_phase_state(c, 0.0, n);
    r.le("inner(rho_0, rho_0) = 1", std::abs(inner(ml.rho, ml.rho) - 1.0), 1e-12);
  }
  r.ge("inner(f, f) >= 0", inner(f, f).real(), 0.0);
  r.le("inner(f, g) = trace(f* g)", rel(trace(star(fs, g)), inner(f, g)), 1e-9);

  {
    const int m = std::min(n, 48);
    const AlgebraElement a = random_element(c, m, tw, rng);
    const double na = cstar_norm_estimate(a, cfg.seed);
    r.le("||rho_0|| = 1", std::abs(cstar_norm_estimate(ml_phase_state(c, 0.0, m).rho, cfg.seed) - 1.0), 1e-9);
    r.le("||f* f|| = ||f||^2", std::abs(cstar_norm_estimate(star(involution(a), a), cfg.seed) - na * na) / (na * na),
         1e-6);
    r.ge("||f||_2 - ||f||", norm2(a) - na, -1e-12 * norm2(a));
  }

  {
    const AlgebraElement sm = smooth(c, n, cfg.seed + 30);
    r.le("1 * g = g", rel(star_symbol_left(SymbolObservable::q_power(0, n), sm), sm), 1e-14);
    const double xi = 1.3;
    const AlgebraElement rx = position_eigenvector(c, xi, n).rho;
    r.le("q * rho_xi = xi rho_xi", rel(star_symbol_left(SymbolObservable::q_power(1, n), rx), cplx(xi) * rx), 1e-9);
    if (coarse) {
      r.skip("q g - g q = i hbar D_p g", 1e-8);
    } else {
      const SymbolObservable q = SymbolObservable::q_power(1, n);
      const AlgebraElement comm = star_symbol_left(q, sm) - star_symbol_right(sm, q);
      const AlgebraElement want = cplx(0.0, c.hbar) * AlgebraElement(d_p(sm.field));
      r.le("q g - g q = i hbar D_p g", rel(comm, want), 1e-8);
    }
    const MLPhaseState ml = ml_phase_state(c, 0.6, n);
    r.le("<1> = 1", std::abs(expectation(SymbolObservable::q_power(0, n), ml.rho) - 1.0), 1e-12);
    if (n >= 128)
      r.le("<q> on rho_xi ML = xi", std::abs(expectation(SymbolObservable::q_power(1, n), ml.rho) - 0.6), 1e-8);
    else
      r.skip("<q> on rho_xi ML = xi", 1e-8);
    const MLPhaseState ml0 = ml_phase_state(c, 0.0, n);
    const auto odd = SymbolObservable::from_function(0, n, [](double a) { return cplx(a); });
    r.le("<arctan p> on rho_0 ML = 0", std::abs(expectation(odd, ml0.rho)), 1e-12);
  }

  // invariants
  {
    const AlgebraElement x = star(star(f, g), h), y = star(f, star(g, h));
    r.le("associativity", norm2(x - y) / (norm2(f) * norm2(g) * norm2(h)), 1e-8);
    r.le("submultiplicativity", std::max(0.0, norm2(star(f, g)) / (norm2(f) * norm2(g)) - 1.0), 1e-9);
  }
  if (n < 64) {
    for (const char* name : {"d_q is a derivation", "D_p is a derivation", "seminorm bound (0,0)",
                             "seminorm bound (1,0)", "seminorm bound (0,1)", "seminorm bound (1,1)",
                             "D_p' Leibniz rule", "D_p' Leibniz rule, second form"})
      r.skip(name, 1e-8);
    return r.take();
  }
  const AlgebraElement a = smooth(c, n, cfg.seed + 40), b = smooth(c, n, cfg.seed + 41);
  const AlgebraElement ab = star(a, b);
  auto dq = [](const AlgebraElement& x) { return AlgebraElement(d_q(x.field)); };
  auto dp = [](const AlgebraElement& x) { return AlgebraElement(d_p(x.field)); };
  r.le("d_q is a derivation", rel(dq(ab), star(dq(a), b) + star(a, dq(b))), 1e-8);
  r.le("D_p is a derivation", rel(dp(ab), star(dp(a), b) + star(a, dp(b))), 1e-8);
  {
    const double pre = 1.0 / (2 * c.min_dq());
    const double lam = c.lambda;
    for (int nn = 0; nn <= 1; ++nn)
      for (int mm = 0; mm <= 1; ++mm) {
        double bound = 0;
        for (int k = 0; k <= nn; ++k)
          for (int l = 0; l <= mm; ++l)
            bound += binom(nn, k) * binom(mm, l) * std::pow(lam, k) * seminorm(a.field, 0, k + l) *
                     seminorm(b.field, nn - k, mm - l);
        bound *= pre;
        const double lhs = seminorm(ab.field, nn, mm);
        r.le("seminorm bound (" + std::to_string(nn) + "," + std::to_string(mm) + ")",
             std::max(0.0, lhs / bound - 1.0), 1e-9);
      }
  }
  {
    const AlgebraElement lhs = column_derivative(ab);
    r.le("D_p' Leibniz rule", rel(lhs, cplx(c.lambda) * star(dp(a), b) + star(a, column_derivative(b))), 1e-8);
    r.le("D_p' Leibniz rule, second form",
         rel(lhs, star(column_derivative(a), b) - cplx(1.0 - c.lambda) * star(a, dp(b))), 1e-8);
  }
  return r.take();
}

// ---- operator_rep

Suite operator_suite(const Config& cfg) {
  Recorder r("operator_rep", cfg.tol_scale);
  const BetaContext& c = cfg.ctx;
  const int n = cfg.n;
  const bool coarse = n < 32;
  std::mt19937_64 rng(cfg.seed);
  const double tw = 0.37;

  const AlgebraElement f = random_element(c, n, tw, rng), g = random_element(c, n, tw, rng);
  r.le("element_of(kernel_of(f)) = f", rel(element_of(kernel_of(f)), f), 1e-10);
  const PositionEigenvector pe0 = position_eigenvector(c, 0.0, n);
  {
    const OperatorKernel k = kernel_of(pe0.rho);
    double e = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        e = std::max(e, std::abs(k.values(a, b) - pe0.psi.values[a] * std::conj(pe0.psi.values[b])));
    r.le("kernel of rho_0 is psi_0 psi_0^*", e / (c.sqrt_beta() / kPi), 1e-8);
  }
  {
    // f~(t, v) = Phi(t, v + lambda t) with Phi pi-periodic; kernel = Phi(a - b, a) / (2 pi hbar)
    auto Phi = [](double t, double v) {
      return cplx(std::cos(2 * t), 0.5 * std::sin(2 * v)) + 0.25 * std::polar(1.0, 2 * (t - v));
    };
    const AlgebraElement x(TorusField::from_function(c, n, [&](double t, double v) { return Phi(t, v + c.lambda * t); }));
    const OperatorKernel k = kernel_of(x);
    const AngleGrid ag(n);
    double e = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        e = std::max(e, std::abs(k.values(a, b) - Phi(ag.node(a) - ag.node(b), ag.node(a)) / (2 * kPi * c.hbar)));
    r.le("kernel argument (a - b, (1-l) a + l b)", e * 2 * kPi * c.hbar, 1e-12);
  }
  r.le("rho_0 psi_0 = psi_0", rel(apply_operator(pe0.rho, pe0.psi), pe0.psi), 1e-12);
  {
    const Wavefunction psi = random_vector(c, n, tw, rng), phi = random_vector(c, n, tw, rng);
    r.le("(f g)^ psi = f^(g^ psi)", rel(apply_operator(star(f, g), psi), apply_operator(f, apply_operator(g, psi))), 1e-8);
    r.le("(phi, (f*)^ psi) = (f^ phi, psi)",
         rel(inner(phi, apply_operator(involution(f), psi)), inner(apply_operator(f, phi), psi)), 1e-8);
  }
  r.le("Tr(rho_0 ML) = 1", std::abs(trace_op(kernel_of(ml_phase_state(c, 0.0, n).rho)) - 1.0), 1e-12);
  r.le("Tr(f^) = tr(f)", rel(trace_op(kernel_of(f)), trace(f)), 1e-10);
  r.le("Tr(f^+ g^) = (f, g)",
       rel(cplx((kernel_of(f).weighted().adjoint() * kernel_of(g).weighted()).trace()), inner(f, g)), 1e-10);

  {
    double e = 0;
    for (int m = -3; m <= 3; ++m)
      for (double p : {-1.0, 0.4}) e = std::max(e, std::abs(synth(pe0.rho.field, c.q_lattice_step() * m, p) - (m == 0 ? 1.0 : 0.0)));
    r.le("W(psi_0, psi_0) on the lattice is delta_m0", e, 1e-12);
  }
  if (coarse) {
    r.skip("W(psi_0, psi_0) off the lattice = sinc", 1e-3);
  } else {
    const FieldEvaluator ev(pe0.rho.field, true);
    double e = 0;
    for (double q : {0.3, 1.0, 2.5})
      for (double p : {-1.0, 0.4}) e = std::max(e, std::abs(ev(q * c.min_dq(), p) - sinc(q / 2)));
    r.le("W(psi_0, psi_0) off the lattice = sinc", e * (n / 256.0) * (n / 256.0), 1e-3, "split seam, O(h^2)");
  }
  {
    const auto v = orthonormal(c, n, tw, 4, rng);
    r.le("W(phi,psi)* = W(psi,phi)", rel(involution(wigner(v[0], v[1])), wigner(v[1], v[0])), 1e-10);
    r.le("inner(W(a,b), W(c,d)) = conj(a,c)(b,d)",
         std::abs(inner(wigner(v[0], v[1]), wigner(v[0], v[1])) - 1.0) +
             std::abs(inner(wigner(v[0], v[1]), wigner(v[2], v[3]))),
         1e-10);
  }
  {
    const auto m0 = marginal_momentum(pe0.rho);
    double e = 0;
    for (double x : m0) e = std::max(e, std::abs(x - c.sqrt_beta() / kPi));
    r.le("marginal of psi_0 is sqrt(beta)/pi", e / (c.sqrt_beta() / kPi), 1e-12);
    const MLPhaseState ml = ml_phase_state(c, 0.0, n);
    const auto m1 = marginal_momentum(ml.rho);
    const AngleGrid ag(n);
    double e1 = 0;
    CVec mv(n);
    for (int k = 0; k < n; ++k) {
      const double want = 2 * c.sqrt_beta() / kPi * std::pow(std::cos(ag.node(k)), 2);
      e1 = std::max(e1, std::abs(m1[k] - want));
      mv[k] = m1[k];
    }
    r.le("marginal of psi_0 ML is (2 sqrt(beta)/pi)/(1+beta p^2)", e1 / (2 * c.sqrt_beta() / kPi), 1e-12);
    r.le("marginal integrates to 1", std::abs(quad_mu(c, ag, mv) - 1.0), 1e-12);
  }

  {
    const double xi = 0.9;
    const PositionEigenvector pe = position_eigenvector(c, xi, n);
    r.le("q psi_xi = xi psi_xi", rel(qhat_apply(pe.psi), cplx(xi) * pe.psi), 1e-10);
  }
  if (n >= 16) {
    const Wavefunction psi = oracle::random_state(c, n, std::min(3, n / 8), 2, cfg.seed + 50);
    const Wavefunction comm = qhat_apply(phat_apply(psi)) - phat_apply(qhat_apply(psi));
    Wavefunction want = psi;
    const AngleGrid ag(n);
    for (int k = 0; k < n; ++k) want.values[k] *= cplx(0, c.hbar) / std::pow(std::cos(ag.node(k)), 2);
    r.le("[q,p] psi = i hbar (1 + beta p^2) psi", rel(comm, want), 1e-8);
    const Wavefunction a = oracle::random_state(c, n, std::min(3, n / 8), 0, cfg.seed + 51),
                       b = oracle::random_state(c, n, std::min(3, n / 8), 0, cfg.seed + 52);
    r.le("q symmetric", rel(inner(a, qhat_apply(b)), inner(qhat_apply(a), b)), 1e-10);

    const auto phi_fun = [](double al) { return cplx(1.0 + 0.5 * std::cos(2 * al), 0.2 * std::sin(2 * al)); };
    const auto s0 = SymbolObservable::from_function(0, n, phi_fun);
    Wavefunction mul = a;
    for (int k = 0; k < n; ++k) mul.values[k] *= s0.phi[k];
    r.le("order-0 symbol multiplies by phi", rel(lambda_ordered_operator(c, s0)(a), mul), 0.0);
    r.le("symbol q is q^", rel(lambda_ordered_operator(c, SymbolObservable::q_power(1, n))(a), qhat_apply(a)), 1e-14);
    const auto s2 = SymbolObservable::from_function(2, n, phi_fun);
    const cplx lhs = inner(a, lambda_ordered_operator(c, s2)(b));
    const cplx rhs = trace(star_symbol_left(s2, wigner(a, b)));
    r.le("pairing of a state with q^2 phi(p)", rel(lhs, rhs), 1e-7);
  } else {
    for (const char* name : {"[q,p] psi = i hbar (1 + beta p^2) psi", "q symmetric", "order-0 symbol multiplies by phi",
                             "symbol q is q^", "pairing of a state with q^2 phi(p)"})
      r.skip(name, 1e-8);
  }

  {
    const MLPhaseState ml = ml_phase_state(c, 0.0, n);
    const StateReport s = state_check(ml.rho);
    r.flag("rho_0 ML is a state", s.pass);
    r.ge("rho_0 ML min eigenvalue", s.min_eig, -1e-9);
    const auto v = orthonormal(c, n, 0.0, 2, rng);
    DensityState mix{{{0.5, v[0]}, {0.5, v[1]}}};
    r.flag("mixture is a state", state_check(mix.rho()).pass);
    r.flag("W(a,b) fails hermiticity", !state_check(wigner(v[0], v[1])).hermitian);
  }
  {
    if (n >= 64) {
      const UncertaintyReport u = uncertainty(ml_wavefunction(c, 0.0, std::max(n, 512)));
      r.le("ML mean q = 0", std::abs(u.mean_q), 1e-10);
      r.le("ML mean p = 0", std::abs(u.mean_p), 1e-10);
      r.le("ML dq = hbar sqrt(beta)", std::abs(u.dq - c.min_dq()) / c.min_dq(), 1e-6);
      r.le("ML saturates the GUP", std::abs(u.gup_slack), 1e-6);
      double worst = 1e300;
      for (int i = 0; i < 20; ++i)
        worst = std::min(worst, uncertainty(oracle::random_state(c, n, 4, 1, cfg.seed + 100 + i)).gup_slack);
      r.ge("GUP slack on random states", worst, -1e-9);
    } else {
      for (const char* name : {"ML mean q = 0", "ML mean p = 0", "ML dq = hbar sqrt(beta)", "ML saturates the GUP",
                               "GUP slack on random states"})
        r.skip(name, 1e-6);
    }
  }

  // tensor identities
  {
    const auto v = orthonormal(c, n, tw, 2, rng);
    const AlgebraElement w = wigner(v[0], v[1]);
    r.le("f W(phi,psi) = W(phi, f^ psi)", rel(star(f, w), wigner(v[0], apply_operator(f, v[1]))), 1e-10);
    OperatorKernel kd = kernel_of(f);
    kd.values = kd.values.adjoint().eval();
    r.le("W(phi,psi) f = W(f^+ phi, psi)", rel(star(w, f), wigner(apply_kernel(kd, v[0]), v[1])), 1e-10);
    const AlgebraElement p = wigner(v[0], v[0]);
    r.le("pure W is idempotent", rel(star(p, p), p), 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(kernel_of(p).weighted(), Eigen::EigenvaluesOnly);
    const auto ev = es.eigenvalues();
    r.le("idempotent kernel is a rank-one projection",
         std::abs(ev[n - 1] - 1.0) + std::max(std::abs(ev[0]), std::abs(ev[n - 2])), 1e-10);
  }
  return r.take();
}

// ---- states

Suite states_suite(const Config& cfg) {
  Recorder r("states", cfg.tol_scale);
  const BetaContext& c = cfg.ctx;
  const int n = cfg.n;
  const double xi = 0.8;
  const ClosedFormState pe{StateKind::position_eigenvector, xi, c};
  r.le("rho_xi(xi, p) = 1", std::abs(pe.rho(xi, 2.0) - 1.0), 0.0);
  {
    double e = 0;
    for (int m : {-3, -1, 1, 2, 5}) e = std::max(e, std::abs(pe.rho(xi + c.q_lattice_step() * m, -0.4)));
    r.le("rho_xi vanishes on the shifted lattice", e, 1e-15);
  }
  {
    const PositionEigenvector p = position_eigenvector(c, xi, n);
    const auto q = SymbolObservable::q_power(1, n);
    r.le("q * rho_xi = xi rho_xi", rel(star_symbol_left(q, p.rho), cplx(xi) * p.rho), 1e-9);
    r.le("rho_xi * q = xi rho_xi", rel(star_symbol_right(p.rho, q), cplx(xi) * p.rho), 1e-9);
    r.le("rho_xi sampled = closed form", rel(p.rho, p.closed.element(n)), 1e-12);
  }
  const Wavefunction ml = ml_wavefunction(c, 0.0, n);
  r.le("||psi_0 ML|| = 1", std::abs(norm(ml) - 1.0), 1e-13);
  r.le("psi ML -> 0 at the seam", std::abs(ml.values[0]) + std::abs(ml.values[n - 1]),
       2 * std::sqrt(2 * c.sqrt_beta() / kPi) * std::sin(kPi / (2 * n)) * (1 + 1e-12));
  {
    const BetaContext ch(1.0, 1.0, 0.5);
    r.le("rho_0 ML(0,0) at lambda=1/2 is 1 + 2/pi", std::abs(ml_phase_half(ch, 0.0, 0.0, 0.0) - (1 + 2 / kPi)), 1e-12);
    r.le("closed form at lambda=1/2 agrees", std::abs(ml_phase_closed(ch, 0.0, 0.0, 0.0) - (1 + 2 / kPi)), 1e-12);
    double im = 0, d0 = 0, dh = 0, shift = 0;
    for (double q : {-3.0, -0.5, 0.0, 1.2, 4.0})
      for (double p : {-5.0, -0.3, 0.0, 1.0, 20.0}) {
        im = std::max(im, std::abs(ml_phase_closed(ch, 0.7, q, p).imag()));
        dh = std::max(dh, std::abs(ml_phase_closed(ch, 0.7, q, p) - ml_phase_half(ch, 0.7, q, p)));
        const BetaContext c0 = ch.with_lambda(0.0);
        d0 = std::max(d0, std::abs(ml_phase_closed(c0, 0.7, q, p) - ml_phase_zero(c0, 0.7, q, p)));
        shift = std::max(shift, std::abs(ml_phase_closed(c, 0.7, q, p) - ml_phase_closed(c, 0.0, q - 0.7, p)));
      }
    r.le("lambda=1/2 closed form is real", im, 0.0);
    r.le("general closed form = lambda=1/2 form", dh, 1e-14);
    r.le("general closed form = lambda=0 form", d0, 1e-14);
    r.le("shift covariance in xi", shift, 1e-14);
  }
  if (n >= 64) {
    const int m = std::max(n, 512);
    const MLPhaseState s = ml_phase_state(c, 0.5, m);
    r.le("rho ML idempotent", norm2(star(s.rho, s.rho) - s.rho), 1e-6);
    const UncertaintyReport u = uncertainty(ml_wavefunction(c, 0.5, m));
    r.le("<q> = xi", std::abs(u.mean_q - 0.5), 1e-8);
    r.le("<p> = 0", std::abs(u.mean_p), 1e-8);
    r.le("dq = hbar sqrt(beta)", std::abs(u.dq - c.min_dq()) / c.min_dq(), 1e-6);
    double e = 0;
    for (int k = 0; k < m; k += m / 64)
      e = std::max(e, std::abs(oracle::ml_phase_integral(c, 0.5, 0.3 * k / m, 2.0) - ml_phase_closed(c, 0.5, 0.3 * k / m, 2.0)));
    r.le("closed form = three trigonometric integrals", e, 1e-12);
    const MomentGrowth g = p2_moment_slope(c, 0.3);
    r.ge("<p^2> of rho_xi grows with n", g.slope, 0.5, "position eigenvectors are not states");
  } else {
    for (const char* name : {"rho ML idempotent", "<q> = xi", "<p> = 0", "dq = hbar sqrt(beta)",
                             "closed form = three trigonometric integrals", "<p^2> of rho_xi grows with n"})
      r.skip(name, 1e-6);
  }
  return r.take();
}

// ---- formal_cas

Suite formal_suite(const Config& cfg) {
  Recorder r("formal_cas", cfg.tol_scale);
  using F = FormalPoly;
  const auto M = DerivationPair::main(), A = DerivationPair::alt();
  const F q = F::q(), p = F::p(), ihb = F::i() * F::hbar();
  auto exact = [&](const std::string& name, const F& got, const F& want) {
    r.flag(name, got == want, (got - want).canonical().str());
  };
  {
    const auto res = formal_star(M, q, p, 6);
    exact("MAIN [q,p] = i hbar (1 + beta p^2)", formal_commutator(M, q, p, 6), ihb * F::one_plus_beta_p2());
    r.flag("MAIN q*p terminates at K=1", res.terminated && res.order == 1);
  }
  {
    const auto qq = formal_star(M, q, q, 6), pp = formal_star(M, p, p, 6);
    exact("MAIN q*q = q^2", qq.value, q * q);
    exact("MAIN p*p = p^2", pp.value, p * p);
    r.flag("MAIN products terminate", qq.terminated && pp.terminated);
  }
  exact("ALT [q,p] = i hbar (1 + beta p^2)", formal_commutator(A, q, p, 6), ihb * F::one_plus_beta_p2());
  exact("[q,q] = 0", formal_commutator(M, q, q, 6), F());
  exact("{q,p} = 1 + beta p^2", classical_limit(M, q, p), F::one_plus_beta_p2());
  exact("{p,q} = -(1 + beta p^2)", classical_limit(M, p, q), -F::one_plus_beta_p2());
  exact("{q^2,p} = 2q(1 + beta p^2)", classical_limit(M, q * q, p), F::constant(2) * q * F::one_plus_beta_p2());
  r.flag("ALT q*q differs from q^2", !(formal_star(A, q, q, 6).value == q * q));

  // associativity order by order on random monomial triples
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> deg(0, 4);
  auto mono = [&]() {
    int a = deg(rng), b = deg(rng);
    while (a + b > 4) b = deg(rng) % (5 - a);
    return pow(q, a) * pow(p, b);
  };
  const int K = 4;
  int bad = 0;
  for (int t = 0; t < 12; ++t) {
    const F f = mono(), g = mono(), h = mono();
    const F x = formal_star(M, formal_star(M, f, g, K).value, h, K).value;
    const F y = formal_star(M, f, formal_star(M, g, h, K).value, K).value;
    for (int k = 0; k <= K; ++k)
      if (!(x.hbar_coefficient(k) == y.hbar_coefficient(k))) ++bad;
  }
  r.le("MAIN associative through hbar^4", bad, 0.0, "12 random monomial triples, total degree <= 4");
  {
    const F f = pow(q, 2) * p, g = pow(q, 3);
    const auto res = formal_star(M, f, g, 10);
    const auto lower = formal_star(M, f, g, 4);
    r.flag("MAIN terminates at deg_q f + deg_q g", res.terminated && res.order == 5 && !lower.terminated);
  }
  {
    const BetaContext c(1.0, 0.5, 0.3);
    const LatticeField lat = eval_on_grid(F::constant(3), c, 8, 2);
    double e = 0;
    for (const auto& v : lat.values) e = std::max(e, std::abs(v - 3.0));
    r.le("constant polynomial -> constant field", e, 0.0);
    r.le("q p at (2,3) = 6", std::abs((q * p).eval(2.0, 3.0, 1.0, 1.0, 0.5) - 6.0), 0.0);
  }
  return r.take();
}

// ---- criterion helpers

// max relative error of star against the double-integral definition on 8x8 grids over several orderings
double double_integral_error(std::uint64_t seed) {
  double worst = 0;
  for (double lam : {0.0, 0.3, 0.5, 1.0}) {
    const BetaContext c(1.3, 0.7, lam);
    const TorusField f = oracle::random_band_limited(c, 8, 1, seed), g = oracle::random_band_limited(c, 8, 1, seed + 1);
    const TorusField h = star(AlgebraElement(f), AlgebraElement(g)).field;
    double e = 0, s = 0;
    for (int m = -4; m < 4; ++m)
      for (double p : {-2.0, -0.3, 0.0, 0.8, 5.0}) {
        const double q = c.q_lattice_step() * m;
        const cplx o = oracle::star_double_integral(f, g, q, p);
        e = std::max(e, std::abs(o - synth(h, q, p)));
        s = std::max(s, std::abs(o));
      }
    worst = std::max(worst, e / s);
  }
  return worst;
}

// Power iteration of x -> f* (f x) in the Hilbert-Schmidt space.
double algebra_side_norm(const AlgebraElement& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AlgebraElement x = random_element(f.ctx(), f.n(), f.twist(), rng);
  const AlgebraElement fs = involution(f);
  x *= 1.0 / norm2(x);
  for (int it = 0; it < 20000; ++it) {
    const AlgebraElement y = star(fs, star(f, x));
    const double mu = inner(x, y).real();
    const double res = norm2(y - cplx(mu) * x);
    if (res <= 1e-9 * mu) return std::sqrt(mu);
    x = y;
    x *= 1.0 / norm2(y);
  }
  throw std::runtime_error("algebra_side_norm: no convergence");
}

struct SmoothPair {
  double a = 0.3;  // centre of the second bump
  static cplx phi1(int d, double al) {
    const double c = std::cos(2 * al), s = std::sin(2 * al);
    return d == 0 ? 0.5 * (1 + c) : d == 1 ? -s : -2 * c;
  }
  static cplx phi2(int d, double al) {
    const double c = std::cos(2 * al), s = std::sin(2 * al);
    return d == 0 ? cplx(1.0 + 0.5 * s, 0.2 * c) : d == 1 ? cplx(c, -0.4 * s) : cplx(-2 * s, -0.8 * c);
  }
  // d^l/dx^l e^{-x^2/2}
  static double gauss_d(int l, double x) {
    const double e = std::exp(-x * x / 2);
    return l == 0 ? e : l == 1 ? -x * e : (x * x - 1) * e;
  }
  // d_q^l D_p^m of each function
  cplx f(int l, int m, const BetaContext& c, double q, double al) const {
    return gauss_d(l, q) * std::pow(c.sqrt_beta(), m) * phi1(m, al);
  }
  cplx g(int l, int m, const BetaContext& c, double q, double al) const {
    return gauss_d(l, q - a) * std::pow(c.sqrt_beta(), m) * phi2(m, al);
  }
  TorusField f_tilde(const BetaContext& c, int n) const {
    const double k = 1 / c.min_dq();
    return TorusField::from_function(c, n, [&](double t, double al) {
      return std::sqrt(2 * kPi) * std::exp(-k * k * t * t / 2) * phi1(0, al);
    });
  }
  TorusField g_tilde(const BetaContext& c, int n) const {
    const double k = 1 / c.min_dq();
    return TorusField::from_function(c, n, [&](double t, double al) {
      return std::sqrt(2 * kPi) * std::polar(std::exp(-k * k * t * t / 2), -a * k * t) * phi2(0, al);
    });
  }
};

}  // namespace

// ---- public

bool Suite::pass() const {
  for (const auto& c : checks) {
    if (c.skipped) continue;
    if (c.expected_fail ? c.pass : !c.pass) return false;
  }
  return true;
}

std::vector<Suite> module_suites(const Config& cfg) {
  if (cfg.n < 4 || cfg.n % 2 != 0) throw std::invalid_argument("verify: grid must be even and >= 4");
  return {beta_arith_suite(cfg), sampling_suite(cfg), transforms_suite(cfg), star_suite(cfg),
          operator_suite(cfg),   states_suite(cfg),   formal_suite(cfg)};
}

std::string criterion_title(int id) {
  static const char* titles[] = {"",
                                 "exact algebra oracle",
                                 "star-product correctness",
                                 "trace identities",
                                 "involution algebra",
                                 "representation faithfulness",
                                 "Wigner calculus",
                                 "position eigenvectors",
                                 "maximal localization",
                                 "GUP inequality",
                                 "asymptotic consistency",
                                 "figure reproduction"};
  if (id < 1 || id > 11) throw std::invalid_argument("criterion id");
  return titles[id];
}

double formal_slope(double lambda, std::vector<double>* errors) {
  const SmoothPair sp;
  const std::vector<double> hs = {0.1, 0.05, 0.025};
  std::vector<double> errs;
  const int n = 512;
  for (double h : hs) {
    const BetaContext c(1.0, h, lambda);
    const AlgebraElement F(sp.f_tilde(c, n)), G(sp.g_tilde(c, n));
    const FieldEvaluator ev(star(F, G).field);
    double e = 0;
    for (double q : {-0.5, 0.0, 0.4, 1.0})
      for (double p : {-0.7, 0.0, 0.5}) {
        const double al = angle_of(c, p).alpha;
        cplx formal = 0.0;
        cplx ihk = 1.0;
        double fact = 1;
        for (int k = 0; k <= 2; ++k) {
          if (k > 0) {
            ihk *= cplx(0.0, h);
            fact *= k;
          }
          cplx s = 0.0;
          for (int l = 0; l <= k; ++l)
            s += binom(k, l) * std::pow(1 - lambda, l) * std::pow(-lambda, k - l) * sp.f(l, k - l, c, q, al) *
                 sp.g(k - l, l, c, q, al);
          formal += ihk / fact * s;
        }
        e = std::max(e, std::abs(ev(q, p) - formal));
      }
    errs.push_back(e);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = double(hs.size());
  if (errors) *errors = errs;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Suite criterion(int id, std::uint64_t seed) {
  Recorder r("criterion " + std::to_string(id) + ": " + criterion_title(id), 1.0);
  std::mt19937_64 rng(seed);
  switch (id) {
    case 1: {
      using F = FormalPoly;
      const auto M = DerivationPair::main(), A = DerivationPair::alt();
      const F q = F::q(), p = F::p(), one_bp2 = F::one_plus_beta_p2(), ihb = F::i() * F::hbar();
      auto diff_size = [](const F& got, const F& want) { return double((got - want).canonical().terms().size()); };
      r.le("MAIN [q,p] = i hbar (1 + beta p^2)", diff_size(formal_commutator(M, q, p, 4), ihb * one_bp2), 0.0);
      r.le("MAIN q*q = q^2", diff_size(formal_star(M, q, q, 4).value, q * q), 0.0);
      r.le("MAIN p*p = p^2", diff_size(formal_star(M, p, p, 4).value, p * p), 0.0);
      r.le("{q,p} = 1 + beta p^2", diff_size(classical_limit(M, q, p), one_bp2), 0.0);
      const F lam = F::lambda(), b = F::beta(), hb = F::hbar();
      const F first = q * q + ihb * (F::constant(2) * lam - F::constant(1)) * b * q * p;
      const F second = hb * hb * lam * (F::constant(1) - lam) * b * b * p * p;
      const auto alt = formal_star(A, q, q, 4);
      r.le("ALT q*q terminates at K=2", (alt.terminated && alt.order == 2) ? 0.0 : 1.0, 0.0);
      r.le("ALT q*q through hbar^1", diff_size(alt.value.hbar_coefficient(0) + hb * alt.value.hbar_coefficient(1), first), 0.0);
      r.printed_red("ALT q*q with 1/2 hbar^2 lambda(1-lambda) beta^2 p^2",
                  diff_size(alt.value, first + F::constant(Rational(1, 2)) * second), 0.0,
                  "exact hbar^2 coefficient is lambda(1-lambda) beta^2 p^2, not half of it");
      r.le("ALT q*q with hbar^2 lambda(1-lambda) beta^2 p^2", diff_size(alt.value, first + second), 0.0,
           "the coefficient the derivation actually gives");
      break;
    }
    case 2: {
      r.le("star vs double-integral definition on 8x8 grids", double_integral_error(seed), 1e-8, "lambda in {0, 0.3, 0.5, 1}");
      const BetaContext c(1.0, 1.0, 0.5);
      double worst = 0;
      for (int i = 0; i < 20; ++i) {
        const BetaContext ci = c.with_lambda(double(i % 5) / 4.0);
        const AlgebraElement f(oracle::random_band_limited(ci, 128, 6, seed + 3 * i)),
            g(oracle::random_band_limited(ci, 128, 6, seed + 3 * i + 1)),
            h(oracle::random_band_limited(ci, 128, 6, seed + 3 * i + 2));
        const double res = norm2(star(star(f, g), h) - star(f, star(g, h))) / (norm2(f) * norm2(g) * norm2(h));
        worst = std::max(worst, res);
      }
      r.le("associativity on 20 band-limited triples, n=128", worst, 1e-8);
      break;
    }
    case 3: {
      double cyc = 0, half = 0;
      for (int i = 0; i < 10; ++i) {
        const BetaContext c(1.0, 1.0, double(i % 5) / 4.0);
        const AlgebraElement f = random_element(c, 256, 0.37 * (i % 2), rng),
                             g = random_element(c, 256, 0.37 * (i % 2), rng);
        cyc = std::max(cyc, std::abs(trace(star(f, g)) - trace(star(g, f))) / std::abs(trace(star(f, g))));
        const BetaContext ch = c.with_lambda(0.5);
        const AlgebraElement a = smooth(ch, 256, seed + 2 * i), b = smooth(ch, 256, seed + 2 * i + 1);
        const cplx t = trace(star(a, b));
        half = std::max(half, std::abs(t - trace(AlgebraElement(pointwise_product(a.field, b.field)))) / std::abs(t));
      }
      r.le("trace(f g) = trace(g f)", cyc, 1e-9);
      r.le("lambda=1/2: trace(f g) = trace(f g pointwise)", half, 1e-8);
      break;
    }
    case 4: {
      double anti = 0, twice = 0, iso = 0, conj = 0;
      for (int i = 0; i < 10; ++i) {
        const BetaContext c(1.0, 1.0, double(i % 5) / 4.0);
        const AlgebraElement f = random_element(c, 256, 0.37 * (i % 2), rng),
                             g = random_element(c, 256, 0.37 * (i % 2), rng);
        const AlgebraElement fs = involution(f);
        anti = std::max(anti, rel(involution(star(f, g)), star(involution(g), fs)));
        twice = std::max(twice, rel(involution(fs), f));
        iso = std::max(iso, std::abs(norm2(fs) - norm2(f)) / norm2(f));
        const AlgebraElement a = smooth(c.with_lambda(0.5), 256, seed + i);
        AlgebraElement cj = a;
        const DiffGrid tg(256);
        for (int j = 0; j < 256; ++j)
          for (int k = 0; k < 256; ++k) cj.field.at(j, k) = std::conj(a.field.at(tg.index_of(-(j - 127)), k));
        conj = std::max(conj, rel(involution(a), cj));
      }
      r.le("(f g)* = g* f*", anti, 1e-8);
      r.le("(f*)* = f", twice, 1e-8);
      r.le("||f*||_2 = ||f||_2", iso, 1e-8);
      r.le("lambda=1/2: * is complex conjugation", conj, 1e-8);
      break;
    }
    case 5: {
      double comp = 0, adj = 0, tr = 0, hs = 0, opn = 0, cstar = 0;
      const int n = 32;
      for (int i = 0; i < 20; ++i) {
        const BetaContext c(1.0, 1.0, double(i % 5) / 4.0);
        const double tw = 0.37 * (i % 2);
        const AlgebraElement f = random_element(c, n, tw, rng), g = random_element(c, n, tw, rng);
        // composition through the independent p'' quadrature
        const AlgebraElement sf = smooth(c, 64, seed + 2 * i), sg = smooth(c, 64, seed + 2 * i + 1);
        const Wavefunction psi = random_vector(c, 64, 0.0, rng), phi = random_vector(c, n, tw, rng),
                           chi = random_vector(c, n, tw, rng);
        comp = std::max(comp, rel(apply_operator(star_direct(sf, sg), psi), apply_operator(sf, apply_operator(sg, psi))));
        adj = std::max(adj, rel(inner(phi, apply_operator(involution(f), chi)), inner(apply_operator(f, phi), chi)));
        tr = std::max(tr, rel(trace_op(kernel_of(f)), trace(f)));
        hs = std::max(hs, rel(cplx((kernel_of(f).weighted().adjoint() * kernel_of(g).weighted()).trace()), inner(f, g)));
        const double nf = cstar_norm_estimate(f, seed + i);
        opn = std::max(opn, std::abs(nf - algebra_side_norm(f, seed + 100 + i)) / nf);
        cstar = std::max(cstar, std::abs(cstar_norm_estimate(star(involution(f), f), seed + i) - nf * nf) / (nf * nf));
      }
      r.le("(f g)^ = f^ g^", comp, 1e-7);
      r.le("(f*)^ = (f^)+", adj, 1e-7);
      r.le("Tr f^ = tr f", tr, 1e-7);
      r.le("Tr(f^+ g^) = (f, g)", hs, 1e-7);
      r.le("||f^|| = ||f||", opn, 1e-7);
      r.le("||f* f|| = ||f||^2", cstar, 1e-6);
      break;
    }
    case 6: {
      double e[5] = {0, 0, 0, 0, 0}, marg = 0;
      const int n = 256;
      for (int i = 0; i < 10; ++i) {
        const BetaContext c(1.0, 1.0, double(i % 5) / 4.0);
        const double tw = 0.37 * (i % 2);
        const auto v = orthonormal(c, n, tw, 4, rng);
        const Wavefunction phi = v[0], psi = v[1], ph = v[2], chi = v[3];
        // mix in a non-orthogonal pair as well
        const Wavefunction psi2 = std::sqrt(0.5) * (phi + psi);
        const AlgebraElement w = wigner(phi, psi2);
        e[0] = std::max(e[0], rel(involution(w), wigner(psi2, phi)));
        e[1] = std::max(e[1], std::abs(trace(w) - inner(phi, psi2)));
        e[2] = std::max(e[2], std::abs(inner(w, wigner(ph, chi)) - std::conj(inner(phi, ph)) * inner(psi2, chi)) +
                                  std::abs(inner(w, wigner(phi, psi)) - std::conj(inner(phi, phi)) * inner(psi2, psi)));
        const AlgebraElement lhs = star(w, wigner(ph, phi));
        e[3] = std::max(e[3], max_abs_diff(lhs.field.values, (inner(phi, phi) * wigner(ph, psi2)).field.values) /
                                  max_abs(wigner(ph, psi2).field.values));
        const AlgebraElement f = random_element(c, n, tw, rng);
        OperatorKernel kd = kernel_of(f);
        kd.values = kd.values.adjoint().eval();
        e[4] = std::max({e[4], rel(star(f, w), wigner(phi, apply_operator(f, psi2))),
                         rel(star(w, f), wigner(apply_kernel(kd, phi), psi2))});
        const auto m = marginal_momentum(wigner(chi, chi));
        for (int k = 0; k < n; ++k) marg = std::max(marg, std::abs(m[k] - std::norm(chi.values[k])) / max_abs(chi.values) / max_abs(chi.values));
      }
      r.le("(i) W(phi,psi)* = W(psi,phi)", e[0], 1e-8);
      r.le("(ii) integral of W = (phi,psi)", e[1], 1e-8);
      r.le("(iii) inner(W,W') = conj(phi,phi')(psi,chi)", e[2], 1e-8);
      r.le("(iv) W W' = (phi,chi) W(phi',psi)", e[3], 1e-8);
      r.le("(v) f W = W(phi, f^ psi), W f = W(f^+ phi, psi)", e[4], 1e-8);
      r.le("momentum marginal = |phi(p)|^2", marg, 1e-8);
      break;
    }
    case 7: {
      const int n = 256;
      double left = 0, right = 0, qhat = 0;
      for (double lam : {0.0, 0.5, 1.0})
        for (double xi : {0.0, 1.0, 2.0, 3.7}) {
          const BetaContext c(1.0, 1.0, lam);
          const double x = xi == 2.0 ? c.q_lattice_step() : xi;
          const PositionEigenvector pe = position_eigenvector(c, x, n);
          const auto q = SymbolObservable::q_power(1, n);
          const AlgebraElement want = cplx(x) * pe.rho;
          const double s = max_abs(pe.rho.field.values);
          left = std::max(left, max_abs_diff(star_symbol_left(q, pe.rho).field.values, want.field.values) / s);
          right = std::max(right, max_abs_diff(star_symbol_right(pe.rho, q).field.values, want.field.values) / s);
          qhat = std::max(qhat, max_abs_diff(qhat_apply(pe.psi).values, (cplx(x) * pe.psi).values) / max_abs(pe.psi.values));
        }
      r.le("q * rho_xi = xi rho_xi", left, 1e-9, "xi in {0, 1, 2 hbar sqrt(beta), 3.7}");
      r.le("rho_xi * q = xi rho_xi", right, 1e-9);
      r.le("q^ psi_xi = xi psi_xi", qhat, 1e-10);
      break;
    }
    case 8: {
      const double xi = 0.4;
      const std::vector<double> qs = cli::linspace(-10, 10, 41), ps = cli::linspace(-10, 10, 41);
      double err512 = 0, err2048 = 0;
      for (double lam : {0.5, 0.0}) {
        const BetaContext c(1.0, 1.0, lam);
        for (int n : {512, 2048}) {
          const MLPhaseState s = ml_phase_state(c, xi, n);
          const CVec grid = FieldEvaluator(s.rho.field, true).grid(qs, ps);
          double e = 0;
          for (std::size_t i = 0; i < qs.size(); ++i)
            for (std::size_t j = 0; j < ps.size(); ++j)
              e = std::max(e, std::abs(grid[i * ps.size() + j] - ml_phase_closed(c, xi, qs[i], ps[j])));
          (n == 512 ? err512 : err2048) = std::max(n == 512 ? err512 : err2048, e);
        }
      }
      r.le("Wigner vs closed form at n=512", err512, 1e-4, "41x41 window, lambda in {1/2, 0}");
      r.ge("error shrink 512 -> 2048", err512 / err2048, 3.0);
      const BetaContext c(1.0, 1.0, 0.5);
      const UncertaintyReport u = uncertainty(ml_wavefunction(c, xi, 512));
      r.le("<q> = xi", std::abs(u.mean_q - xi), 1e-8);
      r.le("<p> = 0", std::abs(u.mean_p), 1e-8);
      r.le("dq = hbar sqrt(beta)", std::abs(u.dq - c.min_dq()), 1e-6);
      r.le("GUP slack = 0", std::abs(u.gup_slack), 1e-6);
      r.le("value at origin is 1 + 2/pi", std::abs(ml_phase_closed(c, 0.0, 0.0, 0.0) - (1 + 2 / kPi)), 1e-10);
      break;
    }
    case 9: {
      const BetaContext c(1.0, 1.0, 0.5);
      double worst = 1e300;
      for (int i = 0; i < 100; ++i)
        worst = std::min(worst, uncertainty(oracle::random_state(c, 256, 1 + i % 6, 1, seed + i)).gup_slack);
      r.ge("min GUP slack over 100 random states", worst, -1e-9);
      break;
    }
    case 10: {
      std::vector<double> errs;
      const double slope = formal_slope(0.5, &errs);
      r.le("|slope - 3|", std::abs(slope - 3.0), 0.3,
           "errors " + format_double(errs[0]) + ", " + format_double(errs[1]) + ", " + format_double(errs[2]) +
               "; slope " + format_double(slope));
      break;
    }
    case 11: {
      namespace fs = std::filesystem;
      const fs::path dir = fs::temp_directory_path() / ("mlq_fig_" + std::to_string(seed));
      fs::create_directories(dir);
      cli::RunConfig cfg;
      cfg.out = dir.string();
      const auto grids = cli::cmd_mlstate(cfg, {});
      bool files = grids.size() == 2;
      for (const auto& g : grids) files = files && fs::exists(g.evaluator_csv) && fs::exists(g.wigner_csv);
      r.flag("lambda=1/2 and lambda=0 grids written", files);
      for (const auto& g : grids) {
        if (g.lambda == 0.5) {
          r.le("lambda=1/2 grid is real", std::max(g.max_imag_evaluator, g.max_imag_wigner), 1e-12);
          r.le("lambda=1/2 origin value is 1 + 2/pi", std::abs(g.origin_value - (1 + 2 / kPi)), 1e-10);
        } else {
          r.le("lambda=0 Im odd in p", std::max(g.odd_residual_evaluator, g.odd_residual_wigner), 1e-10);
          r.ge("lambda=0 Im nonzero", std::min(g.max_imag_evaluator, g.max_imag_wigner), 1e-3);
        }
      }
      fs::remove_all(dir);
      break;
    }
    default:
      throw std::invalid_argument("criterion id");
  }
  return r.take();
}

nlohmann::json to_json(const Check& c) {
  nlohmann::json j = {{"name", c.name},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"relation", c.relation},
                      {"pass", c.pass}};
  if (c.skipped) j["skipped"] = true;
  if (c.expected_fail) j["expected_fail"] = true;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

nlohmann::json to_json(const Suite& s) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : s.checks) checks.push_back(to_json(c));
  return {{"name", s.name}, {"pass", s.pass()}, {"checks", checks}};
}

}  // namespace mlq::verify
