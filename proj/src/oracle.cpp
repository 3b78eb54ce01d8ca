#include "mlq/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "mlq/operator_rep.hpp"

namespace mlq::oracle {

namespace {

cplx normal_cplx(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const double a = nd(rng);
  return {a, nd(rng)};
}

template <class F>
cplx integrate(F f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).real(); }, a, b, 12, 1e-14);
  const double im = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).imag(); }, a, b, 12, 1e-14);
  return {re, im};
}

}  // namespace

TorusField random_band_limited(const BetaContext& ctx, int n, int modes, std::uint64_t seed) {
  if (2 * modes >= n) throw std::invalid_argument("random_band_limited: too many modes");
  std::mt19937_64 rng(seed);
  const int m = 2 * modes + 1;
  CVec c(std::size_t(m) * m);
  for (auto& x : c) x = normal_cplx(rng) / double(m);
  return TorusField::from_function(ctx, n, [&](double t, double a) {
    cplx s = 0.0;
    for (int l = -modes; l <= modes; ++l)
      for (int k = -modes; k <= modes; ++k)
        s += c[std::size_t(l + modes) * m + (k + modes)] * std::polar(1.0, 2.0 * (l * t + k * a));
    return s;
  });
}

AlgebraElement random_kernel_element(const BetaContext& ctx, int n, int modes, double sigma,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = 2 * modes + 1;
  CVec c(std::size_t(m) * m);
  for (auto& x : c) x = normal_cplx(rng) / double(m);
  const AngleGrid ag(n);
  OperatorKernel k{ctx, n, 0.0, CMatrix(n, n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cplx s = 0.0;
      for (int i = -modes; i <= modes; ++i)
        for (int j = -modes; j <= modes; ++j)
          s += c[std::size_t(i + modes) * m + (j + modes)] * std::polar(1.0, 2.0 * (i * ag.node(a) - j * ag.node(b)));
      if (sigma > 0.0) {
        const double w = DiffGrid(n).node(DiffGrid(n).index_of(a - b));
        s *= std::exp(-w * w / (2 * sigma * sigma));
      }
      k.values(a, b) = s;
    }
  return element_of(k);
}

Wavefunction random_state(const BetaContext& ctx, int n, int modes, int power, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CVec c(2 * modes + 1);
  for (auto& x : c) x = normal_cplx(rng);
  Wavefunction psi = Wavefunction::from_function(ctx, n, [&](double a) {
    cplx s = 0.0;
    for (int k = -modes; k <= modes; ++k) s += c[k + modes] * std::polar(1.0, 2.0 * k * a);
    return std::pow(1.0 + std::polar(1.0, 2.0 * a), power) * s;
  });
  psi *= 1.0 / norm(psi);
  return psi;
}

cplx star_double_integral(const TorusField& f, const TorusField& g, double q, const ExtReal& p) {
  if (!f.compatible(g)) throw std::invalid_argument("star_double_integral: incompatible fields");
  const BetaContext& c = f.ctx;
  const int n = f.n;
  const double lam = c.lambda;
  const DiffGrid tg(n);
  const AngleGrid ag(n);
  std::vector<TrigInterp> fr, gr;
  for (int j = 0; j < n; ++j) {
    fr.emplace_back(f.row(j), n, ag.node(0));
    gr.emplace_back(g.row(j), n, ag.node(0));
  }
  auto momentum = [&](double t) { return momentum_of(c, Angle(t)); };
  const double kappa = 1.0 / c.min_dq();
  cplx sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = tg.node(i);
    const ExtReal p1 = momentum(s);
    const ExtReal a2 = ominus(c, p, circ(c, 1.0 - lam, p1));
    for (int j = 0; j < n; ++j) {
      const double r = tg.node(j);
      const ExtReal p2 = momentum(r);
      const ExtReal a1 = oplus(c, p, circ(c, lam, p2));
      // p' + p'' = infinity sits on the p' = pi/2 row of the grid
      double w = principal_alpha(c, oplus(c, p1, p2));
      if (w < -kPi / 2 + 1e-9) w = kPi / 2;  // rounding lands the same point on -pi/2
      const double eps = std::round((s + r - w) / kPi);
      const double shift = -lam * kPi * eps;
      sum += fr[i](angle_of(c, a1).alpha + shift) * gr[j](angle_of(c, a2).alpha + shift) *
             std::polar(1.0, q * kappa * w);
    }
  }
  const double h = kPi / n;
  return sum * (h * h / c.beta) / std::pow(2 * kPi * c.hbar, 2);
}

cplx fourier_direct(const TorusField& f, double q_prime, const ExtReal& p_prime) {
  const BetaContext& c = f.ctx;
  const int n = f.n;
  const double t_prime = angle_of(c, p_prime).alpha;
  // f~(p', p) rebuilt from lattice samples f(q_m, p)
  const FieldEvaluator ev(f);
  const double step = c.q_lattice_step();
  const double kappa = 1.0 / c.min_dq();
  auto ftilde = [&](double a) {
    cplx s = 0.0;
    const ExtReal p = momentum_of(c, Angle(a));
    for (int m = -n / 2; m < n / 2; ++m) s += ev(step * m, p) * std::polar(step, -2.0 * m * t_prime);
    return s;
  };
  const cplx v = integrate([&](double a) { return ftilde(a) * std::polar(1.0, q_prime * kappa * a); },
                           -kPi / 2, kPi / 2);
  return v / (c.sqrt_beta() * 2 * kPi * c.hbar);
}

cplx ml_phase_integral(const BetaContext& ctx, double xi, double q, const ExtReal& p) {
  const double a = principal_alpha(ctx, p);
  const double c2 = std::cos(2 * a), s2 = std::sin(2 * a);
  const double l = ctx.lambda;
  const double k = (q - xi) / ctx.min_dq();
  const cplx v = integrate(
      [&](double x) {
        return (c2 * std::cos((1 - 2 * l) * x) + std::cos(x) + s2 * std::sin((1 - 2 * l) * x)) *
               std::polar(1.0, k * x);
      },
      -kPi / 2, kPi / 2);
  return v / kPi;
}

}  // namespace mlq::oracle
