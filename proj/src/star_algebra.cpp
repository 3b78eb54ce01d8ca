#include "mlq/star_algebra.hpp"

#include <cmath>
#include <stdexcept>

#include "mlq/operator_rep.hpp"

namespace mlq {

namespace {

void require_compatible(const AlgebraElement& f, const AlgebraElement& g, const char* who) {
  if (!f.field.compatible(g.field)) throw std::invalid_argument(std::string(who) + ": incompatible operands");
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void rows_da(CVec& G, int n) {
  for (int j = 0; j < n; ++j) derivative_samples(G.data() + std::size_t(j) * n, n, 1);
}

// Left and right actions of q and phi(p) on the diagonal frame.
struct DiagOps {
  int n;
  double twist;
  cplx iq;  // i hbar sqrt(beta)

  void q_left(CVec& G) const {
    CVec da = G;
    rows_da(da, n);
    diag_dt(G, n, twist, 1);
    for (std::size_t i = 0; i < G.size(); ++i) G[i] = iq * (G[i] + da[i]);
  }
  void q_right(CVec& G) const {
    diag_dt(G, n, twist, 1);
    for (auto& x : G) x *= iq;
  }
  void phi_left(CVec& G, const CVec& phi) const {
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a) G[std::size_t(j) * n + a] *= phi[a];
  }
  void phi_right(CVec& G, const CVec& phi) const {
    for (int j = 0; j < n; ++j) {
      const int d = j - n / 2 + 1;
      for (int a = 0; a < n; ++a) G[std::size_t(j) * n + a] *= phi[((a - d) % n + n) % n];
    }
  }
};

void check_symbol(const SymbolObservable& sym, int n) {
  if (int(sym.phi.size()) != n) throw std::invalid_argument("symbol: grid mismatch");
  if (sym.power < 0) throw std::invalid_argument("symbol: negative power");
}

}  // namespace

SymbolObservable SymbolObservable::q_power(int power, int n) {
  return {power, CVec(std::size_t(n), 1.0)};
}

SymbolObservable SymbolObservable::from_function(int power, int n,
                                                 const std::function<cplx(double)>& phi_of_alpha) {
  const AngleGrid g(n);
  SymbolObservable s{power, CVec(std::size_t(n))};
  for (int k = 0; k < n; ++k) s.phi[k] = phi_of_alpha(g.node(k));
  return s;
}

AlgebraElement star(const AlgebraElement& f, const AlgebraElement& g) {
  require_compatible(f, g, "star");
  OperatorKernel kf = kernel_of(f);
  const OperatorKernel kg = kernel_of(g);
  kf.values = kf.weight() * (kf.values * kg.values);
  return element_of(kf);
}

AlgebraElement star_direct(const AlgebraElement& f, const AlgebraElement& g) {
  require_compatible(f, g, "star_direct");
  const int n = f.n();
  const BetaContext& c = f.ctx();
  const double lam = c.lambda, tau = f.twist();
  const DiffGrid tg(n);

  auto coeffs = [n](const TorusField& x) {
    CVec C = x.values;
    for (int j = 0; j < n; ++j) {
      cplx* r = C.data() + std::size_t(j) * n;
      fft::forward(r, n);
      for (int k = 0; k < n; ++k) r[k] /= double(n);
    }
    return C;
  };
  const CVec Cf = coeffs(f.field), Cg = coeffs(g.field);
  auto shifted = [n](const CVec& C, int row, double delta, CVec& out) {
    for (int i = 0; i < n; ++i)
      out[i] = C[std::size_t(row) * n + i] * std::polar(1.0, 2.0 * fft::mode(i, n) * delta);
    fft::inverse(out.data(), n);
  };

  TorusField h(c, n, tau);
  const double w = (kPi / n) / (2.0 * kPi * c.hbar * c.sqrt_beta());
  CVec a(n), b(n);
  for (int j = 0; j < n; ++j) {
    const int dj = j - n / 2 + 1;
    cplx* out = h.row(j);
    for (int i = 0; i < n; ++i) {
      const int di = i - n / 2 + 1;
      const int du = dj - di;
      const int jp = tg.index_of(du);
      const int eps = (du - (jp - n / 2 + 1)) / n;
      const double u = kPi * du / n;
      shifted(Cf, i, lam * u, a);
      shifted(Cg, jp, -(1.0 - lam) * tg.node(i) + lam * kPi * eps, b);
      const cplx ph = std::polar(w, -tau * kPi * eps);
      for (int k = 0; k < n; ++k) out[k] += ph * a[k] * b[k];
    }
  }
  return AlgebraElement(std::move(h));
}

AlgebraElement involution(const AlgebraElement& f) {
  const int n = f.n();
  const CVec G = to_diag(f.field);
  CVec S(G.size());
  const DiffGrid tg(n);
  const cplx seam = std::polar(1.0, -f.twist() * kPi);
  for (int j = 0; j < n; ++j) {
    const int d = j - n / 2 + 1;
    const bool is_seam = 2 * d == n;
    const int jn = is_seam ? j : tg.index_of(-d);
    for (int a = 0; a < n; ++a) {
      // G*(t, a) = conj G(-t, a - t)
      const int src = ((a - d) % n + n) % n;
      cplx v = std::conj(G[std::size_t(jn) * n + src]);
      if (is_seam) v *= seam;
      S[std::size_t(j) * n + a] = v;
    }
  }
  return AlgebraElement(from_diag(f.ctx(), n, f.twist(), S));
}

AlgebraElement s_operator(const AlgebraElement& f) {
  const BetaContext c = f.ctx().with_lambda(1.0 - f.ctx().lambda);
  return AlgebraElement(from_diag(c, f.n(), f.twist(), to_diag(f.field)));
}

cplx trace(const AlgebraElement& f) {
  const int n = f.n();
  const cplx* r = f.field.row(DiffGrid(n).zero_index());
  cplx s = 0.0;
  for (int k = 0; k < n; ++k) s += r[k];
  return s * (kPi / n) / (2.0 * kPi * f.ctx().hbar * f.ctx().sqrt_beta());
}

cplx inner(const AlgebraElement& f, const AlgebraElement& g) {
  require_compatible(f, g, "inner");
  const int n = f.n();
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.field.values.size(); ++i) s += std::conj(f.field.values[i]) * g.field.values[i];
  const double h = kPi / n;
  const double pre = 1.0 / (4.0 * kPi * kPi * f.ctx().hbar * f.ctx().hbar * f.ctx().beta);
  return pre * h * h * s;
}

double norm2(const AlgebraElement& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

double cstar_norm_estimate(const AlgebraElement& f, std::uint64_t seed, double tol, int max_iter) {
  return operator_norm(kernel_of(f), seed, tol, max_iter);
}

AlgebraElement star_symbol_left(const SymbolObservable& sym, const AlgebraElement& g) {
  const int n = g.n();
  check_symbol(sym, n);
  const double lam = g.ctx().lambda;
  const DiagOps ops{n, g.twist(), cplx(0.0, g.ctx().min_dq())};
  const CVec G = to_diag(g.field);
  CVec acc(G.size(), 0.0);
  const int m = sym.power;
  for (int l = 0; l <= m; ++l) {
    const double c = binom(m, l) * std::pow(lam, l) * std::pow(1.0 - lam, m - l);
    if (c == 0.0) continue;
    CVec X = G;
    for (int r = 0; r < m - l; ++r) ops.q_left(X);
    ops.phi_left(X, sym.phi);
    for (int r = 0; r < l; ++r) ops.q_left(X);
    for (std::size_t i = 0; i < X.size(); ++i) acc[i] += c * X[i];
  }
  return AlgebraElement(from_diag(g.ctx(), n, g.twist(), acc));
}

AlgebraElement star_symbol_right(const AlgebraElement& g, const SymbolObservable& sym) {
  const int n = g.n();
  check_symbol(sym, n);
  const double lam = g.ctx().lambda;
  const DiagOps ops{n, g.twist(), cplx(0.0, g.ctx().min_dq())};
  const CVec G = to_diag(g.field);
  CVec acc(G.size(), 0.0);
  const int m = sym.power;
  for (int l = 0; l <= m; ++l) {
    const double c = binom(m, l) * std::pow(lam, l) * std::pow(1.0 - lam, m - l);
    if (c == 0.0) continue;
    CVec X = G;
    for (int r = 0; r < l; ++r) ops.q_right(X);
    ops.phi_right(X, sym.phi);
    for (int r = 0; r < m - l; ++r) ops.q_right(X);
    for (std::size_t i = 0; i < X.size(); ++i) acc[i] += c * X[i];
  }
  return AlgebraElement(from_diag(g.ctx(), n, g.twist(), acc));
}

cplx expectation(const SymbolObservable& sym, const AlgebraElement& rho) {
  return trace(star_symbol_left(sym, rho));
}

cplx expectation(const AlgebraElement& f, const AlgebraElement& rho) { return trace(star(f, rho)); }

}  // namespace mlq
