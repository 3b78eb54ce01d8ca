#include "mlq/operator_rep.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mlq {

namespace {

// offset index and wrap count of a - b, with d in (-n/2, n/2]
struct Wrapped {
  int row;
  int eps;
};
Wrapped wrap_diff(const DiffGrid& tg, int diff) {
  const int row = tg.index_of(diff);
  return {row, (diff - (row - tg.n / 2 + 1)) / tg.n};
}

void check_same(const Wavefunction& a, const Wavefunction& b, const char* who) {
  if (a.n != b.n || !(a.ctx == b.ctx) || a.twist != b.twist)
    throw std::invalid_argument(std::string(who) + ": grid/context/twist mismatch");
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

OperatorKernel kernel_of(const AlgebraElement& f) {
  const int n = f.n();
  const CVec G = to_diag(f.field);
  const DiffGrid tg(n);
  OperatorKernel k{f.ctx(), n, f.twist(), CMatrix(n, n)};
  const double s = 1.0 / (2.0 * kPi * f.ctx().hbar);
  const cplx ph[3] = {std::polar(s, f.twist() * kPi), s, std::polar(s, -f.twist() * kPi)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Wrapped w = wrap_diff(tg, a - b);
      k.values(a, b) = ph[w.eps + 1] * G[std::size_t(w.row) * n + a];
    }
  return k;
}

AlgebraElement element_of(const OperatorKernel& k) {
  const int n = k.n;
  if (k.values.rows() != n || k.values.cols() != n) throw std::invalid_argument("element_of: shape");
  const DiffGrid tg(n);
  CVec G(std::size_t(n) * n);
  const double s = 2.0 * kPi * k.ctx.hbar;
  const cplx ph[3] = {std::polar(s, -k.twist * kPi), s, std::polar(s, k.twist * kPi)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Wrapped w = wrap_diff(tg, a - b);
      G[std::size_t(w.row) * n + a] = ph[w.eps + 1] * k.values(a, b);
    }
  return AlgebraElement(from_diag(k.ctx, n, k.twist, G));
}

Wavefunction apply_kernel(const OperatorKernel& k, const Wavefunction& psi) {
  if (psi.n != k.n || !(psi.ctx == k.ctx) || psi.twist != k.twist)
    throw std::invalid_argument("apply_kernel: grid/context/twist mismatch");
  Wavefunction out(psi.ctx, psi.n, psi.twist);
  const Eigen::Map<const Eigen::VectorXcd> v(psi.values.data(), psi.n);
  Eigen::Map<Eigen::VectorXcd>(out.values.data(), psi.n) = k.weighted() * v;
  return out;
}

Wavefunction apply_operator(const AlgebraElement& f, const Wavefunction& psi) {
  return apply_kernel(kernel_of(f), psi);
}

cplx trace_op(const OperatorKernel& k) { return k.weight() * k.values.trace(); }

double operator_norm(const OperatorKernel& k, std::uint64_t seed, double tol, int max_iter) {
  const CMatrix A = k.weighted();
  const int n = k.n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  v.normalize();
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXcd w = A.adjoint() * (A * v);
    const double mu = v.dot(w).real();
    if (mu <= 0.0) return 0.0;
    if ((w - mu * v).norm() <= tol * mu) return std::sqrt(mu);
    v = w / w.norm();
  }
  throw std::runtime_error("operator_norm: power iteration did not converge");
}

AlgebraElement wigner(const Wavefunction& phi, const Wavefunction& psi) {
  check_same(phi, psi, "wigner");
  const int n = psi.n;
  OperatorKernel k{psi.ctx, n, psi.twist, CMatrix(n, n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) k.values(a, b) = psi.values[a] * std::conj(phi.values[b]);
  return element_of(k);
}

CVec wigner_grid(const BetaContext& ctx, const std::function<cplx(double)>& phi_c,
                 const std::function<cplx(double)>& psi_c, const std::vector<double>& qs,
                 const std::vector<double>& ps, int nodes) {
  if (nodes < 2) throw std::invalid_argument("wigner_grid: nodes");
  const double lam = ctx.lambda;
  const double kappa = 1.0 / ctx.min_dq();
  const double h = kPi / nodes;
  CVec out(qs.size() * ps.size());
  CVec vals(nodes);
  std::vector<double> t(nodes);
  for (int k = 0; k < nodes; ++k) t[k] = -kPi / 2 + h * (k + 0.5);
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    const double a = principal_alpha(ctx, ps[ip]);
    for (int k = 0; k < nodes; ++k)
      vals[k] = std::conj(phi_c(a - (1.0 - lam) * t[k])) * psi_c(a + lam * t[k]) * (h / ctx.sqrt_beta());
    for (std::size_t iq = 0; iq < qs.size(); ++iq) {
      cplx s = 0.0;
      for (int k = 0; k < nodes; ++k) s += vals[k] * std::polar(1.0, qs[iq] * kappa * t[k]);
      out[iq * ps.size() + ip] = s;
    }
  }
  return out;
}

CVec wigner_grid(const Wavefunction& phi, const Wavefunction& psi, const std::vector<double>& qs,
                 const std::vector<double>& ps, int nodes) {
  check_same(phi, psi, "wigner_grid");
  const TrigInterp ia = phi.interpolant(), ib = psi.interpolant();
  return wigner_grid(
      psi.ctx, [&](double x) { return phi.eval(ia, x); }, [&](double x) { return psi.eval(ib, x); }, qs,
      ps, nodes);
}

cplx wigner_at(const Wavefunction& phi, const Wavefunction& psi, double q, double p, int nodes) {
  return wigner_grid(phi, psi, {q}, {p}, nodes)[0];
}

std::vector<double> marginal_momentum(const AlgebraElement& rho_pure) {
  const int n = rho_pure.n();
  const cplx* r = rho_pure.field.row(DiffGrid(n).zero_index());
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = r[k].real() / (2.0 * kPi * rho_pure.ctx().hbar);
  return out;
}

Wavefunction qhat_apply(const Wavefunction& psi) {
  Wavefunction out = psi;
  twisted_derivative(out.values.data(), psi.n, AngleGrid(psi.n).node(0), psi.twist, 1);
  out *= cplx(0.0, psi.ctx.min_dq());
  return out;
}

Wavefunction phat_apply(const Wavefunction& psi) {
  Wavefunction out = psi;
  const AngleGrid g(psi.n);
  for (int j = 0; j < psi.n; ++j) out.values[j] *= std::tan(g.node(j)) / psi.ctx.sqrt_beta();
  return out;
}

std::function<Wavefunction(const Wavefunction&)> lambda_ordered_operator(const BetaContext& ctx,
                                                                         const SymbolObservable& sym) {
  return [ctx, sym](const Wavefunction& psi) {
    if (int(sym.phi.size()) != psi.n) throw std::invalid_argument("lambda_ordered_operator: grid");
    const int m = sym.power;
    Wavefunction acc(psi.ctx, psi.n, psi.twist);
    for (int l = 0; l <= m; ++l) {
      const double c = binom(m, l) * std::pow(ctx.lambda, l) * std::pow(1.0 - ctx.lambda, m - l);
      if (c == 0.0) continue;
      Wavefunction x = psi;
      for (int r = 0; r < m - l; ++r) x = qhat_apply(x);
      for (int j = 0; j < psi.n; ++j) x.values[j] *= sym.phi[j];
      for (int r = 0; r < l; ++r) x = qhat_apply(x);
      acc += c * x;
    }
    return acc;
  };
}

AlgebraElement DensityState::rho() const {
  if (mixture.empty()) throw std::invalid_argument("DensityState: empty mixture");
  double total = 0.0;
  AlgebraElement out;
  for (const auto& [w, psi] : mixture) {
    if (w < 0.0) throw std::invalid_argument("DensityState: negative weight");
    if (std::abs(norm(psi) - 1.0) > 1e-8) throw std::invalid_argument("DensityState: unnormalized vector");
    total += w;
    AlgebraElement term = cplx(w) * wigner(psi, psi);
    if (out.n() == 0)
      out = std::move(term);
    else
      out += term;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("DensityState: weights must sum to 1");
  return out;
}

StateReport state_check(const AlgebraElement& rho) {
  const OperatorKernel k = kernel_of(rho);
  const CMatrix A = k.weighted();
  const double an = A.norm();
  StateReport r;
  r.hermiticity_residual = an == 0.0 ? 0.0 : (A - A.adjoint()).norm() / an;
  r.hermitian = r.hermiticity_residual < 1e-9;
  r.trace = trace(rho);
  const CMatrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  r.min_eig = es.eigenvalues().minCoeff();
  r.pass = r.hermitian && std::abs(r.trace - 1.0) < 1e-9 && r.min_eig >= -1e-9;
  return r;
}

UncertaintyReport uncertainty(const Wavefunction& psi) {
  if (std::abs(norm(psi) - 1.0) > 1e-8) throw std::invalid_argument("uncertainty: unnormalized vector");
  const Wavefunction qp = qhat_apply(psi), pp = phat_apply(psi);
  UncertaintyReport r;
  r.mean_q = inner(psi, qp).real();
  r.mean_p = inner(psi, pp).real();
  const double q2 = inner(qp, qp).real(), p2 = inner(pp, pp).real();
  r.dq = std::sqrt(std::max(0.0, q2 - r.mean_q * r.mean_q));
  r.dp = std::sqrt(std::max(0.0, p2 - r.mean_p * r.mean_p));
  const double b = psi.ctx.beta;
  r.gup_slack = r.dq * r.dp - 0.5 * psi.ctx.hbar * (1.0 + b * r.dp * r.dp + b * r.mean_p * r.mean_p);
  return r;
}

}  // namespace mlq
