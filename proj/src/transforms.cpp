#include "mlq/transforms.hpp"

#include <stdexcept>

namespace mlq {

namespace {

void require_plain(const TorusField& f, const char* who) {
  if (f.twist != 0.0) throw std::invalid_argument(std::string(who) + ": needs an untwisted field");
}

void require_pair(const TorusField& f, const TorusField& g, const char* who) {
  if (!f.compatible(g)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
  require_plain(f, who);
  require_plain(g, who);
}

// out[k] = sum_i x[i] y[(k - i) mod n]
void circular_conv(CVec x, CVec y, cplx* out, int n) {
  fft::forward(x.data(), n);
  fft::forward(y.data(), n);
  for (int i = 0; i < n; ++i) x[i] *= y[i] / double(n);
  fft::inverse(x.data(), n);
  std::copy(x.begin(), x.end(), out);
}

// DiffGrid-ordered samples re-indexed by offset d mod n
CVec by_offset(const cplx* v, int n) {
  CVec out(n);
  for (int j = 0; j < n; ++j) {
    const int d = j - n / 2 + 1;
    out[((d % n) + n) % n] = v[j];
  }
  return out;
}

}  // namespace

SymplecticPair SymplecticPair::fourier() const { return {symplectic_fourier(field), !transformed}; }

TorusField symplectic_fourier(const TorusField& f) {
  const int n = f.n;
  const double half = kPi / (2.0 * n);
  // A(k, j) = f~(alpha_k, t_j): columns to half-offset nodes, rows to integer nodes
  const TorusField A = shift_field(f, half, -half);
  TorusField out(f.ctx, n, f.twist);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) out.at(j, k) = A.at(k, j);
  return out;
}

TorusField pointwise_product(const TorusField& f, const TorusField& g) {
  require_pair(f, g, "pointwise_product");
  const int n = f.n;
  const double w = (kPi / n) / (2.0 * kPi * f.ctx.hbar * f.ctx.sqrt_beta());
  TorusField out(f.ctx, n);
  CVec a(n), b(n), c(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      a[j] = f.at(j, k);
      b[j] = g.at(j, k);
    }
    circular_conv(by_offset(a.data(), n), by_offset(b.data(), n), c.data(), n);
    for (int j = 0; j < n; ++j) {
      const int d = j - n / 2 + 1;
      out.at(j, k) = w * c[((d % n) + n) % n];
    }
  }
  return out;
}

TorusField conv_generalized(const TorusField& f, const TorusField& g) {
  require_pair(f, g, "conv_generalized");
  const int n = f.n;
  const double w = (kPi / n) / f.ctx.sqrt_beta();
  // g~ at integer offsets alpha = pi d / n
  const TorusField gi = shift_field(g, kPi / (2.0 * n), 0.0);
  TorusField out(f.ctx, n);
  for (int j = 0; j < n; ++j) {
    circular_conv(CVec(f.row(j), f.row(j) + n), by_offset(gi.row(j), n), out.row(j), n);
    for (int k = 0; k < n; ++k) out.at(j, k) *= w;
  }
  return out;
}

TorusField twisted_conv(const TorusField& f, const TorusField& g) {
  require_pair(f, g, "twisted_conv");
  const int n = f.n;
  const double lam = f.ctx.lambda, h = kPi / n;
  const AngleGrid ag(n);
  const TorusField gi = shift_field(g, h / 2.0, 0.0);
  // offset d in [-n/2, n/2), the canonical branch of alpha - alpha'
  std::vector<TorusField> fs(n), gs(n);
  for (int d = -n / 2; d < n / 2; ++d) fs[d + n / 2] = shift_field(f, 0.0, lam * d * h);
  for (int i = 0; i < n; ++i) gs[i] = shift_field(gi, 0.0, -(1.0 - lam) * ag.node(i));
  TorusField out(f.ctx, n);
  const double w = h / f.ctx.sqrt_beta();
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      cplx s = 0.0;
      for (int i = 0; i < n; ++i) {
        int d = k - i;
        if (d >= n / 2) d -= n;
        if (d < -n / 2) d += n;
        const int gcol = d + n / 2 - 1 < 0 ? d + n / 2 - 1 + n : d + n / 2 - 1;
        s += fs[d + n / 2].at(j, i) * gs[i].at(j, gcol);
      }
      out.at(j, k) = w * s;
    }
  return out;
}

TorusField mult_by_q(const TorusField& f) {
  const int n = f.n;
  TorusField out = f;
  CVec col(n);
  const double t0 = DiffGrid(n).node(0);
  const cplx c(0.0, f.ctx.min_dq());
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) col[j] = out.at(j, k);
    twisted_derivative(col.data(), n, t0, f.twist, 1);
    for (int j = 0; j < n; ++j) out.at(j, k) = c * col[j];
  }
  return out;
}

TorusField mult_by_atan_p(const TorusField& f) {
  TorusField out = f;
  const AngleGrid ag(f.n);
  for (int j = 0; j < f.n; ++j)
    for (int k = 0; k < f.n; ++k) out.at(j, k) *= ag.node(k) / f.ctx.sqrt_beta();
  return out;
}

TorusField d_q(const TorusField& f) {
  TorusField out = f;
  const DiffGrid tg(f.n);
  const double kappa = 1.0 / f.ctx.min_dq();
  for (int j = 0; j < f.n; ++j)
    for (int k = 0; k < f.n; ++k) out.at(j, k) *= cplx(0.0, kappa * tg.node(j));
  return out;
}

TorusField d_p(const TorusField& f) {
  TorusField out = f;
  for (int j = 0; j < f.n; ++j) {
    derivative_samples(out.row(j), f.n, 1);
    for (int k = 0; k < f.n; ++k) out.at(j, k) *= f.ctx.sqrt_beta();
  }
  return out;
}

}  // namespace mlq
