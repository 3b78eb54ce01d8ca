#include "mlq/sampling.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mlq {

void twisted_derivative(cplx* v, int n, double x0, double tau, int order) {
  if (order == 0) return;
  const double h = kPi / n;
  for (int j = 0; j < n; ++j) v[j] *= std::polar(1.0, tau * (x0 + j * h));
  fft::forward(v, n);
  for (int i = 0; i < n; ++i) {
    const int k = fft::mode(i, n);
    if (tau == 0.0 && k == -n / 2 && order % 2 == 1) {
      v[i] = 0.0;
      continue;
    }
    v[i] *= std::pow(cplx(0.0, 2.0 * k - tau), order) / double(n);
  }
  fft::inverse(v, n);
  for (int j = 0; j < n; ++j) v[j] *= std::polar(1.0, -tau * (x0 + j * h));
}

AngleGrid::AngleGrid(int n_) : n(n_) {
  if (n <= 0 || n % 2) throw std::invalid_argument("grid size must be even and positive");
}

DiffGrid::DiffGrid(int n_) : n(n_) {
  if (n <= 0 || n % 2) throw std::invalid_argument("grid size must be even and positive");
}

int DiffGrid::index_of(int d) const {
  d %= n;
  if (d > n / 2) d -= n;
  if (d <= -n / 2) d += n;
  return d + n / 2 - 1;
}

// ---- Wavefunction

Wavefunction::Wavefunction(const BetaContext& c, int n_, double tw)
    : ctx(c), n(n_), twist(tw), values(std::size_t(n_)) {
  AngleGrid check(n_);
}

Wavefunction Wavefunction::from_function(const BetaContext& c, int n_,
                                         const std::function<cplx(double)>& f, double tw) {
  Wavefunction w(c, n_, tw);
  const AngleGrid g(n_);
  for (int j = 0; j < n_; ++j) w.values[j] = f(g.node(j));
  return w;
}

CVec Wavefunction::periodic_part() const {
  CVec p(values);
  const AngleGrid g(n);
  if (twist != 0.0)
    for (int j = 0; j < n; ++j) p[j] *= std::polar(1.0, twist * g.node(j));
  return p;
}

TrigInterp Wavefunction::interpolant() const {
  CVec p = periodic_part();
  return TrigInterp(p.data(), n, AngleGrid(n).node(0));
}

cplx Wavefunction::eval(const TrigInterp& ip, double alpha) const {
  return std::polar(1.0, -twist * alpha) * ip(alpha);
}

static void check_same(const Wavefunction& a, const Wavefunction& b) {
  if (a.n != b.n || !(a.ctx == b.ctx) || a.twist != b.twist)
    throw std::invalid_argument("wavefunction grid/context/twist mismatch");
}

Wavefunction& Wavefunction::operator+=(const Wavefunction& o) {
  check_same(*this, o);
  for (int j = 0; j < n; ++j) values[j] += o.values[j];
  return *this;
}
Wavefunction& Wavefunction::operator-=(const Wavefunction& o) {
  check_same(*this, o);
  for (int j = 0; j < n; ++j) values[j] -= o.values[j];
  return *this;
}
Wavefunction& Wavefunction::operator*=(cplx s) {
  for (auto& v : values) v *= s;
  return *this;
}
Wavefunction operator+(Wavefunction a, const Wavefunction& b) { return a += b; }
Wavefunction operator-(Wavefunction a, const Wavefunction& b) { return a -= b; }
Wavefunction operator*(cplx s, Wavefunction a) { return a *= s; }

// ---- TorusField

TorusField::TorusField(const BetaContext& c, int n_, double tw)
    : ctx(c), n(n_), twist(tw), values(std::size_t(n_) * n_) {
  AngleGrid check(n_);
}

TorusField TorusField::from_function(const BetaContext& c, int n_,
                                     const std::function<cplx(double, double)>& f, double tw) {
  TorusField F(c, n_, tw);
  const DiffGrid tg(n_);
  const AngleGrid ag(n_);
  for (int j = 0; j < n_; ++j)
    for (int k = 0; k < n_; ++k) F.at(j, k) = f(tg.node(j), ag.node(k));
  return F;
}

bool TorusField::compatible(const TorusField& o) const {
  return n == o.n && ctx == o.ctx && twist == o.twist;
}

TorusField& TorusField::operator+=(const TorusField& o) {
  if (!compatible(o)) throw std::invalid_argument("torus field mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}
TorusField& TorusField::operator-=(const TorusField& o) {
  if (!compatible(o)) throw std::invalid_argument("torus field mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}
TorusField& TorusField::operator*=(cplx s) {
  for (auto& v : values) v *= s;
  return *this;
}
TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
TorusField operator*(cplx s, TorusField a) { return a *= s; }

LatticeField::LatticeField(const BetaContext& c, int n_, int M_)
    : ctx(c), n(n_), M(M_), values(std::size_t(2 * M_ + 1) * n_) {}

// ---- norms

double max_abs(const CVec& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2(const CVec& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double max_abs_diff(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_diff(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

cplx quad_mu(const BetaContext& ctx, const AngleGrid& grid, const CVec& samples) {
  if (int(samples.size()) != grid.n) throw std::invalid_argument("quad_mu: length mismatch");
  cplx s = 0.0;
  for (const auto& x : samples) s += x;
  return s * (grid.spacing() / ctx.sqrt_beta());
}

cplx inner(const Wavefunction& phi, const Wavefunction& psi) {
  check_same(phi, psi);
  CVec prod(phi.n);
  for (int j = 0; j < phi.n; ++j) prod[j] = std::conj(phi.values[j]) * psi.values[j];
  return quad_mu(phi.ctx, phi.grid(), prod);
}

double norm(const Wavefunction& psi) { return std::sqrt(inner(psi, psi).real()); }

// ---- shifts

TorusField shift_field(const TorusField& f, const std::vector<double>& row_shift, double d_prime) {
  if (int(row_shift.size()) != f.n) throw std::invalid_argument("shift_field: row count");
  TorusField out = f;
  const int n = f.n;
  if (d_prime != 0.0) {
    CVec col(n);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) col[j] = out.at(j, k);
      shift_samples(col.data(), n, d_prime);
      for (int j = 0; j < n; ++j) out.at(j, k) = col[j];
    }
  }
  for (int j = 0; j < n; ++j) shift_samples(out.row(j), n, row_shift[j]);
  return out;
}

TorusField shift_field(const TorusField& f, double d_alpha, double d_prime) {
  return shift_field(f, std::vector<double>(f.n, d_alpha), d_prime);
}

// ---- transforms in q

CVec synth_on_grid(const TorusField& f, double q) {
  const int n = f.n;
  const DiffGrid tg(n);
  const double kappa = 1.0 / f.ctx.min_dq();
  const double pre = (kPi / n) / (2.0 * kPi * f.ctx.hbar * f.ctx.sqrt_beta());
  CVec out(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const cplx e = std::polar(pre, q * kappa * tg.node(j));
    const cplx* r = f.row(j);
    for (int k = 0; k < n; ++k) out[k] += e * r[k];
  }
  return out;
}

FieldEvaluator::FieldEvaluator(const TorusField& f, bool split_seam)
    : ctx_(f.ctx), n_(f.n), twist_(f.twist), split_(split_seam) {
  const AngleGrid ag(n_);
  rows_.reserve(n_);
  for (int j = 0; j < n_; ++j) rows_.emplace_back(f.row(j), n_, ag.node(0));
}

CVec FieldEvaluator::column(const ExtReal& p) const {
  const double a = angle_of(ctx_, p).alpha;
  CVec c(n_);
  for (int j = 0; j < n_; ++j) c[j] = rows_[j](a);
  if (split_) c.push_back(std::polar(1.0, twist_ * kPi) * rows_[n_ - 1](a - ctx_.lambda * kPi));
  return c;
}

cplx FieldEvaluator::sum(const CVec& col, double q) const {
  const DiffGrid tg(n_);
  const double kappa = 1.0 / ctx_.min_dq();
  const double pre = (kPi / n_) / (2.0 * kPi * ctx_.hbar * ctx_.sqrt_beta());
  cplx s = 0.0;
  for (int j = 0; j < n_; ++j) {
    const double w = split_ && j == n_ - 1 ? 0.5 : 1.0;
    s += w * col[j] * std::polar(1.0, q * kappa * tg.node(j));
  }
  if (split_) s += 0.5 * col[n_] * std::polar(1.0, -q * kappa * kPi / 2);
  return pre * s;
}

cplx FieldEvaluator::operator()(double q, const ExtReal& p) const { return sum(column(p), q); }

CVec FieldEvaluator::grid(const std::vector<double>& qs, const std::vector<double>& ps) const {
  CVec out(qs.size() * ps.size());
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    const CVec col = column(ps[ip]);
    for (std::size_t iq = 0; iq < qs.size(); ++iq) out[iq * ps.size() + ip] = sum(col, qs[iq]);
  }
  return out;
}

cplx synth(const TorusField& f, double q, const ExtReal& p) { return FieldEvaluator(f)(q, p); }

LatticeField lattice_of(const TorusField& f, int M) {
  LatticeField lat(f.ctx, f.n, M);
  for (int m = -M; m <= M; ++m) {
    CVec row = synth_on_grid(f, lat.q(m));
    for (int k = 0; k < f.n; ++k) lat.at(m, k) = row[k];
  }
  return lat;
}

TorusField analyze(const LatticeField& lat) {
  const int n = lat.n;
  TorusField F(lat.ctx, n);
  const DiffGrid tg(n);
  const double pre = lat.ctx.q_lattice_step();
  for (int j = 0; j < n; ++j) {
    for (int m = -lat.M; m <= lat.M; ++m) {
      const cplx e = std::polar(pre, -2.0 * m * tg.node(j));
      for (int k = 0; k < n; ++k) F.at(j, k) += e * lat.at(m, k);
    }
  }
  return F;
}

CVec to_diag(const TorusField& f) {
  const int n = f.n;
  const DiffGrid tg(n);
  CVec G = f.values;
  for (int j = 0; j < n; ++j)
    shift_samples(G.data() + std::size_t(j) * n, n, -f.ctx.lambda * tg.node(j));
  return G;
}

TorusField from_diag(const BetaContext& ctx, int n, double twist, const CVec& G) {
  if (G.size() != std::size_t(n) * n) throw std::invalid_argument("from_diag: size");
  TorusField f(ctx, n, twist);
  f.values = G;
  const DiffGrid tg(n);
  for (int j = 0; j < n; ++j) shift_samples(f.row(j), n, ctx.lambda * tg.node(j));
  return f;
}

void diag_dt(CVec& G, int n, double twist, int order) {
  if (order == 0) return;
  CVec col(n);
  const double t0 = DiffGrid(n).node(0);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) col[j] = G[std::size_t(j) * n + k];
    twisted_derivative(col.data(), n, t0, twist, order);
    for (int j = 0; j < n; ++j) G[std::size_t(j) * n + k] = col[j];
  }
}

double seminorm(const TorusField& f, int a, int b) {
  const int n = f.n;
  TorusField g = f;
  CVec col(n);
  const double t0 = DiffGrid(n).node(0);
  if (a > 0)
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) col[j] = g.at(j, k);
      twisted_derivative(col.data(), n, t0, f.twist, a);
      for (int j = 0; j < n; ++j) g.at(j, k) = col[j];
    }
  if (b > 0)
    for (int j = 0; j < n; ++j) derivative_samples(g.row(j), n, b);
  return std::pow(f.ctx.sqrt_beta(), a + b) * max_abs(g.values);
}

// ---- output

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string torus_csv(const TorusField& f) {
  std::ostringstream os;
  os << "alpha_prime,alpha,re,im\n";
  const DiffGrid tg(f.n);
  const AngleGrid ag(f.n);
  for (int j = 0; j < f.n; ++j)
    for (int k = 0; k < f.n; ++k) {
      const cplx v = f.at(j, k);
      os << format_double(tg.node(j)) << ',' << format_double(ag.node(k)) << ','
         << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
  return os.str();
}

std::string lattice_csv(const LatticeField& lat) {
  std::ostringstream os;
  os << "q,p,re,im\n";
  const AngleGrid ag(lat.n);
  const double sb = lat.ctx.sqrt_beta();
  for (int m = -lat.M; m <= lat.M; ++m)
    for (int k = 0; k < lat.n; ++k) {
      const cplx v = lat.at(m, k);
      os << format_double(lat.q(m)) << ',' << format_double(std::tan(ag.node(k)) / sb) << ','
         << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
  return os.str();
}

}  // namespace mlq
