#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mlq/beta_arith.hpp"
#include "mlq/fft.hpp"

namespace mlq {

// Samples v_j = psi(x0 + j pi/n) with psi(x + pi) = e^{-i tau pi} psi(x);
// replaces them by the order-th derivative, spectrally exact on twisted modes.
void twisted_derivative(cplx* v, int n, double x0, double tau, int order);

// Half-offset nodes alpha_j = -pi/2 + pi(j+1/2)/n; never hits p = infinity.
struct AngleGrid {
  int n = 0;
  AngleGrid() = default;
  explicit AngleGrid(int n_);
  double node(int j) const { return -kPi / 2 + kPi * (j + 0.5) / n; }
  double spacing() const { return kPi / n; }
  bool operator==(const AngleGrid&) const = default;
};

// Integer nodes t_j = pi(j - n/2 + 1)/n on the p' axis, covering (-pi/2, pi/2].
// Differences of AngleGrid nodes land here, which makes the kernel map exact.
struct DiffGrid {
  int n = 0;
  DiffGrid() = default;
  explicit DiffGrid(int n_);
  double node(int j) const { return kPi * (j - n / 2 + 1) / n; }
  int zero_index() const { return n / 2 - 1; }
  // row index of node offset d (t = pi d/n) after wrapping into (-n/2, n/2]
  int index_of(int d) const;
};

// psi on the mu-circle; continuation psi(x + pi) = e^{-i twist pi} psi(x).
struct Wavefunction {
  BetaContext ctx;
  int n = 0;
  double twist = 0.0;
  CVec values;

  Wavefunction() = default;
  Wavefunction(const BetaContext& c, int n_, double tw = 0.0);
  static Wavefunction from_function(const BetaContext& c, int n_,
                                    const std::function<cplx(double)>& f, double tw = 0.0);

  AngleGrid grid() const { return AngleGrid(n); }
  CVec periodic_part() const;
  TrigInterp interpolant() const;  // of the periodic part
  cplx eval(const TrigInterp& ip, double alpha) const;
  cplx operator()(double alpha) const { return eval(interpolant(), alpha); }

  Wavefunction& operator+=(const Wavefunction& o);
  Wavefunction& operator-=(const Wavefunction& o);
  Wavefunction& operator*=(cplx s);
};
Wavefunction operator+(Wavefunction a, const Wavefunction& b);
Wavefunction operator-(Wavefunction a, const Wavefunction& b);
Wavefunction operator*(cplx s, Wavefunction a);

// F[j][k] = f~(t_j, alpha_k): rows on DiffGrid, columns on AngleGrid.
// twist tags the boundary condition of the Hilbert space the field acts on.
struct TorusField {
  BetaContext ctx;
  int n = 0;
  double twist = 0.0;
  CVec values;

  TorusField() = default;
  TorusField(const BetaContext& c, int n_, double tw = 0.0);
  static TorusField from_function(const BetaContext& c, int n_,
                                  const std::function<cplx(double, double)>& f, double tw = 0.0);

  cplx& at(int j, int k) { return values[std::size_t(j) * n + k]; }
  cplx at(int j, int k) const { return values[std::size_t(j) * n + k]; }
  cplx* row(int j) { return values.data() + std::size_t(j) * n; }
  const cplx* row(int j) const { return values.data() + std::size_t(j) * n; }
  DiffGrid prime_grid() const { return DiffGrid(n); }
  AngleGrid grid() const { return AngleGrid(n); }
  bool compatible(const TorusField& o) const;

  TorusField& operator+=(const TorusField& o);
  TorusField& operator-=(const TorusField& o);
  TorusField& operator*=(cplx s);
};
TorusField operator+(TorusField a, const TorusField& b);
TorusField operator-(TorusField a, const TorusField& b);
TorusField operator*(cplx s, TorusField a);

// Samples f(q_m, p(alpha_k)) on q_m = 2 hbar sqrt(beta) m, m in [-M, M].
struct LatticeField {
  BetaContext ctx;
  int n = 0;
  int M = 0;
  CVec values;  // row m + M, column k

  LatticeField() = default;
  LatticeField(const BetaContext& c, int n_, int M_);
  double q(int m) const { return ctx.q_lattice_step() * m; }
  cplx& at(int m, int k) { return values[std::size_t(m + M) * n + k]; }
  cplx at(int m, int k) const { return values[std::size_t(m + M) * n + k]; }
};

double max_abs(const CVec& v);
double l2(const CVec& v);
double max_abs_diff(const CVec& a, const CVec& b);
double l2_diff(const CVec& a, const CVec& b);

cplx quad_mu(const BetaContext& ctx, const AngleGrid& grid, const CVec& samples);
double norm(const Wavefunction& psi);
cplx inner(const Wavefunction& phi, const Wavefunction& psi);

// out(t, a) = in(t + d_prime, a + row_shift(t)); d_prime treats rows as pi-periodic.
TorusField shift_field(const TorusField& f, const std::vector<double>& row_shift, double d_prime);
TorusField shift_field(const TorusField& f, double d_alpha, double d_prime);

// Inverse generalized Fourier transform in q, periodic trapezoid over t_j.
cplx synth(const TorusField& f, double q, const ExtReal& p);
CVec synth_on_grid(const TorusField& f, double q);  // at every AngleGrid node

// synth at many points. With split_seam the p' = pi/2 row is shared half and half
// with its continuation to -pi/2, which removes the O(h) endpoint error for fields
// that are not periodic in p'.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(const TorusField& f, bool split_seam = false);
  cplx operator()(double q, const ExtReal& p) const;
  CVec grid(const std::vector<double>& qs, const std::vector<double>& ps) const;  // row-major (q, p)

 private:
  CVec column(const ExtReal& p) const;
  cplx sum(const CVec& col, double q) const;

  BetaContext ctx_;
  int n_;
  double twist_;
  bool split_;
  std::vector<TrigInterp> rows_;
};

LatticeField lattice_of(const TorusField& f, int M);
TorusField analyze(const LatticeField& lat);

// Frame change f~(t, v) <-> G(t, a) = f~(t, a - lambda t); rows shift exactly.
// G(t + pi, a) = e^{-i twist pi} G(t, a), so columns of G are plainly twisted.
CVec to_diag(const TorusField& f);
TorusField from_diag(const BetaContext& ctx, int n, double twist, const CVec& G);
// Column (t) derivative of G, twisted, order times.
void diag_dt(CVec& G, int n, double twist, int order);

// sup |D_{p'}^a D_p^b f~| with D = sqrt(beta) d/dalpha applied spectrally.
double seminorm(const TorusField& f, int a, int b);

std::string format_double(double x);
void write_file_atomic(const std::string& path, const std::string& content);
std::string torus_csv(const TorusField& f);
std::string lattice_csv(const LatticeField& lat);

}  // namespace mlq
