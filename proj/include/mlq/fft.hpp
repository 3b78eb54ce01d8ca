#pragma once

#include <complex>
#include <vector>

namespace mlq {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

namespace fft {

// Unnormalized in-place transforms; plans are cached per size.
void forward(cplx* data, int n);
void inverse(cplx* data, int n);

// Signed mode of DFT index idx, in [-n/2, n/2).
inline int mode(int idx, int n) { return idx < n / 2 ? idx : idx - n; }

}  // namespace fft

// Operations on samples of a pi-periodic function at x_j = x0 + j*pi/n.
// Modes e^{2ikx} with k in [-n/2, n/2); the Nyquist mode keeps its complex phase.
void shift_samples(cplx* v, int n, double delta);  // v(x) <- v(x + delta)
void derivative_samples(cplx* v, int n, int order);

class TrigInterp {
 public:
  TrigInterp() = default;
  TrigInterp(const cplx* v, int n, double x0);
  cplx operator()(double x) const;
  int size() const { return n_; }

 private:
  CVec c_;
  int n_ = 0;
  double x0_ = 0.0;
};

}  // namespace mlq
