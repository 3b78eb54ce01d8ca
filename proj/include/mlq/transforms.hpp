#pragma once

#include "mlq/sampling.hpp"

namespace mlq {

// The f~ field of either f or of F_beta f.
struct SymplecticPair {
  TorusField field;
  bool transformed = false;

  SymplecticPair fourier() const;
};

// (F_beta f)~(p', p) = f~(p, p'): an argument swap. The two axes sit on grids
// offset by half a cell, so both are resampled by pi/(2n) around the transpose.
TorusField symplectic_fourier(const TorusField& f);

// The operations below read f~ as a function on the torus, periodic in p'
// (twist 0), which is the lattice picture q in 2 hbar sqrt(beta) Z.

// (f g)~: circular convolution in p'.
TorusField pointwise_product(const TorusField& f, const TorusField& g);
// (f (*) g)~: circular convolution in p at fixed p'.
TorusField conv_generalized(const TorusField& f, const TorusField& g);
// (f <> g)~ by direct quadrature over p'; O(n^3) time and memory.
TorusField twisted_conv(const TorusField& f, const TorusField& g);

TorusField mult_by_q(const TorusField& f);       // i hbar sqrt(beta) d/dalpha' at fixed alpha
TorusField mult_by_atan_p(const TorusField& f);  // alpha / sqrt(beta)
TorusField d_q(const TorusField& f);             // i kappa alpha' f~
TorusField d_p(const TorusField& f);             // sqrt(beta) d/dalpha

}  // namespace mlq
