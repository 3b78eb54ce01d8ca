#pragma once

#include <cstdint>

#include "mlq/star_algebra.hpp"

// Independent reference computations and seeded test data.
namespace mlq::oracle {

// sum c_lk e^{2 i l alpha'} e^{2 i k alpha} over |l|, |k| <= modes.
TorusField random_band_limited(const BetaContext& ctx, int n, int modes, std::uint64_t seed);

// Element of the kernel sum c_kl e^{2 i k a} e^{-2 i l b} over |k|, |l| <= modes,
// optionally windowed by exp(-w(a-b)^2 / (2 sigma^2)) in the wrapped difference.
AlgebraElement random_kernel_element(const BetaContext& ctx, int n, int modes, double sigma,
                                     std::uint64_t seed);

// (1 + e^{2 i alpha})^power times a random trig polynomial, normalized.
Wavefunction random_state(const BetaContext& ctx, int n, int modes, int power, std::uint64_t seed);

// The double-integral star product with momentum arithmetic done pointwise on
// ExtReal values; f~ rows are read through their trig interpolants.
cplx star_double_integral(const TorusField& f, const TorusField& g, double q, const ExtReal& p);

// F_beta f (q', p') from its definition: lattice sum in q, adaptive quadrature in p.
cplx fourier_direct(const TorusField& f, double q_prime, const ExtReal& p_prime);

// The maximal-localization distribution from its three trigonometric integrals.
cplx ml_phase_integral(const BetaContext& ctx, double xi, double q, const ExtReal& p);

}  // namespace mlq::oracle
