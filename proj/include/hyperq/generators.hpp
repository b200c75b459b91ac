#ifndef HYPERQ_GENERATORS_HPP
#define HYPERQ_GENERATORS_HPP

#include <random>

#include <hyperq/series.hpp>

namespace hyperq
{

// Draws use rng() % m only, so sequences are identical across standard
// libraries. Coefficients are Gaussian rationals with parts in [-3, 3] and
// denominators in 1..2.

// Sum of 1..max_terms random monomials z^alpha w^gamma with weight in
// [min_weight, max_weight] and ordinary degree >= 2.
HoloSeries random_holo(std::mt19937_64 &rng, int n, int D, int min_weight, int max_weight, int max_terms = 3);

// z-homogeneous polynomial of degree mu times w^gamma (1..3 terms).
HoloSeries random_slice_factor(std::mt19937_64 &rng, int n, int D, int mu, int gamma);

// Member of S~_k: 1..3 distinct slices (mu, nu, gamma, delta) with
// mu + gamma >= 2, nu + delta >= 2 and weight <= D. An off-diagonal slice is
// sum_{j<k} phi_j conj(psi_j) plus its conjugate slice; a self-conjugate slice
// is sum_{j<k/2} (phi_j conj(psi_j) + psi_j conj(phi_j)), or +-|phi|^2 when
// k = 1. With probability 1/4 a pair uses psi = i phi, which cancels.
RealSeries random_s_tilde_member(std::mt19937_64 &rng, int n, int D, int k);

// -sum_{j<negatives} |phi_j|^2 + sum_{j>=negatives} |phi_j|^2 over k terms,
// each phi_j from random_holo with weights in [2, D/2], so the Gram matrix of
// the result is exact at cap D.
RealSeries random_h_member(std::mt19937_64 &rng, int n, int D, int k, int negatives);

} // namespace hyperq

#endif
