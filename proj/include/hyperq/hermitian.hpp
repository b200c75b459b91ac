#ifndef HYPERQ_HERMITIAN_HPP
#define HYPERQ_HERMITIAN_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <hyperq/linalg.hpp>
#include <hyperq/series.hpp>

namespace hyperq
{

// Hermitian coefficient matrix of a real full-form series over its holomorphic
// monomial support: A = sum C[P][Q] Z^P conj(Z)^Q with Z = (z, w).
//
// A truncated series only determines C[P][Q] when weight(P) + weight(Q) <= D.
// rank/neg/pos are therefore taken on the block of monomials of weight
// <= D/2, where every entry is exact; this is the rank at degree D and a lower
// bound for the rank of the full series. support_rank is the rank of the
// literal truncated polynomial.
struct HermitianProfile {
    std::vector<HoloKey> basis;
    GMatrix matrix;
    std::size_t support_rank = 0;

    std::vector<HoloKey> stable_basis;
    std::size_t rank = 0;
    std::size_t neg = 0;
    std::size_t pos = 0;
};

HermitianProfile profile(const RealSeries &A);

// A = sum_j eps_j * weights[j] * |phis[j]|^2 with eps_j = -1 for j < s. When
// a square's scale is a norm in Q(i) it is absorbed into phi and the weight is 1.
struct Decomposition {
    int n = 0;
    int D = 0;
    int s = 0;
    std::vector<HoloSeries> phis;
    std::vector<mpq_class> weights;

    std::size_t rank() const { return phis.size(); }
    bool unit_weights() const;
};

// Exact decomposition of the truncated polynomial; recompose(decompose(A)) == A.
Decomposition decompose(const RealSeries &A);
RealSeries recompose(const Decomposition &d);

// Bidegree slice (mu, nu, gamma, delta) of the expansion in z, zbar, w, wbar.
using SliceKey = std::tuple<int, int, int, int>;
std::map<SliceKey, std::size_t> slice_ranks(const RealSeries &A);

// True when some coefficient has ordinary degree <= 1 in (z, w) or in
// (zbar, wbar), i.e. V_A contains a series with a constant or linear term.
bool has_low_order_terms(const RealSeries &A);

// Uses the support rank, which dominates every slice rank.
bool in_class_H(const RealSeries &A, int k);
bool in_class_S(const RealSeries &A, int k);
bool in_class_S_tilde(const RealSeries &A, int k);

class HypothesisError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Finite-degree check of the divisibility lemma in (z, zbar):
//   H <z,zbar>^(q+1) == sum_p (sum_j phis[p][j] conj(psis[p][j])) <z,zbar>^p
// is verified to degree D (HypothesisError otherwise). Returns whether H
// and every inner sum vanish in the degrees the truncated identity controls:
// degree <= D - 2(q+1) for H and <= D - 2p for the p-th sum.
// phis/psis are indexed [p][j], p = 0..q, and live in z only.
bool lemma_divisibility_check(const BiSeries &H,
                              const std::vector<std::vector<HoloSeries>> &phis,
                              const std::vector<std::vector<HoloSeries>> &psis,
                              const SignatureForm &form, int q);

} // namespace hyperq

#endif
