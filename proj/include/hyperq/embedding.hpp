#ifndef HYPERQ_EMBEDDING_HPP
#define HYPERQ_EMBEDDING_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <hyperq/hermitian.hpp>
#include <hyperq/linalg.hpp>
#include <hyperq/quadric.hpp>
#include <hyperq/series.hpp>
#include <hyperq/signature.hpp>

namespace hyperq
{

class EmbeddingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// H = (F, G) into Im w' = <z', zbar'> of target, a standard form on C^N.
struct QuadricEmbedding {
    HoloMap H;
    SignatureForm target;
    int sigma = 1;
    // For build_embedding output: slot j of F carries z_{source[j]} when
    // source[j] < n, else phi_{source[j] - n}. Empty otherwise.
    std::vector<int> source;

    int n() const { return H.source_n(); }
    int N() const { return H.target_n(); }
    int cap() const { return H.cap(); }
};

// Sign of dG/dw(0). Throws EmbeddingError when it is not a nonzero real.
int embedding_sigma(const HoloMap &H);

// Im G - <F, conj F> restricted to M, as a trace-form series in (z, zbar, u).
RealSeries embedding_residual(const HoloMap &H, const SignatureForm &target, const HypersurfaceModel &M);

// (z, phi_1, ..., phi_r, w) from decompose(A), reordered to the standard form
// of signature ell + S(A). When ell + S(A) > N/2 the last component is -w and
// the target has N - ell - S(A) negatives. Verifies the defining identity.
QuadricEmbedding build_embedding(const HypersurfaceModel &M);

// The same construction for explicit squares: M is Im w = <z, zbar>_form +
// (-sum_{j<s} |phi_j|^2 + sum_{j>=s} |phi_j|^2). Does not check the identity.
QuadricEmbedding embedding_from_squares(const SignatureForm &form, const std::vector<HoloSeries> &phis, int s,
                                        int D);

// The linear part of the last component is nonzero.
bool check_transversality(const HoloMap &H);

// T o H with T an automorphism of the target quadric.
QuadricEmbedding apply_automorphism(const QuadricAutomorphism &t, const QuadricEmbedding &E);

// Isometry R of form with e R = x, fixing every vector orthogonal to both.
// Requires <e, e> = <x, x>; throws EmbeddingError when <e, e> = 0 and the
// single reflection degenerates.
GMatrix reflection_to(const GVector &e, const GVector &x, const SignatureForm &form);

// Isometry U of form whose first rows are V. Requires V J V^* to equal the
// leading block of J.
GMatrix extend_to_isometry(const GMatrix &V, const SignatureForm &form);

// Unitary M with dst_j = sum_i src_i M(i, j) for series lists of equal
// length, or nullopt when the coefficient Gram matrices differ.
std::optional<GMatrix> unitary_match(const std::vector<HoloSeries> &src, const std::vector<HoloSeries> &dst);

struct NormalizedEmbedding {
    int sigma = 1;
    // Signature form after the renumbering: -sigma on the first ell slots,
    // sigma on the next n - ell, then s negatives and the remaining positives.
    SignatureForm renumbered;
    int s = 0;
    // Renumbered slot j is slot perm[j] of the standard target.
    std::vector<int> perm;
    // Automorphism of the renumbered quadric with inverse(T) o H = Htilde.
    QuadricAutomorphism T;
    // (z + f, phi, sigma w + g) with d phi(0) = 0 and (f, g) normalized.
    HoloMap Htilde;

    int n() const { return Htilde.source_n(); }
    int N() const { return Htilde.target_n(); }
    std::vector<HoloSeries> phi() const;
};

// Throws EmbeddingError when H is not transversal, the scale is irrational or
// the linear data are not those of an embedding of M.
NormalizedEmbedding normalize_embedding(const QuadricEmbedding &E, const HypersurfaceModel &M);

// Checks the block form and the normalization conditions on Htilde.
bool is_normalized(const NormalizedEmbedding &ne);

// -sigma sum_{j<=s} |phi~_j|^2 + sigma sum_{j>s} |phi~_j|^2, phi~ = phi o (H0)^-1
// where H0 = (z + f, w + sigma g).
RealSeries induced_defining_series(const NormalizedEmbedding &ne);

// Maps with component j of out equal to component perm[j] of in (and the
// inverse) on the first target slots; the last slot is kept.
HoloMap to_renumbered(const HoloMap &H, const std::vector<int> &perm);
HoloMap from_renumbered(const HoloMap &H, const std::vector<int> &perm);

// (z, w) -> (z, 0, w) from C^{n+1} into C^{N+1}.
HoloMap linear_embedding(int n, int N, int D);
// (z_{ell+1}, ..., z_n, z_1, ..., z_ell, 0, -w).
HoloMap linear_embedding_minus(int n, int ell, int N, int D);

struct RigidityFactorization {
    // H2 = T o L' o H1 on the standard target of H2, with L' = linear.
    QuadricAutomorphism T;
    HoloMap linear;
    // Matching isometry with phi^_1 = phi~_2 M on the phi blocks.
    GMatrix unitary_match;
    // "exact" when every step ran over Q(i).
    std::string regime = "exact";
    bool residual_exact = false;
    int sigma1 = 1, sigma2 = 1;
    int k1 = 0, k2 = 0;
    // k1 + k2 < n.
    bool hypothesis_holds = false;
    bool is_linear_embedding = false;
    bool is_linear_embedding_minus = false;
    NormalizedEmbedding norm1, norm2;
};

// Throws EmbeddingError for sigma1 sigma2 = -1, differing (F, G) jets or a
// failed matching; the messages name the failing step.
RigidityFactorization factor_rigidity(const QuadricEmbedding &E1, const QuadricEmbedding &E2,
                                      const HypersurfaceModel &M);

// The quadric case: factors E through L or L_- with H1 = (z, sigma w) after
// renumbering. Requires A = 0.
RigidityFactorization factor_quadric_embedding(const QuadricEmbedding &E, const HypersurfaceModel &M);

struct MixedSignatureReport {
    bool identity_holds = false;
    bool coordinates_match = false;
    // Lowest weighted degree where the identity fails, or -1.
    int first_difference = -1;
    bool hypothesis_holds = false;
    int ell = 0, ell1 = 0, ell2 = 0;
    int k1 = 0, k2 = 0;
    // phi~_q in the coordinates fixed by the normalization of H1.
    std::vector<HoloSeries> phi1, phi2;
    // Isometry with (phi_2^1, phi_1^2, 0) = (phi_1^1, phi_2^2) M, or the same
    // with the roles of the embeddings exchanged.
    std::optional<GMatrix> matching;
    bool exchanged = false;
    // Scalar case: the entry of the 1x1 matching and whether |u| = 1.
    std::optional<GaussRat> u;
    bool u_unimodular = false;
};

MixedSignatureReport mixed_signature_check(const QuadricEmbedding &E1, const QuadricEmbedding &E2,
                                           const HypersurfaceModel &M);

// G(Z) = (Z, i(1 - 2 sum_j A_j Z_j^2)) on C^{n+1}; requires 0 <= A_1 <= ... < 1.
HoloMap ellipsoid_map(const std::vector<mpq_class> &coeffs, int D = 4);
// Im G_{n+2} - sum |Z_j|^2 + rho for rho = sum (A_j Z_j^2 + A_j Zbar_j^2 + |Z_j|^2) - 1.
BiSeries ellipsoid_residual(const HoloMap &G, const std::vector<mpq_class> &coeffs);

} // namespace hyperq

#endif
