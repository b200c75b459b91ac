#ifndef HYPERQ_QUADRIC_HPP
#define HYPERQ_QUADRIC_HPP

#include <random>
#include <string>
#include <vector>

#include <hyperq/linalg.hpp>
#include <hyperq/series.hpp>
#include <hyperq/signature.hpp>

namespace hyperq
{

using GVector = std::vector<GaussRat>;

// Complex-bilinear product sum_j sign_j a_j b_j.
GaussRat scalar_product(const GVector &a, const GVector &b, const SignatureForm &form);

// U J U^* == sigma J for the diagonal J of form.
bool is_isometry(const GMatrix &U, const SignatureForm &form, int sigma);

// Im w - <z, zbar> as a full-form real series.
RealSeries quadric_defining_function(const SignatureForm &form, int D);

// True when Im T_w - <T', conj T'> vanishes on Im w = <z, zbar> of the source
// form to degree D. Source and target forms may differ in dimension.
bool maps_into_quadric(const HoloMap &T, const SignatureForm &source, const SignatureForm &target);

// T(z, w) = (lam (z + a w) U, sigma lam^2 w) / q with
// q = 1 - 2i <z, conj a> - (r + i <a, conj a>) w, in row-vector convention.
struct QuadricAutomorphism {
    mpq_class lam{1};
    mpq_class r{0};
    GVector a;
    GMatrix U;
    int sigma = 1;
    SignatureForm form;
    HoloMap jet;

    int n() const { return form.n(); }
    int cap() const { return jet.cap(); }
    HoloSeries denominator() const;
};

class AutomorphismError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Validates lam > 0, the isometry identity, sigma = -1 only for balanced
// forms, and that the resulting jet maps the quadric into itself.
QuadricAutomorphism make_automorphism(const mpq_class &lam, const mpq_class &r, const GVector &a,
                                      const GMatrix &U, int sigma, const SignatureForm &form, int D);
QuadricAutomorphism identity_automorphism(const SignatureForm &form, int D);

// Reads (lam, r, a, U, sigma) off the 2-jet of an automorphism jet and checks
// that the rebuilt jet equals the input exactly.
QuadricAutomorphism recover_automorphism(const HoloMap &jet, const SignatureForm &form);

// Jet of T1 o T2.
QuadricAutomorphism compose(const QuadricAutomorphism &t1, const QuadricAutomorphism &t2);
QuadricAutomorphism inverse(const QuadricAutomorphism &t);
// t o H through the rational formula, for H fixing the origin with cap at
// most that of t. Agrees with compose(t.jet, H).
HoloMap apply_automorphism_to_map(const QuadricAutomorphism &t, const HoloMap &H);

// sigma lam^-2 |q|^2 A2 o (T, conj T). If T maps M1 into M2 (defined by A1 and
// A2), the result is A1. Right action: transform(A, T1 o T2) equals
// transform(transform(A, T1), T2).
RealSeries transform_defining(const RealSeries &A2, const QuadricAutomorphism &t);

// Im w = <z, zbar> + A. graph == true means A is the trace form A0(z, zbar, u).
struct HypersurfaceModel {
    SignatureForm form;
    RealSeries A;
    bool graph = false;

    int n() const { return form.n(); }
    int cap() const { return A.cap(); }
};

// Throws std::invalid_argument when the model violates its type invariants.
void validate_model(const HypersurfaceModel &m);

struct EquivalenceReport {
    bool equivalent = false;
    bool invariants_match = false;
    // k1 + k2 < n with both A_j free of low-order terms.
    bool hypothesis_holds = false;
    std::size_t rank1 = 0, rank2 = 0;
    std::size_t neg1 = 0, neg2 = 0;
    // Lowest weighted degree at which A1 and transform(A2, T) differ, or -1.
    int first_difference = -1;
};

EquivalenceReport verify_equivalence(const HypersurfaceModel &m1, const HypersurfaceModel &m2,
                                     const QuadricAutomorphism &t);

// Cayley transform (I - S)(I + S)^-1 with S = K J, K a random rational
// skew-Hermitian matrix, times a sign-swapping permutation when sigma = -1.
GMatrix random_isometry(const SignatureForm &form, int sigma, std::mt19937_64 &rng);

// Random small rational in [-range, range] with denominator in 1..den_max.
mpq_class random_rational(std::mt19937_64 &rng, int range, int den_max);
GaussRat random_gauss(std::mt19937_64 &rng, int range, int den_max);

// Random automorphism with lam drawn from a small set of positive rationals.
QuadricAutomorphism random_automorphism(const SignatureForm &form, int sigma, int D,
                                        std::mt19937_64 &rng);

} // namespace hyperq

#endif
