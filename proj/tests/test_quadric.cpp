#include <gtest/gtest.h>

#include <hyperq/hermitian.hpp>
#include <hyperq/quadric.hpp>

#include "oracle.hpp"

using namespace hyperq;

namespace
{

BiKey bk(MultiIndex a, MultiIndex b, int g = 0, int d = 0) { return {std::move(a), std::move(b), g, d}; }

GVector gv(std::initializer_list<long> xs)
{
    GVector v;
    for (long x : xs) {
        v.emplace_back(x);
    }
    return v;
}

// Sum of +-|phi_j|^2 with phi_j homogeneous of weight 3, so truncation at D = 6
// keeps the Gram matrix exact.
RealSeries weight3_member(std::mt19937_64 &rng, int n, int D, int squares, int negatives)
{
    BiSeries acc(n, D);
    for (int j = 0; j < squares; ++j) {
        HoloSeries phi(n, D);
        for (int t = 0; t < 3; ++t) {
            HoloKey k{MultiIndex(n, 0), 0};
            if (rng() % 3 == 0) {
                k.alpha[rng() % n]++;
                k.gamma = 1;
            } else {
                for (int d = 0; d < 3; ++d) {
                    k.alpha[rng() % n]++;
                }
            }
            phi.add_term(k, oracle::small_gauss(rng));
        }
        BiSeries sq = outer_product(phi, phi);
        acc += j < negatives ? -sq : sq;
    }
    return RealSeries(acc);
}

} // namespace

TEST(Quadric, ScalarProduct)
{
    EXPECT_EQ(scalar_product(gv({1, 2}), gv({3, 4}), SignatureForm::standard(2, 0)), GaussRat(11));
    EXPECT_EQ(scalar_product(gv({1, 2}), gv({3, 4}), SignatureForm::standard(2, 1)), GaussRat(5));
    EXPECT_EQ(scalar_product(gv({0, 0}), gv({3, 4}), SignatureForm::standard(2, 1)), GaussRat(0));
    EXPECT_THROW(scalar_product(gv({1}), gv({3, 4}), SignatureForm::standard(2, 1)), std::invalid_argument);
}

TEST(Quadric, IdentityAndDilation)
{
    SignatureForm form = SignatureForm::standard(2, 1);
    const int D = 6;
    EXPECT_EQ(identity_automorphism(form, D).jet, HoloMap::identity(2, D));
    QuadricAutomorphism t = make_automorphism(2, 0, GVector(2), GMatrix::identity(2), 1, form, D);
    HoloMap expect(2, D, {HoloSeries::z(2, D, 0) * GaussRat(2), HoloSeries::z(2, D, 1) * GaussRat(2),
                          HoloSeries::w(2, D) * GaussRat(4)});
    EXPECT_EQ(t.jet, expect);
    EXPECT_EQ(t.denominator(), HoloSeries::constant(2, D, GaussRat(1)));
}

TEST(Quadric, MakeRejectsBadParameters)
{
    SignatureForm form = SignatureForm::standard(3, 1);
    GMatrix I = GMatrix::identity(3);
    EXPECT_THROW(make_automorphism(0, 0, GVector(3), I, 1, form, 4), AutomorphismError);
    EXPECT_THROW(make_automorphism(1, 0, GVector(3), I, -1, form, 4), AutomorphismError);
    GMatrix bad = I;
    bad(0, 0) = GaussRat(2);
    EXPECT_THROW(make_automorphism(1, 0, GVector(3), bad, 1, form, 4), AutomorphismError);
}

TEST(Quadric, RandomIsometries)
{
    std::mt19937_64 rng(31);
    for (int n = 1; n <= 4; ++n) {
        for (int ell = 0; 2 * ell <= n; ++ell) {
            SignatureForm form = SignatureForm::standard(n, ell);
            for (int rep = 0; rep < 5; ++rep) {
                EXPECT_TRUE(is_isometry(random_isometry(form, 1, rng), form, 1));
                if (2 * ell == n) {
                    EXPECT_TRUE(is_isometry(random_isometry(form, -1, rng), form, -1));
                }
            }
        }
    }
    GMatrix swap(2, 2);
    swap(0, 1) = GaussRat(1);
    swap(1, 0) = GaussRat(1);
    EXPECT_TRUE(is_isometry(swap, SignatureForm::standard(2, 1), -1));
    EXPECT_TRUE(is_isometry(GMatrix::identity(3), SignatureForm::standard(3, 1), 1));
}

TEST(Quadric, DenominatorIdentity)
{
    // |q|^2 (Im T_w - <T', conj T'>) == sigma lam^2 (Im w - <z, zbar>) exactly.
    std::mt19937_64 rng(32);
    const int D = 6;
    for (int n = 1; n <= 3; ++n) {
        for (int ell = 0; 2 * ell <= n; ++ell) {
            SignatureForm form = SignatureForm::standard(n, ell);
            for (int sigma : {1, -1}) {
                if (sigma == -1 && 2 * ell != n) {
                    continue;
                }
                QuadricAutomorphism t = random_automorphism(form, sigma, D, rng);
                RealSeries rho = quadric_defining_function(form, D);
                HoloSeries q = t.denominator();
                BiSeries lhs = outer_product(q, q) * compose_real_with_map(rho, t.jet).raw();
                BiSeries rhs = rho.raw() * GaussRat(mpq_class(sigma * t.lam * t.lam));
                EXPECT_EQ(lhs, rhs);
                EXPECT_TRUE(maps_into_quadric(t.jet, form, form));
            }
        }
    }
}

TEST(Quadric, GroupLaw)
{
    std::mt19937_64 rng(33);
    const int D = 6;
    for (int ell = 0; ell <= 1; ++ell) {
        SignatureForm form = SignatureForm::standard(2, ell);
        for (int rep = 0; rep < 3; ++rep) {
            int sigma = (ell == 1 && rep % 2) ? -1 : 1;
            QuadricAutomorphism t = random_automorphism(form, sigma, D, rng);
            QuadricAutomorphism id = identity_automorphism(form, D);
            EXPECT_EQ(compose(t, inverse(t)).jet, id.jet);
            EXPECT_EQ(compose(inverse(t), t).jet, id.jet);
            EXPECT_EQ(compose(id, t).jet, t.jet);
            QuadricAutomorphism u = random_automorphism(form, 1, D, rng);
            QuadricAutomorphism v = random_automorphism(form, 1, D, rng);
            EXPECT_EQ(compose(compose(t, u), v).jet, compose(t, compose(u, v)).jet);
            QuadricAutomorphism tu = compose(t, u);
            EXPECT_EQ(tu.jet, compose(t.jet, u.jet));
            EXPECT_EQ(tu.lam, t.lam * u.lam);
            EXPECT_EQ(tu.sigma, t.sigma * u.sigma);
        }
    }
}

TEST(Quadric, RationalApplicationMatchesJetComposition)
{
    std::mt19937_64 rng(34);
    const int D = 6;
    SignatureForm form = SignatureForm::standard(3, 1);
    for (int rep = 0; rep < 3; ++rep) {
        QuadricAutomorphism t = random_automorphism(form, 1, D, rng);
        QuadricAutomorphism u = random_automorphism(form, 1, D, rng);
        EXPECT_EQ(apply_automorphism_to_map(t, u.jet), compose(t.jet, u.jet));
        HoloMap low = apply_automorphism_to_map(t, random_automorphism(form, 1, 4, rng).jet);
        EXPECT_EQ(low.cap(), 4);
    }
    QuadricAutomorphism t = random_automorphism(form, 1, 4, rng);
    EXPECT_THROW(apply_automorphism_to_map(t, HoloMap::identity(3, 6)), AutomorphismError);
    EXPECT_THROW(apply_automorphism_to_map(t, HoloMap::identity(2, 4)), AutomorphismError);
}

TEST(Quadric, RecoverRejectsNonAutomorphismJets)
{
    SignatureForm form = SignatureForm::standard(1, 0);
    const int D = 4;
    HoloMap h(1, D, {HoloSeries::z(1, D, 0), HoloSeries::w(1, D) * GaussRat(2)});
    EXPECT_THROW(recover_automorphism(h, form), AutomorphismError);
    HoloMap bent(1, D, {HoloSeries::z(1, D, 0) + HoloSeries::monomial(1, D, HoloKey{{2}, 0}, GaussRat(1)),
                        HoloSeries::w(1, D)});
    EXPECT_THROW(recover_automorphism(bent, form), AutomorphismError);
}

TEST(Quadric, TransformDilation)
{
    SignatureForm form = SignatureForm::standard(2, 0);
    const int D = 8;
    RealSeries z14(BiSeries::monomial(2, D, bk({2, 0}, {2, 0}), GaussRat(1)));
    QuadricAutomorphism t = make_automorphism(2, 0, GVector(2), GMatrix::identity(2), 1, form, D);
    EXPECT_EQ(transform_defining(z14, t), scale(z14, 4));
    EXPECT_EQ(transform_defining(z14, identity_automorphism(form, D)), z14);
}

TEST(Quadric, TransformRejectsLowOrder)
{
    SignatureForm form = SignatureForm::standard(1, 0);
    RealSeries a(BiSeries::monomial(1, 6, bk({1}, {1}), GaussRat(1)));
    EXPECT_THROW(transform_defining(a, identity_automorphism(form, 6)), SeriesError);
}

TEST(Quadric, TransformIsRightAction)
{
    std::mt19937_64 rng(34);
    const int n = 3, D = 6;
    for (int ell = 0; ell <= 1; ++ell) {
        SignatureForm form = SignatureForm::standard(n, ell);
        RealSeries A = weight3_member(rng, n, D, 2, 1);
        QuadricAutomorphism t1 = random_automorphism(form, 1, D, rng);
        QuadricAutomorphism t2 = random_automorphism(form, 1, D, rng);
        EXPECT_EQ(transform_defining(A, compose(t1, t2)), transform_defining(transform_defining(A, t1), t2));
        EXPECT_EQ(transform_defining(transform_defining(A, t1), inverse(t1)), A);
    }
}

TEST(Quadric, TransformMapsHypersurfaces)
{
    // If A1 = transform(A2, T) then T maps Im w = <z,zbar> + A1 into the A2 hypersurface:
    // |q|^2 (Im T_w - <T',conj T'> - A2(T)) = sigma lam^2 (Im w - <z,zbar> - A1).
    std::mt19937_64 rng(35);
    const int n = 2, D = 6;
    SignatureForm form = SignatureForm::standard(n, 1);
    RealSeries A2 = weight3_member(rng, n, D, 1, 0);
    QuadricAutomorphism t = random_automorphism(form, -1, D, rng);
    RealSeries A1 = transform_defining(A2, t);
    RealSeries rho2 = subtract(quadric_defining_function(form, D), A2);
    RealSeries rho1 = subtract(quadric_defining_function(form, D), A1);
    HoloSeries q = t.denominator();
    EXPECT_EQ(outer_product(q, q) * compose_real_with_map(rho2, t.jet).raw(),
              rho1.raw() * GaussRat(mpq_class(t.sigma * t.lam * t.lam)));
}

TEST(Quadric, InvariantsPreservedByTransform)
{
    std::mt19937_64 rng(36);
    const int n = 4, D = 6;
    for (int ell = 0; ell <= 2; ++ell) {
        SignatureForm form = SignatureForm::standard(n, ell);
        for (int rep = 0; rep < 3; ++rep) {
            RealSeries A = weight3_member(rng, n, D, 2, rep % 3);
            int sigma = (2 * ell == n && rep % 2) ? -1 : 1;
            QuadricAutomorphism t = random_automorphism(form, sigma, D, rng);
            RealSeries B = transform_defining(A, t);
            HermitianProfile pa = profile(A), pb = profile(B);
            EXPECT_EQ(pa.rank, pb.rank);
            EXPECT_EQ(std::minmax(pa.neg, pa.pos), std::minmax(pb.neg, pb.pos));
            if (sigma == -1) {
                EXPECT_EQ(pa.neg, pb.pos);
            }
            EXPECT_TRUE(in_class_H(B, static_cast<int>(pa.rank)));
        }
    }
}

TEST(Quadric, VerifyEquivalence)
{
    std::mt19937_64 rng(37);
    const int n = 3, D = 6;
    SignatureForm form = SignatureForm::standard(n, 1);
    RealSeries A2 = weight3_member(rng, n, D, 1, 0);
    HypersurfaceModel m2{form, A2, false};
    auto id = identity_automorphism(form, D);
    EXPECT_TRUE(verify_equivalence(m2, m2, id).equivalent);

    QuadricAutomorphism t = random_automorphism(form, 1, D, rng);
    HypersurfaceModel m1{form, transform_defining(A2, t), false};
    EquivalenceReport rep = verify_equivalence(m1, m2, t);
    EXPECT_TRUE(rep.equivalent);
    EXPECT_TRUE(rep.hypothesis_holds);
    EXPECT_FALSE(verify_equivalence(m1, m2, id).equivalent);

    HypersurfaceModel m3{form, weight3_member(rng, n, D, 2, 1), false};
    EquivalenceReport bad = verify_equivalence(m3, m2, id);
    EXPECT_FALSE(bad.invariants_match);
    EXPECT_FALSE(bad.equivalent);
}
