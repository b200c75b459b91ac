#include <gtest/gtest.h>

#include <hyperq/embedding.hpp>
#include <hyperq/generators.hpp>

#include "oracle.hpp"

using namespace hyperq;

namespace
{

BiKey bk(MultiIndex a, MultiIndex b, int g = 0, int d = 0) { return {std::move(a), std::move(b), g, d}; }

HypersurfaceModel model_from_squares(const SignatureForm &form, const std::vector<HoloSeries> &phis, int s, int D)
{
    BiSeries acc(form.n(), D);
    for (std::size_t j = 0; j < phis.size(); ++j) {
        BiSeries sq = outer_product(phis[j], phis[j]);
        acc += static_cast<int>(j) < s ? -sq : sq;
    }
    return HypersurfaceModel{form, RealSeries(std::move(acc)), false};
}

HypersurfaceModel quadric_model(int n, int ell, int D)
{
    return HypersurfaceModel{SignatureForm::standard(n, ell), RealSeries(n, D), false};
}

GVector column(const GMatrix &m, std::size_t row)
{
    GVector v(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        v[j] = m(row, j);
    }
    return v;
}

GVector times(const GVector &v, const GMatrix &m)
{
    GVector out(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out[j] += v[i] * m(i, j);
        }
    }
    return out;
}

bool embeds(const QuadricEmbedding &E, const HypersurfaceModel &M)
{
    return embedding_residual(E.H, E.target, M).is_zero();
}

} // namespace

TEST(Embedding, BuildModulusZ1Fourth)
{
    const int n = 2, D = 8;
    HypersurfaceModel M{SignatureForm::standard(n, 0), RealSeries(BiSeries::monomial(n, D, bk({2, 0}, {2, 0}), 1)),
                        false};
    QuadricEmbedding E = build_embedding(M);
    EXPECT_EQ(E.N(), 3);
    EXPECT_EQ(E.target, SignatureForm::standard(3, 0));
    EXPECT_EQ(E.sigma, 1);
    EXPECT_EQ(E.H[0], HoloSeries::z(n, D, 0));
    EXPECT_EQ(E.H[1], HoloSeries::z(n, D, 1));
    EXPECT_EQ(outer_product(E.H[2], E.H[2]), M.A.raw());
    EXPECT_EQ(E.H.last(), HoloSeries::w(n, D));
    EXPECT_TRUE(check_transversality(E.H));
}

TEST(Embedding, BuildZeroIsIdentity)
{
    HypersurfaceModel M = quadric_model(3, 1, 6);
    QuadricEmbedding E = build_embedding(M);
    EXPECT_EQ(E.H, HoloMap::identity(3, 6));
    EXPECT_EQ(E.target, M.form);
}

TEST(Embedding, BuildRealPartExample)
{
    const int D = 8;
    for (int n = 2; n <= 3; ++n) {
        MultiIndex e(n, 0), z1sq(n, 0);
        z1sq[0] = 2;
        BiSeries a = BiSeries::monomial(n, D, bk(e, z1sq, 2, 0), GaussRat(mpq_class(1, 2))) +
                     BiSeries::monomial(n, D, bk(z1sq, e, 0, 2), GaussRat(mpq_class(1, 2)));
        for (int ell = 0; 2 * ell <= n - 1; ++ell) {
            HypersurfaceModel M{SignatureForm::standard(n, ell), RealSeries(a), false};
            QuadricEmbedding E = build_embedding(M);
            EXPECT_EQ(E.N(), n + 2);
            EXPECT_EQ(E.target.negatives(), ell + 1);
            EXPECT_EQ(E.sigma, 1);
            EXPECT_TRUE(embeds(E, M));
        }
    }
}

TEST(Embedding, BuildFlipsWhenTooManyNegatives)
{
    const int n = 2, D = 6;
    SignatureForm form = SignatureForm::standard(n, 1);
    std::vector<HoloSeries> phis = {HoloSeries::monomial(n, D, HoloKey{{2, 0}, 0}, 1),
                                    HoloSeries::monomial(n, D, HoloKey{{1, 1}, 0}, 1)};
    HypersurfaceModel M = model_from_squares(form, phis, 2, D);
    QuadricEmbedding E = build_embedding(M);
    EXPECT_EQ(E.sigma, -1);
    EXPECT_EQ(E.target, SignatureForm::standard(4, 1));
    EXPECT_EQ(E.H.last(), -HoloSeries::w(n, D));
    EXPECT_TRUE(embeds(E, M));
}

TEST(Embedding, BuildRejectsLinearFactors)
{
    const int n = 2, D = 6;
    BiSeries a = BiSeries::monomial(n, D, bk({1, 0}, {0, 0}, 0, 2), 1) +
                 BiSeries::monomial(n, D, bk({0, 0}, {1, 0}, 2, 0), 1);
    HypersurfaceModel M{SignatureForm::standard(n, 0), RealSeries(a), false};
    EXPECT_THROW(build_embedding(M), EmbeddingError);
}

TEST(Embedding, Transversality)
{
    const int n = 2, D = 4;
    EXPECT_TRUE(check_transversality(HoloMap::identity(n, D)));
    HoloSeries z1 = HoloSeries::z(n, D, 0);
    HoloSeries zero(n, D);
    EXPECT_FALSE(check_transversality(HoloMap(n, D, {z1, zero, z1, zero})));
    EXPECT_TRUE(check_transversality(HoloMap(n, D, {z1, zero, z1})));
}

TEST(Embedding, ReflectionMapsAndPreservesForm)
{
    std::mt19937_64 rng(51);
    SignatureForm form({-1, 1, 1});
    GVector e = {GaussRat(0), GaussRat(1), GaussRat(0)};
    GVector x = {GaussRat(1), GaussRat(1), GaussRat(1)};
    // <e, x> = <e, e>: needs the two-step construction.
    GMatrix R = reflection_to(e, x, form);
    EXPECT_EQ(times(e, R), x);
    EXPECT_TRUE(is_isometry(R, form, 1));
    for (int rep = 0; rep < 10; ++rep) {
        GMatrix U = random_isometry(form, 1, rng);
        GVector a = column(U, rep % 3);
        GVector b = column(U, (rep + 1) % 3);
        if (form.sign(rep % 3) != form.sign((rep + 1) % 3)) {
            continue;
        }
        GMatrix S = reflection_to(a, b, form);
        EXPECT_EQ(times(a, S), b);
        EXPECT_TRUE(is_isometry(S, form, 1));
    }
    EXPECT_THROW(reflection_to(e, GVector{GaussRat(1), GaussRat(0), GaussRat(0)}, form), EmbeddingError);
}

TEST(Embedding, ExtendToIsometry)
{
    std::mt19937_64 rng(52);
    for (int N = 2; N <= 5; ++N) {
        for (int neg = 0; neg <= N / 2; ++neg) {
            SignatureForm form = SignatureForm::standard(N, neg);
            GMatrix U = random_isometry(form, 1, rng);
            for (int k = 1; k <= N; ++k) {
                GMatrix V(k, N);
                for (int i = 0; i < k; ++i) {
                    for (int j = 0; j < N; ++j) {
                        V(i, j) = U(i, j);
                    }
                }
                GMatrix W = extend_to_isometry(V, form);
                EXPECT_TRUE(is_isometry(W, form, 1));
                for (int i = 0; i < k; ++i) {
                    EXPECT_EQ(column(W, i), column(V, i));
                }
            }
        }
    }
    GMatrix bad(1, 2);
    bad(0, 0) = GaussRat(2);
    EXPECT_THROW(extend_to_isometry(bad, SignatureForm::standard(2, 0)), EmbeddingError);
}

TEST(Embedding, UnitaryMatch)
{
    std::mt19937_64 rng(53);
    const int n = 3, D = 6;
    for (int m = 1; m <= 3; ++m) {
        std::vector<HoloSeries> src;
        for (int j = 0; j < m; ++j) {
            src.push_back(random_holo(rng, n, D, 2, 3));
        }
        if (m == 3) {
            src[2] = src[0] + src[1];
        }
        GMatrix U = random_isometry(SignatureForm::standard(m, 0), 1, rng);
        std::vector<HoloSeries> dst(m, HoloSeries(n, D));
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                dst[j] += src[i] * U(i, j);
            }
        }
        auto M = unitary_match(src, dst);
        ASSERT_TRUE(M.has_value());
        EXPECT_TRUE(is_isometry(*M, SignatureForm::standard(m, 0), 1));
        for (int j = 0; j < m; ++j) {
            HoloSeries acc(n, D);
            for (int i = 0; i < m; ++i) {
                acc += src[i] * (*M)(i, j);
            }
            EXPECT_EQ(acc, dst[j]);
        }
        dst[0] = dst[0] * GaussRat(2);
        EXPECT_FALSE(unitary_match(src, dst).has_value());
    }
}

TEST(Embedding, NormalizeBuiltEmbeddingIsTrivial)
{
    const int n = 3, D = 6;
    std::mt19937_64 rng(54);
    SignatureForm form = SignatureForm::standard(n, 1);
    std::vector<HoloSeries> phis = {random_holo(rng, n, D, 2, 3), random_holo(rng, n, D, 2, 3)};
    HypersurfaceModel M = model_from_squares(form, phis, 1, D);
    QuadricEmbedding E = embedding_from_squares(form, phis, 1, D);
    ASSERT_TRUE(embeds(E, M));
    NormalizedEmbedding ne = normalize_embedding(E, M);
    EXPECT_EQ(ne.T.jet, HoloMap::identity(E.N(), D));
    EXPECT_EQ(ne.Htilde, to_renumbered(E.H, ne.perm));
    EXPECT_EQ(induced_defining_series(ne), M.A);
}

TEST(Embedding, NormalizeRoundTrip)
{
    std::mt19937_64 rng(55);
    const int D = 6;
    int flips = 0;
    for (int rep = 0; rep < 12; ++rep) {
        int n = 2 + rep % 2;
        int ell = rep % 3 == 0 && n == 2 ? 1 : 0;
        SignatureForm form = SignatureForm::standard(n, ell);
        int r = 1 + static_cast<int>(rng() % 2);
        int s = static_cast<int>(rng() % (r + 1));
        std::vector<HoloSeries> phis;
        for (int j = 0; j < r; ++j) {
            phis.push_back(random_holo(rng, n, D, 2, 3));
        }
        HypersurfaceModel M = model_from_squares(form, phis, s, D);
        QuadricEmbedding E = embedding_from_squares(form, phis, s, D);
        int sigma0 = 2 * E.target.negatives() == E.N() && (rep / 2) % 2 ? -1 : 1;
        QuadricAutomorphism t0 = random_automorphism(E.target, sigma0, D, rng);
        QuadricEmbedding H = apply_automorphism(t0, E);
        ASSERT_TRUE(embeds(H, M));
        NormalizedEmbedding ne = normalize_embedding(H, M);
        flips += ne.sigma < 0;
        EXPECT_TRUE(is_normalized(ne));
        EXPECT_EQ(compose(ne.T.jet, ne.Htilde), to_renumbered(H.H, ne.perm));
        EXPECT_EQ(induced_defining_series(ne), M.A);
        // (z, w) slots of the normal form come back unchanged.
        for (int j = 0; j < n; ++j) {
            EXPECT_EQ(ne.Htilde[j], HoloSeries::z(n, D, j));
        }
        EXPECT_EQ(ne.Htilde.last(), HoloSeries::w(n, D) * GaussRat(ne.sigma));
        // 1-jet (I 0; 0 sigma) with a vanishing phi block.
        for (const auto &p : ne.phi()) {
            EXPECT_TRUE(p.affine_part().is_zero());
        }
    }
    EXPECT_GT(flips, 0);
}

TEST(Embedding, NormalizeAntiholomorphicSignCase)
{
    // sigma = -1 at ell = n/2 with the quadric mapped to itself.
    std::mt19937_64 rng(56);
    const int n = 2, D = 6;
    HypersurfaceModel M = quadric_model(n, 1, D);
    QuadricAutomorphism t0 = random_automorphism(M.form, -1, D, rng);
    QuadricEmbedding E{t0.jet, M.form, -1, {}};
    NormalizedEmbedding ne = normalize_embedding(E, M);
    EXPECT_EQ(ne.sigma, -1);
    EXPECT_EQ(ne.renumbered, SignatureForm({1, -1}));
    EXPECT_EQ(ne.Htilde, HoloMap(n, D, {HoloSeries::z(n, D, 0), HoloSeries::z(n, D, 1), -HoloSeries::w(n, D)}));
    EXPECT_TRUE(induced_defining_series(ne).is_zero());
}

TEST(Embedding, NormalizeRejectsBadInput)
{
    const int n = 2, D = 4;
    HypersurfaceModel M = quadric_model(n, 0, D);
    HoloSeries z1 = HoloSeries::z(n, D, 0), z2 = HoloSeries::z(n, D, 1), w = HoloSeries::w(n, D);
    QuadricEmbedding flat{HoloMap(n, D, {z1, z2, HoloSeries(n, D)}), M.form, 1, {}};
    EXPECT_THROW(normalize_embedding(flat, M), EmbeddingError);
    QuadricEmbedding scaled{HoloMap(n, D, {z1, z2, w * GaussRat(2)}), M.form, 1, {}};
    EXPECT_THROW(normalize_embedding(scaled, M), EmbeddingError);
    QuadricEmbedding wrong{HoloMap(n, D, {z1 * GaussRat(2), z2 * GaussRat(2), w * GaussRat(4)}),
                           SignatureForm::standard(2, 1), 1, {}};
    EXPECT_THROW(normalize_embedding(wrong, M), EmbeddingError);
}

TEST(Embedding, RigidityRoundTrip)
{
    std::mt19937_64 rng(57);
    const int n = 4, D = 6;
    SignatureForm form = SignatureForm::standard(n, 0);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<HoloSeries> phis = {random_holo(rng, n, D, 2, 3)};
        HypersurfaceModel M = model_from_squares(form, phis, 0, D);
        QuadricEmbedding E1 = build_embedding(M);
        ASSERT_EQ(E1.N(), n + 1);
        QuadricEmbedding L1{compose(linear_embedding(n + 1, n + 2, D), E1.H), SignatureForm::standard(n + 2, 0), 1,
                            {}};
        QuadricAutomorphism t0 = random_automorphism(L1.target, 1, D, rng);
        QuadricEmbedding E2 = apply_automorphism(t0, L1);
        RigidityFactorization f = factor_rigidity(E1, E2, M);
        EXPECT_TRUE(f.residual_exact);
        EXPECT_TRUE(f.is_linear_embedding);
        EXPECT_TRUE(f.hypothesis_holds);
        EXPECT_EQ(f.regime, "exact");
        EXPECT_EQ(compose(f.T.jet, compose(f.linear, E1.H)), E2.H);
    }
}

TEST(Embedding, RigiditySameEmbeddingGivesIdentity)
{
    std::mt19937_64 rng(58);
    const int n = 4, D = 6;
    SignatureForm form = SignatureForm::standard(n, 1);
    std::vector<HoloSeries> phis = {random_holo(rng, n, D, 2, 3)};
    HypersurfaceModel M = model_from_squares(form, phis, 0, D);
    QuadricEmbedding E = build_embedding(M);
    RigidityFactorization f = factor_rigidity(E, E, M);
    EXPECT_EQ(f.T.jet, HoloMap::identity(E.N(), D));
    EXPECT_TRUE(f.residual_exact);
}

TEST(Embedding, QuadricFactorsThroughLMinus)
{
    std::mt19937_64 rng(59);
    const int n = 2, ell = 1, D = 6;
    HypersurfaceModel M = quadric_model(n, ell, D);
    for (int k2 : {0, 2}) {
        SignatureForm target = SignatureForm::standard(n + k2, ell);
        QuadricEmbedding base{linear_embedding_minus(n, ell, n + k2, D), target, -1, {}};
        ASSERT_TRUE(embeds(base, M));
        QuadricEmbedding E = apply_automorphism(random_automorphism(target, 1, D, rng), base);
        RigidityFactorization f = factor_quadric_embedding(E, M);
        EXPECT_EQ(f.sigma2, -1);
        EXPECT_TRUE(f.is_linear_embedding_minus);
        EXPECT_TRUE(f.residual_exact);
        EXPECT_EQ(compose(f.T.jet, linear_embedding_minus(n, ell, n + k2, D)), E.H);
    }
    QuadricAutomorphism t = random_automorphism(M.form, -1, D, rng);
    RigidityFactorization f = factor_quadric_embedding(QuadricEmbedding{t.jet, M.form, -1, {}}, M);
    EXPECT_TRUE(f.is_linear_embedding_minus);
    EXPECT_TRUE(f.residual_exact);

    QuadricEmbedding plus{linear_embedding(n, n + 2, D), SignatureForm::standard(n + 2, ell), 1, {}};
    RigidityFactorization g = factor_quadric_embedding(plus, M);
    EXPECT_TRUE(g.is_linear_embedding);
    EXPECT_FALSE(g.is_linear_embedding_minus);
}

TEST(Embedding, RigidityRejectsOppositeSigns)
{
    const int n = 2, ell = 1, D = 6;
    HypersurfaceModel M = quadric_model(n, ell, D);
    QuadricEmbedding plus{HoloMap::identity(n, D), M.form, 1, {}};
    QuadricEmbedding minus{linear_embedding_minus(n, ell, n, D), M.form, -1, {}};
    EXPECT_THROW(factor_rigidity(plus, minus, M), EmbeddingError);
}

TEST(Embedding, MixedSignatureExample)
{
    const int n = 2, D = 6;
    HypersurfaceModel M = quadric_model(n, 0, D);
    HoloSeries phi = HoloSeries::monomial(n, D, HoloKey{{1, 1}, 0}, 1) + HoloSeries::monomial(n, D, HoloKey{{0, 0}, 2}, 3);
    HoloSeries z1 = HoloSeries::z(n, D, 0), z2 = HoloSeries::z(n, D, 1), w = HoloSeries::w(n, D);
    QuadricEmbedding E2{HoloMap(n, D, {phi, phi, z1, z2, w}), SignatureForm::standard(4, 1), 1, {}};
    ASSERT_TRUE(embeds(E2, M));
    QuadricEmbedding E1{HoloMap::identity(n, D), M.form, 1, {}};
    MixedSignatureReport rep = mixed_signature_check(E1, E2, M);
    EXPECT_TRUE(rep.coordinates_match);
    EXPECT_TRUE(rep.identity_holds);
    EXPECT_FALSE(rep.hypothesis_holds);
    ASSERT_TRUE(rep.u.has_value());
    EXPECT_TRUE(rep.u_unimodular);
    EXPECT_EQ(*rep.u, GaussRat(1));

    QuadricEmbedding E3{HoloMap(n, D, {phi, phi * GaussRat::i(), z1, z2, w}), SignatureForm::standard(4, 1), 1, {}};
    MixedSignatureReport rep3 = mixed_signature_check(E1, E3, M);
    ASSERT_TRUE(rep3.u.has_value());
    EXPECT_TRUE(rep3.u_unimodular);
    EXPECT_EQ(*rep3.u, GaussRat(mpq_class(0), mpq_class(-1)));
}

TEST(Embedding, MixedSignatureDetectsMismatch)
{
    const int n = 3, D = 6;
    HypersurfaceModel M = quadric_model(n, 0, D);
    HoloSeries phi = HoloSeries::monomial(n, D, HoloKey{{2, 0, 0}, 0}, 1);
    std::vector<HoloSeries> c = {HoloSeries::z(n, D, 0), HoloSeries::z(n, D, 1), HoloSeries::z(n, D, 2)};
    QuadricEmbedding E1{HoloMap::identity(n, D), M.form, 1, {}};
    QuadricEmbedding same{HoloMap(n, D, {c[0], c[1], c[2], phi * GaussRat(0), HoloSeries::w(n, D)}),
                          SignatureForm::standard(4, 0), 1, {}};
    EXPECT_TRUE(mixed_signature_check(E1, same, M).identity_holds);
    QuadricEmbedding other{HoloMap(n, D, {c[0], c[1], c[2], phi, HoloSeries::w(n, D)}),
                           SignatureForm::standard(4, 0), 1, {}};
    MixedSignatureReport rep = mixed_signature_check(E1, other, M);
    EXPECT_FALSE(rep.identity_holds);
    EXPECT_EQ(rep.first_difference, 4);
}

TEST(Embedding, Ellipsoid)
{
    std::vector<mpq_class> coeffs = {0, mpq_class(1, 2)};
    HoloMap G = ellipsoid_map(coeffs);
    HoloSeries Z2 = HoloSeries::z(2, 4, 1);
    EXPECT_EQ(G.last(), (HoloSeries::constant(2, 4, 1) - Z2 * Z2) * GaussRat::i());
    EXPECT_TRUE(ellipsoid_residual(G, coeffs).is_zero());
    HoloMap dropped(2, 4, {G[0], G[1], HoloSeries::constant(2, 4, 1) - Z2 * Z2});
    EXPECT_FALSE(ellipsoid_residual(dropped, coeffs).is_zero());
    EXPECT_TRUE(ellipsoid_residual(ellipsoid_map({0, 0, 0}), {0, 0, 0}).is_zero());
    EXPECT_THROW(ellipsoid_map({mpq_class(1, 2), 0}), std::invalid_argument);
    EXPECT_THROW(ellipsoid_map({0, 1}), std::invalid_argument);
}

TEST(Generators, STildeMembers)
{
    std::mt19937_64 rng(60), again(60);
    int zero = 0;
    for (int rep = 0; rep < 40; ++rep) {
        RealSeries A = random_s_tilde_member(rng, 3, 8, 2);
        EXPECT_EQ(A, random_s_tilde_member(again, 3, 8, 2));
        EXPECT_TRUE(in_class_S_tilde(A, 2));
        EXPECT_TRUE(in_class_S(A, 2));
        EXPECT_GE(A.is_zero() ? 4 : A.order(), 4);
        zero += A.is_zero();
    }
    EXPECT_LT(zero, 40);
}

TEST(Generators, HMembers)
{
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 10; ++rep) {
        RealSeries A = random_h_member(rng, 5, 6, 2, rep % 3);
        EXPECT_TRUE(in_class_H(A, 2));
        HermitianProfile p = profile(A);
        EXPECT_LE(p.rank, 2u);
        EXPECT_EQ(p.rank, p.support_rank);
    }
}
