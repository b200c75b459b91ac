#include <hyperq/embedding.hpp>

#include <set>

namespace hyperq
{

namespace
{

HoloKey z_key(int n, int i)
{
    MultiIndex a(n, 0);
    a[i] = 1;
    return {a, 0};
}

HoloKey w_key(int n, int power) { return {MultiIndex(n, 0), power}; }

GaussRat hermitian(const GVector &a, const GVector &b, const SignatureForm &form)
{
    GaussRat s;
    for (int j = 0; j < form.n(); ++j) {
        GaussRat t = a[j] * b[j].conj();
        s += form.sign(j) < 0 ? -t : t;
    }
    return s;
}

GVector row_times(const GVector &v, const GMatrix &m)
{
    GVector out(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out[j] += v[i] * m(i, j);
        }
    }
    return out;
}

bool is_zero_vector(const GVector &v)
{
    for (const auto &x : v) {
        if (!x.is_zero()) {
            return false;
        }
    }
    return true;
}

// y -> y - <y, d> / (eps - t) d with d = e - x, mapping e to x.
GMatrix single_reflection(const GVector &e, const GVector &x, const GaussRat &eps, const GaussRat &t,
                          const SignatureForm &form)
{
    const std::size_t m = e.size();
    GaussRat c = -(GaussRat(1) / (eps - t));
    GMatrix R = GMatrix::identity(m);
    for (std::size_t i = 0; i < m; ++i) {
        GaussRat di = (e[i] - x[i]).conj();
        if (form.sign(static_cast<int>(i)) < 0) {
            di = -di;
        }
        for (std::size_t j = 0; j < m; ++j) {
            R(i, j) += c * di * (e[j] - x[j]);
        }
    }
    return R;
}

BiSeries imaginary_part(const HoloSeries &g)
{
    return (g.as_bi() - g.conj_bi()) * GaussRat(mpq_class(0), mpq_class(-1, 2));
}

BiSeries signed_squares(const std::vector<HoloSeries> &phis, const SignatureForm &form, int offset, int n, int D)
{
    BiSeries acc(n, D);
    for (std::size_t j = 0; j < phis.size(); ++j) {
        BiSeries sq = outer_product(phis[j], phis[j]);
        acc += form.sign(offset + static_cast<int>(j)) < 0 ? -sq : sq;
    }
    return acc;
}

HoloMap pad_map(const HoloMap &H, int N)
{
    std::vector<HoloSeries> comps(H.components().begin(), H.components().end() - 1);
    while (static_cast<int>(comps.size()) < N) {
        comps.emplace_back(H.source_n(), H.cap());
    }
    comps.push_back(H.last());
    return HoloMap(H.source_n(), H.cap(), std::move(comps));
}

GMatrix block_diagonal(const GMatrix &a, const GMatrix &b)
{
    GMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = a(i, j);
        }
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            out(a.rows() + i, a.cols() + j) = b(i, j);
        }
    }
    return out;
}

std::vector<HoloSeries> padded(std::vector<HoloSeries> v, std::size_t len, int n, int D)
{
    while (v.size() < len) {
        v.emplace_back(n, D);
    }
    return v;
}

bool all_zero(const std::vector<HoloSeries> &v)
{
    for (const auto &s : v) {
        if (!s.is_zero()) {
            return false;
        }
    }
    return true;
}

int first_difference(const std::vector<HoloSeries> &a, const std::vector<HoloSeries> &b)
{
    int best = -1;
    for (std::size_t j = 0; j < a.size(); ++j) {
        HoloSeries d = a[j] - b[j];
        if (!d.is_zero() && (best < 0 || d.order() < best)) {
            best = d.order();
        }
    }
    return best;
}

std::vector<HoloSeries> base_components(const HoloMap &H, int n)
{
    std::vector<HoloSeries> out(H.components().begin(), H.components().begin() + n);
    out.push_back(H.last());
    return out;
}

} // namespace

int embedding_sigma(const HoloMap &H)
{
    GaussRat gw = H.last().coeff(w_key(H.source_n(), 1));
    if (gw.is_zero() || !gw.is_real()) {
        throw EmbeddingError("dG/dw(0) must be a nonzero real number");
    }
    return sgn(gw.re()) > 0 ? 1 : -1;
}

RealSeries embedding_residual(const HoloMap &H, const SignatureForm &target, const HypersurfaceModel &M)
{
    const int n = M.n();
    const int D = M.cap();
    if (H.source_n() != n || H.cap() != D || target.n() != H.target_n()) {
        throw std::invalid_argument("embedding_residual: dimension or cap mismatch");
    }
    BiSeries rho = imaginary_part(H.last());
    for (int j = 0; j < target.n(); ++j) {
        BiSeries sq = outer_product(H[j], H[j]);
        rho -= target.sign(j) < 0 ? -sq : sq;
    }
    RealSeries graph = M.graph ? M.A : to_graph_form(M.A, M.form);
    BiSeries W = BiSeries::u(n, D) +
                 (BiSeries::hermitian_form(M.form, D, SeriesForm::trace) + graph.raw()) * GaussRat::i();
    return RealSeries(substitute_w(rho, W));
}

QuadricEmbedding build_embedding(const HypersurfaceModel &M)
{
    validate_model(M);
    if (M.graph) {
        throw std::invalid_argument("build_embedding expects a full-form model");
    }
    Decomposition d = decompose(M.A);
    if (!d.unit_weights()) {
        throw EmbeddingError("decomposition has a weight that is not a norm from Q(i)");
    }
    for (const auto &phi : d.phis) {
        if (!phi.affine_part().is_zero()) {
            throw EmbeddingError("decomposition has a constant or linear term: A is not in H_r");
        }
    }
    QuadricEmbedding E = embedding_from_squares(M.form, d.phis, d.s, M.cap());
    if (!embedding_residual(E.H, E.target, M).is_zero()) {
        throw std::logic_error("build_embedding: defining identity fails");
    }
    return E;
}

QuadricEmbedding embedding_from_squares(const SignatureForm &form, const std::vector<HoloSeries> &phis, int s,
                                        int D)
{
    const int n = form.n();
    const int ell = form.negatives();
    const int r = static_cast<int>(phis.size());
    if (s < 0 || s > r) {
        throw std::invalid_argument("embedding_from_squares: bad number of negative squares");
    }
    for (const auto &phi : phis) {
        if (phi.n() != n || phi.cap() != D) {
            throw std::invalid_argument("embedding_from_squares: series shape mismatch");
        }
    }
    const int N = n + r;
    std::vector<int> natural(N, 1);
    for (int j = 0; j < ell; ++j) {
        natural[j] = -1;
    }
    for (int j = 0; j < s; ++j) {
        natural[n + j] = -1;
    }
    const bool flip = 2 * (ell + s) > N;
    if (flip) {
        for (int &x : natural) {
            x = -x;
        }
    }

    QuadricEmbedding E;
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < N; ++j) {
            if ((natural[j] < 0) == (pass == 0)) {
                E.source.push_back(j);
            }
        }
    }
    std::vector<HoloSeries> comps;
    for (int j : E.source) {
        comps.push_back(j < n ? HoloSeries::z(n, D, j) : phis[j - n]);
    }
    HoloSeries w = HoloSeries::w(n, D);
    comps.push_back(flip ? -w : w);
    E.H = HoloMap(n, D, std::move(comps));
    int negatives = 0;
    for (int x : natural) {
        negatives += x < 0;
    }
    E.target = SignatureForm::standard(N, negatives);
    E.sigma = flip ? -1 : 1;
    return E;
}

bool check_transversality(const HoloMap &H)
{
    for (const auto &[k, c] : H.last().terms()) {
        if (k.degree() == 1 && !c.is_zero()) {
            return true;
        }
    }
    return false;
}

QuadricEmbedding apply_automorphism(const QuadricAutomorphism &t, const QuadricEmbedding &E)
{
    if (!(t.form == E.target) || t.cap() != E.cap()) {
        throw std::invalid_argument("apply_automorphism: automorphism of a different quadric");
    }
    QuadricEmbedding out;
    out.H = apply_automorphism_to_map(t, E.H);
    out.target = E.target;
    out.sigma = embedding_sigma(out.H);
    return out;
}

GMatrix reflection_to(const GVector &e, const GVector &x, const SignatureForm &form)
{
    const std::size_t m = e.size();
    if (x.size() != m || static_cast<int>(m) != form.n()) {
        throw std::invalid_argument("reflection_to: length mismatch");
    }
    GaussRat eps = hermitian(e, e, form);
    if (!(eps == hermitian(x, x, form))) {
        throw EmbeddingError("reflection_to: vectors of different length");
    }
    if (e == x) {
        return GMatrix::identity(m);
    }
    GaussRat t = hermitian(e, x, form);
    if (!(t == eps)) {
        return single_reflection(e, x, eps, t, form);
    }
    if (eps.is_zero()) {
        throw EmbeddingError("reflection_to: isotropic vectors with <e, x> = 0");
    }
    GVector minus_e(m);
    for (std::size_t i = 0; i < m; ++i) {
        minus_e[i] = -e[i];
    }
    return single_reflection(e, minus_e, eps, -eps, form) * single_reflection(minus_e, x, eps, -t, form);
}

GMatrix extend_to_isometry(const GMatrix &V, const SignatureForm &form)
{
    const std::size_t k = V.rows();
    const std::size_t N = V.cols();
    if (static_cast<int>(N) != form.n() || k > N) {
        throw std::invalid_argument("extend_to_isometry: shape mismatch");
    }
    std::vector<GVector> rows(k, GVector(N));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            rows[i][j] = V(i, j);
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            GaussRat expect = i == j ? GaussRat(form.sign(static_cast<int>(i))) : GaussRat();
            if (!(hermitian(rows[i], rows[j], form) == expect)) {
                throw EmbeddingError("extend_to_isometry: rows are not orthonormal for the form");
            }
        }
    }
    GMatrix W = GMatrix::identity(N);
    for (std::size_t i = 0; i < k; ++i) {
        GVector e(N);
        for (std::size_t j = 0; j < N; ++j) {
            e[j] = W(i, j);
        }
        W = W * reflection_to(e, rows[i], form);
    }
    return W;
}

std::optional<GMatrix> unitary_match(const std::vector<HoloSeries> &src, const std::vector<HoloSeries> &dst)
{
    const std::size_t m = src.size();
    if (dst.size() != m) {
        throw std::invalid_argument("unitary_match: length mismatch");
    }
    SignatureForm form(std::vector<int>(m, 1));
    std::set<HoloKey> keys;
    for (const auto *list : {&src, &dst}) {
        for (const auto &s : *list) {
            for (const auto &[k, c] : s.terms()) {
                keys.insert(k);
            }
        }
    }
    std::vector<std::pair<GVector, GVector>> columns;
    for (const auto &k : keys) {
        GVector x(m), y(m);
        for (std::size_t j = 0; j < m; ++j) {
            x[j] = src[j].coeff(k);
            y[j] = dst[j].coeff(k);
        }
        columns.emplace_back(std::move(x), std::move(y));
    }

    GMatrix M = GMatrix::identity(m);
    struct Done {
        GVector x, y;
        GaussRat norm;
    };
    std::vector<Done> done;
    for (const auto &[x, y] : columns) {
        GVector xp = x, yp = y;
        for (const auto &d : done) {
            GaussRat c = hermitian(x, d.x, form) / d.norm;
            for (std::size_t j = 0; j < m; ++j) {
                xp[j] -= c * d.x[j];
                yp[j] -= c * d.y[j];
            }
        }
        if (is_zero_vector(xp)) {
            if (!is_zero_vector(yp)) {
                return std::nullopt;
            }
            continue;
        }
        GaussRat eps = hermitian(xp, xp, form);
        if (!(eps == hermitian(yp, yp, form))) {
            return std::nullopt;
        }
        M = M * reflection_to(row_times(xp, M), yp, form);
        done.push_back({xp, yp, eps});
    }
    for (const auto &[x, y] : columns) {
        if (!(row_times(x, M) == y)) {
            return std::nullopt;
        }
    }
    return M;
}

std::vector<HoloSeries> NormalizedEmbedding::phi() const
{
    const auto &c = Htilde.components();
    return std::vector<HoloSeries>(c.begin() + n(), c.end() - 1);
}

HoloMap to_renumbered(const HoloMap &H, const std::vector<int> &perm)
{
    if (static_cast<int>(perm.size()) != H.target_n()) {
        throw std::invalid_argument("to_renumbered: permutation length mismatch");
    }
    std::vector<HoloSeries> comps;
    for (int p : perm) {
        comps.push_back(H[p]);
    }
    comps.push_back(H.last());
    return HoloMap(H.source_n(), H.cap(), std::move(comps));
}

HoloMap from_renumbered(const HoloMap &H, const std::vector<int> &perm)
{
    if (static_cast<int>(perm.size()) != H.target_n()) {
        throw std::invalid_argument("from_renumbered: permutation length mismatch");
    }
    std::vector<HoloSeries> comps(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) {
        comps[perm[j]] = H[j];
    }
    comps.push_back(H.last());
    return HoloMap(H.source_n(), H.cap(), std::move(comps));
}

NormalizedEmbedding normalize_embedding(const QuadricEmbedding &E, const HypersurfaceModel &M)
{
    validate_model(M);
    const int n = M.n();
    const int D = M.cap();
    const int N = E.N();
    if (E.n() != n || E.cap() != D || E.target.n() != N || N < n) {
        throw std::invalid_argument("normalize_embedding: embedding and model do not match");
    }
    if (!E.target.is_standard()) {
        throw std::invalid_argument("normalize_embedding: target form must be standard");
    }
    if (E.H.has_constant_term()) {
        throw EmbeddingError("embedding does not fix the origin");
    }
    if (!check_transversality(E.H)) {
        throw EmbeddingError("embedding is not CR transversal");
    }

    NormalizedEmbedding ne;
    ne.sigma = embedding_sigma(E.H);
    const int ell = M.form.negatives();
    const int ell_t = E.target.negatives();
    ne.s = ne.sigma == 1 ? ell_t - ell : ell_t - (n - ell);
    if (ne.s < 0 || ne.s > N - n) {
        throw EmbeddingError("signature counts admit no isometric placement of the source form");
    }
    std::vector<int> signs(N, 1);
    for (int j = 0; j < n; ++j) {
        signs[j] = j < ell ? -ne.sigma : ne.sigma;
    }
    for (int j = n; j < n + ne.s; ++j) {
        signs[j] = -1;
    }
    ne.renumbered = SignatureForm(signs);
    int next_neg = 0, next_pos = ell_t;
    for (int j = 0; j < N; ++j) {
        ne.perm.push_back(signs[j] < 0 ? next_neg++ : next_pos++);
    }

    HoloMap H = to_renumbered(E.H, ne.perm);
    const HoloSeries &G = H.last();
    for (int i = 0; i < n; ++i) {
        if (!G.coeff(z_key(n, i)).is_zero()) {
            throw EmbeddingError("dG/dz(0) must vanish for an embedding into the quadric");
        }
    }
    mpq_class lam2 = abs(G.coeff(w_key(n, 1)).re());
    mpq_class lam;
    if (!rational_sqrt(lam2, lam)) {
        throw EmbeddingError("|dG/dw(0)| = " + format_rational(lam2) + " is not a rational square");
    }
    GMatrix V(n, N);
    GVector a(N);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < n; ++i) {
            V(i, j) = H[j].coeff(z_key(n, i)) / GaussRat(lam);
        }
        a[j] = H[j].coeff(w_key(n, 1)) / GaussRat(lam);
    }
    GMatrix U;
    try {
        U = extend_to_isometry(V, ne.renumbered);
    } catch (const EmbeddingError &) {
        throw EmbeddingError("dF/dz(0) does not carry the source form onto the target form");
    }
    GVector b = row_times(a, inverse(U));
    if (ne.sigma < 0) {
        for (auto &x : b) {
            x = -x;
        }
    }
    mpq_class r = G.coeff(w_key(n, 2)).re() / lam2;
    ne.T = make_automorphism(lam, r, b, U, 1, ne.renumbered, D);
    ne.Htilde = apply_automorphism_to_map(inverse(ne.T), H);
    if (!is_normalized(ne)) {
        throw std::logic_error("normalize_embedding: result is not in normal form");
    }
    return ne;
}

bool is_normalized(const NormalizedEmbedding &ne)
{
    const int n = ne.n();
    const int D = ne.Htilde.cap();
    const HoloMap &H = ne.Htilde;
    for (int j = 0; j < H.target_n(); ++j) {
        HoloSeries rest = j < n ? H[j] - HoloSeries::z(n, D, j) : H[j];
        if (!rest.affine_part().is_zero()) {
            return false;
        }
    }
    HoloSeries g = H.last() - HoloSeries::w(n, D) * GaussRat(ne.sigma);
    return g.affine_part().is_zero() && sgn(g.coeff(w_key(n, 2)).re()) == 0;
}

RealSeries induced_defining_series(const NormalizedEmbedding &ne)
{
    const int n = ne.n();
    const int D = ne.Htilde.cap();
    std::vector<HoloSeries> k(ne.Htilde.components().begin(), ne.Htilde.components().begin() + n);
    k.push_back(ne.Htilde.last() * GaussRat(ne.sigma));
    HoloMap kinv = invert(HoloMap(n, D, std::move(k)));
    std::vector<HoloSeries> phis;
    for (const auto &p : ne.phi()) {
        phis.push_back(compose(p, kinv));
    }
    BiSeries acc = signed_squares(phis, ne.renumbered, n, n, D);
    return RealSeries(acc * GaussRat(ne.sigma));
}

HoloMap linear_embedding(int n, int N, int D) { return pad_map(HoloMap::identity(n, D), N); }

HoloMap linear_embedding_minus(int n, int ell, int N, int D)
{
    std::vector<HoloSeries> comps;
    for (int j = ell; j < n; ++j) {
        comps.push_back(HoloSeries::z(n, D, j));
    }
    for (int j = 0; j < ell; ++j) {
        comps.push_back(HoloSeries::z(n, D, j));
    }
    comps.push_back(-HoloSeries::w(n, D));
    return pad_map(HoloMap(n, D, std::move(comps)), N);
}

RigidityFactorization factor_rigidity(const QuadricEmbedding &E1, const QuadricEmbedding &E2,
                                      const HypersurfaceModel &M)
{
    const int n = M.n();
    const int D = M.cap();
    const int ell = M.form.negatives();
    if (E1.n() != n || E2.n() != n || E1.cap() != D || E2.cap() != D) {
        throw std::invalid_argument("factor_rigidity: embeddings and model do not match");
    }
    if (E1.target.negatives() != ell || E2.target.negatives() != ell) {
        throw std::invalid_argument("factor_rigidity: both targets must have the signature of M");
    }
    RigidityFactorization out;
    out.k1 = E1.N() - n;
    out.k2 = E2.N() - n;
    if (out.k1 > out.k2) {
        throw std::invalid_argument("factor_rigidity: expects k1 <= k2");
    }
    out.hypothesis_holds = out.k1 + out.k2 < n;
    out.norm1 = normalize_embedding(E1, M);
    out.norm2 = normalize_embedding(E2, M);
    const NormalizedEmbedding &n1 = out.norm1;
    const NormalizedEmbedding &n2 = out.norm2;
    out.sigma1 = n1.sigma;
    out.sigma2 = n2.sigma;
    std::vector<HoloSeries> phi1 = n1.phi(), phi2 = n2.phi();
    if (n1.sigma != n2.sigma) {
        if (all_zero(phi1) && all_zero(phi2)) {
            throw EmbeddingError("sigma1 sigma2 = -1 with vanishing phi: M is the quadric");
        }
        throw EmbeddingError("sigma1 sigma2 = -1 with nonvanishing phi violates the hypotheses");
    }
    if (first_difference(base_components(n1.Htilde, n), base_components(n2.Htilde, n)) >= 0) {
        throw EmbeddingError("normalized (F, G) jets differ");
    }
    const int N2 = E2.N();
    std::vector<int> signs1 = n1.renumbered.signs();
    signs1.resize(N2, 1);
    if (!(SignatureForm(signs1) == n2.renumbered)) {
        throw std::logic_error("factor_rigidity: renumbered forms are incompatible");
    }
    if (!(signed_squares(phi1, n1.renumbered, n, n, D) == signed_squares(phi2, n2.renumbered, n, n, D))) {
        throw EmbeddingError("sum of squares identity for the phi blocks fails");
    }
    auto match = unitary_match(phi2, padded(phi1, phi2.size(), n, D));
    if (!match) {
        throw EmbeddingError("no isometry matches the phi blocks");
    }
    out.unitary_match = *match;

    const SignatureForm &form2 = n2.renumbered;
    QuadricAutomorphism lambda =
        make_automorphism(1, 0, GVector(N2), block_diagonal(GMatrix::identity(n), *match), 1, form2, D);
    QuadricAutomorphism t1inv = inverse(n1.T);
    GVector a = t1inv.a;
    a.resize(N2);
    QuadricAutomorphism lifted = make_automorphism(
        t1inv.lam, t1inv.r, a, block_diagonal(t1inv.U, GMatrix::identity(out.k2 - out.k1)), t1inv.sigma, form2, D);
    QuadricAutomorphism t_ren = compose(compose(n2.T, inverse(lambda)), lifted);

    HoloMap to_ren = to_renumbered(HoloMap::identity(N2, D), n2.perm);
    out.T = recover_automorphism(from_renumbered(apply_automorphism_to_map(t_ren, to_ren), n2.perm), E2.target);

    HoloMap from1 = to_renumbered(HoloMap::identity(E1.N(), D), n1.perm);
    out.linear = from_renumbered(pad_map(from1, N2), n2.perm);
    HoloMap embedded = compose(out.linear, E1.H);
    out.residual_exact = apply_automorphism_to_map(out.T, embedded) == E2.H;
    out.is_linear_embedding = out.linear == linear_embedding(E1.N(), N2, D);
    out.is_linear_embedding_minus = 2 * ell == n && embedded == linear_embedding_minus(n, ell, N2, D);
    return out;
}

RigidityFactorization factor_quadric_embedding(const QuadricEmbedding &E, const HypersurfaceModel &M)
{
    if (!M.A.is_zero()) {
        throw std::invalid_argument("factor_quadric_embedding: M must be the quadric");
    }
    const int n = M.n();
    const int D = M.cap();
    const int ell = M.form.negatives();
    QuadricEmbedding E1;
    E1.sigma = embedding_sigma(E.H);
    if (E1.sigma < 0 && 2 * ell != n) {
        throw EmbeddingError("sigma = -1 requires ell = n/2");
    }
    E1.H = E1.sigma > 0 ? HoloMap::identity(n, D) : linear_embedding_minus(n, ell, n, D);
    E1.target = M.form;
    return factor_rigidity(E1, E, M);
}

MixedSignatureReport mixed_signature_check(const QuadricEmbedding &E1, const QuadricEmbedding &E2,
                                           const HypersurfaceModel &M)
{
    const int n = M.n();
    const int D = M.cap();
    MixedSignatureReport rep;
    rep.ell = M.form.negatives();
    rep.ell1 = E1.target.negatives();
    rep.ell2 = E2.target.negatives();
    rep.k1 = E1.N() - n;
    rep.k2 = E2.N() - n;
    for (int lq : {rep.ell1, rep.ell2}) {
        if (lq < rep.ell || lq >= n - rep.ell) {
            throw std::invalid_argument("mixed_signature_check: requires ell <= ell_q < n - ell");
        }
    }
    if (rep.k1 > rep.k2) {
        throw std::invalid_argument("mixed_signature_check: expects k1 <= k2");
    }
    rep.hypothesis_holds = rep.k1 + rep.k2 < n;
    NormalizedEmbedding n1 = normalize_embedding(E1, M);
    NormalizedEmbedding n2 = normalize_embedding(E2, M);
    if (n1.sigma != 1 || n2.sigma != 1) {
        throw std::logic_error("mixed_signature_check: sigma = -1 is excluded by the signature bounds");
    }
    int diff = first_difference(base_components(n1.Htilde, n), base_components(n2.Htilde, n));
    rep.coordinates_match = diff < 0;
    if (!rep.coordinates_match) {
        rep.first_difference = diff;
        return rep;
    }
    std::vector<HoloSeries> k(n1.Htilde.components().begin(), n1.Htilde.components().begin() + n);
    k.push_back(n1.Htilde.last());
    HoloMap kinv = invert(HoloMap(n, D, std::move(k)));
    for (const auto &p : n1.phi()) {
        rep.phi1.push_back(compose(p, kinv));
    }
    for (const auto &p : n2.phi()) {
        rep.phi2.push_back(compose(p, kinv));
    }
    BiSeries d = signed_squares(rep.phi1, n1.renumbered, n, n, D) - signed_squares(rep.phi2, n2.renumbered, n, n, D);
    rep.identity_holds = d.is_zero();
    if (!rep.identity_holds) {
        rep.first_difference = d.order();
        return rep;
    }

    const int p1 = rep.ell1 - rep.ell, p2 = rep.ell2 - rep.ell;
    std::vector<HoloSeries> a(rep.phi2.begin(), rep.phi2.begin() + p2);
    a.insert(a.end(), rep.phi1.begin() + p1, rep.phi1.end());
    std::vector<HoloSeries> b(rep.phi1.begin(), rep.phi1.begin() + p1);
    b.insert(b.end(), rep.phi2.begin() + p2, rep.phi2.end());
    rep.exchanged = a.size() > b.size();
    if (rep.exchanged) {
        std::swap(a, b);
    }
    rep.matching = unitary_match(b, padded(a, b.size(), n, D));
    if (rep.matching && a.size() == 1 && b.size() == 1) {
        rep.u = (*rep.matching)(0, 0);
        rep.u_unimodular = rep.u->norm() == 1;
    }
    return rep;
}

HoloMap ellipsoid_map(const std::vector<mpq_class> &coeffs, int D)
{
    const int m = static_cast<int>(coeffs.size());
    if (m < 1 || D < 2) {
        throw std::invalid_argument("ellipsoid_map: needs at least one coefficient and D >= 2");
    }
    for (int j = 0; j < m; ++j) {
        if (sgn(coeffs[j]) < 0 || coeffs[j] >= 1 || (j > 0 && coeffs[j] < coeffs[j - 1])) {
            throw std::invalid_argument("ellipsoid_map: requires 0 <= A_1 <= ... <= A_m < 1");
        }
    }
    std::vector<HoloSeries> comps;
    HoloSeries g = HoloSeries::constant(m, D, GaussRat(1));
    for (int j = 0; j < m; ++j) {
        HoloSeries z = HoloSeries::z(m, D, j);
        comps.push_back(z);
        g -= z * z * GaussRat(2 * coeffs[j]);
    }
    comps.push_back(g * GaussRat::i());
    return HoloMap(m, D, std::move(comps));
}

BiSeries ellipsoid_residual(const HoloMap &G, const std::vector<mpq_class> &coeffs)
{
    const int m = G.source_n();
    const int D = G.cap();
    if (static_cast<int>(coeffs.size()) != m || G.target_n() != m) {
        throw std::invalid_argument("ellipsoid_residual: coefficient count mismatch");
    }
    BiSeries res = imaginary_part(G.last()) - BiSeries::constant(m, D, GaussRat(1));
    for (int j = 0; j < m; ++j) {
        HoloSeries z2 = HoloSeries::z(m, D, j) * HoloSeries::z(m, D, j) * GaussRat(coeffs[j]);
        res -= outer_product(G[j], G[j]);
        res += z2.as_bi() + z2.conj_bi() + outer_product(HoloSeries::z(m, D, j), HoloSeries::z(m, D, j));
    }
    return res;
}

} // namespace hyperq
