#include <hyperq/quadric.hpp>

#include <hyperq/hermitian.hpp>

#include <algorithm>

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

GaussRat hermitian_square(const GVector &a, const SignatureForm &form)
{
    mpq_class s = 0;
    for (int j = 0; j < form.n(); ++j) {
        s += form.sign(j) * a[j].norm();
    }
    return GaussRat(s);
}

std::string to_str(const mpq_class &q) { return format_rational(q); }

} // namespace

GaussRat scalar_product(const GVector &a, const GVector &b, const SignatureForm &form)
{
    if (a.size() != b.size() || static_cast<int>(a.size()) != form.n()) {
        throw std::invalid_argument("scalar_product: length mismatch");
    }
    GaussRat s;
    for (int j = 0; j < form.n(); ++j) {
        GaussRat t = a[j] * b[j];
        s += form.sign(j) < 0 ? -t : t;
    }
    return s;
}

bool is_isometry(const GMatrix &U, const SignatureForm &form, int sigma)
{
    const std::size_t n = static_cast<std::size_t>(form.n());
    if (U.rows() != n || U.cols() != n || (sigma != 1 && sigma != -1)) {
        return false;
    }
    GMatrix J = diagonal(form.signs());
    std::vector<int> scaled(form.signs());
    for (int &s : scaled) {
        s *= sigma;
    }
    return U * J * U.adjoint() == diagonal(scaled);
}

RealSeries quadric_defining_function(const SignatureForm &form, int D)
{
    const int n = form.n();
    BiSeries rho = -BiSeries::hermitian_form(form, D, SeriesForm::full);
    // Im w = (w - wbar) / (2i) = -i/2 w + i/2 wbar.
    GaussRat half_i(mpq_class(0), mpq_class(1, 2));
    rho.add_term(BiKey{MultiIndex(n, 0), MultiIndex(n, 0), 1, 0}, -half_i);
    rho.add_term(BiKey{MultiIndex(n, 0), MultiIndex(n, 0), 0, 1}, half_i);
    return RealSeries(std::move(rho));
}

bool maps_into_quadric(const HoloMap &T, const SignatureForm &source, const SignatureForm &target)
{
    if (T.source_n() != source.n() || T.target_n() != target.n()) {
        throw std::invalid_argument("maps_into_quadric: dimension mismatch");
    }
    RealSeries rho = quadric_defining_function(target, T.cap());
    RealSeries pulled = compose_real_with_map(rho, T);
    return restrict_to_quadric(pulled, source).is_zero();
}

namespace
{

// 1 - 2i <Z, conj a> - (r + i <a, conj a>) W with (Z, W) = coords.
HoloSeries denominator_at(const mpq_class &r, const GVector &a, const SignatureForm &form,
                          const std::vector<HoloSeries> &coords)
{
    const int n = form.n();
    const HoloSeries &W = coords[n];
    HoloSeries q = HoloSeries::constant(W.n(), W.cap(), GaussRat(1));
    GaussRat two_i(mpq_class(0), mpq_class(2));
    for (int j = 0; j < n; ++j) {
        if (!a[j].is_zero()) {
            GaussRat c = two_i * a[j].conj();
            q += coords[j] * (form.sign(j) < 0 ? c : -c);
        }
    }
    GaussRat wc = GaussRat(r) + GaussRat::i() * hermitian_square(a, form);
    q -= W * wc;
    return q;
}

// Weight up to which make_automorphism re-verifies the quadric identity.
constexpr int kCheckCap = 4;

std::vector<HoloSeries> coordinate_series(int n, int D)
{
    std::vector<HoloSeries> coords;
    for (int j = 0; j < n; ++j) {
        coords.push_back(HoloSeries::z(n, D, j));
    }
    coords.push_back(HoloSeries::w(n, D));
    return coords;
}

// (lam (Z + a W) U, sigma lam^2 W) / q(Z, W) with (Z, W) = coords.
HoloMap rational_map(const mpq_class &lam, const mpq_class &r, const GVector &a, const GMatrix &U, int sigma,
                     const SignatureForm &form, const std::vector<HoloSeries> &coords)
{
    const int n = form.n();
    const HoloSeries &W = coords[n];
    HoloSeries qinv = invert_unit(denominator_at(r, a, form, coords));
    std::vector<HoloSeries> comps;
    for (int j = 0; j < n; ++j) {
        HoloSeries num(W.n(), W.cap());
        GaussRat wcoef;
        for (int i = 0; i < n; ++i) {
            if (!U(i, j).is_zero()) {
                num += coords[i] * (GaussRat(lam) * U(i, j));
                wcoef += a[i] * U(i, j);
            }
        }
        num += W * (GaussRat(lam) * wcoef);
        comps.push_back(num * qinv);
    }
    comps.push_back(W * qinv * GaussRat(mpq_class(sigma * lam * lam)));
    return HoloMap(W.n(), W.cap(), std::move(comps));
}

} // namespace

HoloSeries QuadricAutomorphism::denominator() const
{
    return denominator_at(r, a, form, coordinate_series(form.n(), jet.cap()));
}

HoloMap apply_automorphism_to_map(const QuadricAutomorphism &t, const HoloMap &H)
{
    if (H.target_n() != t.n()) {
        throw AutomorphismError("apply: map target does not match the automorphism");
    }
    if (H.cap() > t.cap()) {
        throw AutomorphismError("apply: map cap exceeds the automorphism cap");
    }
    if (H.has_constant_term()) {
        throw AutomorphismError("apply: map must fix the origin");
    }
    return rational_map(t.lam, t.r, t.a, t.U, t.sigma, t.form, H.components());
}

QuadricAutomorphism make_automorphism(const mpq_class &lam, const mpq_class &r, const GVector &a,
                                      const GMatrix &U, int sigma, const SignatureForm &form, int D)
{
    const int n = form.n();
    if (sgn(lam) <= 0) {
        throw AutomorphismError("lambda must be positive");
    }
    if (static_cast<int>(a.size()) != n) {
        throw AutomorphismError("parameter a has the wrong length");
    }
    if (sigma != 1 && sigma != -1) {
        throw AutomorphismError("sigma must be +1 or -1");
    }
    if (sigma == -1 && 2 * form.negatives() != n) {
        throw AutomorphismError("sigma = -1 requires ell = n/2");
    }
    if (!is_isometry(U, form, sigma)) {
        throw AutomorphismError("U does not satisfy U J U* = sigma J");
    }
    QuadricAutomorphism t;
    t.lam = lam;
    t.r = r;
    t.a = a;
    t.U = U;
    t.sigma = sigma;
    t.form = form;
    t.jet = rational_map(lam, r, a, U, sigma, form, coordinate_series(n, D));
    HoloMap low = D <= kCheckCap ? t.jet : rational_map(lam, r, a, U, sigma, form, coordinate_series(n, kCheckCap));
    if (!maps_into_quadric(low, form, form)) {
        throw AutomorphismError("automorphism jet does not preserve the quadric");
    }
    return t;
}

QuadricAutomorphism identity_automorphism(const SignatureForm &form, int D)
{
    return make_automorphism(1, 0, GVector(form.n()), GMatrix::identity(form.n()), 1, form, D);
}

namespace
{

// (lam, r, a, U, sigma) read off the weight <= 4 part of an automorphism jet.
QuadricAutomorphism automorphism_from_low_jet(const HoloMap &jet, const SignatureForm &form, int D)
{
    const int n = form.n();
    if (jet.source_n() != n || jet.target_n() != n) {
        throw AutomorphismError("jet dimension does not match the form");
    }
    if (jet.has_constant_term()) {
        throw AutomorphismError("automorphism jet must fix the origin");
    }
    GaussRat gw = jet.last().coeff(w_key(n, 1));
    if (!gw.is_real() || gw.is_zero()) {
        throw AutomorphismError("w-coefficient of the last component must be real and nonzero");
    }
    int sigma = sgn(gw.re()) > 0 ? 1 : -1;
    mpq_class lam;
    if (!rational_sqrt(abs(gw.re()), lam)) {
        throw AutomorphismError("lambda^2 = " + to_str(abs(gw.re())) + " is not a rational square");
    }
    GMatrix U(n, n);
    GVector aU(n);
    GaussRat inv_lam(1 / lam);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            U(i, j) = jet[j].coeff(z_key(n, i)) * inv_lam;
        }
        aU[j] = jet[j].coeff(w_key(n, 1)) * inv_lam;
    }
    GMatrix Uinv;
    try {
        Uinv = inverse(U);
    } catch (const std::domain_error &) {
        throw AutomorphismError("linear part of the jet is singular");
    }
    GVector a(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            a[j] += aU[i] * Uinv(i, j);
        }
    }
    mpq_class r = jet.last().coeff(w_key(n, 2)).re() / (sigma * lam * lam);
    return make_automorphism(lam, r, a, U, sigma, form, D);
}

constexpr int kParameterCap = 4;

} // namespace

QuadricAutomorphism recover_automorphism(const HoloMap &jet, const SignatureForm &form)
{
    QuadricAutomorphism t = automorphism_from_low_jet(jet, form, jet.cap());
    if (!(t.jet == jet)) {
        throw AutomorphismError("rebuilt automorphism jet differs from the input");
    }
    return t;
}

QuadricAutomorphism compose(const QuadricAutomorphism &t1, const QuadricAutomorphism &t2)
{
    if (!(t1.form == t2.form) || t1.cap() != t2.cap()) {
        throw AutomorphismError("compose: automorphisms of different quadrics or caps");
    }
    const int D = t1.cap();
    if (D <= kParameterCap) {
        return recover_automorphism(compose(t1.jet, t2.jet), t1.form);
    }
    QuadricAutomorphism low1 = make_automorphism(t1.lam, t1.r, t1.a, t1.U, t1.sigma, t1.form, kParameterCap);
    QuadricAutomorphism low2 = make_automorphism(t2.lam, t2.r, t2.a, t2.U, t2.sigma, t2.form, kParameterCap);
    return automorphism_from_low_jet(compose(low1.jet, low2.jet), t1.form, D);
}

QuadricAutomorphism inverse(const QuadricAutomorphism &t)
{
    // T = L o P_(a, r) with L = (lam z U, sigma lam^2 w), and P_(a, r)^-1 = P_(-a, -r).
    const int n = t.n();
    GaussRat scale(mpq_class(-t.sigma / t.lam));
    GVector a(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            a[j] += t.a[i] * t.U(i, j);
        }
        a[j] *= scale;
    }
    return make_automorphism(1 / t.lam, -t.sigma * t.r / (t.lam * t.lam), a, inverse(t.U), t.sigma, t.form,
                             t.cap());
}

RealSeries transform_defining(const RealSeries &A2, const QuadricAutomorphism &t)
{
    if (A2.form() != SeriesForm::full) {
        throw SeriesError("transform_defining requires a full-form series");
    }
    if (A2.n() != t.n() || A2.cap() != t.cap()) {
        throw SeriesError("transform_defining: dimension or cap mismatch");
    }
    if (!A2.is_zero() && A2.order() < 4) {
        throw SeriesError("transform_defining: A must vanish to weighted order 4");
    }
    RealSeries pulled = compose_real_with_map(A2, t.jet);
    HoloSeries q = t.denominator();
    BiSeries out = outer_product(q, q) * pulled.raw();
    out *= GaussRat(mpq_class(t.sigma / (t.lam * t.lam)));
    return RealSeries(std::move(out));
}

void validate_model(const HypersurfaceModel &m)
{
    if (m.A.n() != m.form.n()) {
        throw std::invalid_argument("model: series dimension does not match the form");
    }
    if (2 * m.form.negatives() > m.form.n() || !m.form.is_standard()) {
        throw std::invalid_argument("model: signature must be standard with ell <= n/2");
    }
    if (m.graph) {
        if (m.A.form() != SeriesForm::trace) {
            throw std::invalid_argument("model: graph form requires a trace-form series");
        }
        return;
    }
    if (m.A.form() != SeriesForm::full) {
        throw std::invalid_argument("model: full form requires a full-form series");
    }
    if (!m.A.is_zero() && m.A.order() < 4) {
        throw std::invalid_argument("model: A must vanish to weighted order 4");
    }
}

EquivalenceReport verify_equivalence(const HypersurfaceModel &m1, const HypersurfaceModel &m2,
                                     const QuadricAutomorphism &t)
{
    validate_model(m1);
    validate_model(m2);
    if (m1.graph || m2.graph) {
        throw std::invalid_argument("verify_equivalence expects full-form models");
    }
    if (m1.cap() != m2.cap() || !(m1.form == m2.form) || !(t.form == m1.form) || t.cap() != m1.cap()) {
        throw std::invalid_argument("verify_equivalence: models and automorphism must share n, ell and D");
    }
    EquivalenceReport rep;
    HermitianProfile p1 = profile(m1.A), p2 = profile(m2.A);
    rep.rank1 = p1.rank;
    rep.rank2 = p2.rank;
    rep.neg1 = p1.neg;
    rep.neg2 = p2.neg;
    rep.hypothesis_holds = !has_low_order_terms(m1.A) && !has_low_order_terms(m2.A) &&
                           static_cast<int>(p1.rank + p2.rank) < m1.n();
    auto pair1 = std::minmax(p1.neg, p1.pos);
    auto pair2 = std::minmax(p2.neg, p2.pos);
    rep.invariants_match = p1.rank == p2.rank && pair1 == pair2;
    if (!rep.invariants_match) {
        return rep;
    }
    RealSeries diff = subtract(m1.A, transform_defining(m2.A, t));
    rep.equivalent = diff.is_zero();
    rep.first_difference = diff.is_zero() ? -1 : diff.order();
    return rep;
}

mpq_class random_rational(std::mt19937_64 &rng, int range, int den_max)
{
    // Plain modular reduction keeps the stream identical across standard libraries.
    long den = 1 + static_cast<long>(rng() % static_cast<unsigned long>(den_max));
    long span = 2L * range * den + 1;
    long num = static_cast<long>(rng() % static_cast<unsigned long>(span)) - range * den;
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

GaussRat random_gauss(std::mt19937_64 &rng, int range, int den_max)
{
    mpq_class re = random_rational(rng, range, den_max);
    mpq_class im = random_rational(rng, range, den_max);
    return GaussRat(re, im);
}

GMatrix random_isometry(const SignatureForm &form, int sigma, std::mt19937_64 &rng)
{
    const int n = form.n();
    if (sigma == -1 && 2 * form.negatives() != n) {
        throw AutomorphismError("sigma = -1 requires ell = n/2");
    }
    GMatrix J = diagonal(form.signs());
    GMatrix I = GMatrix::identity(n);
    GMatrix U0;
    for (int attempt = 0;; ++attempt) {
        if (attempt == 64) {
            throw AutomorphismError("random_isometry: I + S singular after repeated sampling");
        }
        GMatrix K(n, n);
        for (int i = 0; i < n; ++i) {
            K(i, i) = GaussRat::i() * GaussRat(random_rational(rng, 1, 2));
            for (int j = i + 1; j < n; ++j) {
                GaussRat c = random_gauss(rng, 1, 2);
                K(i, j) = c;
                K(j, i) = -c.conj();
            }
        }
        GMatrix S = K * J;
        try {
            U0 = (I - S) * inverse(I + S);
            break;
        } catch (const std::domain_error &) {
        }
    }
    if (sigma == 1) {
        return U0;
    }
    std::vector<int> neg, pos;
    for (int j = 0; j < n; ++j) {
        (form.sign(j) < 0 ? neg : pos).push_back(j);
    }
    GMatrix P(n, n);
    for (std::size_t k = 0; k < neg.size(); ++k) {
        P(neg[k], pos[k]) = GaussRat(1);
        P(pos[k], neg[k]) = GaussRat(1);
    }
    return P * U0;
}

QuadricAutomorphism random_automorphism(const SignatureForm &form, int sigma, int D,
                                        std::mt19937_64 &rng)
{
    static const long lam_num[] = {1, 2, 1, 3, 2};
    static const long lam_den[] = {2, 3, 1, 2, 1};
    std::size_t pick = rng() % 5;
    mpq_class lam(lam_num[pick], lam_den[pick]);
    mpq_class r = random_rational(rng, 2, 2);
    GVector a(form.n());
    for (auto &x : a) {
        x = random_gauss(rng, 1, 2);
    }
    GMatrix U = random_isometry(form, sigma, rng);
    return make_automorphism(lam, r, a, U, sigma, form, D);
}

} // namespace hyperq
