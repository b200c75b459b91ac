#include <hyperq/series.hpp>

#include <algorithm>
#include <functional>

#include <hyperq/linalg.hpp>

namespace hyperq
{

namespace
{

HoloKey key_sum(const HoloKey &a, const HoloKey &b)
{
    HoloKey k{a.alpha, a.gamma + b.gamma};
    for (std::size_t j = 0; j < k.alpha.size(); ++j) {
        k.alpha[j] += b.alpha[j];
    }
    return k;
}

BiKey key_sum(const BiKey &a, const BiKey &b)
{
    BiKey k{a.alpha, a.beta, a.gamma + b.gamma, a.delta + b.delta};
    for (std::size_t j = 0; j < k.alpha.size(); ++j) {
        k.alpha[j] += b.alpha[j];
        k.beta[j] += b.beta[j];
    }
    return k;
}

template <typename Map, typename Key>
void accumulate(Map &terms, const Key &k, const GaussRat &c)
{
    if (c.is_zero()) {
        return;
    }
    auto it = terms.find(k);
    if (it == terms.end()) {
        terms.emplace(k, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) {
        terms.erase(it);
    }
}

void check_index(const MultiIndex &a, int n)
{
    if (static_cast<int>(a.size()) != n) {
        throw SeriesError("multi-index length does not match the z-dimension");
    }
    for (int x : a) {
        if (x < 0) {
            throw SeriesError("negative exponent in multi-index");
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// HoloSeries

HoloSeries::HoloSeries(int n, int D) : n_(n), D_(D)
{
    if (n < 0 || D < 0) {
        throw SeriesError("series dimension and cap must be nonnegative");
    }
}

HoloSeries HoloSeries::constant(int n, int D, const GaussRat &c)
{
    HoloSeries s(n, D);
    s.add_term(HoloKey{MultiIndex(n, 0), 0}, c);
    return s;
}

HoloSeries HoloSeries::z(int n, int D, int j)
{
    HoloKey k{MultiIndex(n, 0), 0};
    k.alpha.at(j) = 1;
    return monomial(n, D, k, GaussRat(1));
}

HoloSeries HoloSeries::w(int n, int D)
{
    return monomial(n, D, HoloKey{MultiIndex(n, 0), 1}, GaussRat(1));
}

HoloSeries HoloSeries::monomial(int n, int D, const HoloKey &k, const GaussRat &c)
{
    HoloSeries s(n, D);
    s.add_term(k, c);
    return s;
}

GaussRat HoloSeries::coeff(const HoloKey &k) const
{
    auto it = terms_.find(k);
    return it == terms_.end() ? GaussRat() : it->second;
}

void HoloSeries::add_term(const HoloKey &k, const GaussRat &c)
{
    check_index(k.alpha, n_);
    if (k.gamma < 0) {
        throw SeriesError("negative w exponent");
    }
    if (k.weight() > D_) {
        return;
    }
    accumulate(terms_, k, c);
}

GaussRat HoloSeries::constant_term() const { return coeff(HoloKey{MultiIndex(n_, 0), 0}); }

int HoloSeries::order() const { return terms_.empty() ? -1 : terms_.begin()->first.weight(); }

HoloSeries HoloSeries::weighted_component(int sigma) const
{
    HoloSeries out(n_, D_);
    for (const auto &[k, c] : terms_) {
        if (k.weight() == sigma) {
            out.terms_.emplace(k, c);
        }
    }
    return out;
}

HoloSeries HoloSeries::affine_part() const
{
    HoloSeries out(n_, D_);
    for (const auto &[k, c] : terms_) {
        if (k.degree() <= 1) {
            out.terms_.emplace(k, c);
        }
    }
    return out;
}

void HoloSeries::check_compatible(const HoloSeries &o) const
{
    if (n_ != o.n_ || D_ != o.D_) {
        throw SeriesError("holomorphic series dimension/cap mismatch");
    }
}

HoloSeries &HoloSeries::operator+=(const HoloSeries &o)
{
    check_compatible(o);
    for (const auto &[k, c] : o.terms_) {
        accumulate(terms_, k, c);
    }
    return *this;
}

HoloSeries &HoloSeries::operator-=(const HoloSeries &o)
{
    check_compatible(o);
    for (const auto &[k, c] : o.terms_) {
        accumulate(terms_, k, -c);
    }
    return *this;
}

HoloSeries &HoloSeries::operator*=(const GaussRat &c)
{
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto &[k, v] : terms_) {
        v *= c;
    }
    return *this;
}

HoloSeries HoloSeries::operator-() const
{
    HoloSeries out(*this);
    return out *= GaussRat(-1);
}

HoloSeries operator*(const HoloSeries &a, const HoloSeries &b)
{
    a.check_compatible(b);
    HoloSeries out(a.n_, a.D_);
    for (const auto &[ka, ca] : a.terms_) {
        int wa = ka.weight();
        if (wa > a.D_) {
            break;
        }
        for (const auto &[kb, cb] : b.terms_) {
            if (wa + kb.weight() > a.D_) {
                break;
            }
            accumulate(out.terms_, key_sum(ka, kb), ca * cb);
        }
    }
    return out;
}

HoloSeries HoloSeries::pow(int k) const
{
    if (k < 0) {
        throw SeriesError("negative power");
    }
    HoloSeries result = constant(n_, D_, GaussRat(1));
    HoloSeries base = *this;
    while (k > 0) {
        if (k & 1) {
            result = result * base;
        }
        k >>= 1;
        if (k > 0) {
            base = base * base;
        }
    }
    return result;
}

BiSeries HoloSeries::as_bi() const
{
    BiSeries out(n_, D_, SeriesForm::full);
    for (const auto &[k, c] : terms_) {
        out.add_term(BiKey{k.alpha, MultiIndex(n_, 0), k.gamma, 0}, c);
    }
    return out;
}

BiSeries HoloSeries::conj_bi() const
{
    BiSeries out(n_, D_, SeriesForm::full);
    for (const auto &[k, c] : terms_) {
        out.add_term(BiKey{MultiIndex(n_, 0), k.alpha, 0, k.gamma}, c.conj());
    }
    return out;
}

HoloSeries invert_unit(const HoloSeries &q)
{
    GaussRat c0 = q.constant_term();
    if (c0.is_zero()) {
        throw SeriesError("invert_unit: series has zero constant term");
    }
    GaussRat inv0 = GaussRat(1) / c0;
    // q = c0 (1 + h) with h(0) = 0, so 1/q = c0^{-1} sum_k (-h)^k.
    HoloSeries h = q * inv0 - HoloSeries::constant(q.n(), q.cap(), GaussRat(1));
    HoloSeries minus_h = -h;
    HoloSeries term = HoloSeries::constant(q.n(), q.cap(), GaussRat(1));
    HoloSeries sum = term;
    while (true) {
        term = term * minus_h;
        if (term.is_zero()) {
            break;
        }
        sum += term;
    }
    return sum * inv0;
}

// ---------------------------------------------------------------------------
// BiSeries

BiSeries::BiSeries(int n, int D, SeriesForm form) : n_(n), D_(D), form_(form)
{
    if (n < 0 || D < 0) {
        throw SeriesError("series dimension and cap must be nonnegative");
    }
}

BiSeries BiSeries::constant(int n, int D, const GaussRat &c, SeriesForm form)
{
    BiSeries s(n, D, form);
    s.add_term(BiKey{MultiIndex(n, 0), MultiIndex(n, 0), 0, 0}, c);
    return s;
}

BiSeries BiSeries::monomial(int n, int D, const BiKey &k, const GaussRat &c, SeriesForm form)
{
    BiSeries s(n, D, form);
    s.add_term(k, c);
    return s;
}

BiSeries BiSeries::u(int n, int D)
{
    return monomial(n, D, BiKey{MultiIndex(n, 0), MultiIndex(n, 0), 1, 0}, GaussRat(1),
                    SeriesForm::trace);
}

BiSeries BiSeries::hermitian_form(const SignatureForm &form, int D, SeriesForm enc)
{
    int n = form.n();
    BiSeries s(n, D, enc);
    for (int j = 0; j < n; ++j) {
        BiKey k{MultiIndex(n, 0), MultiIndex(n, 0), 0, 0};
        k.alpha[j] = 1;
        k.beta[j] = 1;
        s.add_term(k, GaussRat(form.sign(j)));
    }
    return s;
}

GaussRat BiSeries::coeff(const BiKey &k) const
{
    auto it = terms_.find(k);
    return it == terms_.end() ? GaussRat() : it->second;
}

void BiSeries::add_term(const BiKey &k, const GaussRat &c)
{
    check_index(k.alpha, n_);
    check_index(k.beta, n_);
    if (k.gamma < 0 || k.delta < 0) {
        throw SeriesError("negative w exponent");
    }
    if (form_ == SeriesForm::trace && k.delta != 0) {
        throw SeriesError("trace-form series cannot carry wbar exponents");
    }
    if (k.weight() > D_) {
        return;
    }
    accumulate(terms_, k, c);
}

int BiSeries::order() const { return terms_.empty() ? -1 : terms_.begin()->first.weight(); }

BiSeries BiSeries::weighted_component(int sigma) const
{
    BiSeries out(n_, D_, form_);
    for (const auto &[k, c] : terms_) {
        if (k.weight() == sigma) {
            out.terms_.emplace(k, c);
        }
    }
    return out;
}

BiSeries BiSeries::conj() const
{
    BiSeries out(n_, D_, form_);
    for (const auto &[k, c] : terms_) {
        BiKey ck = form_ == SeriesForm::full ? BiKey{k.beta, k.alpha, k.delta, k.gamma}
                                              : BiKey{k.beta, k.alpha, k.gamma, 0};
        out.terms_.emplace(std::move(ck), c.conj());
    }
    return out;
}

bool BiSeries::is_real() const { return conj() == *this; }

BiSeries BiSeries::real_part() const
{
    BiSeries s = *this + conj();
    return s *= GaussRat(mpq_class(1, 2));
}

BiSeries BiSeries::imag_part() const
{
    // (X - conj X) / (2i) = -i/2 (X - conj X)
    BiSeries s = *this - conj();
    return s *= GaussRat(0, mpq_class(-1, 2));
}

void BiSeries::check_compatible(const BiSeries &o) const
{
    if (n_ != o.n_ || D_ != o.D_) {
        throw SeriesError("series dimension/cap mismatch");
    }
    if (form_ != o.form_) {
        throw SeriesError("cannot combine full-form and trace-form series");
    }
}

BiSeries &BiSeries::operator+=(const BiSeries &o)
{
    check_compatible(o);
    for (const auto &[k, c] : o.terms_) {
        accumulate(terms_, k, c);
    }
    return *this;
}

BiSeries &BiSeries::operator-=(const BiSeries &o)
{
    check_compatible(o);
    for (const auto &[k, c] : o.terms_) {
        accumulate(terms_, k, -c);
    }
    return *this;
}

BiSeries &BiSeries::operator*=(const GaussRat &c)
{
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto &[k, v] : terms_) {
        v *= c;
    }
    return *this;
}

BiSeries BiSeries::operator-() const
{
    BiSeries out(*this);
    return out *= GaussRat(-1);
}

BiSeries operator*(const BiSeries &a, const BiSeries &b)
{
    a.check_compatible(b);
    BiSeries out(a.n_, a.D_, a.form_);
    for (const auto &[ka, ca] : a.terms_) {
        int wa = ka.weight();
        for (const auto &[kb, cb] : b.terms_) {
            if (wa + kb.weight() > a.D_) {
                break;
            }
            accumulate(out.terms_, key_sum(ka, kb), ca * cb);
        }
    }
    return out;
}

BiSeries BiSeries::pow(int k) const
{
    if (k < 0) {
        throw SeriesError("negative power");
    }
    BiSeries result = constant(n_, D_, GaussRat(1), form_);
    BiSeries base = *this;
    while (k > 0) {
        if (k & 1) {
            result = result * base;
        }
        k >>= 1;
        if (k > 0) {
            base = base * base;
        }
    }
    return result;
}

BiSeries outer_product(const HoloSeries &f, const HoloSeries &g)
{
    if (f.n() != g.n() || f.cap() != g.cap()) {
        throw SeriesError("outer product dimension/cap mismatch");
    }
    int D = f.cap();
    BiSeries out(f.n(), D, SeriesForm::full);
    for (const auto &[kf, cf] : f.terms()) {
        int wf = kf.weight();
        for (const auto &[kg, cg] : g.terms()) {
            if (wf + kg.weight() > D) {
                break;
            }
            out.add_term(BiKey{kf.alpha, kg.alpha, kf.gamma, kg.gamma}, cf * cg.conj());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// RealSeries

RealSeries::RealSeries(BiSeries s) : s_(std::move(s))
{
    if (!s_.is_real()) {
        throw SeriesError("series is not real-valued: a coefficient and its conjugate key disagree");
    }
}

RealSeries add(const RealSeries &a, const RealSeries &b) { return RealSeries(a.raw() + b.raw()); }

RealSeries subtract(const RealSeries &a, const RealSeries &b)
{
    return RealSeries(a.raw() - b.raw());
}

RealSeries multiply(const RealSeries &a, const RealSeries &b)
{
    return RealSeries(a.raw() * b.raw());
}

RealSeries scale(const RealSeries &a, const mpq_class &c) { return RealSeries(a.raw() * GaussRat(c)); }

RealSeries weighted_component(const RealSeries &a, int sigma)
{
    return RealSeries(a.raw().weighted_component(sigma));
}

BiSeries substitute_w(const BiSeries &A, const BiSeries &W)
{
    if (A.form() != SeriesForm::full) {
        throw SeriesError("substitute_w expects a full-form series");
    }
    if (W.form() != SeriesForm::trace || W.n() != A.n() || W.cap() != A.cap()) {
        throw SeriesError("substitute_w expects a trace-form substitute of matching shape");
    }
    if (!W.is_zero() && W.order() < 2) {
        throw SeriesError("substitute for w must vanish to weighted order 2");
    }
    const int n = A.n();
    const int D = A.cap();
    // Group A by (gamma, delta): A = sum z^a zbar^b w^g wbar^d.
    std::map<std::pair<int, int>, BiSeries> groups;
    for (const auto &[k, c] : A.terms()) {
        auto [it, inserted] = groups.try_emplace({k.gamma, k.delta}, n, D, SeriesForm::trace);
        it->second.add_term(BiKey{k.alpha, k.beta, 0, 0}, c);
    }
    BiSeries Wbar = W.conj();
    std::vector<BiSeries> wp{BiSeries::constant(n, D, GaussRat(1), SeriesForm::trace)};
    std::vector<BiSeries> wbp{wp.front()};
    BiSeries out(n, D, SeriesForm::trace);
    for (const auto &[gd, base] : groups) {
        auto [g, d] = gd;
        while (static_cast<int>(wp.size()) <= g) {
            wp.push_back(wp.back() * W);
        }
        while (static_cast<int>(wbp.size()) <= d) {
            wbp.push_back(wbp.back() * Wbar);
        }
        out += base * (wp[g] * wbp[d]);
    }
    return out;
}

RealSeries restrict_to_quadric(const RealSeries &A, const SignatureForm &form)
{
    if (form.n() != A.n()) {
        throw SeriesError("signature form dimension mismatch");
    }
    BiSeries W = BiSeries::u(A.n(), A.cap()) +
                 BiSeries::hermitian_form(form, A.cap(), SeriesForm::trace) * GaussRat::i();
    return RealSeries(substitute_w(A.raw(), W));
}

RealSeries to_graph_form(const RealSeries &A, const SignatureForm &form)
{
    if (form.n() != A.n()) {
        throw SeriesError("signature form dimension mismatch");
    }
    if (!A.is_zero() && A.order() < 3) {
        throw SeriesError("to_graph_form: defining series has terms of weighted degree < 3");
    }
    const int n = A.n(), D = A.cap();
    BiSeries base = BiSeries::u(n, D);
    BiSeries P = BiSeries::hermitian_form(form, D, SeriesForm::trace);
    BiSeries tilde(n, D, SeriesForm::trace);
    for (int iter = 0; iter <= D + 1; ++iter) {
        BiSeries W = base + (P + tilde) * GaussRat::i();
        BiSeries next = substitute_w(A.raw(), W);
        if (next == tilde) {
            return RealSeries(std::move(next));
        }
        tilde = std::move(next);
    }
    throw SeriesError("to_graph_form: fixed-point iteration did not stabilize");
}

// ---------------------------------------------------------------------------
// HoloMap

HoloMap::HoloMap(int source_n, int D, std::vector<HoloSeries> components)
    : n_(source_n), D_(D), comps_(std::move(components))
{
    if (comps_.empty()) {
        throw SeriesError("a map needs at least one component");
    }
    for (const auto &c : comps_) {
        if (c.n() != n_ || c.cap() != D_) {
            throw SeriesError("map components must share source dimension and cap");
        }
    }
}

HoloMap HoloMap::identity(int n, int D)
{
    std::vector<HoloSeries> comps;
    for (int j = 0; j < n; ++j) {
        comps.push_back(HoloSeries::z(n, D, j));
    }
    comps.push_back(HoloSeries::w(n, D));
    return HoloMap(n, D, std::move(comps));
}

bool HoloMap::has_constant_term() const
{
    return std::any_of(comps_.begin(), comps_.end(),
                       [](const HoloSeries &c) { return !c.constant_term().is_zero(); });
}

bool HoloMap::preserves_weight() const
{
    for (std::size_t j = 0; j + 1 < comps_.size(); ++j) {
        if (!comps_[j].is_zero() && comps_[j].order() < 1) {
            return false;
        }
    }
    return comps_.back().is_zero() || comps_.back().order() >= 2;
}

namespace
{

// Products prod_j H_j^{alpha_j} * H_last^gamma, memoized.
class MonomialCache
{
public:
    explicit MonomialCache(const HoloMap &m) : map_(m) {}

    const HoloSeries &get(const HoloKey &k)
    {
        auto it = cache_.find(k);
        if (it != cache_.end()) {
            return it->second;
        }
        HoloSeries value;
        int j = 0;
        const int N = map_.target_n();
        while (j < N && k.alpha[j] == 0) {
            ++j;
        }
        if (j < N) {
            HoloKey prev = k;
            --prev.alpha[j];
            value = get(prev) * map_[j];
        } else if (k.gamma > 0) {
            HoloKey prev = k;
            --prev.gamma;
            value = get(prev) * map_.last();
        } else {
            value = HoloSeries::constant(map_.source_n(), map_.cap(), GaussRat(1));
        }
        return cache_.emplace(k, std::move(value)).first->second;
    }

private:
    const HoloMap &map_;
    std::map<HoloKey, HoloSeries> cache_;
};

void check_substitutable(const HoloMap &map, int target_n, int cap)
{
    if (map.target_n() != target_n) {
        throw SeriesError("map target dimension does not match the series variables");
    }
    if (map.cap() != cap) {
        throw SeriesError("map and series caps differ");
    }
    if (map.has_constant_term()) {
        throw SeriesError("substituted map has a constant term");
    }
    if (!map.preserves_weight()) {
        throw SeriesError("substituted map lowers weighted degree (w-slot has a z-linear term)");
    }
}

} // namespace

HoloSeries compose(const HoloSeries &h, const HoloMap &map)
{
    check_substitutable(map, h.n(), h.cap());
    MonomialCache cache(map);
    HoloSeries out(map.source_n(), map.cap());
    for (const auto &[k, c] : h.terms()) {
        out += cache.get(k) * c;
    }
    return out;
}

HoloMap compose(const HoloMap &outer, const HoloMap &inner)
{
    if (outer.source_n() != inner.target_n()) {
        throw SeriesError("compose: dimension mismatch");
    }
    check_substitutable(inner, inner.target_n(), outer.cap());
    MonomialCache cache(inner);
    std::vector<HoloSeries> comps;
    for (const auto &h : outer.components()) {
        HoloSeries out(inner.source_n(), inner.cap());
        for (const auto &[k, c] : h.terms()) {
            out += cache.get(k) * c;
        }
        comps.push_back(std::move(out));
    }
    return HoloMap(inner.source_n(), inner.cap(), std::move(comps));
}

HoloMap invert(const HoloMap &map)
{
    const int n = map.source_n();
    const int D = map.cap();
    if (map.target_n() != n) {
        throw SeriesError("invert: map is not square");
    }
    if (map.has_constant_term()) {
        throw SeriesError("invert: map has a constant term");
    }
    const int m = n + 1;
    // Row-vector convention: map(Z) = Z L + N(Z), L(i, k) = d map_k / d Z_i.
    GMatrix L(m, m);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < m; ++i) {
            HoloKey key{MultiIndex(n, 0), 0};
            if (i < n) {
                key.alpha[i] = 1;
            } else {
                key.gamma = 1;
            }
            L(i, k) = map[k].coeff(key);
        }
    }
    GMatrix Linv;
    try {
        Linv = inverse(L);
    } catch (const std::domain_error &) {
        throw SeriesError("invert: linear part is singular");
    }
    std::vector<HoloSeries> nonlinear;
    std::vector<HoloSeries> vars;
    for (int k = 0; k < m; ++k) {
        HoloSeries lin(n, D);
        for (int i = 0; i < m; ++i) {
            HoloSeries v = i < n ? HoloSeries::z(n, D, i) : HoloSeries::w(n, D);
            lin += v * L(i, k);
        }
        nonlinear.push_back(map[k] - lin);
        vars.push_back(k < n ? HoloSeries::z(n, D, k) : HoloSeries::w(n, D));
    }
    HoloMap nl(n, D, nonlinear);

    auto apply_linv = [&](const std::vector<HoloSeries> &rhs) {
        std::vector<HoloSeries> out;
        for (int k = 0; k < m; ++k) {
            HoloSeries s(n, D);
            for (int i = 0; i < m; ++i) {
                if (!Linv(i, k).is_zero()) {
                    s += rhs[i] * Linv(i, k);
                }
            }
            out.push_back(std::move(s));
        }
        return HoloMap(n, D, std::move(out));
    };

    HoloMap K = apply_linv(vars);
    for (int iter = 0; iter <= D + 1; ++iter) {
        HoloMap nk = compose(nl, K);
        std::vector<HoloSeries> rhs;
        for (int k = 0; k < m; ++k) {
            rhs.push_back(vars[k] - nk[k]);
        }
        HoloMap next = apply_linv(rhs);
        if (next == K) {
            return K;
        }
        K = std::move(next);
    }
    throw SeriesError("invert: reversion did not stabilize");
}

BiSeries compose_bi_with_map(const BiSeries &A, const HoloMap &H)
{
    if (A.form() != SeriesForm::full) {
        throw SeriesError("composition expects a full-form series");
    }
    check_substitutable(H, A.n(), A.cap());
    const int n = H.source_n(), D = H.cap();
    // Group by holomorphic key P: A = sum_P Z^P conj(S_P), S_P = sum_Q conj(c_PQ) Z^Q.
    std::map<HoloKey, std::vector<std::pair<HoloKey, GaussRat>>> groups;
    for (const auto &[k, c] : A.terms()) {
        groups[k.holo()].emplace_back(k.antiholo(), c.conj());
    }
    MonomialCache cache(H);
    BiSeries out(n, D, SeriesForm::full);
    for (const auto &[P, row] : groups) {
        HoloSeries S(n, D);
        for (const auto &[Q, c] : row) {
            S += cache.get(Q) * c;
        }
        out += outer_product(cache.get(P), S);
    }
    return out;
}

RealSeries compose_real_with_map(const RealSeries &A, const HoloMap &H)
{
    return RealSeries(compose_bi_with_map(A.raw(), H));
}

} // namespace hyperq
