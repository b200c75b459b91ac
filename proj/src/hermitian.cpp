#include <hyperq/hermitian.hpp>

#include <algorithm>
#include <set>

namespace hyperq
{

namespace
{

void require_full(const RealSeries &A, const char *what)
{
    if (A.form() != SeriesForm::full) {
        throw SeriesError(std::string(what) + " requires a full-form series");
    }
}

GMatrix gram_matrix(const RealSeries &A, const std::vector<HoloKey> &basis)
{
    std::map<HoloKey, std::size_t> index;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        index.emplace(basis[i], i);
    }
    GMatrix c(basis.size(), basis.size());
    for (const auto &[k, v] : A.terms()) {
        auto p = index.find(k.holo());
        auto q = index.find(k.antiholo());
        if (p != index.end() && q != index.end()) {
            c(p->second, q->second) = v;
        }
    }
    return c;
}

struct Inertia {
    std::size_t neg = 0;
    std::size_t pos = 0;
};

Inertia inertia(const std::vector<HermitianSquare> &squares)
{
    Inertia in;
    for (const auto &sq : squares) {
        if (sgn(sq.d) < 0) {
            ++in.neg;
        } else {
            ++in.pos;
        }
    }
    return in;
}

} // namespace

HermitianProfile profile(const RealSeries &A)
{
    require_full(A, "profile");
    HermitianProfile p;
    std::set<HoloKey> support;
    for (const auto &[k, v] : A.terms()) {
        support.insert(k.holo());
        support.insert(k.antiholo());
    }
    p.basis.assign(support.begin(), support.end());
    p.matrix = gram_matrix(A, p.basis);
    p.support_rank = rank(p.matrix);

    for (const auto &k : p.basis) {
        if (2 * k.weight() <= A.cap()) {
            p.stable_basis.push_back(k);
        }
    }
    auto in = inertia(hermitian_diagonalize(gram_matrix(A, p.stable_basis)));
    p.neg = in.neg;
    p.pos = in.pos;
    p.rank = in.neg + in.pos;
    return p;
}

bool Decomposition::unit_weights() const
{
    return std::all_of(weights.begin(), weights.end(), [](const mpq_class &w) { return w == 1; });
}

Decomposition decompose(const RealSeries &A)
{
    require_full(A, "decompose");
    HermitianProfile p = profile(A);
    auto squares = hermitian_diagonalize(p.matrix);
    std::stable_partition(squares.begin(), squares.end(),
                          [](const HermitianSquare &sq) { return sgn(sq.d) < 0; });

    Decomposition d;
    d.n = A.n();
    d.D = A.cap();
    for (const auto &sq : squares) {
        if (sgn(sq.d) < 0) {
            ++d.s;
        }
        mpq_class mag = abs(sq.d);
        GaussRat t(1);
        mpq_class weight = mag;
        if (norm_root(mag, t)) {
            weight = 1;
        } else {
            t = GaussRat(1);
        }
        HoloSeries phi(A.n(), A.cap());
        for (std::size_t i = 0; i < p.basis.size(); ++i) {
            if (!sq.v[i].is_zero()) {
                phi.add_term(p.basis[i], t * sq.v[i]);
            }
        }
        d.phis.push_back(std::move(phi));
        d.weights.push_back(weight);
    }
    return d;
}

RealSeries recompose(const Decomposition &d)
{
    if (d.weights.size() != d.phis.size() || d.s < 0 || d.s > static_cast<int>(d.phis.size())) {
        throw std::invalid_argument("recompose: inconsistent decomposition");
    }
    BiSeries acc(d.n, d.D);
    for (std::size_t j = 0; j < d.phis.size(); ++j) {
        mpq_class c = d.weights[j];
        if (static_cast<int>(j) < d.s) {
            c = -c;
        }
        acc += outer_product(d.phis[j], d.phis[j]) * GaussRat(c);
    }
    return RealSeries(std::move(acc));
}

std::map<SliceKey, std::size_t> slice_ranks(const RealSeries &A)
{
    require_full(A, "slice_ranks");
    std::map<SliceKey, std::vector<const std::pair<const BiKey, GaussRat> *>> slices;
    for (const auto &entry : A.terms()) {
        const BiKey &k = entry.first;
        slices[{abs_degree(k.alpha), abs_degree(k.beta), k.gamma, k.delta}].push_back(&entry);
    }
    std::map<SliceKey, std::size_t> out;
    for (const auto &[key, entries] : slices) {
        std::map<MultiIndex, std::size_t> rows, cols;
        for (const auto *e : entries) {
            rows.emplace(e->first.alpha, 0);
            cols.emplace(e->first.beta, 0);
        }
        std::size_t i = 0;
        for (auto &r : rows) {
            r.second = i++;
        }
        i = 0;
        for (auto &c : cols) {
            c.second = i++;
        }
        GMatrix m(rows.size(), cols.size());
        for (const auto *e : entries) {
            m(rows[e->first.alpha], cols[e->first.beta]) = e->second;
        }
        out[key] = rank(m);
    }
    return out;
}

bool has_low_order_terms(const RealSeries &A)
{
    for (const auto &[k, v] : A.terms()) {
        if (k.holo().degree() <= 1 || k.antiholo().degree() <= 1) {
            return true;
        }
    }
    return false;
}

bool in_class_H(const RealSeries &A, int k)
{
    if (k < 0 || has_low_order_terms(A)) {
        return false;
    }
    return profile(A).support_rank <= static_cast<std::size_t>(k);
}

namespace
{

bool slice_class(const RealSeries &A, int k, bool all_slices)
{
    if (k < 0 || has_low_order_terms(A)) {
        return false;
    }
    for (const auto &[key, r] : slice_ranks(A)) {
        int gamma = std::get<2>(key), delta = std::get<3>(key);
        bool bounded = all_slices || delta <= 1 || gamma <= 1;
        if (bounded && r > static_cast<std::size_t>(k)) {
            return false;
        }
    }
    return true;
}

} // namespace

bool in_class_S(const RealSeries &A, int k) { return slice_class(A, k, false); }

bool in_class_S_tilde(const RealSeries &A, int k) { return slice_class(A, k, true); }

bool lemma_divisibility_check(const BiSeries &H,
                              const std::vector<std::vector<HoloSeries>> &phis,
                              const std::vector<std::vector<HoloSeries>> &psis,
                              const SignatureForm &form, int q)
{
    const int n = H.n();
    const int D = H.cap();
    if (q < 0 || phis.size() != static_cast<std::size_t>(q + 1) || psis.size() != phis.size()) {
        throw std::invalid_argument("lemma_divisibility_check: expected q+1 groups of phis and psis");
    }
    if (form.n() != n) {
        throw std::invalid_argument("lemma_divisibility_check: form dimension mismatch");
    }
    for (const auto &[k, v] : H.terms()) {
        if (k.gamma != 0 || k.delta != 0) {
            throw std::invalid_argument("lemma_divisibility_check: H must not depend on w");
        }
    }

    BiSeries scal = BiSeries::hermitian_form(form, D, SeriesForm::full);
    std::vector<BiSeries> sums;
    for (std::size_t p = 0; p < phis.size(); ++p) {
        if (phis[p].size() != psis[p].size()) {
            throw std::invalid_argument("lemma_divisibility_check: phi/psi length mismatch");
        }
        BiSeries s(n, D);
        for (std::size_t j = 0; j < phis[p].size(); ++j) {
            const HoloSeries &a = phis[p][j];
            const HoloSeries &b = psis[p][j];
            if (a.n() != n || b.n() != n || a.cap() != D || b.cap() != D) {
                throw std::invalid_argument("lemma_divisibility_check: series shape mismatch");
            }
            for (const HoloSeries *f : {&a, &b}) {
                for (const auto &[key, c] : f->terms()) {
                    if (key.gamma != 0) {
                        throw std::invalid_argument("lemma_divisibility_check: phi/psi must not depend on w");
                    }
                }
            }
            s += outer_product(a, b);
        }
        sums.push_back(std::move(s));
    }

    BiSeries lhs = H * scal.pow(q + 1);
    BiSeries rhs(n, D);
    for (std::size_t p = 0; p < sums.size(); ++p) {
        rhs += sums[p] * scal.pow(static_cast<int>(p));
    }
    if (!(lhs == rhs)) {
        throw HypothesisError("divisibility hypothesis fails to degree " + std::to_string(D));
    }

    auto vanishes_below = [](const BiSeries &s, int limit) {
        for (const auto &[k, v] : s.terms()) {
            if (k.weight() <= limit) {
                return false;
            }
        }
        return true;
    };
    if (!vanishes_below(H, D - 2 * (q + 1))) {
        return false;
    }
    for (std::size_t p = 0; p < sums.size(); ++p) {
        if (!vanishes_below(sums[p], D - 2 * static_cast<int>(p))) {
            return false;
        }
    }
    return true;
}

} // namespace hyperq
