#include <hyperq/chern_moser.hpp>

#include <hyperq/hermitian.hpp>

#include <algorithm>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <tuple>

namespace hyperq
{

NormalizedPair NormalizedPair::zero(int n, int D)
{
    return {std::vector<HoloSeries>(n, HoloSeries(n, D)), HoloSeries(n, D)};
}

bool NormalizedPair::is_zero() const
{
    return g.is_zero() && std::all_of(f.begin(), f.end(), [](const HoloSeries &s) { return s.is_zero(); });
}

bool satisfies_normalization(const NormalizedPair &p)
{
    auto low = [](const HoloSeries &s) {
        for (const auto &[k, c] : s.terms()) {
            if (k.degree() <= 1) {
                return true;
            }
        }
        return false;
    };
    if (low(p.g) || std::any_of(p.f.begin(), p.f.end(), low)) {
        return false;
    }
    return sgn(p.g.coeff(HoloKey{MultiIndex(p.n(), 0), 2}).re()) == 0;
}

namespace
{

void check_pair_shape(const NormalizedPair &p, const SignatureForm &form)
{
    const int n = form.n();
    if (p.n() != n || p.g.n() != n) {
        throw SeriesError("pair dimension does not match the form");
    }
    for (const auto &fj : p.f) {
        if (fj.n() != n || fj.cap() != p.g.cap()) {
            throw SeriesError("pair components must share n and D");
        }
    }
}

BiSeries zbar_monomial(int n, int D, int j)
{
    MultiIndex e(n, 0);
    e[j] = 1;
    return BiSeries::monomial(n, D, BiKey{MultiIndex(n, 0), e, 0, 0}, GaussRat(1));
}

BiSeries quadric_w(const SignatureForm &form, int D)
{
    return BiSeries::u(form.n(), D) + GaussRat::i() * BiSeries::hermitian_form(form, D, SeriesForm::trace);
}

// g - 2i sum_j sign_j zbar_j f_j in the full encoding.
BiSeries operator_argument(const NormalizedPair &p, const SignatureForm &form, int D)
{
    const int n = form.n();
    BiSeries x = p.g.as_bi();
    for (int j = 0; j < n; ++j) {
        if (p.f[j].is_zero()) {
            continue;
        }
        GaussRat c(mpq_class(0), mpq_class(-2 * form.sign(j)));
        x += (zbar_monomial(n, D, j) * p.f[j].as_bi()) * c;
    }
    return x;
}

} // namespace

RealSeries apply_L(const NormalizedPair &p, const SignatureForm &form, bool check_normalization)
{
    check_pair_shape(p, form);
    if (check_normalization && !satisfies_normalization(p)) {
        throw SeriesError("apply_L: (f, g) violates the normalization");
    }
    const int D = p.g.cap();
    BiSeries y = substitute_w(operator_argument(p, form, D), quadric_w(form, D));
    return RealSeries(y.imag_part());
}

// ---------------------------------------------------------------------------

namespace
{

void monomials_of_weight(int n, int s, std::vector<HoloKey> &out)
{
    for (int gamma = 0; 2 * gamma <= s; ++gamma) {
        int deg = s - 2 * gamma;
        MultiIndex a(n, 0);
        // Enumerate compositions of deg into n parts in lexicographic order.
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == n - 1) {
                a[pos] = left;
                out.push_back(HoloKey{a, gamma});
                return;
            }
            for (int v = left; v >= 0; --v) {
                a[pos] = v;
                rec(pos + 1, left - v);
            }
        };
        if (n == 0) {
            if (deg == 0) {
                out.push_back(HoloKey{a, gamma});
            }
            continue;
        }
        rec(0, deg);
    }
}

bool canonical(const BiKey &k) { return k.alpha <= k.beta; }

bool pinned(const Unknown &u, int n, unsigned constraints)
{
    if ((constraints & no_constant) && u.key.weight() == 0) {
        return true;
    }
    if ((constraints & jacobian) && u.key.degree() == 1) {
        return true;
    }
    if ((constraints & re_gww) && u.slot == n && !u.imag && u.key.gamma == 2 && abs_degree(u.key.alpha) == 0) {
        return true;
    }
    return false;
}

struct RowKey {
    BiKey key;
    bool imag;
    friend bool operator<(const RowKey &a, const RowKey &b)
    {
        if (a.key == b.key) {
            return a.imag < b.imag;
        }
        return a.key < b.key;
    }
};

struct BaseSystem {
    std::vector<Unknown> unknowns;
    std::vector<EquationRow> rows;
    std::vector<SparseRow> matrix;
    std::map<RowKey, std::size_t> row_index;
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> blocks;
};

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

std::shared_ptr<const BaseSystem> build_base(int sigma, const SignatureForm &form, unsigned constraints)
{
    const int n = form.n();
    auto base = std::make_shared<BaseSystem>();

    std::vector<HoloKey> fkeys, gkeys;
    if (sigma >= 1) {
        monomials_of_weight(n, sigma - 1, fkeys);
    }
    monomials_of_weight(n, sigma, gkeys);
    for (int j = 0; j < n; ++j) {
        for (const auto &k : fkeys) {
            base->unknowns.push_back({j, k, false});
            base->unknowns.push_back({j, k, true});
        }
    }
    for (const auto &k : gkeys) {
        base->unknowns.push_back({n, k, false});
        base->unknowns.push_back({n, k, true});
    }

    const int D = sigma;
    BiSeries W = quadric_w(form, D);
    std::vector<std::vector<std::pair<RowKey, mpq_class>>> columns(base->unknowns.size());
    std::set<RowKey> row_keys;
    for (std::size_t c = 0; c < base->unknowns.size(); ++c) {
        const Unknown &u = base->unknowns[c];
        NormalizedPair p = NormalizedPair::zero(n, D);
        GaussRat coef = u.imag ? GaussRat::i() : GaussRat(1);
        if (u.slot == n) {
            p.g.add_term(u.key, coef);
        } else {
            p.f[u.slot].add_term(u.key, coef);
        }
        BiSeries out = substitute_w(operator_argument(p, form, D), W).imag_part();
        for (const auto &[k, v] : out.terms()) {
            if (!canonical(k)) {
                continue;
            }
            if (sgn(v.re()) != 0) {
                columns[c].push_back({RowKey{k, false}, v.re()});
                row_keys.insert(RowKey{k, false});
            }
            if (k.alpha != k.beta && sgn(v.im()) != 0) {
                columns[c].push_back({RowKey{k, true}, v.im()});
                row_keys.insert(RowKey{k, true});
            }
        }
    }
    for (const auto &rk : row_keys) {
        base->row_index.emplace(rk, base->rows.size());
        base->rows.push_back(EquationRow{false, rk.key, rk.imag, 0});
    }
    base->matrix.assign(base->rows.size(), {});
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (const auto &[rk, v] : columns[c]) {
            base->matrix[base->row_index.at(rk)].push_back({c, v});
        }
    }
    for (std::size_t c = 0; c < base->unknowns.size(); ++c) {
        if (pinned(base->unknowns[c], n, constraints)) {
            EquationRow r;
            r.constraint = true;
            r.pinned = c;
            base->rows.push_back(r);
            base->matrix.push_back({{c, mpq_class(1)}});
        }
    }
    for (auto &row : base->matrix) {
        std::sort(row.begin(), row.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    }

    UnionFind uf(base->unknowns.size());
    for (const auto &row : base->matrix) {
        for (std::size_t t = 1; t < row.size(); ++t) {
            uf.unite(row[0].first, row[t].first);
        }
    }
    std::map<std::size_t, std::size_t> block_of_root;
    for (std::size_t c = 0; c < base->unknowns.size(); ++c) {
        std::size_t root = uf.find(c);
        auto [it, fresh] = block_of_root.emplace(root, base->blocks.size());
        if (fresh) {
            base->blocks.emplace_back();
        }
        base->blocks[it->second].second.push_back(c);
    }
    for (std::size_t r = 0; r < base->matrix.size(); ++r) {
        const auto &row = base->matrix[r];
        base->blocks[block_of_root.at(uf.find(row.front().first))].first.push_back(r);
    }
    return base;
}

std::shared_ptr<const BaseSystem> cached_base(int sigma, const SignatureForm &form, unsigned constraints)
{
    using Key = std::tuple<std::vector<int>, int, unsigned>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const BaseSystem>> cache;
    Key key{form.signs(), sigma, constraints};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) {
            return it->second;
        }
    }
    auto base = build_base(sigma, form, constraints);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, base).first->second;
}

} // namespace

JetSystem assemble_system(int sigma, const SignatureForm &form, const RealSeries &rhs, unsigned constraints)
{
    if (sigma < 0) {
        throw std::invalid_argument("assemble_system: sigma must be nonnegative");
    }
    if (rhs.form() != SeriesForm::trace || rhs.n() != form.n()) {
        throw SeriesError("assemble_system: rhs must be a trace-form series in n variables");
    }
    auto base = cached_base(sigma, form, constraints);
    JetSystem sys;
    sys.sigma = sigma;
    sys.form = form;
    sys.constraints = constraints;
    sys.unknowns = base->unknowns;
    sys.rows = base->rows;
    sys.matrix = base->matrix;
    sys.blocks = base->blocks;
    sys.rhs.assign(sys.rows.size(), mpq_class(0));

    auto place = [&](const RowKey &rk, const mpq_class &v) {
        if (sgn(v) == 0) {
            return;
        }
        auto it = base->row_index.find(rk);
        if (it != base->row_index.end()) {
            sys.rhs[it->second] = v;
            return;
        }
        // No unknown reaches this monomial: a zero row of its own.
        sys.blocks.push_back({{sys.rows.size()}, {}});
        sys.rows.push_back(EquationRow{false, rk.key, rk.imag, 0});
        sys.matrix.emplace_back();
        sys.rhs.push_back(v);
    };
    for (const auto &[k, v] : rhs.terms()) {
        if (k.weight() != sigma || !canonical(k)) {
            continue;
        }
        place(RowKey{k, false}, v.re());
        if (k.alpha != k.beta) {
            place(RowKey{k, true}, v.im());
        }
    }
    return sys;
}

JetSolution solve_or_refute(const JetSystem &sys)
{
    JetSolution out;
    out.solution.assign(sys.unknowns.size(), mpq_class(0));
    for (const auto &[rows, cols] : sys.blocks) {
        if (rows.empty()) {
            continue;
        }
        std::map<std::size_t, std::size_t> local;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            local.emplace(cols[j], j);
        }
        QMatrix m(rows.size(), QVector(cols.size()));
        QVector b(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto &[c, v] : sys.matrix[rows[i]]) {
                m[i][local.at(c)] = v;
            }
            b[i] = sys.rhs[rows[i]];
        }
        if (std::all_of(b.begin(), b.end(), [](const mpq_class &x) { return sgn(x) == 0; })) {
            continue;
        }
        SolveResult res = solve_or_refute(m, b);
        if (!res.consistent) {
            out.consistent = false;
            out.solution.clear();
            out.certificate.assign(sys.rows.size(), mpq_class(0));
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out.certificate[rows[i]] = res.certificate[i];
            }
            return out;
        }
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out.solution[cols[j]] = res.solution[j];
        }
    }
    out.consistent = true;
    return out;
}

bool verify_certificate(const JetSystem &sys, const QVector &y)
{
    if (y.size() != sys.rows.size()) {
        return false;
    }
    std::vector<mpq_class> yM(sys.unknowns.size(), mpq_class(0));
    mpq_class yb = 0;
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
        if (sgn(y[r]) == 0) {
            continue;
        }
        for (const auto &[c, v] : sys.matrix[r]) {
            yM[c] += y[r] * v;
        }
        yb += y[r] * sys.rhs[r];
    }
    return sgn(yb) != 0 && std::all_of(yM.begin(), yM.end(), [](const mpq_class &x) { return sgn(x) == 0; });
}

bool verify_solution(const JetSystem &sys, const QVector &x)
{
    if (x.size() != sys.unknowns.size()) {
        return false;
    }
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
        mpq_class s = 0;
        for (const auto &[c, v] : sys.matrix[r]) {
            s += v * x[c];
        }
        if (s != sys.rhs[r]) {
            return false;
        }
    }
    return true;
}

NormalizedPair unknowns_to_pair(const JetSystem &sys, const QVector &x)
{
    const int n = sys.form.n();
    NormalizedPair p = NormalizedPair::zero(n, sys.sigma);
    for (std::size_t c = 0; c < sys.unknowns.size(); ++c) {
        if (sgn(x[c]) == 0) {
            continue;
        }
        const Unknown &u = sys.unknowns[c];
        GaussRat v = u.imag ? GaussRat(mpq_class(0), x[c]) : GaussRat(x[c]);
        if (u.slot == n) {
            p.g.add_term(u.key, v);
        } else {
            p.f[u.slot].add_term(u.key, v);
        }
    }
    return p;
}

std::vector<NormalizedPair> kernel_basis(int sigma, const SignatureForm &form, unsigned constraints)
{
    JetSystem sys = assemble_system(sigma, form, RealSeries(form.n(), sigma, SeriesForm::trace), constraints);
    std::vector<NormalizedPair> out;
    for (const auto &[rows, cols] : sys.blocks) {
        if (cols.empty()) {
            continue;
        }
        std::map<std::size_t, std::size_t> local;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            local.emplace(cols[j], j);
        }
        QMatrix m(rows.size(), QVector(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto &[c, v] : sys.matrix[rows[i]]) {
                m[i][local.at(c)] = v;
            }
        }
        for (const auto &v : nullspace(m, cols.size())) {
            QVector x(sys.unknowns.size(), mpq_class(0));
            for (std::size_t j = 0; j < cols.size(); ++j) {
                x[cols[j]] = v[j];
            }
            out.push_back(unknowns_to_pair(sys, x));
        }
    }
    return out;
}

std::size_t kernel_dimension(int sigma, const SignatureForm &form, unsigned constraints)
{
    JetSystem sys = assemble_system(sigma, form, RealSeries(form.n(), sigma, SeriesForm::trace), constraints);
    std::size_t dim = 0;
    for (const auto &[rows, cols] : sys.blocks) {
        std::map<std::size_t, std::size_t> local;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            local.emplace(cols[j], j);
        }
        QMatrix m(rows.size(), QVector(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto &[c, v] : sys.matrix[rows[i]]) {
                m[i][local.at(c)] = v;
            }
        }
        dim += cols.size() - rank(m, cols.size());
    }
    return dim;
}

const char *to_string(SharpnessStatus s)
{
    switch (s) {
    case SharpnessStatus::inconsistent:
        return "inconsistent";
    case SharpnessStatus::only_zero_solution:
        return "only_zero_solution";
    case SharpnessStatus::violation:
        return "violation";
    }
    return "unknown";
}

SharpnessReport verify_thm12_instance(const RealSeries &A, const SignatureForm &form, bool enforce_class)
{
    if (A.form() != SeriesForm::full || A.n() != form.n()) {
        throw std::invalid_argument("verify_thm12_instance: expected a full-form series in n variables");
    }
    SharpnessReport rep;
    rep.precondition_holds = in_class_S(A, form.n() - 1);
    if (enforce_class && !rep.precondition_holds) {
        throw std::invalid_argument("verify_thm12_instance: A is not in S_{n-1}");
    }
    const int D = A.cap();
    RealSeries A0 = restrict_to_quadric(A, form);
    rep.restriction_zero = A0.is_zero();
    if (rep.restriction_zero) {
        rep.series_zero = A.is_zero();
        rep.status = SharpnessStatus::only_zero_solution;
        for (int sigma = 0; sigma <= D; ++sigma) {
            if (kernel_dimension(sigma, form) != 0) {
                rep.status = SharpnessStatus::violation;
                rep.sigma = sigma;
                break;
            }
        }
        return rep;
    }
    NormalizedPair acc = NormalizedPair::zero(form.n(), D);
    for (int sigma = 0; sigma <= D; ++sigma) {
        JetSystem sys = assemble_system(sigma, form, A0);
        JetSolution sol = solve_or_refute(sys);
        if (!sol.consistent) {
            rep.status = SharpnessStatus::inconsistent;
            rep.sigma = sigma;
            rep.certificate_verified = verify_certificate(sys, sol.certificate);
            rep.certificate_support = static_cast<std::size_t>(
                std::count_if(sol.certificate.begin(), sol.certificate.end(),
                              [](const mpq_class &x) { return sgn(x) != 0; }));
            return rep;
        }
        NormalizedPair piece = unknowns_to_pair(sys, sol.solution);
        for (int j = 0; j < form.n(); ++j) {
            for (const auto &[k, c] : piece.f[j].terms()) {
                acc.f[j].add_term(k, c);
            }
        }
        for (const auto &[k, c] : piece.g.terms()) {
            acc.g.add_term(k, c);
        }
    }
    rep.status = SharpnessStatus::violation;
    rep.solution = std::move(acc);
    return rep;
}

} // namespace hyperq
