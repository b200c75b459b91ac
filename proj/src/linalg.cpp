#include <hyperq/linalg.hpp>

#include <stdexcept>
#include <utility>

namespace hyperq
{

bool norm_root(const mpq_class &q, GaussRat &out)
{
    if (sgn(q) <= 0) {
        return false;
    }
    mpq_class r;
    if (rational_sqrt(q, r)) {
        out = GaussRat(r);
        return true;
    }
    // |(x + iy)/den|^2 = q  <=>  x^2 + y^2 = num * den.
    mpz_class target = q.get_num() * q.get_den();
    if (target > mpz_class("1000000000000")) {
        return false;
    }
    mpz_class x(0), rest, y;
    while (x * x <= target) {
        rest = target - x * x;
        if (mpz_perfect_square_p(rest.get_mpz_t())) {
            mpz_sqrt(y.get_mpz_t(), rest.get_mpz_t());
            mpq_class re(x, q.get_den()), im(y, q.get_den());
            re.canonicalize();
            im.canonicalize();
            out = GaussRat(re, im);
            return true;
        }
        ++x;
    }
    return false;
}

GMatrix GMatrix::identity(std::size_t n)
{
    GMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = GaussRat(1);
    }
    return m;
}

GMatrix GMatrix::adjoint() const
{
    GMatrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i) {
        for (std::size_t j = 0; j < c_; ++j) {
            t(j, i) = (*this)(i, j).conj();
        }
    }
    return t;
}

bool GMatrix::is_hermitian() const { return r_ == c_ && adjoint() == *this; }

bool GMatrix::is_zero() const
{
    for (const auto &x : a_) {
        if (!x.is_zero()) {
            return false;
        }
    }
    return true;
}

GMatrix operator*(const GMatrix &a, const GMatrix &b)
{
    if (a.c_ != b.r_) {
        throw std::invalid_argument("matrix product shape mismatch");
    }
    GMatrix out(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i) {
        for (std::size_t k = 0; k < a.c_; ++k) {
            const GaussRat &x = a(i, k);
            if (x.is_zero()) {
                continue;
            }
            for (std::size_t j = 0; j < b.c_; ++j) {
                if (!b(k, j).is_zero()) {
                    out(i, j) += x * b(k, j);
                }
            }
        }
    }
    return out;
}

GMatrix operator+(const GMatrix &a, const GMatrix &b)
{
    if (a.r_ != b.r_ || a.c_ != b.c_) {
        throw std::invalid_argument("matrix sum shape mismatch");
    }
    GMatrix out = a;
    for (std::size_t i = 0; i < out.a_.size(); ++i) {
        out.a_[i] += b.a_[i];
    }
    return out;
}

GMatrix operator-(const GMatrix &a, const GMatrix &b)
{
    if (a.r_ != b.r_ || a.c_ != b.c_) {
        throw std::invalid_argument("matrix difference shape mismatch");
    }
    GMatrix out = a;
    for (std::size_t i = 0; i < out.a_.size(); ++i) {
        out.a_[i] -= b.a_[i];
    }
    return out;
}

GMatrix diagonal(const std::vector<int> &d)
{
    GMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = GaussRat(d[i]);
    }
    return m;
}

std::size_t rank(GMatrix m)
{
    std::size_t r = 0;
    for (std::size_t col = 0; col < m.cols() && r < m.rows(); ++col) {
        std::size_t p = r;
        while (p < m.rows() && m(p, col).is_zero()) {
            ++p;
        }
        if (p == m.rows()) {
            continue;
        }
        if (p != r) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(p, j), m(r, j));
            }
        }
        GaussRat inv = GaussRat(1) / m(r, col);
        for (std::size_t i = r + 1; i < m.rows(); ++i) {
            if (m(i, col).is_zero()) {
                continue;
            }
            GaussRat f = m(i, col) * inv;
            for (std::size_t j = col; j < m.cols(); ++j) {
                if (!m(r, j).is_zero()) {
                    m(i, j) -= f * m(r, j);
                }
            }
        }
        ++r;
    }
    return r;
}

GMatrix inverse(const GMatrix &m)
{
    const std::size_t n = m.rows();
    if (m.cols() != n) {
        throw std::domain_error("inverse of a non-square matrix");
    }
    GMatrix a = m;
    GMatrix inv = GMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t p = col;
        while (p < n && a(p, col).is_zero()) {
            ++p;
        }
        if (p == n) {
            throw std::domain_error("singular matrix");
        }
        if (p != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(p, j), a(col, j));
                std::swap(inv(p, j), inv(col, j));
            }
        }
        GaussRat pinv = GaussRat(1) / a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) *= pinv;
            inv(col, j) *= pinv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a(i, col).is_zero()) {
                continue;
            }
            GaussRat f = a(i, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

std::vector<HermitianSquare> hermitian_diagonalize(const GMatrix &c)
{
    if (!c.is_hermitian()) {
        throw std::invalid_argument("hermitian_diagonalize: matrix is not Hermitian");
    }
    const std::size_t n = c.rows();
    GMatrix m = c;
    std::vector<HermitianSquare> out;

    auto subtract_rank_one = [&](const std::vector<GaussRat> &y, const mpq_class &q) {
        GaussRat qinv = GaussRat(1 / q);
        for (std::size_t p = 0; p < n; ++p) {
            if (y[p].is_zero()) {
                continue;
            }
            GaussRat yp = y[p] * qinv;
            for (std::size_t s = 0; s < n; ++s) {
                if (!y[s].is_zero()) {
                    m(p, s) -= yp * y[s].conj();
                }
            }
        }
        std::vector<GaussRat> v(n);
        for (std::size_t p = 0; p < n; ++p) {
            v[p] = y[p] * qinv;
        }
        out.push_back({q, std::move(v)});
    };

    while (true) {
        std::size_t piv = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!m(i, i).is_zero()) {
                piv = i;
                break;
            }
        }
        if (piv < n) {
            std::vector<GaussRat> y(n);
            for (std::size_t p = 0; p < n; ++p) {
                y[p] = m(p, piv);
            }
            mpq_class q = m(piv, piv).re();
            subtract_rank_one(y, q);
            continue;
        }
        std::size_t pi = n, pj = n;
        for (std::size_t i = 0; i < n && pi == n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!m(i, j).is_zero()) {
                    pi = i;
                    pj = j;
                    break;
                }
            }
        }
        if (pi == n) {
            break;
        }
        // x = e_i + conj(c_ij) e_j gives x^* C x = 2 |c_ij|^2 > 0.
        GaussRat s = m(pi, pj).conj();
        std::vector<GaussRat> y(n);
        for (std::size_t p = 0; p < n; ++p) {
            y[p] = m(p, pi) + s * m(p, pj);
        }
        mpq_class q = 2 * m(pi, pj).norm();
        subtract_rank_one(y, q);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace
{

mpz_class row_scale(const std::vector<mpq_class> &row, const mpq_class &extra)
{
    mpz_class l(1);
    for (const auto &x : row) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
    }
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), extra.get_den().get_mpz_t());
    return l;
}

} // namespace

SolveResult solve_or_refute(const QMatrix &m, const QVector &b)
{
    const std::size_t r = m.size();
    if (b.size() != r) {
        throw std::invalid_argument("solve_or_refute: rhs length mismatch");
    }
    const std::size_t c = r == 0 ? 0 : m.front().size();
    const std::size_t width = c + 1 + r;
    std::vector<std::vector<mpz_class>> e(r, std::vector<mpz_class>(width));
    std::vector<mpz_class> scale(r);
    for (std::size_t i = 0; i < r; ++i) {
        if (m[i].size() != c) {
            throw std::invalid_argument("solve_or_refute: ragged matrix");
        }
        scale[i] = row_scale(m[i], b[i]);
        for (std::size_t j = 0; j < c; ++j) {
            mpq_class v = m[i][j] * scale[i];
            e[i][j] = v.get_num();
        }
        mpq_class v = b[i] * scale[i];
        e[i][c] = v.get_num();
        e[i][c + 1 + i] = 1;
    }

    // Fraction-free Bareiss elimination on the coefficient columns.
    std::vector<std::size_t> pivot_cols;
    mpz_class prev(1);
    std::size_t pr = 0;
    for (std::size_t col = 0; col < c && pr < r; ++col) {
        std::size_t p = pr;
        while (p < r && e[p][col] == 0) {
            ++p;
        }
        if (p == r) {
            continue;
        }
        std::swap(e[p], e[pr]);
        const mpz_class piv = e[pr][col];
        for (std::size_t i = pr + 1; i < r; ++i) {
            const mpz_class f = e[i][col];
            for (std::size_t j = col + 1; j < width; ++j) {
                mpz_class t = piv * e[i][j] - f * e[pr][j];
                mpz_divexact(e[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            e[i][col] = 0;
        }
        prev = piv;
        pivot_cols.push_back(col);
        ++pr;
    }

    SolveResult res;
    res.rank = pr;
    for (std::size_t i = pr; i < r; ++i) {
        if (e[i][c] != 0) {
            // Rows were permuted, but the identity block tracks original rows.
            res.consistent = false;
            res.certificate.assign(r, mpq_class(0));
            for (std::size_t k = 0; k < r; ++k) {
                res.certificate[k] = mpq_class(e[i][c + 1 + k] * scale[k]);
            }
            return res;
        }
    }
    res.consistent = true;
    res.solution.assign(c, mpq_class(0));
    for (std::size_t t = pr; t-- > 0;) {
        std::size_t pc = pivot_cols[t];
        mpq_class acc(e[t][c]);
        for (std::size_t j = pc + 1; j < c; ++j) {
            if (e[t][j] != 0 && sgn(res.solution[j]) != 0) {
                acc -= mpq_class(e[t][j]) * res.solution[j];
            }
        }
        res.solution[pc] = acc / mpq_class(e[t][pc]);
    }
    return res;
}

namespace
{

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(QMatrix &a, std::size_t cols)
{
    std::vector<std::size_t> piv;
    std::size_t r = 0;
    for (std::size_t col = 0; col < cols && r < a.size(); ++col) {
        std::size_t p = r;
        while (p < a.size() && sgn(a[p][col]) == 0) {
            ++p;
        }
        if (p == a.size()) {
            continue;
        }
        std::swap(a[p], a[r]);
        mpq_class inv = 1 / a[r][col];
        for (std::size_t j = col; j < cols; ++j) {
            a[r][j] *= inv;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == r || sgn(a[i][col]) == 0) {
                continue;
            }
            mpq_class f = a[i][col];
            for (std::size_t j = col; j < cols; ++j) {
                if (sgn(a[r][j]) != 0) {
                    a[i][j] -= f * a[r][j];
                }
            }
        }
        piv.push_back(col);
        ++r;
    }
    return piv;
}

} // namespace

std::size_t rank(const QMatrix &m, std::size_t cols)
{
    QMatrix a = m;
    return rref(a, cols).size();
}

std::vector<QVector> nullspace(const QMatrix &m, std::size_t cols)
{
    QMatrix a = m;
    auto piv = rref(a, cols);
    std::vector<bool> is_piv(cols, false);
    for (auto p : piv) {
        is_piv[p] = true;
    }
    std::vector<QVector> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_piv[f]) {
            continue;
        }
        QVector v(cols, mpq_class(0));
        v[f] = 1;
        for (std::size_t t = 0; t < piv.size(); ++t) {
            v[piv[t]] = -a[t][f];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace hyperq
