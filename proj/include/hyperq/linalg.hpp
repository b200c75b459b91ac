#ifndef HYPERQ_LINALG_HPP
#define HYPERQ_LINALG_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include <hyperq/gauss_rational.hpp>

namespace hyperq
{

// Dense matrix over Q(i), row-major.
class GMatrix
{
public:
    GMatrix() = default;
    GMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}

    static GMatrix identity(std::size_t n);

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    GaussRat &operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const GaussRat &operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    GMatrix adjoint() const;
    bool is_hermitian() const;
    bool is_zero() const;

    friend GMatrix operator*(const GMatrix &a, const GMatrix &b);
    friend GMatrix operator+(const GMatrix &a, const GMatrix &b);
    friend GMatrix operator-(const GMatrix &a, const GMatrix &b);
    friend bool operator==(const GMatrix &, const GMatrix &) = default;

private:
    std::size_t r_ = 0;
    std::size_t c_ = 0;
    std::vector<GaussRat> a_;
};

GMatrix diagonal(const std::vector<int> &d);
std::size_t rank(GMatrix m);
// Throws std::domain_error when singular.
GMatrix inverse(const GMatrix &m);

// One rank-one term d * v v^* of a Hermitian congruence diagonalization.
struct HermitianSquare {
    mpq_class d;
    std::vector<GaussRat> v;
};

// Writes a Hermitian matrix C as sum_k d_k v_k v_k^* with d_k nonzero real and
// the v_k linearly independent. Zero-diagonal stages pivot on e_i + conj(c_ij) e_j,
// which plays the role of a 2x2 block and yields one square of each sign.
std::vector<HermitianSquare> hermitian_diagonalize(const GMatrix &c);

// ---------------------------------------------------------------------------
// Exact rational linear algebra, fraction-free (Bareiss) elimination.

using QMatrix = std::vector<std::vector<mpq_class>>;
using QVector = std::vector<mpq_class>;

struct SolveResult {
    bool consistent = false;
    // A particular solution (free variables set to zero) when consistent.
    QVector solution;
    // y with y^T M = 0 and y^T b != 0 when inconsistent.
    QVector certificate;
    std::size_t rank = 0;
};

SolveResult solve_or_refute(const QMatrix &m, const QVector &b);
std::size_t rank(const QMatrix &m, std::size_t cols);
// Basis of {x : M x = 0}.
std::vector<QVector> nullspace(const QMatrix &m, std::size_t cols);

} // namespace hyperq

#endif
