#ifndef HYPERQ_CHERN_MOSER_HPP
#define HYPERQ_CHERN_MOSER_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <hyperq/linalg.hpp>
#include <hyperq/series.hpp>
#include <hyperq/signature.hpp>

namespace hyperq
{

// (f, g) with f in C^n; all components share (n, D).
struct NormalizedPair {
    std::vector<HoloSeries> f;
    HoloSeries g;

    static NormalizedPair zero(int n, int D);
    int n() const { return static_cast<int>(f.size()); }
    bool is_zero() const;
    friend bool operator==(const NormalizedPair &, const NormalizedPair &) = default;
};

// d(f,g)(0) = 0, no constant terms, Re of the w^2 coefficient of g is 0.
bool satisfies_normalization(const NormalizedPair &p);

// Im(g - 2i sum_j sign_j zbar_j f_j) at w = u + i<z,zbar>, as a trace-form
// real series. Throws SeriesError when check_normalization is set and p
// violates the normalization.
RealSeries apply_L(const NormalizedPair &p, const SignatureForm &form, bool check_normalization = true);

// Constraint groups that can be switched off to expose the stability-group
// directions of the homogeneous equation.
enum ConstraintGroup : unsigned {
    no_constant = 1u,
    jacobian = 2u,
    re_gww = 4u,
    all_constraints = 7u,
};

// One real unknown: Re or Im of the coefficient of key in f_slot (slot < n)
// or in g (slot == n).
struct Unknown {
    int slot = 0;
    HoloKey key;
    bool imag = false;
};

// Either Re/Im of the coefficient of a canonical (z, zbar, u) monomial in the
// output, or a constraint pinning one unknown to zero.
struct EquationRow {
    bool constraint = false;
    BiKey key;
    bool imag = false;
    std::size_t pinned = 0;
};

using SparseRow = std::vector<std::pair<std::size_t, mpq_class>>;

// L(f^(sigma-1), g^(sigma)) = rhs^(sigma) over real coefficients. The matrix
// depends only on (form, sigma, constraints) and is shared between systems.
struct JetSystem {
    int sigma = 0;
    SignatureForm form;
    unsigned constraints = all_constraints;
    std::vector<Unknown> unknowns;
    std::vector<EquationRow> rows;
    std::vector<SparseRow> matrix;
    QVector rhs;
    // Connected components of the sparsity pattern; each is solved separately.
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> blocks;
};

// rhs must be a trace-form real series; only its weight-sigma part is used.
JetSystem assemble_system(int sigma, const SignatureForm &form, const RealSeries &rhs,
                          unsigned constraints = all_constraints);

struct JetSolution {
    bool consistent = false;
    // Real unknowns when consistent (free variables zero).
    QVector solution;
    // Row weights y with y^T M = 0 and y^T rhs != 0 when inconsistent.
    QVector certificate;
};

JetSolution solve_or_refute(const JetSystem &sys);

// Exact check of a certificate against the whole system.
bool verify_certificate(const JetSystem &sys, const QVector &y);
// Exact check M x == rhs.
bool verify_solution(const JetSystem &sys, const QVector &x);

// Converts real unknown values back into (f, g) fragments with cap = sigma.
NormalizedPair unknowns_to_pair(const JetSystem &sys, const QVector &x);

std::vector<NormalizedPair> kernel_basis(int sigma, const SignatureForm &form,
                                         unsigned constraints = all_constraints);
std::size_t kernel_dimension(int sigma, const SignatureForm &form, unsigned constraints = all_constraints);

enum class SharpnessStatus { inconsistent, only_zero_solution, violation };

const char *to_string(SharpnessStatus s);

struct SharpnessReport {
    bool precondition_holds = false;
    bool restriction_zero = false;
    // Only meaningful when restriction_zero: whether A vanishes to degree D.
    bool series_zero = false;
    SharpnessStatus status = SharpnessStatus::only_zero_solution;
    // Degree of the inconsistent block, or -1.
    int sigma = -1;
    bool certificate_verified = false;
    std::size_t certificate_support = 0;
    // When every degree is solvable: the solution found.
    std::optional<NormalizedPair> solution;
};

// Throws std::invalid_argument when A is not in S_{n-1} and enforce_class is
// set. Runs degree by degree until an inconsistent system is found.
SharpnessReport verify_thm12_instance(const RealSeries &A, const SignatureForm &form, bool enforce_class = true);

} // namespace hyperq

#endif
