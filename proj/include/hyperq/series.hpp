#ifndef HYPERQ_SERIES_HPP
#define HYPERQ_SERIES_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <hyperq/gauss_rational.hpp>
#include <hyperq/signature.hpp>

namespace hyperq
{

using MultiIndex = std::vector<int>;

inline int abs_degree(const MultiIndex &a)
{
    int s = 0;
    for (int x : a) {
        s += x;
    }
    return s;
}

class SeriesError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Key of a monomial z^alpha w^gamma. Ordered by weighted degree first so that
// iteration visits graded pieces in increasing order.
struct HoloKey {
    MultiIndex alpha;
    int gamma = 0;

    int weight() const { return abs_degree(alpha) + 2 * gamma; }
    int degree() const { return abs_degree(alpha) + gamma; }

    friend bool operator<(const HoloKey &a, const HoloKey &b)
    {
        int wa = a.weight(), wb = b.weight();
        if (wa != wb) {
            return wa < wb;
        }
        if (a.alpha != b.alpha) {
            return a.alpha < b.alpha;
        }
        return a.gamma < b.gamma;
    }
    friend bool operator==(const HoloKey &, const HoloKey &) = default;
};

// Key of z^alpha zbar^beta w^gamma wbar^delta. In trace form gamma is the
// exponent of u and delta is always 0.
struct BiKey {
    MultiIndex alpha;
    MultiIndex beta;
    int gamma = 0;
    int delta = 0;

    int weight() const
    {
        return abs_degree(alpha) + abs_degree(beta) + 2 * gamma + 2 * delta;
    }
    HoloKey holo() const { return {alpha, gamma}; }
    HoloKey antiholo() const { return {beta, delta}; }

    friend bool operator<(const BiKey &a, const BiKey &b)
    {
        int wa = a.weight(), wb = b.weight();
        if (wa != wb) {
            return wa < wb;
        }
        if (a.alpha != b.alpha) {
            return a.alpha < b.alpha;
        }
        if (a.beta != b.beta) {
            return a.beta < b.beta;
        }
        if (a.gamma != b.gamma) {
            return a.gamma < b.gamma;
        }
        return a.delta < b.delta;
    }
    friend bool operator==(const BiKey &, const BiKey &) = default;
};

// Full: series in (z, zbar, w, wbar). Trace: series in (z, zbar, u).
enum class SeriesForm { full, trace };

class BiSeries;

// Truncated holomorphic series in (z, w), z in C^n, weighted degree <= D.
class HoloSeries
{
public:
    using Terms = std::map<HoloKey, GaussRat>;

    HoloSeries() = default;
    HoloSeries(int n, int D);

    static HoloSeries constant(int n, int D, const GaussRat &c);
    static HoloSeries z(int n, int D, int j);
    static HoloSeries w(int n, int D);
    static HoloSeries monomial(int n, int D, const HoloKey &k, const GaussRat &c);

    int n() const { return n_; }
    int cap() const { return D_; }
    const Terms &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    GaussRat coeff(const HoloKey &k) const;
    // Adds c to the coefficient at k; keys above the cap are dropped.
    void add_term(const HoloKey &k, const GaussRat &c);

    GaussRat constant_term() const;
    // Lowest weighted degree present, or -1 for the zero series.
    int order() const;
    HoloSeries weighted_component(int sigma) const;
    // Terms of ordinary degree <= 1 (constant plus linear part).
    HoloSeries affine_part() const;

    HoloSeries &operator+=(const HoloSeries &o);
    HoloSeries &operator-=(const HoloSeries &o);
    HoloSeries &operator*=(const GaussRat &c);
    HoloSeries operator-() const;

    friend HoloSeries operator+(HoloSeries a, const HoloSeries &b) { return a += b; }
    friend HoloSeries operator-(HoloSeries a, const HoloSeries &b) { return a -= b; }
    friend HoloSeries operator*(HoloSeries a, const GaussRat &c) { return a *= c; }
    friend HoloSeries operator*(const GaussRat &c, HoloSeries a) { return a *= c; }
    friend HoloSeries operator*(const HoloSeries &a, const HoloSeries &b);
    friend bool operator==(const HoloSeries &, const HoloSeries &) = default;

    HoloSeries pow(int k) const;

    // f(z, w) as a series in the full (z, zbar, w, wbar) encoding.
    BiSeries as_bi() const;
    // conj(f)(zbar, wbar).
    BiSeries conj_bi() const;

private:
    void check_compatible(const HoloSeries &o) const;

    int n_ = 0;
    int D_ = 0;
    Terms terms_;
};

// 1/q to weighted degree D. Throws SeriesError when q(0) = 0.
HoloSeries invert_unit(const HoloSeries &q);

// Complex-valued truncated series in either encoding. No reality invariant.
class BiSeries
{
public:
    using Terms = std::map<BiKey, GaussRat>;

    BiSeries() = default;
    BiSeries(int n, int D, SeriesForm form = SeriesForm::full);

    static BiSeries constant(int n, int D, const GaussRat &c, SeriesForm form = SeriesForm::full);
    static BiSeries monomial(int n, int D, const BiKey &k, const GaussRat &c,
                             SeriesForm form = SeriesForm::full);
    // u as a trace-form series.
    static BiSeries u(int n, int D);
    // <z, zbar>_form = sum_j sign_j |z_j|^2 in the requested encoding.
    static BiSeries hermitian_form(const SignatureForm &form, int D, SeriesForm enc);

    int n() const { return n_; }
    int cap() const { return D_; }
    SeriesForm form() const { return form_; }
    const Terms &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    GaussRat coeff(const BiKey &k) const;
    void add_term(const BiKey &k, const GaussRat &c);

    int order() const;
    BiSeries weighted_component(int sigma) const;
    BiSeries conj() const;
    bool is_real() const;
    BiSeries real_part() const;
    BiSeries imag_part() const;

    BiSeries &operator+=(const BiSeries &o);
    BiSeries &operator-=(const BiSeries &o);
    BiSeries &operator*=(const GaussRat &c);
    BiSeries operator-() const;

    friend BiSeries operator+(BiSeries a, const BiSeries &b) { return a += b; }
    friend BiSeries operator-(BiSeries a, const BiSeries &b) { return a -= b; }
    friend BiSeries operator*(BiSeries a, const GaussRat &c) { return a *= c; }
    friend BiSeries operator*(const GaussRat &c, BiSeries a) { return a *= c; }
    friend BiSeries operator*(const BiSeries &a, const BiSeries &b);
    friend bool operator==(const BiSeries &, const BiSeries &) = default;

    BiSeries pow(int k) const;

    void check_compatible(const BiSeries &o) const;

private:
    int n_ = 0;
    int D_ = 0;
    SeriesForm form_ = SeriesForm::full;
    Terms terms_;
};

// f(z, w) * conj(g)(zbar, wbar), computed directly on the supports.
BiSeries outer_product(const HoloSeries &f, const HoloSeries &g);

// Real-valued series: a BiSeries whose conjugate equals itself. Construction
// rejects inconsistent conjugate pairs instead of symmetrizing.
class RealSeries
{
public:
    RealSeries() = default;
    RealSeries(int n, int D, SeriesForm form = SeriesForm::full) : s_(n, D, form) {}
    explicit RealSeries(BiSeries s);

    const BiSeries &raw() const { return s_; }
    int n() const { return s_.n(); }
    int cap() const { return s_.cap(); }
    SeriesForm form() const { return s_.form(); }
    bool is_zero() const { return s_.is_zero(); }
    const BiSeries::Terms &terms() const { return s_.terms(); }
    GaussRat coeff(const BiKey &k) const { return s_.coeff(k); }
    int order() const { return s_.order(); }

    friend bool operator==(const RealSeries &, const RealSeries &) = default;

private:
    BiSeries s_;
};

RealSeries add(const RealSeries &a, const RealSeries &b);
RealSeries subtract(const RealSeries &a, const RealSeries &b);
RealSeries multiply(const RealSeries &a, const RealSeries &b);
RealSeries scale(const RealSeries &a, const mpq_class &c);
RealSeries weighted_component(const RealSeries &a, int sigma);

// Substitutes w = W, wbar = conj(W) into a full-form series, where W is a
// trace-form series (a function of z, zbar, u). The result is in trace form.
BiSeries substitute_w(const BiSeries &A, const BiSeries &W);

// A^0(z, zbar, u) := A|_{w = u + i<z,zbar>}.
RealSeries restrict_to_quadric(const RealSeries &A, const SignatureForm &form);

// Solves v = <z,zbar> + A(z, zbar, u + iv, u - iv) for v - <z,zbar> as a
// trace-form series. Requires A to vanish to weighted order 3.
RealSeries to_graph_form(const RealSeries &A, const SignatureForm &form);

// A jet of a holomorphic map (z, w) in C^n x C -> C^N x C. The last component
// plays the role of w in the target.
class HoloMap
{
public:
    HoloMap() = default;
    HoloMap(int source_n, int D, std::vector<HoloSeries> components);

    static HoloMap identity(int n, int D);

    int source_n() const { return n_; }
    int cap() const { return D_; }
    int target_n() const { return static_cast<int>(comps_.size()) - 1; }
    const std::vector<HoloSeries> &components() const { return comps_; }
    const HoloSeries &operator[](std::size_t i) const { return comps_[i]; }
    const HoloSeries &last() const { return comps_.back(); }

    bool has_constant_term() const;
    // True when the z-slots vanish at 0 and the w-slot vanishes to weighted
    // order 2, so substitution into a weight-D truncation stays exact.
    bool preserves_weight() const;

    friend bool operator==(const HoloMap &, const HoloMap &) = default;

private:
    int n_ = 0;
    int D_ = 0;
    std::vector<HoloSeries> comps_;
};

// h(map(z, w)); h lives in the target variables of map.
HoloSeries compose(const HoloSeries &h, const HoloMap &map);
// outer o inner.
HoloMap compose(const HoloMap &outer, const HoloMap &inner);
// Degree-by-degree reversion of a square map with invertible linear part.
HoloMap invert(const HoloMap &map);

// A(H, conj(H)) for A in the target variables of H.
RealSeries compose_real_with_map(const RealSeries &A, const HoloMap &H);
BiSeries compose_bi_with_map(const BiSeries &A, const HoloMap &H);

} // namespace hyperq

#endif
