#ifndef HYPERQ_GAUSS_RATIONAL_HPP
#define HYPERQ_GAUSS_RATIONAL_HPP

#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace hyperq
{

// Element of Q(i). Both parts are kept canonical (lowest terms, positive
// denominator); gmpxx arithmetic already returns canonical values.
class GaussRat
{
public:
    GaussRat() = default;
    GaussRat(long v) : re_(v) {}
    GaussRat(mpq_class re) : re_(std::move(re)) {}
    GaussRat(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussRat i() { return GaussRat(0, 1); }

    const mpq_class &re() const { return re_; }
    const mpq_class &im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    GaussRat conj() const { return GaussRat(re_, -im_); }
    // |x|^2
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    GaussRat operator-() const { return GaussRat(-re_, -im_); }

    GaussRat &operator+=(const GaussRat &o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussRat &operator-=(const GaussRat &o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussRat &operator*=(const GaussRat &o)
    {
        if (o.is_real()) {
            re_ *= o.re_;
            im_ *= o.re_;
            return *this;
        }
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    GaussRat &operator/=(const GaussRat &o)
    {
        if (o.is_zero()) {
            throw std::domain_error("division by zero in Q(i)");
        }
        mpq_class d = o.norm();
        *this *= o.conj();
        re_ /= d;
        im_ /= d;
        return *this;
    }

    friend GaussRat operator+(GaussRat a, const GaussRat &b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat &b) { return a -= b; }
    friend GaussRat operator*(GaussRat a, const GaussRat &b) { return a *= b; }
    friend GaussRat operator/(GaussRat a, const GaussRat &b) { return a /= b; }

    friend bool operator==(const GaussRat &a, const GaussRat &b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    friend std::ostream &operator<<(std::ostream &os, const GaussRat &x)
    {
        return os << '(' << x.re_ << ")+(" << x.im_ << ")i";
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

// "p/q" with q > 0, always printed with an explicit denominator.
inline std::string format_rational(const mpq_class &q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Accepts "p/q", "p" or "-p/q". Throws std::invalid_argument on garbage or a
// zero denominator.
inline mpq_class parse_rational(std::string_view s)
{
    std::string str(s);
    if (str.empty()) {
        throw std::invalid_argument("empty rational literal");
    }
    auto slash = str.find('/');
    mpz_class num, den(1);
    try {
        if (slash == std::string::npos) {
            num = mpz_class(str, 10);
        } else {
            num = mpz_class(str.substr(0, slash), 10);
            den = mpz_class(str.substr(slash + 1), 10);
        }
    } catch (const std::invalid_argument &) {
        throw std::invalid_argument("malformed rational literal '" + str + "'");
    }
    if (den == 0) {
        throw std::invalid_argument("zero denominator in '" + str + "'");
    }
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

// Integer square root of a nonnegative rational when it is a perfect square.
inline bool rational_sqrt(const mpq_class &q, mpq_class &out)
{
    if (sgn(q) < 0) {
        return false;
    }
    mpz_class n = q.get_num(), d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) {
        return false;
    }
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    out = mpq_class(rn, rd);
    out.canonicalize();
    return true;
}

// Finds t in Q(i) with |t|^2 = q for q > 0, searching x^2 + y^2 = num*den.
// The search is bounded; returns false when no representation was found.
bool norm_root(const mpq_class &q, GaussRat &out);

} // namespace hyperq

#endif
