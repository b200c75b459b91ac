#ifndef HYPERQ_SIGNATURE_HPP
#define HYPERQ_SIGNATURE_HPP

#include <stdexcept>
#include <vector>

namespace hyperq
{

// Diagonal Hermitian form sum_j sign_j |z_j|^2. The standard form of signature
// ell has the ell negative entries first; renumbered forms keep arbitrary sign
// patterns.
class SignatureForm
{
public:
    SignatureForm() = default;
    explicit SignatureForm(std::vector<int> signs) : signs_(std::move(signs))
    {
        for (int s : signs_) {
            if (s != 1 && s != -1) {
                throw std::invalid_argument("signature entries must be +1 or -1");
            }
        }
    }

    // Requires 0 <= ell <= n/2.
    static SignatureForm standard(int n, int ell)
    {
        if (n < 0 || ell < 0 || 2 * ell > n) {
            throw std::invalid_argument("signature requires 0 <= ell <= n/2");
        }
        std::vector<int> s(n, 1);
        for (int j = 0; j < ell; ++j) {
            s[j] = -1;
        }
        return SignatureForm(std::move(s));
    }

    // Standard sign pattern without the ell <= n/2 restriction (targets of
    // embeddings before renumbering).
    static SignatureForm with_negatives(int n, int ell)
    {
        if (n < 0 || ell < 0 || ell > n) {
            throw std::invalid_argument("signature requires 0 <= ell <= n");
        }
        std::vector<int> s(n, 1);
        for (int j = 0; j < ell; ++j) {
            s[j] = -1;
        }
        return SignatureForm(std::move(s));
    }

    int n() const { return static_cast<int>(signs_.size()); }
    int sign(int j) const { return signs_[j]; }
    const std::vector<int> &signs() const { return signs_; }

    int negatives() const
    {
        int c = 0;
        for (int s : signs_) {
            c += s < 0;
        }
        return c;
    }

    bool is_standard() const
    {
        int neg = negatives();
        for (int j = 0; j < n(); ++j) {
            if ((j < neg) != (signs_[j] < 0)) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const SignatureForm &, const SignatureForm &) = default;

private:
    std::vector<int> signs_;
};

} // namespace hyperq

#endif
