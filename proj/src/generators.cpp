#include <hyperq/generators.hpp>

#include <algorithm>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <hyperq/quadric.hpp>

namespace hyperq
{

namespace
{

GaussRat coefficient(std::mt19937_64 &rng)
{
    GaussRat c;
    while (c.is_zero()) {
        c = random_gauss(rng, 3, 2);
    }
    return c;
}

MultiIndex random_multi_index(std::mt19937_64 &rng, int n, int degree)
{
    MultiIndex a(n, 0);
    for (int d = 0; d < degree; ++d) {
        a[rng() % n]++;
    }
    return a;
}

using Slice = std::tuple<int, int, int, int>;

} // namespace

HoloSeries random_holo(std::mt19937_64 &rng, int n, int D, int min_weight, int max_weight, int max_terms)
{
    max_weight = std::min(max_weight, D);
    std::vector<std::pair<int, int>> shapes;
    for (int weight = min_weight; weight <= max_weight; ++weight) {
        for (int gamma = 0; 2 * gamma <= weight; ++gamma) {
            int deg = weight - 2 * gamma;
            if (deg + gamma >= 2 && (n > 0 || deg == 0)) {
                shapes.emplace_back(deg, gamma);
            }
        }
    }
    if (shapes.empty()) {
        throw std::invalid_argument("random_holo: no monomials in the weight range");
    }
    HoloSeries out(n, D);
    int terms = 1 + static_cast<int>(rng() % max_terms);
    for (int t = 0; t < terms; ++t) {
        auto [deg, gamma] = shapes[rng() % shapes.size()];
        out.add_term(HoloKey{random_multi_index(rng, n, deg), gamma}, coefficient(rng));
    }
    return out;
}

HoloSeries random_slice_factor(std::mt19937_64 &rng, int n, int D, int mu, int gamma)
{
    HoloSeries out(n, D);
    int terms = mu == 0 ? 1 : 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < terms; ++t) {
        out.add_term(HoloKey{random_multi_index(rng, n, mu), gamma}, coefficient(rng));
    }
    return out;
}

RealSeries random_s_tilde_member(std::mt19937_64 &rng, int n, int D, int k)
{
    if (k < 1) {
        throw std::invalid_argument("random_s_tilde_member: k must be positive");
    }
    std::vector<Slice> slices;
    for (int mu = 0; mu <= D; ++mu) {
        for (int nu = 0; nu <= D; ++nu) {
            for (int gamma = 0; 2 * gamma <= D; ++gamma) {
                for (int delta = 0; 2 * delta <= D; ++delta) {
                    if (mu + nu + 2 * gamma + 2 * delta > D || mu + gamma < 2 || nu + delta < 2) {
                        continue;
                    }
                    if (std::make_pair(mu, gamma) <= std::make_pair(nu, delta)) {
                        slices.emplace_back(mu, nu, gamma, delta);
                    }
                }
            }
        }
    }
    int count = 1 + static_cast<int>(rng() % 3);
    std::vector<Slice> chosen;
    while (static_cast<int>(chosen.size()) < std::min<int>(count, slices.size())) {
        Slice s = slices[rng() % slices.size()];
        if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) {
            chosen.push_back(s);
        }
    }

    BiSeries acc(n, D);
    for (const auto &[mu, nu, gamma, delta] : chosen) {
        bool self_conjugate = mu == nu && gamma == delta;
        if (self_conjugate && k == 1) {
            HoloSeries phi = random_slice_factor(rng, n, D, mu, gamma);
            BiSeries sq = outer_product(phi, phi);
            acc += rng() % 2 ? -sq : sq;
            continue;
        }
        int pairs = self_conjugate ? k / 2 : k;
        for (int j = 0; j < pairs; ++j) {
            HoloSeries phi = random_slice_factor(rng, n, D, mu, gamma);
            HoloSeries psi = rng() % 4 == 0 && self_conjugate ? phi * GaussRat::i()
                                                               : random_slice_factor(rng, n, D, nu, delta);
            acc += outer_product(phi, psi) + outer_product(psi, phi);
        }
    }
    return RealSeries(std::move(acc));
}

RealSeries random_h_member(std::mt19937_64 &rng, int n, int D, int k, int negatives)
{
    BiSeries acc(n, D);
    for (int j = 0; j < k; ++j) {
        HoloSeries phi = random_holo(rng, n, D, 2, D / 2);
        BiSeries sq = outer_product(phi, phi);
        acc += j < negatives ? -sq : sq;
    }
    return RealSeries(std::move(acc));
}

} // namespace hyperq
