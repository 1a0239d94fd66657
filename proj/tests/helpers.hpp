#pragma once
#include <cmath>
#include <numeric>
#include <vector>

#include "cpb/core.hpp"
#include "cpb/esi.hpp"
#include "cpb/rng.hpp"

namespace cpb::test {

// Uniform-X threshold problem with random label noise; the workhorse
// instance for most checks.
inline LearningProblem noise_problem(int domain_max = 10, int t_star = 5, double p = 0.1) {
    std::vector<int> domain;
    std::vector<double> px;
    for (int x = 1; x <= domain_max; ++x) {
        domain.push_back(x);
        px.push_back(1.0 / domain_max);
    }
    return make_noisy_threshold_problem(domain, px, t_star, p);
}

inline std::vector<int> all_ids(const HypothesisClass& cls) {
    std::vector<int> ids(static_cast<std::size_t>(cls.size()));
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

inline Posterior random_posterior(const std::vector<int>& ids, Rng& rng) {
    std::vector<int> support;
    std::vector<double> w;
    for (int id : ids) {
        if (uniform01(rng) < 0.5) continue;
        support.push_back(id);
        w.push_back(uniform01(rng) + 0.01);
    }
    if (support.empty()) {
        support.push_back(ids[rng() % ids.size()]);
        w.push_back(1.0);
    }
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= sum;
    return make_posterior(std::move(support), std::move(w));
}

// Random finite distribution with atoms in [lo, hi].
inline FiniteRealDistribution random_finite_dist(Rng& rng, int max_atoms = 6, double lo = -1.0,
                                                 double hi = 1.0) {
    int k = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_atoms - 1));
    std::vector<double> v(static_cast<std::size_t>(k)), m(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * uniform01(rng);
        m[static_cast<std::size_t>(i)] = uniform01(rng) + 0.05;
        sum += m[static_cast<std::size_t>(i)];
    }
    for (double& x : m) x /= sum;
    return make_finite_dist(std::move(v), std::move(m));
}

// Shift a distribution so that E[exp(eta * g)] is exactly 1.
inline FiniteRealDistribution shift_to_esi_boundary(FiniteRealDistribution g, double eta) {
    double e = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i)
        e += g.mass[i] * std::exp(eta * g.values[i]);
    double shift = std::log(e) / eta;
    for (double& v : g.values) v -= shift;
    return g;
}

inline Selector random_selector(std::size_t n, Rng& rng) {
    Selector s(n);
    for (auto& b : s) b = static_cast<std::uint8_t>(rng() & 1);
    return s;
}

inline Supersample swap_rows(const Supersample& ss, const Selector& s) {
    Supersample out = ss;
    for (std::size_t i = 0; i < ss.size(); ++i)
        if (s[i]) std::swap(out.rows[i].first, out.rows[i].second);
    return out;
}

inline bool posteriors_close(const Posterior& a, const Posterior& b, double tol = 1e-12) {
    if (a.ids != b.ids) return false;
    for (std::size_t i = 0; i < a.w.size(); ++i)
        if (std::abs(a.w[i] - b.w[i]) > tol) return false;
    return true;
}

}  // namespace cpb::test
