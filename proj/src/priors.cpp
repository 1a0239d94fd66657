#include "cpb/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace cpb {

double kl(const Posterior& P, const Posterior& Q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < P.ids.size(); ++i) {
        if (P.w[i] <= 0.0) continue;
        double q = mass_of(Q, P.ids[i]);
        if (q <= 0.0) return std::numeric_limits<double>::infinity();
        sum += P.w[i] * std::log(P.w[i] / q);
    }
    return std::max(0.0, sum);
}

Posterior enumeration_prior(const std::function<int(const Sample&)>& A,
                            const HypothesisClass& cls, const Supersample& ss, int cap_n) {
    const std::size_t n = ss.size();
    if (n > static_cast<std::size_t>(cap_n))
        throw resource_limit("enumeration_prior: 2^" + std::to_string(n) +
                             " selections exceed the cap; use the Sauer bound instead");
    std::set<int> xs_set;
    for (const auto& r : ss.rows) {
        xs_set.insert(r.first.x);
        xs_set.insert(r.second.x);
    }
    std::vector<int> xs(xs_set.begin(), xs_set.end());

    // key: predictions on the supersample's features; value: least output id
    std::map<std::vector<std::uint8_t>, int> groups;
    Sample sample(n);
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i)
            sample[i] = (mask >> i) & 1 ? ss.rows[i].second : ss.rows[i].first;
        int f = A(sample);
        std::vector<std::uint8_t> key(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j)
            key[j] = static_cast<std::uint8_t>(cls.predict(f, xs[j]));
        auto [it, inserted] = groups.emplace(std::move(key), f);
        if (!inserted) it->second = std::min(it->second, f);
    }
    std::vector<int> ids;
    ids.reserve(groups.size());
    for (const auto& [key, id] : groups) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return uniform_posterior(std::move(ids));
}

ConditionalPrior make_enumeration_prior(const std::function<int(const Sample&)>& A,
                                        const HypothesisClass& cls, int cap_n) {
    return ConditionalPrior{"enumeration", [A, cls, cap_n](const Supersample& ss) {
                                return enumeration_prior(A, cls, ss, cap_n);
                            }};
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

namespace {

void accumulate_posterior(std::map<int, double>& acc, const Posterior& p, double scale) {
    for (std::size_t i = 0; i < p.ids.size(); ++i) acc[p.ids[i]] += scale * p.w[i];
}

Posterior posterior_from_map(const std::map<int, double>& acc) {
    std::vector<int> ids;
    std::vector<double> w;
    for (const auto& [id, mass] : acc) {
        if (mass <= 0.0) continue;
        ids.push_back(id);
        w.push_back(mass);
    }
    return make_posterior(std::move(ids), std::move(w));
}

}  // namespace

Posterior compression_prior(const CompressionMap& W2, const Supersample& ss, int k,
                            std::uint64_t subset_cap) {
    const int m = 2 * static_cast<int>(ss.size());
    if (k < 0 || k > m) throw invalid_input("compression_prior: k outside [0, 2n]");
    double count = binomial(m, k);
    if (count > static_cast<double>(subset_cap))
        throw resource_limit("compression_prior: C(2n,k) exceeds the subset cap");

    std::vector<Example> flat;
    flat.reserve(static_cast<std::size_t>(m));
    for (const auto& r : ss.rows) {
        flat.push_back(r.first);
        flat.push_back(r.second);
    }

    std::map<int, double> acc;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    const double scale = 1.0 / count;
    while (true) {
        std::vector<Example> subset;
        subset.reserve(static_cast<std::size_t>(k));
        for (int i : idx) subset.push_back(flat[static_cast<std::size_t>(i)]);
        std::sort(subset.begin(), subset.end());
        accumulate_posterior(acc, W2(subset), scale);
        // next k-combination of {0..m-1}
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return posterior_from_map(acc);
}

Posterior compression_scheme_output(const Compressor& A1, const CompressionMap& W2,
                                    const Sample& z, int k) {
    std::vector<std::size_t> picked = A1(z);
    if (static_cast<int>(picked.size()) != k)
        throw invalid_input("compression scheme: compressor returned wrong subset size");
    std::vector<Example> subset;
    subset.reserve(picked.size());
    for (std::size_t i : picked) {
        if (i >= z.size()) throw invalid_input("compression scheme: index out of range");
        subset.push_back(z[i]);
    }
    std::sort(subset.begin(), subset.end());
    return W2(subset);
}

ConditionalPrior mixture_prior(std::vector<ConditionalPrior> priors, std::vector<double> rho) {
    if (priors.empty() || priors.size() != rho.size())
        throw invalid_input("mixture_prior: priors/weights mismatch");
    double sum = 0.0;
    for (double r : rho) {
        if (r < 0.0) throw invalid_input("mixture_prior: negative weight");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw invalid_input("mixture_prior: weights do not sum to 1");
    return ConditionalPrior{
        "mixture", [priors = std::move(priors), rho = std::move(rho)](const Supersample& ss) {
            std::map<int, double> acc;
            for (std::size_t j = 0; j < priors.size(); ++j) {
                if (rho[j] <= 0.0) continue;
                accumulate_posterior(acc, priors[j].build(ss), rho[j]);
            }
            return posterior_from_map(acc);
        }};
}

ConditionalPrior data_independent_prior(Posterior W) {
    return ConditionalPrior{"fixed", [W = std::move(W)](const Supersample&) { return W; }};
}

namespace {

std::string describe_sample(const Sample& z) {
    std::string s = "(";
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (i) s += ", ";
        s += "(" + std::to_string(z[i].x) + "," + std::to_string(z[i].y) + ")";
    }
    return s + ")";
}

}  // namespace

ExpectedKl expected_kl_ghost(const std::function<Posterior(const Sample&)>& A,
                             const ConditionalPrior& prior, const Sample& z0,
                             const DiscreteDistribution& D, bool exact, std::uint64_t budget,
                             std::uint64_t seed, std::uint64_t exact_cap) {
    if (z0.empty()) throw invalid_input("expected_kl_ghost: empty training sample");
    const std::size_t n = z0.size();
    const Posterior out = A(z0);
    auto kl_against_ghost = [&](const Sample& ghost) {
        Supersample ss;
        ss.rows.reserve(n);
        for (std::size_t i = 0; i < n; ++i) ss.rows.emplace_back(z0[i], ghost[i]);
        return kl(out, prior.build(ss));
    };

    ExpectedKl result;
    if (exact) {
        const std::size_t a = D.atoms.size();
        double combos = std::pow(static_cast<double>(a), static_cast<double>(n));
        if (combos > static_cast<double>(exact_cap))
            throw resource_limit("expected_kl_ghost: ghost enumeration exceeds cap; use mc");
        std::vector<std::size_t> idx(n, 0);
        Sample ghost(n);
        double total = 0.0;
        std::uint64_t used = 0;
        while (true) {
            double wgt = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                ghost[i] = D.atoms[idx[i]];
                wgt *= D.mass[idx[i]];
            }
            ++used;
            if (wgt > 0.0) {
                double v = kl_against_ghost(ghost);
                if (std::isinf(v)) {
                    result.value = v;
                    result.exact = true;
                    result.ghosts_used = used;
                    result.offending_ghost = describe_sample(ghost);
                    return result;
                }
                total += wgt * v;
            }
            std::size_t pos = 0;
            while (pos < n && ++idx[pos] == a) {
                idx[pos] = 0;
                ++pos;
            }
            if (pos == n) break;
        }
        result.value = total;
        result.exact = true;
        result.ghosts_used = used;
        return result;
    }

    if (budget == 0) throw invalid_input("expected_kl_ghost: mc budget must be >= 1");
    Rng rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t t = 0; t < budget; ++t) {
        Sample ghost = draw_sample(D, n, rng);
        double v = kl_against_ghost(ghost);
        if (std::isinf(v)) {
            result.value = v;
            result.exact = false;
            result.ghosts_used = t + 1;
            result.offending_ghost = describe_sample(ghost);
            return result;
        }
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / static_cast<double>(budget);
    double var = std::max(0.0, sumsq / static_cast<double>(budget) - mean * mean);
    result.value = mean;
    result.std_error = budget > 1 ? std::sqrt(var / static_cast<double>(budget - 1)) : 0.0;
    result.exact = false;
    result.ghosts_used = budget;
    return result;
}

SauerBound sauer_bound(int d, int m) {
    if (d < 0 || m < 1) throw invalid_input("sauer_bound: need d >= 0, m >= 1");
    SauerBound s;
    if (m <= d) {
        s.sum = std::pow(2.0, m);
    } else {
        for (int k = 0; k <= d; ++k) s.sum += binomial(m, k);
    }
    const double e = std::exp(1.0);
    s.cap_e_md = e * std::pow(m, d);
    s.cap_em_over_d = (d >= 1 && m >= d) ? std::pow(e * m / d, d) : 0.0;
    s.cap_e2_half = m >= 2 ? e * e * std::pow(0.5 * m, d) : 0.0;
    return s;
}

}  // namespace cpb
