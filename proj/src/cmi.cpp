#include "cpb/cmi.hpp"

#include <cmath>
#include <map>

#include "cpb/priors.hpp"

namespace cpb {

double disintegrated_mi(const std::function<Posterior(const Sample&)>& A, const Supersample& ss,
                        int cap_n) {
    const std::size_t n = ss.size();
    if (n > static_cast<std::size_t>(cap_n))
        throw resource_limit("disintegrated_mi: 2^" + std::to_string(n) +
                             " selections exceed the cap");
    const std::uint64_t count = 1ULL << n;
    std::vector<Posterior> outs;
    outs.reserve(count);
    Sample sample(n);
    std::map<int, double> mix;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 0; i < n; ++i)
            sample[i] = (mask >> i) & 1 ? ss.rows[i].second : ss.rows[i].first;
        Posterior p = A(sample);
        for (std::size_t k = 0; k < p.ids.size(); ++k)
            mix[p.ids[k]] += p.w[k] / static_cast<double>(count);
        outs.push_back(std::move(p));
    }
    std::vector<int> ids;
    std::vector<double> w;
    for (const auto& [id, mass] : mix) {
        ids.push_back(id);
        w.push_back(mass);
    }
    Posterior marginal = make_posterior(std::move(ids), std::move(w));
    double total = 0.0;
    for (const auto& p : outs) total += kl(p, marginal);
    return total / static_cast<double>(count);
}

CmiEstimate cmi(const std::function<Posterior(const Sample&)>& A, const DiscreteDistribution& D,
                std::size_t n, bool exact, std::uint64_t budget, std::uint64_t seed,
                std::uint64_t exact_cap) {
    if (n == 0) throw invalid_input("cmi: n must be >= 1");
    CmiEstimate est;
    if (exact) {
        const std::size_t a = D.atoms.size();
        const std::size_t cells = 2 * n;
        double combos = std::pow(static_cast<double>(a), static_cast<double>(cells));
        if (combos > static_cast<double>(exact_cap))
            throw resource_limit("cmi: exact supersample enumeration exceeds cap; use mc");
        std::vector<std::size_t> idx(cells, 0);
        Supersample ss;
        ss.rows.resize(n);
        double total = 0.0;
        std::uint64_t used = 0;
        while (true) {
            double wgt = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                ss.rows[i].first = D.atoms[idx[2 * i]];
                ss.rows[i].second = D.atoms[idx[2 * i + 1]];
                wgt *= D.mass[idx[2 * i]] * D.mass[idx[2 * i + 1]];
            }
            ++used;
            if (wgt > 0.0) total += wgt * disintegrated_mi(A, ss);
            std::size_t pos = 0;
            while (pos < cells && ++idx[pos] == a) {
                idx[pos] = 0;
                ++pos;
            }
            if (pos == cells) break;
        }
        est.value = total;
        est.exact = true;
        est.supersamples_used = used;
        return est;
    }

    if (budget == 0) throw invalid_input("cmi: mc budget must be >= 1");
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t t = 0; t < budget; ++t) {
        Supersample ss = draw_supersample(D, n, derive_seed(seed, t));
        double v = disintegrated_mi(A, ss);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / static_cast<double>(budget);
    double var = std::max(0.0, sumsq / static_cast<double>(budget) - mean * mean);
    est.value = mean;
    est.std_error = budget > 1 ? std::sqrt(var / static_cast<double>(budget - 1)) : 0.0;
    est.exact = false;
    est.supersamples_used = budget;
    return est;
}

}  // namespace cpb
