#include "cpb/esi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace cpb {

namespace {
constexpr double kExactSlack = 1e-12;
constexpr double kMcConfidence = 1e-6;  // verdicts at confidence 1 - 1e-6
}  // namespace

FiniteRealDistribution make_finite_dist(std::vector<double> values, std::vector<double> mass) {
    if (values.empty() || values.size() != mass.size())
        throw invalid_input("finite dist: values/mass mismatch");
    double sum = 0.0;
    for (double m : mass) {
        if (m < -1e-12) throw invalid_input("finite dist: negative mass");
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw invalid_input("finite dist: masses do not sum to 1");
    for (double& m : mass) m = std::max(0.0, m) / sum;
    return FiniteRealDistribution{std::move(values), std::move(mass)};
}

double dist_mean(const FiniteRealDistribution& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) s += g.mass[i] * g.values[i];
    return s;
}

double dist_max(const FiniteRealDistribution& g) {
    return *std::max_element(g.values.begin(), g.values.end());
}

double dist_tail_prob(const FiniteRealDistribution& g, double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i)
        if (g.values[i] > t) s += g.mass[i];
    return s;
}

FiniteRealDistribution convolve(const FiniteRealDistribution& a, const FiniteRealDistribution& b,
                                std::size_t max_atoms) {
    std::map<double, double> acc;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        for (std::size_t j = 0; j < b.values.size(); ++j)
            acc[a.values[i] + b.values[j]] += a.mass[i] * b.mass[j];
        if (acc.size() > max_atoms)
            throw resource_limit("convolve: atom count " + std::to_string(acc.size()) +
                                 " exceeds cap " + std::to_string(max_atoms));
    }
    FiniteRealDistribution out;
    out.values.reserve(acc.size());
    out.mass.reserve(acc.size());
    for (const auto& [v, m] : acc) {
        out.values.push_back(v);
        out.mass.push_back(m);
    }
    return out;
}

FiniteRealDistribution iid_mean_dist(const FiniteRealDistribution& x, std::size_t n,
                                     std::size_t max_atoms) {
    if (n == 0) throw invalid_input("iid_mean_dist: n must be >= 1");
    FiniteRealDistribution sum = x;
    for (std::size_t i = 1; i < n; ++i) sum = convolve(sum, x, max_atoms);
    for (double& v : sum.values) v /= static_cast<double>(n);
    return sum;
}

EsiVerdict esi_exact(const FiniteRealDistribution& g, double eta) {
    if (!(eta > 0.0)) throw invalid_input("esi_exact: eta must be > 0");
    double e = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) e += g.mass[i] * std::exp(eta * g.values[i]);
    EsiVerdict v;
    v.eta = eta;
    v.estimate = e;
    v.margin = 0.0;
    v.holds = e <= 1.0 + kExactSlack;
    v.mode = EsiMode::Exact;
    v.samples_used = g.values.size();
    return v;
}

EsiVerdict esi_mc(const std::function<double(Rng&)>& sampler, double lo, double hi, double eta,
                  std::uint64_t trials, std::uint64_t seed) {
    if (!(eta > 0.0)) throw invalid_input("esi_mc: eta must be > 0");
    if (trials < 1000) throw invalid_input("esi_mc: need at least 1000 trials");
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw invalid_input("esi_mc: range [lo,hi] must be declared and finite");
    double top = std::exp(eta * hi);
    double bot = std::exp(eta * lo);
    if (!std::isfinite(top)) throw invalid_input("esi_mc: exp(eta*hi) overflows");

    Rng rng(seed);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        double d = sampler(rng);
        if (d < lo - 1e-12 || d > hi + 1e-12)
            throw invalid_input("esi_mc: sampler left the declared range");
        sum += std::exp(eta * d);
    }
    EsiVerdict v;
    v.eta = eta;
    v.estimate = sum / static_cast<double>(trials);
    v.margin = (top - bot) * std::sqrt(std::log(2.0 / kMcConfidence) /
                                       (2.0 * static_cast<double>(trials)));
    v.mode = EsiMode::MonteCarlo;
    v.samples_used = trials;
    v.holds = v.estimate + v.margin <= 1.0;
    v.inconclusive = !v.holds && v.estimate - v.margin <= 1.0;
    return v;
}

double esi_high_prob_term(double eta, double delta) {
    if (!(eta > 0.0)) throw invalid_input("esi_high_prob_term: eta must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw invalid_input("esi_high_prob_term: delta in (0,1)");
    return std::log(1.0 / delta) / eta;
}

double esi_chain(std::span<const double> gammas) {
    if (gammas.empty()) throw invalid_input("esi_chain: empty rate list");
    double inv = 0.0;
    for (double g : gammas) {
        if (!(g > 0.0)) throw invalid_input("esi_chain: rates must be > 0");
        inv += 1.0 / g;
    }
    return 1.0 / inv;
}

double theta_fn(double u) {
    if (!(u > 0.0 && u < 1.0)) throw invalid_input("theta_fn: argument in (0,1)");
    if (u < 0.01) {
        // theta(u) = sum_{k>=2} u^{k-2}/k
        double s = 0.0;
        for (int k = 12; k >= 2; --k) s = s * u + 1.0 / k;
        return s;
    }
    return (-std::log1p(-u) - u) / (u * u);
}

EsiVerdict unexpected_bernstein_margin(const FiniteRealDistribution& U, double b, double eta,
                                       double c_eta) {
    if (!(b > 0.0)) throw invalid_input("unexpected bernstein: b must be > 0");
    if (dist_max(U) > b + 1e-12) throw invalid_input("unexpected bernstein: U exceeds bound b");
    if (!(eta > 0.0 && eta < 1.0 / b)) throw invalid_input("unexpected bernstein: need 0 < eta < 1/b");
    if (c_eta < 2.0 * theta_fn(eta * b) - 1e-12)
        throw invalid_input("unexpected bernstein: c_eta below 2*theta(eta*b)");
    double mu = dist_mean(U);
    FiniteRealDistribution g;
    g.mass = U.mass;
    g.values.reserve(U.values.size());
    for (double u : U.values) g.values.push_back(mu - u - 0.5 * eta * c_eta * u * u);
    return esi_exact(g, eta);
}

EsiVerdict hoeffding_esi_margin(const FiniteRealDistribution& loss_dist, double eta,
                                std::size_t n, std::size_t max_atoms, std::uint64_t mc_trials,
                                std::uint64_t seed) {
    if (!(eta > 0.0)) throw invalid_input("hoeffding esi: eta must be > 0");
    if (n < 1) throw invalid_input("hoeffding esi: n must be >= 1");
    for (double v : loss_dist.values)
        if (!(v >= 0.0 && v <= 1.0)) throw invalid_input("hoeffding esi: losses must lie in [0,1]");
    double mu = dist_mean(loss_dist);
    double shift = 2.0 * eta / static_cast<double>(n);
    try {
        FiniteRealDistribution emp = iid_mean_dist(loss_dist, n, max_atoms);
        FiniteRealDistribution g;
        g.mass = emp.mass;
        g.values.reserve(emp.values.size());
        for (double v : emp.values) g.values.push_back(mu - v - shift);
        return esi_exact(g, eta);
    } catch (const resource_limit&) {
        if (mc_trials == 0) throw;
        auto sampler = [&loss_dist, n, mu, shift](Rng& rng) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double u = uniform01(rng);
                double cum = 0.0;
                double pick = loss_dist.values.back();
                for (std::size_t k = 0; k < loss_dist.values.size(); ++k) {
                    cum += loss_dist.mass[k];
                    if (u < cum) {
                        pick = loss_dist.values[k];
                        break;
                    }
                }
                s += pick;
            }
            return mu - s / static_cast<double>(n) - shift;
        };
        return esi_mc(sampler, mu - 1.0 - shift, mu - shift, eta, mc_trials, seed);
    }
}

}  // namespace cpb
