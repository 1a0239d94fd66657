#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cpb/errors.hpp"
#include "cpb/rng.hpp"

namespace cpb {

// Finite distribution of a real random variable, used to encode X-Y in
// statements of the form E[exp(eta(X-Y))] <= 1.
struct FiniteRealDistribution {
    std::vector<double> values;
    std::vector<double> mass;
};

FiniteRealDistribution make_finite_dist(std::vector<double> values, std::vector<double> mass);
double dist_mean(const FiniteRealDistribution& g);
double dist_max(const FiniteRealDistribution& g);
// P(g > t), exact tail sum.
double dist_tail_prob(const FiniteRealDistribution& g, double t);

// Distribution of the sum of two independent variables. Atoms with exactly
// equal values are merged; throws resource_limit past max_atoms.
FiniteRealDistribution convolve(const FiniteRealDistribution& a, const FiniteRealDistribution& b,
                                std::size_t max_atoms = 1000000);
// Distribution of (1/n) * sum of n i.i.d. copies of x.
FiniteRealDistribution iid_mean_dist(const FiniteRealDistribution& x, std::size_t n,
                                     std::size_t max_atoms = 1000000);

enum class EsiMode { Exact, MonteCarlo };

struct EsiVerdict {
    double eta = 0.0;
    double estimate = 0.0;  // E[exp(eta(X-Y))], exact or sample mean
    double margin = 0.0;    // CI half-width; 0 in exact mode
    bool holds = false;     // estimate + margin <= 1 (+1e-12 slack in exact mode)
    bool inconclusive = false;  // MC only: 1 lies inside [estimate-margin, estimate+margin]
    EsiMode mode = EsiMode::Exact;
    std::uint64_t samples_used = 0;
};

// Exact verdict on E[exp(eta * g)] <= 1 for finite g.
EsiVerdict esi_exact(const FiniteRealDistribution& g, double eta);

// Monte-Carlo verdict. The sampler must return values of X-Y inside the
// declared range [lo,hi]; the Hoeffding half-width over the exponentiated
// range [exp(eta*lo), exp(eta*hi)] is taken at confidence 1-1e-6.
EsiVerdict esi_mc(const std::function<double(Rng&)>& sampler, double lo, double hi, double eta,
                  std::uint64_t trials, std::uint64_t seed);

// High-probability reading of an ESI: X <= Y + log(1/delta)/eta w.p. 1-delta.
double esi_high_prob_term(double eta, double delta);

// Rate surviving a chain of ESIs with rates gamma_i: (sum_i 1/gamma_i)^-1.
double esi_chain(std::span<const double> gammas);

// theta(u) = (-log(1-u) - u)/u^2, the un-expected Bernstein shape function.
// Series evaluation near 0 (the naive form loses ~half the digits there).
double theta_fn(double u);

// Un-expected Bernstein: for U bounded above by b and 0 < eta < 1/b,
//   E[U] - U  esi_eta  (1/2) eta c_eta U^2   whenever c_eta >= 2 theta(eta b).
// Returns the exact verdict on the encoded statement.
EsiVerdict unexpected_bernstein_margin(const FiniteRealDistribution& U, double b, double eta,
                                       double c_eta);

// Hoeffding step used by the main bound: for per-example loss distribution
// on [0,1], mean(loss) - (1/n) sum losses  esi_eta  2 eta / n.
// Exact via n-fold convolution when it fits in max_atoms, else Monte Carlo.
EsiVerdict hoeffding_esi_margin(const FiniteRealDistribution& loss_dist, double eta,
                                std::size_t n, std::size_t max_atoms = 1000000,
                                std::uint64_t mc_trials = 200000, std::uint64_t seed = 1);

}  // namespace cpb
