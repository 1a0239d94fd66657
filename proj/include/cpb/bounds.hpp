#pragma once
#include <cstdint>
#include <vector>

#include "cpb/errors.hpp"

namespace cpb {

// llog n = log(ceil(log2(sqrt(n))) + 2), the grid-size penalty.
double llog(std::uint64_t n);

// a^b_[**] = max(a^b, a); keeps bounds meaningful when the ratio exceeds 1.
double starstar(double a, double b);

// Geometric grid {eta_max, eta_max/2, ..., eta_max/2^K}, K = ceil(log2 sqrt n) + 2.
// The smallest element is >= eta_max/(8 sqrt n).
std::vector<double> eta_grid(std::uint64_t n, double eta_max);

struct CompResult {
    double eta_hat = 0.0;
    double value = 0.0;
};

// Minimizes over the grid
//   comp(eta) = (eta/eta_max)^(1/(1-beta)) + (kl_ub + log|G|)/(n eta),
// where the first term at beta = 1 is taken as its limit: 0 below eta_max
// and 1 at eta_max. The minimum is within 4*starstar((kl_ub + llog n)/(n
// eta_max), 1/(2-beta)).
CompResult comp_minimize(double kl_ub, std::uint64_t n, double beta, double eta_max);

struct BoundConstants {
    double C_quarter = 0.0;  // c_const(2, 1/4) ~ 3.6064
    double eta_max = 0.0;    // min(1/4, 1/(2 B C_quarter))
};
BoundConstants bound_constants(double B);

struct BoundInputs {
    std::uint64_t n = 1;
    double beta = 0.0;
    double B = 1.0;
    double kl_bar = 0.0;      // expected KL or any upper bound on it (nats)
    double emp_excess = 0.0;  // empirical excess risk; negative for ERM
    double eta = 0.0;         // ESI rate (main form; must be <= sqrt(n) eta_max / 24)
    double delta = 0.05;      // confidence (in-probability form)
};

struct BoundReport {
    double excess_term = 0.0;
    double complexity_term = 0.0;
    double remainder_term = 0.0;
    double total = 0.0;
    BoundInputs inputs;
    double eta_max = 0.0;
    double C_quarter = 0.0;
};

// Generalization-gap ESI bound, valid for 0 < eta <= sqrt(n) eta_max / 24:
//   min(1,2 beta) emp_excess
//   + 8 * starstar((kl_bar + llog n)/(n eta_max), 1/(2-beta)) + 6 eta / n.
BoundReport main_bound(const BoundInputs& in);

// In-probability form (confidence 1-delta); eta is eliminated and replaced
// by eta_max/(4 sqrt n) + 24 log(1/delta)/(sqrt n eta_max).
BoundReport inprob_bound(const BoundInputs& in);

// In-expectation form: constant 4, no llog term. Passing the CMI as exp_kl
// gives the conditional-mutual-information bound.
BoundReport inexpect_bound(double exp_emp_excess, double exp_kl, std::uint64_t n, double beta,
                           double B);

// Classical slow-rate baselines. The PAC-Bayes constants are one standard
// instantiation (sqrt(2 L (kl + log(2 sqrt n / delta)) / n) + 2 (...)/n);
// the MI baseline is sqrt(2 mi / n).
double baseline_pac_bayes(double kl, std::uint64_t n, double delta, double emp_loss);
double baseline_mi(double mi, std::uint64_t n);

}  // namespace cpb
