#pragma once
#include <functional>
#include <string>

#include "cpb/core.hpp"

namespace cpb {

// A learning algorithm maps a sample to a distribution over hypotheses.
// Deterministic algorithms output point masses; randomized ones (Gibbs)
// output their full posterior, so selector enumeration never needs nested
// sampling.
struct Algorithm {
    std::string name;
    bool deterministic = true;
    std::function<Posterior(const Sample&)> run;
};

// Smallest empirical-0/1-loss threshold: among minimizers, the least t, with
// the sentinel chosen only when nothing smaller minimizes. O(n + x_max).
int threshold_erm(const HypothesisClass& cls, const Sample& z);

// Order-least empirical-loss minimizer over an arbitrary finite class
// (0/1 loss); ties break toward the smaller id.
int ordered_erm(const HypothesisClass& cls, const Sample& z);

// Let f = A(z). Relabel x_ext by f and rerun: returns A((x_ext, f(x_ext))) == f.
// x_ext must contain every feature of z.
bool check_global_consistency(const std::function<int(const Sample&)>& A,
                              const HypothesisClass& cls, const Sample& z,
                              const std::vector<int>& x_ext);

// Gibbs posterior relative to prior W: weights proportional to
// W(f) exp(-eta_hat n R(f; z)) with R the empirical excess risk against the
// problem's f_star. Computed in the log domain with max subtraction.
Posterior gibbs_posterior(const LearningProblem& p, const Posterior& W, const Sample& z,
                          double eta_hat);

Algorithm make_threshold_erm_algorithm(const HypothesisClass& cls);
Algorithm make_ordered_erm_algorithm(const HypothesisClass& cls);
Algorithm make_gibbs_algorithm(const LearningProblem& p, const Posterior& W, double eta_hat);
// Resolves "threshold-erm", "ordered-erm", "gibbs:<eta>" (Gibbs with a
// uniform prior over the class).
Algorithm algorithm_by_name(const std::string& name, const LearningProblem& p);

}  // namespace cpb
