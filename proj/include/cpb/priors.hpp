#pragma once
#include <functional>
#include <optional>
#include <string>

#include "cpb/core.hpp"

namespace cpb {

// KL divergence in nats between finitely supported posteriors; +infinity
// when P puts mass outside Q's support.
double kl(const Posterior& P, const Posterior& Q);

// A conditional prior: a map from supersamples to posteriors. All builders
// constructed here are almost exchangeable (invariant to swapping the two
// entries of any row), which tests verify on random selectors.
struct ConditionalPrior {
    std::string name;
    std::function<Posterior(const Supersample&)> build;
};

// Uniform distribution over the distinct outputs of a deterministic
// algorithm across all 2^n selections of the supersample. Outputs are
// deduplicated extensionally by their predictions on the supersample's
// feature set (the quantity the Sauer argument counts); each group keeps its
// least id. Enumeration is capped at 2^cap_n selectors.
Posterior enumeration_prior(const std::function<int(const Sample&)>& A,
                            const HypothesisClass& cls, const Supersample& ss, int cap_n = 16);
ConditionalPrior make_enumeration_prior(const std::function<int(const Sample&)>& A,
                                        const HypothesisClass& cls, int cap_n = 16);

// Compression scheme machinery: A1 selects k indices into a sample, W2 maps
// the selected examples (canonically sorted) to a posterior.
using Compressor = std::function<std::vector<std::size_t>(const Sample&)>;
using CompressionMap = std::function<Posterior(const std::vector<Example>&)>;

// The almost exchangeable prior behind a size-k compression scheme:
//   pi(f) = sum over all size-k subsets of the 2n supersample entries of
//           W2(subset)(f), divided by C(2n, k).
// For k = 0 this is just the fixed W2({}) distribution.
Posterior compression_prior(const CompressionMap& W2, const Supersample& ss, int k,
                            std::uint64_t subset_cap = 10000000);

// The compression scheme prior itself, W|z = W2(A1|z), as a posterior.
Posterior compression_scheme_output(const Compressor& A1, const CompressionMap& W2,
                                    const Sample& z, int k);

ConditionalPrior mixture_prior(std::vector<ConditionalPrior> priors, std::vector<double> rho);
ConditionalPrior data_independent_prior(Posterior W);

struct ExpectedKl {
    double value = 0.0;      // +infinity propagates
    double std_error = 0.0;  // 0 in exact mode
    bool exact = true;
    std::uint64_t ghosts_used = 0;
    std::optional<std::string> offending_ghost;  // set when value is +infinity
};

// E over ghost samples Z1 ~ D^n of kl(A|z0, prior(z0, Z1)). Exact mode
// enumerates atoms^n ghost samples (capped); MC mode averages over `budget`
// sampled ghosts and reports the standard error of the mean.
ExpectedKl expected_kl_ghost(const std::function<Posterior(const Sample&)>& A,
                             const ConditionalPrior& prior, const Sample& z0,
                             const DiscreteDistribution& D, bool exact, std::uint64_t budget,
                             std::uint64_t seed, std::uint64_t exact_cap = 1000000);

struct SauerBound {
    double sum = 0.0;            // sum_{k=0}^{d} C(m,k), = 2^m when m <= d
    double cap_e_md = 0.0;       // e * m^d          (m >= 1)
    double cap_em_over_d = 0.0;  // (e m / d)^d      (m >= d, d >= 1)
    double cap_e2_half = 0.0;    // e^2 * (m/2)^d    (m >= 2)
};
SauerBound sauer_bound(int d, int m);

double binomial(int n, int k);

}  // namespace cpb
