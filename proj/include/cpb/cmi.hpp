#pragma once
#include <functional>

#include "cpb/core.hpp"

namespace cpb {

// I^z(A|z_S; S) = E_S[ kl(A|z_S || E_{S'}[A|z_{S'}]) ], computed exactly by
// enumerating all 2^n selectors. Capped at 2^cap_n.
double disintegrated_mi(const std::function<Posterior(const Sample&)>& A, const Supersample& ss,
                        int cap_n = 16);

struct CmiEstimate {
    double value = 0.0;      // nats, in [0, n ln 2]
    double std_error = 0.0;  // 0 in exact mode
    bool exact = true;
    std::uint64_t supersamples_used = 0;
};

// CMI(A;D) = E over supersamples of the disintegrated MI. Exact mode
// enumerates atoms^(2n) supersamples (tiny cases only); MC mode averages
// `budget` sampled supersamples.
CmiEstimate cmi(const std::function<Posterior(const Sample&)>& A, const DiscreteDistribution& D,
                std::size_t n, bool exact, std::uint64_t budget, std::uint64_t seed,
                std::uint64_t exact_cap = 1000000);

}  // namespace cpb
