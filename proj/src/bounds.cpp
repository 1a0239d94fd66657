#include "cpb/bounds.hpp"

#include <cmath>

#include "cpb/lemma1.hpp"

namespace cpb {

namespace {

int grid_exponent(std::uint64_t n) {
    // K = ceil(log2(sqrt(n))) + 2, computed in integers: ceil(ceil(log2 n)/2).
    int log2n_ceil = 0;
    std::uint64_t v = 1;
    while (v < n) {
        v <<= 1;
        ++log2n_ceil;
    }
    return (log2n_ceil + 1) / 2 + 2;
}

}  // namespace

double llog(std::uint64_t n) {
    if (n < 1) throw invalid_input("llog: n must be >= 1");
    return std::log(static_cast<double>(grid_exponent(n)));
}

double starstar(double a, double b) {
    if (a < 0.0) throw invalid_input("starstar: a must be >= 0");
    if (!(b > 0.0 && b <= 1.0)) throw invalid_input("starstar: b in (0,1]");
    return std::max(std::pow(a, b), a);
}

std::vector<double> eta_grid(std::uint64_t n, double eta_max) {
    if (n < 1) throw invalid_input("eta_grid: n must be >= 1");
    if (!(eta_max > 0.0)) throw invalid_input("eta_grid: eta_max must be > 0");
    const int K = grid_exponent(n);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(K) + 1);
    double eta = eta_max;
    for (int i = 0; i <= K; ++i) {
        grid.push_back(eta);
        eta *= 0.5;
    }
    return grid;
}

CompResult comp_minimize(double kl_ub, std::uint64_t n, double beta, double eta_max) {
    if (kl_ub < 0.0) throw invalid_input("comp_minimize: kl_ub must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw invalid_input("comp_minimize: beta in [0,1]");
    const std::vector<double> grid = eta_grid(n, eta_max);
    const double log_grid = std::log(static_cast<double>(grid.size()));
    CompResult best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double rate_term;
        if (beta >= 1.0)
            rate_term = i == 0 ? 1.0 : 0.0;  // limit of (eta/eta_max)^(1/(1-beta))
        else
            rate_term = std::pow(grid[i] / eta_max, 1.0 / (1.0 - beta));
        double value = rate_term + (kl_ub + log_grid) / (static_cast<double>(n) * grid[i]);
        if (value < best.value) best = {grid[i], value};
    }
    return best;
}

BoundConstants bound_constants(double B) {
    if (!(B >= 1.0)) throw invalid_input("bound_constants: B must be >= 1");
    BoundConstants c;
    c.C_quarter = c_const(2.0, 0.25);
    c.eta_max = std::min(0.25, 1.0 / (2.0 * B * c.C_quarter));
    return c;
}

namespace {

double complexity_term(const BoundInputs& in, double eta_max, double factor, bool with_llog) {
    double num = in.kl_bar + (with_llog ? llog(in.n) : 0.0);
    double a = num / (static_cast<double>(in.n) * eta_max);
    return factor * starstar(a, 1.0 / (2.0 - in.beta));
}

void validate_common(const BoundInputs& in) {
    if (in.n < 1) throw invalid_input("bound: n must be >= 1");
    if (!(in.beta >= 0.0 && in.beta <= 1.0)) throw invalid_input("bound: beta in [0,1]");
    if (in.kl_bar < 0.0) throw invalid_input("bound: kl_bar must be >= 0");
}

}  // namespace

BoundReport main_bound(const BoundInputs& in) {
    validate_common(in);
    BoundConstants c = bound_constants(in.B);
    double eta_cap = std::sqrt(static_cast<double>(in.n)) * c.eta_max / 24.0;
    if (!(in.eta > 0.0 && in.eta <= eta_cap + 1e-15))
        throw invalid_input("main_bound: need 0 < eta <= sqrt(n) eta_max / 24");
    BoundReport r;
    r.inputs = in;
    r.eta_max = c.eta_max;
    r.C_quarter = c.C_quarter;
    r.excess_term = std::min(1.0, 2.0 * in.beta) * in.emp_excess;
    r.complexity_term = complexity_term(in, c.eta_max, 8.0, true);
    r.remainder_term = 6.0 * in.eta / static_cast<double>(in.n);
    r.total = r.excess_term + r.complexity_term + r.remainder_term;
    return r;
}

BoundReport inprob_bound(const BoundInputs& in) {
    validate_common(in);
    if (!(in.delta > 0.0 && in.delta < 1.0)) throw invalid_input("inprob_bound: delta in (0,1)");
    BoundConstants c = bound_constants(in.B);
    const double sqn = std::sqrt(static_cast<double>(in.n));
    BoundReport r;
    r.inputs = in;
    r.eta_max = c.eta_max;
    r.C_quarter = c.C_quarter;
    r.excess_term = std::min(1.0, 2.0 * in.beta) * in.emp_excess;
    r.complexity_term = complexity_term(in, c.eta_max, 8.0, true);
    r.remainder_term = c.eta_max / (4.0 * sqn) + 24.0 * std::log(1.0 / in.delta) / (sqn * c.eta_max);
    r.total = r.excess_term + r.complexity_term + r.remainder_term;
    return r;
}

BoundReport inexpect_bound(double exp_emp_excess, double exp_kl, std::uint64_t n, double beta,
                           double B) {
    BoundInputs in;
    in.n = n;
    in.beta = beta;
    in.B = B;
    in.kl_bar = exp_kl;
    in.emp_excess = exp_emp_excess;
    validate_common(in);
    BoundConstants c = bound_constants(B);
    BoundReport r;
    r.inputs = in;
    r.eta_max = c.eta_max;
    r.C_quarter = c.C_quarter;
    r.excess_term = std::min(1.0, 2.0 * beta) * exp_emp_excess;
    r.complexity_term = complexity_term(in, c.eta_max, 4.0, false);
    r.remainder_term = 0.0;
    r.total = r.excess_term + r.complexity_term;
    return r;
}

double baseline_pac_bayes(double kl, std::uint64_t n, double delta, double emp_loss) {
    if (kl < 0.0) throw invalid_input("baseline_pac_bayes: kl must be >= 0");
    if (!(delta > 0.0 && delta < 1.0)) throw invalid_input("baseline_pac_bayes: delta in (0,1)");
    double nd = static_cast<double>(n);
    double num = kl + std::log(2.0 * std::sqrt(nd) / delta);
    return std::sqrt(2.0 * emp_loss * num / nd) + 2.0 * num / nd;
}

double baseline_mi(double mi, std::uint64_t n) {
    if (mi < 0.0) throw invalid_input("baseline_mi: mi must be >= 0");
    return std::sqrt(2.0 * mi / static_cast<double>(n));
}

}  // namespace cpb
