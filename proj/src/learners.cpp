#include "cpb/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace cpb {

int threshold_erm(const HypothesisClass& cls, const Sample& z) {
    if (cls.kind != HypothesisClass::Kind::Threshold)
        throw invalid_input("threshold_erm: needs a threshold class");
    if (z.empty()) throw invalid_input("threshold_erm: empty sample");
    // errors(t) = #{x_i < t with y_i = 1} + #{x_i >= t with y_i = 0};
    // moving t past x changes the count by n1[x] - n0[x].
    std::vector<int> n0(static_cast<std::size_t>(cls.x_max) + 1, 0);
    std::vector<int> n1(static_cast<std::size_t>(cls.x_max) + 1, 0);
    int total0 = 0;
    for (const auto& e : z) {
        if (e.x < 0 || e.x > cls.x_max)
            throw invalid_input("threshold_erm: feature outside [0, x_max]");
        int y = static_cast<int>(std::lround(e.y));
        if (y != 0 && y != 1) throw invalid_input("threshold_erm: labels must be 0/1");
        if (y == 0) {
            ++n0[static_cast<std::size_t>(e.x)];
            ++total0;
        } else {
            ++n1[static_cast<std::size_t>(e.x)];
        }
    }
    int errors = total0;  // t = 0 predicts 1 everywhere
    int best_t = 0;
    int best_err = errors;
    for (int t = 0; t <= cls.x_max; ++t) {
        errors += n1[static_cast<std::size_t>(t)] - n0[static_cast<std::size_t>(t)];
        if (errors < best_err) {
            best_err = errors;
            best_t = t + 1;  // t+1 == x_max+1 is the sentinel
        }
    }
    return best_t;
}

int ordered_erm(const HypothesisClass& cls, const Sample& z) {
    if (z.empty()) throw invalid_input("ordered_erm: empty sample");
    int best = 0;
    int best_err = static_cast<int>(z.size()) + 1;
    for (int f = 0; f < cls.size(); ++f) {
        int err = 0;
        for (const auto& e : z)
            if (cls.predict(f, e.x) != static_cast<int>(std::lround(e.y))) ++err;
        if (err < best_err) {
            best_err = err;
            best = f;
        }
    }
    return best;
}

bool check_global_consistency(const std::function<int(const Sample&)>& A,
                              const HypothesisClass& cls, const Sample& z,
                              const std::vector<int>& x_ext) {
    std::set<int> ext(x_ext.begin(), x_ext.end());
    for (const auto& e : z)
        if (!ext.count(e.x))
            throw invalid_input("check_global_consistency: x_ext misses a feature of z");
    int f = A(z);
    Sample relabelled;
    relabelled.reserve(x_ext.size());
    for (int x : x_ext) relabelled.push_back({x, static_cast<double>(cls.predict(f, x))});
    return A(relabelled) == f;
}

Posterior gibbs_posterior(const LearningProblem& p, const Posterior& W, const Sample& z,
                          double eta_hat) {
    if (!(eta_hat > 0.0)) throw invalid_input("gibbs_posterior: eta_hat must be > 0");
    if (z.empty()) throw invalid_input("gibbs_posterior: empty sample");
    const double n = static_cast<double>(z.size());
    const double star_loss = empirical_loss(p, point_mass(p.f_star), z);
    std::vector<double> logw(W.ids.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < W.ids.size(); ++k) {
        double excess = empirical_loss(p, point_mass(W.ids[k]), z) - star_loss;
        logw[k] = std::log(W.w[k]) - eta_hat * n * excess;
        top = std::max(top, logw[k]);
    }
    std::vector<double> w(W.ids.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = std::exp(logw[k] - top);
        sum += w[k];
    }
    for (double& v : w) v /= sum;
    return Posterior{W.ids, std::move(w)};
}

Algorithm make_threshold_erm_algorithm(const HypothesisClass& cls) {
    return Algorithm{"threshold-erm", true,
                     [cls](const Sample& z) { return point_mass(threshold_erm(cls, z)); }};
}

Algorithm make_ordered_erm_algorithm(const HypothesisClass& cls) {
    return Algorithm{"ordered-erm", true,
                     [cls](const Sample& z) { return point_mass(ordered_erm(cls, z)); }};
}

Algorithm make_gibbs_algorithm(const LearningProblem& p, const Posterior& W, double eta_hat) {
    return Algorithm{"gibbs", false, [p, W, eta_hat](const Sample& z) {
                         return gibbs_posterior(p, W, z, eta_hat);
                     }};
}

Algorithm algorithm_by_name(const std::string& name, const LearningProblem& p) {
    if (name == "threshold-erm") return make_threshold_erm_algorithm(p.cls);
    if (name == "ordered-erm") return make_ordered_erm_algorithm(p.cls);
    if (name.rfind("gibbs:", 0) == 0) {
        double eta = std::stod(name.substr(6));
        std::vector<int> ids(static_cast<std::size_t>(p.cls.size()));
        std::iota(ids.begin(), ids.end(), 0);
        return make_gibbs_algorithm(p, uniform_posterior(std::move(ids)), eta);
    }
    throw invalid_input("unknown algorithm: " + name);
}

}  // namespace cpb
