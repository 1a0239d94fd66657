#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cpb/errors.hpp"
#include "cpb/rng.hpp"

namespace cpb {

// A labelled example. y is 0/1 for classification problems and may be any
// value in [0,1] for generic bounded-loss problems.
struct Example {
    int x = 0;
    double y = 0.0;

    friend bool operator==(const Example& a, const Example& b) {
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator<(const Example& a, const Example& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

using Sample = std::vector<Example>;

// n bits selecting, per row of a supersample, which column feeds the
// training sample; the complement column is the ghost sample.
using Selector = std::vector<std::uint8_t>;

// n rows of example pairs drawn i.i.d.; column 0 is the training sample,
// column 1 the ghost sample under the identity selector.
struct Supersample {
    std::vector<std::pair<Example, Example>> rows;

    std::size_t size() const { return rows.size(); }
    Sample column(int j) const;
};

struct DiscreteDistribution {
    std::vector<Example> atoms;
    std::vector<double> mass;  // nonnegative, sums to 1
};

// Validates masses (distinct atoms, drift below 1e-9) and renormalizes.
DiscreteDistribution make_distribution(std::vector<Example> atoms, std::vector<double> mass);

// Finite hypothesis class with a total order given by index; index is also
// the ERM tie-breaking order. Threshold classes predict 1 iff x >= t for
// t = 0..x_max, with one trailing sentinel hypothesis that predicts 0
// everywhere (threshold "infinity").
struct HypothesisClass {
    enum class Kind { Threshold, Table };

    Kind kind = Kind::Threshold;
    int x_max = 0;                             // Threshold
    std::vector<int> domain;                   // Table: feature values, sorted
    std::vector<std::vector<std::uint8_t>> table;  // Table: [id][domain index]

    int size() const {
        return kind == Kind::Threshold ? x_max + 2 : static_cast<int>(table.size());
    }
    int sentinel_id() const { return x_max + 1; }
    int predict(int id, int x) const;
    std::string name(int id) const;
};

HypothesisClass make_threshold_class(int x_max);
HypothesisClass make_table_class(std::vector<int> domain,
                                 std::vector<std::vector<std::uint8_t>> table);

// Finitely supported distribution over hypothesis ids of one class.
struct Posterior {
    std::vector<int> ids;
    std::vector<double> w;

    std::size_t support_size() const { return ids.size(); }
};

Posterior make_posterior(std::vector<int> ids, std::vector<double> w);
Posterior point_mass(int id);
Posterior uniform_posterior(std::vector<int> ids);
// Probability mass assigned to id (0 if outside support).
double mass_of(const Posterior& p, int id);

enum class LossKind { ZeroOne, Table };

struct LearningProblem {
    DiscreteDistribution dist;
    HypothesisClass cls;
    LossKind loss = LossKind::ZeroOne;
    // Table loss: [id][atom index], each entry in [0,1]. Table-loss problems
    // can only score examples that are atoms of dist.
    std::vector<std::vector<double>> loss_table;
    int f_star = -1;  // order-least population-loss minimizer

    double loss_of(int id, const Example& z) const;
    int atom_index(const Example& z) const;  // -1 if not an atom
};

LearningProblem make_problem(DiscreteDistribution dist, HypothesisClass cls);
LearningProblem make_table_problem(DiscreteDistribution dist, HypothesisClass cls,
                                   std::vector<std::vector<double>> loss_table);

// Threshold classification with random label noise: X ~ (domain, px),
// Y = [x >= t_star] flipped with probability noise_p.
LearningProblem make_noisy_threshold_problem(const std::vector<int>& domain,
                                             const std::vector<double>& px,
                                             int t_star, double noise_p);

// JSON schema:
//   {"domain":[ints], "dist":[probs], "noise_p":p, "t_star":t,
//    "class":"thresholds" | [[0,1,...],...], "loss":"zero-one"}
// or explicit atoms: {"atoms":[[x,y,mass],...], "class":..., "loss":"zero-one"}
LearningProblem load_problem_json(const std::string& json_text);
LearningProblem load_problem_file(const std::string& path);

// --- risk functionals (exact) ---

// (1/n) sum_i sum_f F(f) loss(f, z_i)
double empirical_loss(const LearningProblem& p, const Posterior& F, const Sample& z);
// Atom-weighted expectation of the randomized loss.
double population_loss(const LearningProblem& p, const Posterior& F);

struct ExcessRisks {
    double population = 0.0;  // >= 0 by optimality of f_star
    double empirical = 0.0;   // may be negative (ERM)
};
ExcessRisks excess_risks(const LearningProblem& p, const Posterior& F, const Sample& z);

// Row i of the first sample is rows[i][s_i]; the second uses 1-s_i.
std::pair<Sample, Sample> select(const Supersample& ss, const Selector& s);

Example draw_example(const DiscreteDistribution& d, Rng& rng);
Sample draw_sample(const DiscreteDistribution& d, std::size_t n, Rng& rng);
Supersample draw_supersample(const DiscreteDistribution& d, std::size_t n, std::uint64_t seed);

}  // namespace cpb
