#include "cpb/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cpb {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kMassDrift = 1e-9;

void normalize_masses(std::vector<double>& mass, const char* what) {
    double sum = 0.0;
    for (double m : mass) {
        if (m < -kMassTol) throw invalid_input(std::string(what) + ": negative mass");
        sum += m;
    }
    if (std::abs(sum - 1.0) > kMassDrift)
        throw invalid_input(std::string(what) + ": masses sum to " + std::to_string(sum));
    for (double& m : mass) m = std::max(0.0, m) / sum;
}

}  // namespace

Sample Supersample::column(int j) const {
    if (j != 0 && j != 1) throw invalid_input("Supersample::column: j must be 0 or 1");
    Sample out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(j == 0 ? r.first : r.second);
    return out;
}

DiscreteDistribution make_distribution(std::vector<Example> atoms, std::vector<double> mass) {
    if (atoms.empty()) throw invalid_input("distribution: no atoms");
    if (atoms.size() != mass.size()) throw invalid_input("distribution: atoms/mass length mismatch");
    std::set<Example> seen(atoms.begin(), atoms.end());
    if (seen.size() != atoms.size()) throw invalid_input("distribution: duplicate atoms");
    normalize_masses(mass, "distribution");
    return DiscreteDistribution{std::move(atoms), std::move(mass)};
}

int HypothesisClass::predict(int id, int x) const {
    if (id < 0 || id >= size()) throw invalid_input("predict: hypothesis id out of range");
    if (kind == Kind::Threshold) {
        if (id == sentinel_id()) return 0;
        return x >= id ? 1 : 0;
    }
    auto it = std::lower_bound(domain.begin(), domain.end(), x);
    if (it == domain.end() || *it != x)
        throw invalid_input("predict: feature outside declared domain");
    return table[id][static_cast<std::size_t>(it - domain.begin())];
}

std::string HypothesisClass::name(int id) const {
    if (kind == Kind::Threshold)
        return id == sentinel_id() ? std::string("t=inf") : "t=" + std::to_string(id);
    return "h" + std::to_string(id);
}

HypothesisClass make_threshold_class(int x_max) {
    if (x_max < 0) throw invalid_input("threshold class: x_max must be >= 0");
    HypothesisClass c;
    c.kind = HypothesisClass::Kind::Threshold;
    c.x_max = x_max;
    return c;
}

HypothesisClass make_table_class(std::vector<int> domain,
                                 std::vector<std::vector<std::uint8_t>> table) {
    if (domain.empty() || table.empty()) throw invalid_input("table class: empty");
    if (!std::is_sorted(domain.begin(), domain.end()) ||
        std::adjacent_find(domain.begin(), domain.end()) != domain.end())
        throw invalid_input("table class: domain must be sorted and distinct");
    for (const auto& row : table) {
        if (row.size() != domain.size()) throw invalid_input("table class: row length mismatch");
        for (auto v : row)
            if (v > 1) throw invalid_input("table class: predictions must be 0/1");
    }
    HypothesisClass c;
    c.kind = HypothesisClass::Kind::Table;
    c.domain = std::move(domain);
    c.table = std::move(table);
    return c;
}

Posterior make_posterior(std::vector<int> ids, std::vector<double> w) {
    if (ids.empty()) throw invalid_input("posterior: empty support");
    if (ids.size() != w.size()) throw invalid_input("posterior: ids/weights length mismatch");
    std::set<int> seen(ids.begin(), ids.end());
    if (seen.size() != ids.size()) throw invalid_input("posterior: duplicate support ids");
    normalize_masses(w, "posterior");
    return Posterior{std::move(ids), std::move(w)};
}

Posterior point_mass(int id) { return Posterior{{id}, {1.0}}; }

Posterior uniform_posterior(std::vector<int> ids) {
    std::vector<double> w(ids.size(), 1.0 / static_cast<double>(ids.size()));
    return make_posterior(std::move(ids), std::move(w));
}

double mass_of(const Posterior& p, int id) {
    for (std::size_t i = 0; i < p.ids.size(); ++i)
        if (p.ids[i] == id) return p.w[i];
    return 0.0;
}

int LearningProblem::atom_index(const Example& z) const {
    for (std::size_t i = 0; i < dist.atoms.size(); ++i)
        if (dist.atoms[i] == z) return static_cast<int>(i);
    return -1;
}

double LearningProblem::loss_of(int id, const Example& z) const {
    if (loss == LossKind::ZeroOne) {
        int y = static_cast<int>(std::lround(z.y));
        if (y != 0 && y != 1) throw invalid_input("zero-one loss: label must be 0 or 1");
        return cls.predict(id, z.x) == y ? 0.0 : 1.0;
    }
    int a = atom_index(z);
    if (a < 0) throw invalid_input("table loss: example is not an atom of the distribution");
    return loss_table[static_cast<std::size_t>(id)][static_cast<std::size_t>(a)];
}

namespace {

int order_least_pop_minimizer(const LearningProblem& p) {
    int best = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (int f = 0; f < p.cls.size(); ++f) {
        double l = 0.0;
        for (std::size_t a = 0; a < p.dist.atoms.size(); ++a)
            l += p.dist.mass[a] * p.loss_of(f, p.dist.atoms[a]);
        if (l < best_loss - kMassTol) {
            best_loss = l;
            best = f;
        }
    }
    return best;
}

}  // namespace

LearningProblem make_problem(DiscreteDistribution dist, HypothesisClass cls) {
    LearningProblem p;
    p.dist = std::move(dist);
    p.cls = std::move(cls);
    p.loss = LossKind::ZeroOne;
    for (const auto& z : p.dist.atoms) {
        int y = static_cast<int>(std::lround(z.y));
        if (y != 0 && y != 1) throw invalid_input("problem: zero-one loss needs 0/1 labels");
    }
    p.f_star = order_least_pop_minimizer(p);
    return p;
}

LearningProblem make_table_problem(DiscreteDistribution dist, HypothesisClass cls,
                                   std::vector<std::vector<double>> loss_table) {
    LearningProblem p;
    p.dist = std::move(dist);
    p.cls = std::move(cls);
    p.loss = LossKind::Table;
    if (static_cast<int>(loss_table.size()) != p.cls.size())
        throw invalid_input("table problem: loss table must have one row per hypothesis");
    for (const auto& row : loss_table) {
        if (row.size() != p.dist.atoms.size())
            throw invalid_input("table problem: loss row length mismatch");
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0)) throw invalid_input("table problem: loss outside [0,1]");
    }
    p.loss_table = std::move(loss_table);
    p.f_star = order_least_pop_minimizer(p);
    return p;
}

LearningProblem make_noisy_threshold_problem(const std::vector<int>& domain,
                                             const std::vector<double>& px,
                                             int t_star, double noise_p) {
    if (!(noise_p > 0.0 && noise_p < 0.5))
        throw invalid_input("noisy thresholds: need 0 < p < 1/2");
    if (domain.empty() || domain.size() != px.size())
        throw invalid_input("noisy thresholds: domain/px mismatch");
    int x_max = *std::max_element(domain.begin(), domain.end());
    if (*std::min_element(domain.begin(), domain.end()) < 0)
        throw invalid_input("noisy thresholds: features must be >= 0");
    if (t_star < 0 || t_star > x_max) throw invalid_input("noisy thresholds: t_star outside [0,x_max]");
    std::vector<Example> atoms;
    std::vector<double> mass;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        double clean = domain[i] >= t_star ? 1.0 : 0.0;
        atoms.push_back({domain[i], clean});
        mass.push_back(px[i] * (1.0 - noise_p));
        atoms.push_back({domain[i], 1.0 - clean});
        mass.push_back(px[i] * noise_p);
    }
    return make_problem(make_distribution(std::move(atoms), std::move(mass)),
                        make_threshold_class(x_max));
}

LearningProblem load_problem_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input(std::string("problem json: ") + e.what());
    }
    if (j.contains("loss") && j["loss"] != "zero-one")
        throw invalid_input("problem json: only \"zero-one\" loss is supported here");

    std::vector<int> domain;
    if (j.contains("domain")) domain = j["domain"].get<std::vector<int>>();

    HypothesisClass cls;
    if (!j.contains("class") || j["class"] == "thresholds") {
        if (domain.empty()) throw invalid_input("problem json: thresholds need a domain");
        cls = make_threshold_class(*std::max_element(domain.begin(), domain.end()));
    } else if (j["class"].is_array()) {
        std::vector<std::vector<std::uint8_t>> table;
        for (const auto& row : j["class"]) table.push_back(row.get<std::vector<std::uint8_t>>());
        std::vector<int> sorted = domain;
        std::sort(sorted.begin(), sorted.end());
        cls = make_table_class(std::move(sorted), std::move(table));
    } else {
        throw invalid_input("problem json: class must be \"thresholds\" or a prediction table");
    }

    if (j.contains("atoms")) {
        std::vector<Example> atoms;
        std::vector<double> mass;
        for (const auto& a : j["atoms"]) {
            atoms.push_back({a.at(0).get<int>(), a.at(1).get<double>()});
            mass.push_back(a.at(2).get<double>());
        }
        return make_problem(make_distribution(std::move(atoms), std::move(mass)), std::move(cls));
    }

    auto px = j.at("dist").get<std::vector<double>>();
    double p = j.at("noise_p").get<double>();
    int t_star = j.at("t_star").get<int>();
    if (cls.kind != HypothesisClass::Kind::Threshold)
        throw invalid_input("problem json: noise_p/t_star form requires the threshold class");
    return make_noisy_threshold_problem(domain, px, t_star, p);
}

LearningProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open problem file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_problem_json(ss.str());
}

double empirical_loss(const LearningProblem& p, const Posterior& F, const Sample& z) {
    if (z.empty()) throw invalid_input("empirical_loss: empty sample");
    double total = 0.0;
    for (const auto& zi : z)
        for (std::size_t k = 0; k < F.ids.size(); ++k)
            total += F.w[k] * p.loss_of(F.ids[k], zi);
    return total / static_cast<double>(z.size());
}

double population_loss(const LearningProblem& p, const Posterior& F) {
    double total = 0.0;
    for (std::size_t a = 0; a < p.dist.atoms.size(); ++a) {
        double lf = 0.0;
        for (std::size_t k = 0; k < F.ids.size(); ++k)
            lf += F.w[k] * p.loss_of(F.ids[k], p.dist.atoms[a]);
        total += p.dist.mass[a] * lf;
    }
    return total;
}

ExcessRisks excess_risks(const LearningProblem& p, const Posterior& F, const Sample& z) {
    Posterior star = point_mass(p.f_star);
    ExcessRisks r;
    r.population = population_loss(p, F) - population_loss(p, star);
    r.empirical = empirical_loss(p, F, z) - empirical_loss(p, star, z);
    return r;
}

std::pair<Sample, Sample> select(const Supersample& ss, const Selector& s) {
    if (ss.size() != s.size()) throw invalid_input("select: selector length mismatch");
    Sample zs, zbar;
    zs.reserve(ss.size());
    zbar.reserve(ss.size());
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (s[i] > 1) throw invalid_input("select: selector bits must be 0/1");
        const auto& r = ss.rows[i];
        zs.push_back(s[i] ? r.second : r.first);
        zbar.push_back(s[i] ? r.first : r.second);
    }
    return {std::move(zs), std::move(zbar)};
}

Example draw_example(const DiscreteDistribution& d, Rng& rng) {
    double u = uniform01(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < d.atoms.size(); ++i) {
        cum += d.mass[i];
        if (u < cum) return d.atoms[i];
    }
    return d.atoms.back();
}

Sample draw_sample(const DiscreteDistribution& d, std::size_t n, Rng& rng) {
    if (n == 0) throw invalid_input("draw_sample: n must be >= 1");
    Sample z;
    z.reserve(n);
    for (std::size_t i = 0; i < n; ++i) z.push_back(draw_example(d, rng));
    return z;
}

Supersample draw_supersample(const DiscreteDistribution& d, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw invalid_input("draw_supersample: n must be >= 1");
    Rng rng(seed);
    Supersample ss;
    ss.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Example a = draw_example(d, rng);
        Example b = draw_example(d, rng);
        ss.rows.emplace_back(a, b);
    }
    return ss;
}

}  // namespace cpb
