#include "cpb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cpb/bernstein.hpp"
#include "cpb/csv.hpp"
#include "cpb/learners.hpp"
#include "cpb/priors.hpp"

namespace cpb {

ExperimentConfig default_rate_config() {
    ExperimentConfig cfg;
    for (int x = 1; x <= 10; ++x) {
        cfg.domain.push_back(x);
        cfg.px.push_back(0.1);
    }
    for (int k = 4; k <= 14; ++k) cfg.n_schedule.push_back(1ULL << k);
    return cfg;
}

namespace {

void validate_config(const ExperimentConfig& cfg) {
    if (!(cfg.noise_p > 0.0 && cfg.noise_p < 0.5))
        throw invalid_input("experiment: need 0 < noise_p < 1/2");
    if (cfg.trials < 1) throw invalid_input("experiment: trials must be >= 1");
    if (cfg.n_schedule.empty()) throw invalid_input("experiment: empty n schedule");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw invalid_input("experiment: delta in (0,1)");
}

double fast_complexity_at(std::uint64_t n, double beta, double eta_max) {
    double a = (std::log(2.0 * static_cast<double>(n)) + llog(n)) /
               (static_cast<double>(n) * eta_max);
    return 8.0 * starstar(a, 1.0 / (2.0 - beta));
}

}  // namespace

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw invalid_input("slope fit: need >= 2 points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0 && ys[i] > 0.0)) throw invalid_input("slope fit: values must be > 0");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

RateResult run_rate_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    LearningProblem problem =
        make_noisy_threshold_problem(cfg.domain, cfg.px, cfg.t_star, cfg.noise_p);
    double beta = cfg.beta, B = cfg.B;
    if (cfg.certify_bernstein) {
        BernsteinCertificate cert = best_B(problem, 1.0);
        if (!cert.feasible) throw invalid_input("rate experiment: beta=1 certificate infeasible");
        beta = 1.0;
        B = cert.B;
    }
    BoundConstants bc = bound_constants(B);
    Algorithm erm = make_threshold_erm_algorithm(problem.cls);
    const Posterior star = point_mass(problem.f_star);

    RateResult out;
    out.rows.reserve(cfg.n_schedule.size() * static_cast<std::size_t>(cfg.trials));
    for (std::uint64_t n : cfg.n_schedule) {
        for (int trial = 0; trial < cfg.trials; ++trial) {
            Rng rng(derive_seed(cfg.seed, n, static_cast<std::uint64_t>(trial)));
            Sample z = draw_sample(problem.dist, n, rng);
            Posterior Fhat = erm.run(z);
            double emp = empirical_loss(problem, Fhat, z);
            double pop = population_loss(problem, Fhat);
            double kl_bar;
            if (cfg.kl_source == KlSource::SauerCap) {
                kl_bar = std::log(2.0 * static_cast<double>(n));
            } else {
                ExpectedKl ekl = expected_kl_ghost(
                    erm.run, make_enumeration_prior([&](const Sample& s) {
                        return threshold_erm(problem.cls, s);
                    }, problem.cls),
                    z, problem.dist, false, cfg.kl_mc_budget,
                    derive_seed(cfg.seed, n * 31 + 7, static_cast<std::uint64_t>(trial)));
                kl_bar = ekl.value;
            }
            BoundInputs in;
            in.n = n;
            in.beta = beta;
            in.B = B;
            in.kl_bar = kl_bar;
            in.emp_excess = emp - empirical_loss(problem, star, z);
            in.eta = std::sqrt(static_cast<double>(n)) * bc.eta_max / 24.0;
            in.delta = cfg.delta;

            RateRow row;
            row.n = n;
            row.trial = trial;
            row.gap = pop - emp;
            row.main_bound_total = main_bound(in).total;
            row.inprob_total = inprob_bound(in).total;
            row.baseline_pb = baseline_pac_bayes(kl_bar, n, cfg.delta, emp);
            row.baseline_mi_proxy = baseline_mi(kl_bar, n);
            row.covered = row.gap <= row.inprob_total;
            out.rows.push_back(row);
        }
    }
    out.summary = summarize_rate_rows(out.rows, cfg);
    return out;
}

RateSummary summarize_rate_rows(const std::vector<RateRow>& rows, const ExperimentConfig& cfg) {
    RateSummary s;
    std::map<std::uint64_t, std::vector<const RateRow*>> by_n;
    for (const auto& r : rows) by_n[r.n].push_back(&r);

    double beta = cfg.beta, B = cfg.B;
    if (cfg.certify_bernstein) {
        LearningProblem problem =
            make_noisy_threshold_problem(cfg.domain, cfg.px, cfg.t_star, cfg.noise_p);
        beta = 1.0;
        B = best_B(problem, 1.0).B;
    }
    BoundConstants bc = bound_constants(B);

    for (const auto& [n, group] : by_n) {
        double cov = 0.0, abs_gap = 0.0, inprob = 0.0, base = 0.0;
        for (const RateRow* r : group) {
            cov += r->covered ? 1.0 : 0.0;
            abs_gap += std::abs(r->gap);
            inprob += r->inprob_total;
            base += r->baseline_pb;
        }
        double m = static_cast<double>(group.size());
        s.ns.push_back(n);
        s.coverage.push_back(cov / m);
        s.mean_abs_gap.push_back(abs_gap / m);
        s.mean_inprob.push_back(inprob / m);
        s.mean_baseline_pb.push_back(base / m);
        s.fast_complexity.push_back(fast_complexity_at(n, beta, bc.eta_max));
    }

    // Slopes on the top half of the schedule to dodge small-n transients.
    std::size_t half = s.ns.size() / 2;
    std::vector<double> top_ns;
    for (std::size_t i = half; i < s.ns.size(); ++i)
        top_ns.push_back(static_cast<double>(s.ns[i]));
    auto tail = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + half, v.end());
    };
    if (top_ns.size() >= 2) {
        s.fast_complexity_slope = fit_loglog_slope(top_ns, tail(s.fast_complexity));
        s.baseline_pb_slope = fit_loglog_slope(top_ns, tail(s.mean_baseline_pb));
        s.gap_slope = fit_loglog_slope(top_ns, tail(s.mean_abs_gap));
        s.inprob_slope = fit_loglog_slope(top_ns, tail(s.mean_inprob));
    }

    // Proxy for the ERM empirical loss when extrapolating the baseline
    // beyond the schedule; at large n it concentrates at the noise level.
    s.mean_emp_loss_tail = cfg.noise_p;

    // Tail comparison and crossover scan for the fast term against the
    // slow-rate baseline, extrapolated with the same formulas.
    s.fast_below_baseline_tail = true;
    for (std::size_t i = 0; i < s.ns.size(); ++i) {
        if (s.ns[i] >= 4096 && !(s.fast_complexity[i] < s.mean_baseline_pb[i]))
            s.fast_below_baseline_tail = false;
    }
    std::uint64_t n = 4096;
    for (int step = 0; step < 40; ++step) {
        double fast = fast_complexity_at(n, beta, bc.eta_max);
        double base = baseline_pac_bayes(std::log(2.0 * static_cast<double>(n)), n, cfg.delta,
                                         s.mean_emp_loss_tail);
        if (fast < base) {
            s.crossover_n = n;
            break;
        }
        n *= 2;
    }
    return s;
}

GibbsResult run_gibbs_experiment(const ExperimentConfig& cfg, int k, double eta_hat) {
    validate_config(cfg);
    if (k != 0 && k != 1) throw invalid_input("gibbs experiment: k must be 0 or 1");
    if (!(eta_hat > 0.0)) throw invalid_input("gibbs experiment: eta_hat must be > 0");
    LearningProblem problem =
        make_noisy_threshold_problem(cfg.domain, cfg.px, cfg.t_star, cfg.noise_p);
    double beta = cfg.beta, B = cfg.B;
    if (cfg.certify_bernstein) {
        beta = 1.0;
        B = best_B(problem, 1.0).B;
    }
    BoundConstants bc = bound_constants(B);
    const HypothesisClass& cls = problem.cls;

    std::vector<int> all_ids(static_cast<std::size_t>(cls.size()));
    std::iota(all_ids.begin(), all_ids.end(), 0);
    const Posterior uniform_all = uniform_posterior(all_ids);

    // Size-1 scheme: the selected point is a witness of the ERM threshold,
    // and W2 maps (x,0) -> threshold x+1, (x,1) -> threshold 0, so W|z always
    // equals the ERM output. Size-0 scheme: fixed uniform distribution.
    CompressionMap W2 = [uniform_all](const std::vector<Example>& picked) {
        if (picked.empty()) return uniform_all;
        const Example& e = picked.front();
        int y = static_cast<int>(std::lround(e.y));
        return point_mass(y == 0 ? e.x + 1 : 0);
    };
    Compressor A1 = [&cls](const Sample& z) {
        int t = threshold_erm(cls, z);
        if (t >= 1) {
            for (std::size_t i = 0; i < z.size(); ++i)
                if (z[i].x == t - 1 && std::lround(z[i].y) == 0) return std::vector<std::size_t>{i};
        }
        for (std::size_t i = 0; i < z.size(); ++i)
            if (std::lround(z[i].y) == 1) return std::vector<std::size_t>{i};
        throw invalid_input("gibbs experiment: no witness point (unreachable)");
    };

    GibbsResult out;
    const Posterior star = point_mass(problem.f_star);
    std::size_t covered = 0;
    for (std::uint64_t n : cfg.n_schedule) {
        for (int trial = 0; trial < cfg.trials; ++trial) {
            Rng rng(derive_seed(cfg.seed, n ^ 0x9e37ULL, static_cast<std::uint64_t>(trial)));
            Sample z = draw_sample(problem.dist, n, rng);
            Posterior W = k == 0 ? uniform_all : compression_scheme_output(A1, W2, z, k);
            Posterior gibbs = gibbs_posterior(problem, W, z, eta_hat);
            int erm_id = threshold_erm(cls, z);
            double erm_emp = empirical_loss(problem, point_mass(erm_id), z);

            BoundInputs in;
            in.n = n;
            in.beta = beta;
            in.B = B;
            in.kl_bar = kl(point_mass(erm_id), W) + k * std::log(2.0 * static_cast<double>(n));
            in.emp_excess = erm_emp - empirical_loss(problem, star, z);
            in.eta = std::sqrt(static_cast<double>(n)) * bc.eta_max / 24.0;
            in.delta = cfg.delta;

            GibbsRow row;
            row.n = n;
            row.trial = trial;
            row.gibbs_pop_loss = population_loss(problem, gibbs);
            row.erm_emp_loss = erm_emp;
            row.bound_rhs = erm_emp + main_bound(in).total;
            row.covered = row.gibbs_pop_loss <= row.bound_rhs;
            covered += row.covered ? 1 : 0;
            out.rows.push_back(row);
        }
    }
    out.coverage = static_cast<double>(covered) / static_cast<double>(out.rows.size());
    return out;
}

void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows) {
    os << "n,trial,gap,main_bound_total,inprob_total,baseline_pb,baseline_mi_proxy,covered\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.trial << ',' << fmt_double(r.gap) << ','
           << fmt_double(r.main_bound_total) << ',' << fmt_double(r.inprob_total) << ','
           << fmt_double(r.baseline_pb) << ',' << fmt_double(r.baseline_mi_proxy) << ','
           << (r.covered ? 1 : 0) << '\n';
    }
}

std::vector<RateRow> read_rate_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw invalid_input("rate csv: empty input");
    const std::string header =
        "n,trial,gap,main_bound_total,inprob_total,baseline_pb,baseline_mi_proxy,covered";
    if (line != header && line != header + "\r") throw invalid_input("rate csv: bad header");
    std::vector<RateRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 8)
            throw invalid_input("rate csv: line " + std::to_string(lineno) + ": expected 8 fields");
        RateRow r;
        try {
            r.n = std::stoull(f[0]);
            r.trial = std::stoi(f[1]);
            r.gap = std::stod(f[2]);
            r.main_bound_total = std::stod(f[3]);
            r.inprob_total = std::stod(f[4]);
            r.baseline_pb = std::stod(f[5]);
            r.baseline_mi_proxy = std::stod(f[6]);
            r.covered = std::stoi(f[7]) != 0;
        } catch (const std::exception&) {
            throw invalid_input("rate csv: line " + std::to_string(lineno) + ": parse error");
        }
        if (r.covered != (r.gap <= r.inprob_total))
            throw invalid_input("rate csv: line " + std::to_string(lineno) +
                                ": covered flag inconsistent with gap and bound");
        rows.push_back(r);
    }
    return rows;
}

void write_gibbs_csv(std::ostream& os, const std::vector<GibbsRow>& rows) {
    os << "n,trial,gibbs_pop_loss,erm_emp_loss,bound_rhs,covered\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.trial << ',' << fmt_double(r.gibbs_pop_loss) << ','
           << fmt_double(r.erm_emp_loss) << ',' << fmt_double(r.bound_rhs) << ','
           << (r.covered ? 1 : 0) << '\n';
    }
}

namespace {

struct Curve {
    std::string label;
    std::string color;
    std::vector<double> ys;
    double slope = 0.0;
};

}  // namespace

void emit_plots(const std::string& csv_path, const std::string& svg_path) {
    std::ifstream in(csv_path);
    if (!in) throw invalid_input("plot: cannot open " + csv_path);
    std::vector<RateRow> rows = read_rate_csv(in);
    if (rows.empty()) throw invalid_input("plot: no data rows");

    std::map<std::uint64_t, std::vector<const RateRow*>> by_n;
    for (const auto& r : rows) by_n[r.n].push_back(&r);
    std::vector<double> ns;
    Curve gap{"mean |gap|", "#1f77b4", {}, 0};
    Curve inprob{"in-prob bound", "#d62728", {}, 0};
    Curve base{"baseline PB", "#2ca02c", {}, 0};
    for (const auto& [n, group] : by_n) {
        double g = 0.0, ip = 0.0, b = 0.0;
        for (const RateRow* r : group) {
            g += std::abs(r->gap);
            ip += r->inprob_total;
            b += r->baseline_pb;
        }
        double m = static_cast<double>(group.size());
        ns.push_back(static_cast<double>(n));
        gap.ys.push_back(std::max(g / m, 1e-12));
        inprob.ys.push_back(ip / m);
        base.ys.push_back(b / m);
    }
    std::size_t half = ns.size() / 2;
    std::vector<double> top_ns(ns.begin() + half, ns.end());
    for (Curve* c : {&gap, &inprob, &base}) {
        if (top_ns.size() >= 2)
            c->slope = fit_loglog_slope(top_ns,
                                        std::vector<double>(c->ys.begin() + half, c->ys.end()));
    }

    const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::log(ns.front()), xmax = std::log(ns.back());
    double ymin = 1e300, ymax = -1e300;
    for (Curve* c : {&gap, &inprob, &base})
        for (double y : c->ys) {
            ymin = std::min(ymin, std::log(y));
            ymax = std::max(ymax, std::log(y));
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto X = [&](double n) { return ml + (std::log(n) - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double v) {
        return H - mb - (std::log(v) - ymin) / (ymax - ymin) * (H - mt - mb);
    };

    std::ofstream out(svg_path);
    if (!out) throw invalid_input("plot: cannot write " + svg_path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << "bounds and gap vs n (log-log)</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (double n : ns) {
        out << "<text x=\"" << fmt_double(X(n)) << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"10\">" << static_cast<std::uint64_t>(n)
            << "</text>\n";
    }
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">n</text>\n";
    int legend_y = static_cast<int>(mt) + 10;
    for (const Curve* c : {&gap, &inprob, &base}) {
        out << "<polyline fill=\"none\" stroke=\"" << c->color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < ns.size(); ++i)
            out << fmt_double(X(ns[i])) << ',' << fmt_double(Y(c->ys[i])) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << W - mr - 5 << "\" y=\"" << legend_y
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << c->color << "\">" << c->label
            << " (slope " << fmt_double(c->slope) << ")</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace cpb
