// cpbound: generalization-bound calculators and experiment harness for
// discrete learning problems. Subcommands emit CSV; identical flags and
// seed give byte-identical output.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpb/bernstein.hpp"
#include "cpb/bounds.hpp"
#include "cpb/cmi.hpp"
#include "cpb/csv.hpp"
#include "cpb/esi.hpp"
#include "cpb/experiment.hpp"
#include "cpb/learners.hpp"
#include "cpb/lemma1.hpp"
#include "cpb/priors.hpp"

namespace {

struct OutputSink {
    std::unique_ptr<std::ofstream> file;
    std::ostream* os = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file = std::make_unique<std::ofstream>(path);
        if (!*file) throw cpb::invalid_input("cannot open output file: " + path);
        os = file.get();
    }
    std::ostream& stream() { return *os; }
};

std::string verdict_csv_header() { return "eta,estimate,margin,holds,inconclusive,mode"; }

void print_verdict(std::ostream& os, const cpb::EsiVerdict& v) {
    os << cpb::fmt_double(v.eta) << ',' << cpb::fmt_double(v.estimate) << ','
       << cpb::fmt_double(v.margin) << ',' << (v.holds ? 1 : 0) << ',' << (v.inconclusive ? 1 : 0)
       << ',' << (v.mode == cpb::EsiMode::Exact ? "exact" : "mc") << '\n';
}

cpb::LearningProblem problem_from_flags(const std::string& problem_file, int domain_max,
                                        int t_star, double noise_p) {
    if (!problem_file.empty()) return cpb::load_problem_file(problem_file);
    std::vector<int> domain;
    std::vector<double> px;
    for (int x = 1; x <= domain_max; ++x) {
        domain.push_back(x);
        px.push_back(1.0 / domain_max);
    }
    return cpb::make_noisy_threshold_problem(domain, px, t_star, noise_p);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional PAC-Bayes / CMI bound toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_option("--format", format, "output format (csv)");

    // lemma-sweep
    auto* sweep_cmd = app.add_subcommand("lemma-sweep", "two-point randomization sweep");
    double sweep_step = 0.01;
    std::vector<double> sweep_etas{0.01, 0.05, 0.1, 0.2, 0.25};
    std::string sweep_rule = "general";
    double sweep_fixed_C = 0.0;
    sweep_cmd->add_option("--step", sweep_step, "r grid step");
    sweep_cmd->add_option("--eta", sweep_etas, "eta list");
    sweep_cmd->add_option("--rule", sweep_rule, "general | same-sign | fixed");
    sweep_cmd->add_option("--C", sweep_fixed_C, "constant for --rule fixed");

    // constants
    auto* const_cmd = app.add_subcommand("constants", "closed-form lemma constants");
    std::vector<double> const_etas{0.01, 0.05, 0.1, 0.2, 0.25};
    double const_B = 1.0;
    const_cmd->add_option("--eta", const_etas, "eta list");
    const_cmd->add_option("--B", const_B, "Bernstein constant for eta_max");

    // esi-check
    auto* esi_cmd = app.add_subcommand("esi-check", "verify E[exp(eta(X-Y))] <= 1");
    std::vector<double> esi_values, esi_mass;
    double esi_eta = 0.25;
    std::uint64_t esi_trials = 0;
    esi_cmd->add_option("--values", esi_values, "atom values of X-Y")->required();
    esi_cmd->add_option("--mass", esi_mass, "atom masses")->required();
    esi_cmd->add_option("--eta", esi_eta, "rate");
    esi_cmd->add_option("--mc", esi_trials, "Monte-Carlo trials (0 = exact)");

    // bernstein
    auto* bern_cmd = app.add_subcommand("bernstein", "best-constant Bernstein certificate");
    std::string bern_problem;
    double bern_beta = 1.0;
    int bern_domain_max = 10, bern_tstar = 5;
    double bern_noise = 0.1;
    bern_cmd->add_option("--problem", bern_problem, "problem JSON file");
    bern_cmd->add_option("--beta", bern_beta, "exponent");
    bern_cmd->add_option("--domain-max", bern_domain_max, "built-in problem: domain size");
    bern_cmd->add_option("--t-star", bern_tstar, "built-in problem: true threshold");
    bern_cmd->add_option("--noise-p", bern_noise, "built-in problem: label noise");

    // kl-audit
    auto* kl_cmd = app.add_subcommand("kl-audit", "per-supersample KL vs enumeration prior");
    std::string kl_problem, kl_algorithm = "threshold-erm";
    int kl_n = 8, kl_count = 20;
    int kl_domain_max = 10, kl_tstar = 5;
    double kl_noise = 0.1;
    kl_cmd->add_option("--problem", kl_problem, "problem JSON file");
    kl_cmd->add_option("--algorithm", kl_algorithm, "threshold-erm | ordered-erm | gibbs:<eta>");
    kl_cmd->add_option("--n", kl_n, "supersample rows");
    kl_cmd->add_option("--count", kl_count, "number of supersamples");
    kl_cmd->add_option("--domain-max", kl_domain_max, "built-in problem: domain size");
    kl_cmd->add_option("--t-star", kl_tstar, "built-in problem: true threshold");
    kl_cmd->add_option("--noise-p", kl_noise, "built-in problem: label noise");

    // cmi
    auto* cmi_cmd = app.add_subcommand("cmi", "conditional mutual information of an algorithm");
    std::string cmi_problem, cmi_algorithm = "threshold-erm";
    int cmi_n = 8;
    bool cmi_exact = false;
    std::uint64_t cmi_budget = 1000;
    int cmi_domain_max = 10, cmi_tstar = 5;
    double cmi_noise = 0.1;
    cmi_cmd->add_option("--problem", cmi_problem, "problem JSON file");
    cmi_cmd->add_option("--algorithm", cmi_algorithm, "algorithm name");
    cmi_cmd->add_option("--n", cmi_n, "sample size");
    cmi_cmd->add_flag("--exact", cmi_exact, "exact supersample enumeration");
    cmi_cmd->add_option("--mc", cmi_budget, "Monte-Carlo supersample budget");
    cmi_cmd->add_option("--domain-max", cmi_domain_max, "built-in problem: domain size");
    cmi_cmd->add_option("--t-star", cmi_tstar, "built-in problem: true threshold");
    cmi_cmd->add_option("--noise-p", cmi_noise, "built-in problem: label noise");

    // bound
    auto* bound_cmd = app.add_subcommand("bound", "evaluate a bound formula");
    std::string bound_form = "main";
    cpb::BoundInputs bi;
    double bound_mi = 0.0, bound_emp_loss = 0.0;
    bound_cmd->add_option("--form", bound_form,
                          "main | inprob | inexpect | cmi | baseline-pb | baseline-mi");
    bound_cmd->add_option("--n", bi.n, "sample size");
    bound_cmd->add_option("--beta", bi.beta, "Bernstein exponent");
    bound_cmd->add_option("--B", bi.B, "Bernstein constant");
    bound_cmd->add_option("--kl", bi.kl_bar, "expected KL or upper bound (nats)");
    bound_cmd->add_option("--emp-excess", bi.emp_excess, "empirical excess risk");
    bound_cmd->add_option("--eta", bi.eta, "ESI rate (main form; 0 = use the cap)");
    bound_cmd->add_option("--delta", bi.delta, "confidence parameter");
    bound_cmd->add_option("--mi", bound_mi, "mutual information (baseline-mi)");
    bound_cmd->add_option("--emp-loss", bound_emp_loss, "empirical loss (baseline-pb)");

    // rate-exp
    auto* rate_cmd = app.add_subcommand("rate-exp", "threshold rate-separation experiment");
    cpb::ExperimentConfig rate_cfg = cpb::default_rate_config();
    int rate_nmin = 4, rate_nmax = 14;
    int rate_domain_max = 10;
    std::string rate_kl = "sauer";
    rate_cmd->add_option("--trials", rate_cfg.trials, "trials per n");
    rate_cmd->add_option("--delta", rate_cfg.delta, "confidence");
    rate_cmd->add_option("--noise-p", rate_cfg.noise_p, "label-noise level");
    rate_cmd->add_option("--t-star", rate_cfg.t_star, "true threshold");
    rate_cmd->add_option("--domain-max", rate_domain_max, "feature domain size");
    rate_cmd->add_option("--nmin-exp", rate_nmin, "smallest n = 2^k");
    rate_cmd->add_option("--nmax-exp", rate_nmax, "largest n = 2^k");
    rate_cmd->add_option("--kl-source", rate_kl, "sauer | enum-mc");

    // gibbs-exp
    auto* gibbs_cmd = app.add_subcommand("gibbs-exp", "Gibbs + compression-prior experiment");
    cpb::ExperimentConfig gibbs_cfg = cpb::default_rate_config();
    int gibbs_k = 1;
    double gibbs_eta_hat = 1.0;
    int gibbs_nmin = 4, gibbs_nmax = 10;
    gibbs_cmd->add_option("--trials", gibbs_cfg.trials, "trials per n");
    gibbs_cmd->add_option("--delta", gibbs_cfg.delta, "confidence");
    gibbs_cmd->add_option("--noise-p", gibbs_cfg.noise_p, "label-noise level");
    gibbs_cmd->add_option("--t-star", gibbs_cfg.t_star, "true threshold");
    gibbs_cmd->add_option("--k", gibbs_k, "compression size (0 or 1)");
    gibbs_cmd->add_option("--eta-hat", gibbs_eta_hat, "Gibbs learning rate");
    gibbs_cmd->add_option("--nmin-exp", gibbs_nmin, "smallest n = 2^k");
    gibbs_cmd->add_option("--nmax-exp", gibbs_nmax, "largest n = 2^k");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "SVG log-log plot from a rate CSV");
    std::string plot_in, plot_out = "rate.svg";
    plot_cmd->add_option("--in", plot_in, "rate CSV path")->required();
    plot_cmd->add_option("--svg", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (format != "csv") throw cpb::invalid_input("unsupported format: " + format);
        OutputSink sink;
        sink.open(out_path);
        std::ostream& os = sink.stream();

        if (sweep_cmd->parsed()) {
            cpb::CRule rule = cpb::CRule::GeneralSign;
            if (sweep_rule == "same-sign")
                rule = cpb::CRule::SameSign;
            else if (sweep_rule == "fixed")
                rule = cpb::CRule::Fixed;
            else if (sweep_rule != "general")
                throw cpb::invalid_input("unknown sweep rule: " + sweep_rule);
            cpb::SweepReport rep = cpb::lemma1_sweep(sweep_step, sweep_etas, rule, sweep_fixed_C);
            os << "eta,C_used,worst_margin,worst_r0,worst_r1\n";
            for (const auto& pt : rep.per_eta) {
                if (!pt.in_domain) {
                    os << cpb::fmt_double(pt.eta) << ",out-of-domain,,,\n";
                    continue;
                }
                os << cpb::fmt_double(pt.eta) << ',' << cpb::fmt_double(pt.C_used) << ','
                   << cpb::fmt_double(pt.worst_margin) << ',' << cpb::fmt_double(pt.worst_r0)
                   << ',' << cpb::fmt_double(pt.worst_r1) << '\n';
            }
        } else if (const_cmd->parsed()) {
            cpb::BoundConstants bc = cpb::bound_constants(const_B);
            os << "eta,c_gamma,C1,C2,C_quarter,eta_max\n";
            for (double eta : const_etas) {
                os << cpb::fmt_double(eta) << ','
                   << cpb::fmt_double(cpb::lemma_constants(2.0, eta).c_gamma_value) << ','
                   << cpb::fmt_double(cpb::c_const(1.0, eta)) << ','
                   << cpb::fmt_double(cpb::c_const(2.0, eta)) << ','
                   << cpb::fmt_double(bc.C_quarter) << ',' << cpb::fmt_double(bc.eta_max) << '\n';
            }
        } else if (esi_cmd->parsed()) {
            cpb::FiniteRealDistribution g = cpb::make_finite_dist(esi_values, esi_mass);
            cpb::EsiVerdict v;
            if (esi_trials == 0) {
                v = cpb::esi_exact(g, esi_eta);
            } else {
                double lo = *std::min_element(g.values.begin(), g.values.end());
                double hi = cpb::dist_max(g);
                auto sampler = [g](cpb::Rng& rng) {
                    double u = cpb::uniform01(rng);
                    double cum = 0.0;
                    for (std::size_t i = 0; i < g.values.size(); ++i) {
                        cum += g.mass[i];
                        if (u < cum) return g.values[i];
                    }
                    return g.values.back();
                };
                v = cpb::esi_mc(sampler, lo, hi, esi_eta, esi_trials, seed);
            }
            os << verdict_csv_header() << '\n';
            print_verdict(os, v);
        } else if (bern_cmd->parsed()) {
            cpb::LearningProblem p =
                problem_from_flags(bern_problem, bern_domain_max, bern_tstar, bern_noise);
            cpb::BernsteinCertificate cert = cpb::best_B(p, bern_beta);
            nlohmann::json j;
            j["beta"] = cert.beta;
            j["B"] = cert.B;
            j["witnessed_by"] = cert.witnessed_by;
            j["witness_name"] =
                cert.witnessed_by >= 0 ? p.cls.name(cert.witnessed_by) : std::string("none");
            j["feasible"] = cert.feasible;
            if (!cert.feasible) j["violator"] = cert.violator;
            j["f_star"] = p.f_star;
            os << j.dump(2) << '\n';
        } else if (kl_cmd->parsed()) {
            cpb::LearningProblem p =
                problem_from_flags(kl_problem, kl_domain_max, kl_tstar, kl_noise);
            cpb::Algorithm alg = cpb::algorithm_by_name(kl_algorithm, p);
            if (!alg.deterministic)
                throw cpb::invalid_input("kl-audit: enumeration priors need a deterministic algorithm");
            os << "supersample,kl_nats,enum_size,sauer_cap_ln\n";
            for (int i = 0; i < kl_count; ++i) {
                cpb::Supersample ss = cpb::draw_supersample(
                    p.dist, static_cast<std::size_t>(kl_n),
                    cpb::derive_seed(seed, static_cast<std::uint64_t>(i)));
                cpb::Posterior prior = cpb::enumeration_prior(
                    [&](const cpb::Sample& z) { return alg.run(z).ids.front(); }, p.cls, ss);
                cpb::Posterior out = alg.run(ss.column(0));
                double v = cpb::kl(out, prior);
                os << i << ',' << cpb::fmt_double(v) << ',' << prior.support_size() << ','
                   << cpb::fmt_double(std::log(2.0 * kl_n)) << '\n';
            }
        } else if (cmi_cmd->parsed()) {
            cpb::LearningProblem p =
                problem_from_flags(cmi_problem, cmi_domain_max, cmi_tstar, cmi_noise);
            cpb::Algorithm alg = cpb::algorithm_by_name(cmi_algorithm, p);
            cpb::CmiEstimate est = cpb::cmi(alg.run, p.dist, static_cast<std::size_t>(cmi_n),
                                            cmi_exact, cmi_budget, seed);
            os << "n,mode,value,std_error\n";
            os << cmi_n << ',' << (est.exact ? "exact" : "mc") << ','
               << cpb::fmt_double(est.value) << ',' << cpb::fmt_double(est.std_error) << '\n';
        } else if (bound_cmd->parsed()) {
            const bool known_form = bound_form == "main" || bound_form == "inprob" ||
                                    bound_form == "inexpect" || bound_form == "cmi" ||
                                    bound_form == "baseline-pb" || bound_form == "baseline-mi";
            if (!known_form) throw cpb::invalid_input("unknown bound form: " + bound_form);
            os << "form,n,beta,B,kl_bar,emp_excess,eta,delta,excess_term,complexity_term,"
                  "remainder_term,total\n";
            auto emit = [&](const char* form, const cpb::BoundReport& r) {
                os << form << ',' << r.inputs.n << ',' << cpb::fmt_double(r.inputs.beta) << ','
                   << cpb::fmt_double(r.inputs.B) << ',' << cpb::fmt_double(r.inputs.kl_bar) << ','
                   << cpb::fmt_double(r.inputs.emp_excess) << ',' << cpb::fmt_double(r.inputs.eta)
                   << ',' << cpb::fmt_double(r.inputs.delta) << ','
                   << cpb::fmt_double(r.excess_term) << ',' << cpb::fmt_double(r.complexity_term)
                   << ',' << cpb::fmt_double(r.remainder_term) << ',' << cpb::fmt_double(r.total)
                   << '\n';
            };
            if (bound_form == "main") {
                if (bi.eta == 0.0)
                    bi.eta = std::sqrt(static_cast<double>(bi.n)) *
                             cpb::bound_constants(bi.B).eta_max / 24.0;
                emit("main", cpb::main_bound(bi));
            } else if (bound_form == "inprob") {
                emit("inprob", cpb::inprob_bound(bi));
            } else if (bound_form == "inexpect" || bound_form == "cmi") {
                emit(bound_form.c_str(),
                     cpb::inexpect_bound(bi.emp_excess, bi.kl_bar, bi.n, bi.beta, bi.B));
            } else if (bound_form == "baseline-pb") {
                double v = cpb::baseline_pac_bayes(bi.kl_bar, bi.n, bi.delta, bound_emp_loss);
                os << "baseline-pb," << bi.n << ",,," << cpb::fmt_double(bi.kl_bar) << ",,,"
                   << cpb::fmt_double(bi.delta) << ",,,," << cpb::fmt_double(v) << '\n';
            } else if (bound_form == "baseline-mi") {
                double v = cpb::baseline_mi(bound_mi, bi.n);
                os << "baseline-mi," << bi.n << ",,," << cpb::fmt_double(bound_mi) << ",,,,,,,"
                   << cpb::fmt_double(v) << '\n';
            }
        } else if (rate_cmd->parsed()) {
            rate_cfg.domain.clear();
            rate_cfg.px.clear();
            for (int x = 1; x <= rate_domain_max; ++x) {
                rate_cfg.domain.push_back(x);
                rate_cfg.px.push_back(1.0 / rate_domain_max);
            }
            rate_cfg.n_schedule.clear();
            for (int k = rate_nmin; k <= rate_nmax; ++k) rate_cfg.n_schedule.push_back(1ULL << k);
            rate_cfg.seed = seed;
            if (rate_kl == "enum-mc")
                rate_cfg.kl_source = cpb::KlSource::EnumerationMc;
            else if (rate_kl != "sauer")
                throw cpb::invalid_input("unknown kl source: " + rate_kl);
            cpb::RateResult res = cpb::run_rate_experiment(rate_cfg);
            cpb::write_rate_csv(os, res.rows);
            const cpb::RateSummary& s = res.summary;
            std::cerr << "slopes (top half): fast_complexity="
                      << cpb::fmt_double(s.fast_complexity_slope)
                      << " baseline_pb=" << cpb::fmt_double(s.baseline_pb_slope)
                      << " mean|gap|=" << cpb::fmt_double(s.gap_slope) << '\n';
            std::cerr << "fast term below baseline at all scheduled n >= 4096: "
                      << (s.fast_below_baseline_tail ? "yes" : "no")
                      << "; crossover near n = " << s.crossover_n << '\n';
        } else if (gibbs_cmd->parsed()) {
            gibbs_cfg.n_schedule.clear();
            for (int k = gibbs_nmin; k <= gibbs_nmax; ++k)
                gibbs_cfg.n_schedule.push_back(1ULL << k);
            gibbs_cfg.seed = seed;
            cpb::GibbsResult res = cpb::run_gibbs_experiment(gibbs_cfg, gibbs_k, gibbs_eta_hat);
            cpb::write_gibbs_csv(os, res.rows);
            std::cerr << "coverage: " << cpb::fmt_double(res.coverage) << '\n';
        } else if (plot_cmd->parsed()) {
            cpb::emit_plots(plot_in, plot_out);
        }
        return 0;
    } catch (const cpb::resource_limit& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 3;
    } catch (const cpb::invalid_input& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
