#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "cpb/bounds.hpp"
#include "cpb/core.hpp"

namespace cpb {

enum class KlSource { SauerCap, EnumerationMc };

struct ExperimentConfig {
    std::vector<int> domain;  // defaults to {1..10}
    std::vector<double> px;   // defaults to uniform over domain
    int t_star = 5;
    double noise_p = 0.1;
    std::vector<std::uint64_t> n_schedule;  // defaults to 2^4 .. 2^14
    int trials = 200;
    double delta = 0.05;
    bool certify_bernstein = true;  // beta=1, B from best_B; else user beta/B below
    double beta = 1.0;
    double B = 1.25;
    KlSource kl_source = KlSource::SauerCap;
    std::uint64_t kl_mc_budget = 64;  // ghosts per trial for EnumerationMc
    std::uint64_t seed = 1;
};

ExperimentConfig default_rate_config();

struct RateRow {
    std::uint64_t n = 0;
    int trial = 0;
    double gap = 0.0;  // population loss - empirical loss of the ERM output
    double main_bound_total = 0.0;
    double inprob_total = 0.0;
    double baseline_pb = 0.0;
    double baseline_mi_proxy = 0.0;
    bool covered = false;  // gap <= inprob_total
};

struct RateSummary {
    std::vector<std::uint64_t> ns;
    std::vector<double> coverage;         // per n
    std::vector<double> mean_abs_gap;     // per n
    std::vector<double> mean_inprob;      // per n
    std::vector<double> mean_baseline_pb; // per n
    std::vector<double> fast_complexity;  // per n (deterministic in n)
    double fast_complexity_slope = 0.0;   // log-log fits over the top half
    double baseline_pb_slope = 0.0;
    double gap_slope = 0.0;
    double inprob_slope = 0.0;
    double mean_emp_loss_tail = 0.0;  // mean ERM empirical loss at the largest n
    bool fast_below_baseline_tail = false;  // fast < baseline at every scheduled n >= 4096
    std::uint64_t crossover_n = 0;  // first power of two where fast dips below baseline
};

struct RateResult {
    std::vector<RateRow> rows;
    RateSummary summary;
};

RateResult run_rate_experiment(const ExperimentConfig& cfg);
RateSummary summarize_rate_rows(const std::vector<RateRow>& rows, const ExperimentConfig& cfg);

struct GibbsRow {
    std::uint64_t n = 0;
    int trial = 0;
    double gibbs_pop_loss = 0.0;
    double erm_emp_loss = 0.0;
    double bound_rhs = 0.0;
    bool covered = false;  // gibbs_pop_loss <= bound_rhs
};

struct GibbsResult {
    std::vector<GibbsRow> rows;
    double coverage = 0.0;
};

// Gibbs posterior over the threshold class with a size-k compression scheme
// prior (k in {0,1}); the composed bound is erm empirical loss plus the main
// bound evaluated with kl_bar = KL(ERM || W|z) + k log(2n).
GibbsResult run_gibbs_experiment(const ExperimentConfig& cfg, int k, double eta_hat);

void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows);
// Parses and re-checks the covered column against the stored gap and bound;
// malformed lines and inconsistent flags raise invalid_input with the line
// number.
std::vector<RateRow> read_rate_csv(std::istream& is);
void write_gibbs_csv(std::ostream& os, const std::vector<GibbsRow>& rows);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Log-log plot of the per-n mean curves in a rate CSV, slopes annotated.
// Byte-identical output for identical input.
void emit_plots(const std::string& csv_path, const std::string& svg_path);

}  // namespace cpb
