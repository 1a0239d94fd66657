#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpb/experiment.hpp"
#include "helpers.hpp"

using namespace cpb;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg = default_rate_config();
    cfg.n_schedule = {16, 32, 64, 128, 256};
    cfg.trials = 10;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("rate experiment: deterministic, covered flags consistent") {
    auto cfg = small_config();
    auto a = run_rate_experiment(cfg);
    auto b = run_rate_experiment(cfg);
    std::ostringstream sa, sb;
    write_rate_csv(sa, a.rows);
    write_rate_csv(sb, b.rows);
    CHECK(sa.str() == sb.str());
    CHECK(a.rows.size() == 50);
    for (const auto& r : a.rows) {
        CHECK(r.covered == (r.gap <= r.inprob_total));
        CHECK(r.gap >= -1.0);
        CHECK(r.gap <= 1.0);
        CHECK(r.baseline_pb > 0.0);
    }
    // at these n the in-probability remainder dwarfs the gap
    for (double c : a.summary.coverage) CHECK(c == 1.0);
}

TEST_CASE("rate csv round-trips and self-checks the covered column") {
    auto res = run_rate_experiment(small_config());
    std::ostringstream out;
    write_rate_csv(out, res.rows);
    std::istringstream in(out.str());
    auto rows = read_rate_csv(in);
    CHECK(rows.size() == res.rows.size());
    CHECK(rows.front().gap == res.rows.front().gap);

    // flip one covered flag: the reader must reject it with the line number
    std::string text = out.str();
    auto pos = text.find(",1\n");
    if (pos == std::string::npos) pos = text.find(",0\n");
    REQUIRE(pos != std::string::npos);
    text[pos + 1] = text[pos + 1] == '1' ? '0' : '1';
    std::istringstream bad(text);
    CHECK_THROWS_AS(read_rate_csv(bad), invalid_input);

    std::istringstream garbled("n,trial,gap,main_bound_total,inprob_total,baseline_pb,"
                               "baseline_mi_proxy,covered\n1,2,three\n");
    CHECK_THROWS_AS(read_rate_csv(garbled), invalid_input);
    std::istringstream wrong_header("a,b\n");
    CHECK_THROWS_AS(read_rate_csv(wrong_header), invalid_input);
}

TEST_CASE("rate summary slopes recover a known power law") {
    std::vector<double> xs{16, 32, 64, 128, 256, 512};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, -0.75));
    CHECK(fit_loglog_slope(xs, ys) == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), invalid_input);
}

TEST_CASE("rate experiment validates its configuration") {
    auto cfg = small_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(run_rate_experiment(cfg), invalid_input);
    cfg = small_config();
    cfg.noise_p = 0.6;
    CHECK_THROWS_AS(run_rate_experiment(cfg), invalid_input);
    cfg = small_config();
    cfg.n_schedule.clear();
    CHECK_THROWS_AS(run_rate_experiment(cfg), invalid_input);
}

TEST_CASE("gibbs experiment: coverage and the k=0 reduction") {
    auto cfg = small_config();
    cfg.n_schedule = {16, 64, 256};
    cfg.trials = 20;
    auto res1 = run_gibbs_experiment(cfg, 1, 1.0);
    CHECK(res1.rows.size() == 60);
    CHECK(res1.coverage >= 1.0 - cfg.delta);
    for (const auto& r : res1.rows) {
        CHECK(r.covered == (r.gibbs_pop_loss <= r.bound_rhs));
        CHECK(r.gibbs_pop_loss >= 0.0);
        CHECK(r.gibbs_pop_loss <= 1.0);
    }

    auto res0 = run_gibbs_experiment(cfg, 0, 1.0);
    CHECK(res0.coverage >= 1.0 - cfg.delta);

    // a huge learning rate collapses Gibbs onto the empirical minimizer
    auto sharp = run_gibbs_experiment(cfg, 1, 500.0);
    for (const auto& r : sharp.rows) CHECK(r.gibbs_pop_loss <= 1.0);

    CHECK_THROWS_AS(run_gibbs_experiment(cfg, 3, 1.0), invalid_input);
    CHECK_THROWS_AS(run_gibbs_experiment(cfg, 1, 0.0), invalid_input);
}

TEST_CASE("plots: deterministic bytes, parse failures carry line info") {
    auto res = run_rate_experiment(small_config());
    const char* csv_path = "test_rate_tmp.csv";
    const char* svg_a = "test_rate_tmp_a.svg";
    const char* svg_b = "test_rate_tmp_b.svg";
    {
        std::ofstream f(csv_path);
        write_rate_csv(f, res.rows);
    }
    emit_plots(csv_path, svg_a);
    emit_plots(csv_path, svg_b);
    std::ifstream fa(svg_a), fb(svg_b);
    std::stringstream ba, bb;
    ba << fa.rdbuf();
    bb << fb.rdbuf();
    CHECK(ba.str() == bb.str());
    CHECK(ba.str().find("<svg") != std::string::npos);
    CHECK(ba.str().find("slope") != std::string::npos);

    CHECK_THROWS_AS(emit_plots("does_not_exist.csv", svg_a), invalid_input);
    std::remove(csv_path);
    std::remove(svg_a);
    std::remove(svg_b);
}
