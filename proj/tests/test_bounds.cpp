#include "doctest.h"

#include <cmath>

#include "cpb/bernstein.hpp"
#include "cpb/bounds.hpp"
#include "cpb/esi.hpp"
#include "cpb/learners.hpp"
#include "cpb/priors.hpp"
#include "helpers.hpp"

using namespace cpb;

TEST_CASE("llog at the worked points") {
    CHECK(llog(16) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK(llog(1024) == doctest::Approx(std::log(7.0)).epsilon(1e-14));
    CHECK(llog(1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(llog(2) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(llog(0), invalid_input);
}

TEST_CASE("starstar") {
    CHECK(starstar(0.04, 0.5) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(starstar(2.0, 0.5) == 2.0);
    CHECK(starstar(1.0, 0.37) == 1.0);
    CHECK(starstar(0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(starstar(-0.1, 0.5), invalid_input);
    CHECK_THROWS_AS(starstar(0.5, 0.0), invalid_input);
}

TEST_CASE("eta grid: sizes and the lower end") {
    auto g16 = eta_grid(16, 0.25);
    CHECK(g16.size() == 5);  // K = 4
    CHECK(g16.front() == 0.25);
    CHECK(g16.back() == doctest::Approx(0.25 / 16.0));

    auto g1 = eta_grid(1, 0.2);
    CHECK(g1.size() == 3);  // K = 2, so |G| >= 3 and -log pi >= 1

    for (std::uint64_t n : {1ULL, 2ULL, 16ULL, 100ULL, 1024ULL, 99999ULL, 1048576ULL}) {
        auto g = eta_grid(n, 0.11);
        CHECK(g.back() >= 0.11 / (8.0 * std::sqrt(static_cast<double>(n))) - 1e-18);
        for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(g[i - 1] / 2.0));
    }
}

TEST_CASE("comp_minimize: structure and the proof's cap") {
    // kl = 0, beta = 0: minimum still pays the grid penalty
    auto r = comp_minimize(0.0, 16, 0.0, 0.25);
    CHECK(r.value <= 4.0 * starstar(llog(16) / (16.0 * 0.25), 0.5));
    CHECK(r.value >= 0.0);

    // beta = 1: the rate term is the limit indicator of eta = eta_max
    auto r1 = comp_minimize(5.0, 64, 1.0, 0.25);
    auto grid = eta_grid(64, 0.25);
    double log_grid = std::log(static_cast<double>(grid.size()));
    double at_top = 1.0 + (5.0 + log_grid) / (64.0 * 0.25);
    double best = at_top;
    for (std::size_t i = 1; i < grid.size(); ++i)
        best = std::min(best, (5.0 + log_grid) / (64.0 * grid[i]));
    CHECK(r1.value == doctest::Approx(best).epsilon(1e-12));

    // never below kl/(n eta_max)
    CHECK(comp_minimize(3.0, 128, 0.5, 0.2).value >= 3.0 / (128.0 * 0.2));

    Rng rng(71);
    for (int rep = 0; rep < 1000; ++rep) {
        double kl_ub = 100.0 * uniform01(rng);
        std::uint64_t n = 1 + rng() % 1000000;
        double beta = uniform01(rng);
        double eta_max = 0.01 + 0.24 * uniform01(rng);
        auto res = comp_minimize(kl_ub, n, beta, eta_max);
        double cap = 4.0 * starstar((kl_ub + llog(n)) / (static_cast<double>(n) * eta_max),
                                    1.0 / (2.0 - beta));
        CHECK(res.value <= cap + 1e-12);
        bool on_grid = false;
        for (double e : eta_grid(n, eta_max)) on_grid |= (e == res.eta_hat);
        CHECK(on_grid);
    }
}

TEST_CASE("bound constants") {
    auto c = bound_constants(1.0);
    CHECK(std::abs(c.C_quarter - 3.6064) <= 5e-5);
    CHECK(c.eta_max == doctest::Approx(1.0 / (2.0 * c.C_quarter)));
    auto c2 = bound_constants(1.25);
    CHECK(c2.eta_max == doctest::Approx(1.0 / (2.5 * c2.C_quarter)));
    CHECK(bound_constants(1.0).eta_max <= 0.25);
    CHECK_THROWS_AS(bound_constants(0.5), invalid_input);
}

TEST_CASE("main bound: the n=1024 worked instance") {
    BoundInputs in;
    in.n = 1024;
    in.beta = 1.0;
    in.B = 1.25;
    in.kl_bar = std::log(2048.0);
    in.emp_excess = 0.0;
    auto c = bound_constants(in.B);
    in.eta = 32.0 * c.eta_max / 24.0;
    auto r = main_bound(in);
    double a = (in.kl_bar + llog(1024)) / (1024.0 * c.eta_max);
    CHECK(r.complexity_term == doctest::Approx(8.0 * a).epsilon(1e-12));
    CHECK(r.complexity_term == doctest::Approx(0.674).epsilon(2e-3));
    CHECK(r.remainder_term == doctest::Approx(6.0 * in.eta / 1024.0).epsilon(1e-12));
    CHECK(r.remainder_term == doctest::Approx(8.7e-4).epsilon(2e-2));
    CHECK(r.excess_term == 0.0);
    CHECK(r.total == doctest::Approx(r.complexity_term + r.remainder_term));
}

TEST_CASE("main bound: reductions, sign pass-through, eta cap") {
    BoundInputs in;
    in.n = 256;
    in.beta = 0.0;
    in.B = 1.0;
    in.kl_bar = 0.0;
    in.emp_excess = 0.0;
    auto c = bound_constants(1.0);
    in.eta = std::sqrt(256.0) * c.eta_max / 24.0;
    auto r = main_bound(in);
    CHECK(r.total == doctest::Approx(8.0 * starstar(llog(256) / (256.0 * c.eta_max), 0.5) +
                                     6.0 * in.eta / 256.0));

    in.emp_excess = -0.05;
    in.beta = 1.0;
    auto neg = main_bound(in);
    CHECK(neg.excess_term == doctest::Approx(-0.05));
    CHECK(neg.total < neg.complexity_term + neg.remainder_term);

    in.eta = std::sqrt(256.0) * c.eta_max / 24.0 + 0.01;
    CHECK_THROWS_AS(main_bound(in), invalid_input);
    in.eta = 0.0;
    CHECK_THROWS_AS(main_bound(in), invalid_input);
}

TEST_CASE("in-probability bound: remainders and the sqrt(n) scaling") {
    BoundInputs in;
    in.n = 1024;
    in.beta = 1.0;
    in.B = 1.25;
    in.kl_bar = std::log(2048.0);
    in.emp_excess = 0.0;
    in.delta = 0.05;
    auto c = bound_constants(in.B);
    auto r = inprob_bound(in);
    double expected_rem =
        c.eta_max / (4.0 * 32.0) + 24.0 * std::log(20.0) / (32.0 * c.eta_max);
    CHECK(r.remainder_term == doctest::Approx(expected_rem).epsilon(1e-12));
    CHECK(r.remainder_term > r.complexity_term);  // dominating at this n, reported honestly

    BoundInputs in4 = in;
    in4.n = 4096;
    auto r4 = inprob_bound(in4);
    double rem_n = c.eta_max / (4.0 * std::sqrt(1024.0)) +
                   24.0 * std::log(1.0 / in.delta) / (std::sqrt(1024.0) * c.eta_max);
    double rem_4n = c.eta_max / (4.0 * std::sqrt(4096.0)) +
                    24.0 * std::log(1.0 / in.delta) / (std::sqrt(4096.0) * c.eta_max);
    CHECK(r.remainder_term == doctest::Approx(rem_n));
    CHECK(r4.remainder_term == doctest::Approx(rem_4n));
    CHECK(r4.remainder_term == doctest::Approx(rem_n / 2.0));

    in.delta = 1.0;
    CHECK_THROWS_AS(inprob_bound(in), invalid_input);
}

TEST_CASE("in-expectation bound: exponent-1 case and the CMI instance") {
    auto z = inexpect_bound(0.0, 0.0, 100, 0.5, 1.0);
    CHECK(z.complexity_term == 0.0);

    auto c = bound_constants(1.25);
    auto r = inexpect_bound(0.0, std::log(2048.0), 1024, 1.0, 1.25);
    CHECK(r.complexity_term ==
          doctest::Approx(4.0 * std::log(2048.0) / (1024.0 * c.eta_max)).epsilon(1e-12));
    CHECK(r.complexity_term == doctest::Approx(0.2685).epsilon(2e-3));
    CHECK(r.remainder_term == 0.0);
}

TEST_CASE("in-expectation complexity never exceeds the ESI form's") {
    Rng rng(73);
    for (int rep = 0; rep < 200; ++rep) {
        BoundInputs in;
        in.n = 1 + rng() % 100000;
        in.beta = uniform01(rng);
        in.B = 1.0 + 3.0 * uniform01(rng);
        in.kl_bar = 20.0 * uniform01(rng);
        in.emp_excess = 0.0;
        in.delta = 0.05;
        auto cor2 = inexpect_bound(0.0, in.kl_bar, in.n, in.beta, in.B);
        auto thm = inprob_bound(in);
        CHECK(cor2.complexity_term <= thm.complexity_term + 1e-12);
    }
}

TEST_CASE("beta=1 complexity is smaller when the ratio is below one") {
    BoundInputs in;
    in.n = 1 << 14;
    in.B = 1.25;
    in.kl_bar = 2.0;
    in.emp_excess = 0.0;
    in.delta = 0.05;
    in.beta = 1.0;
    auto fast = inprob_bound(in);
    in.beta = 0.0;
    auto slow = inprob_bound(in);
    double a = (in.kl_bar + llog(in.n)) / (static_cast<double>(in.n) * fast.eta_max);
    REQUIRE(a <= 1.0);
    CHECK(fast.complexity_term <= slow.complexity_term + 1e-15);
}

TEST_CASE("main bound total: monotone in n (kl = ln 2n) and in kl_bar") {
    double prev = 1e300;
    for (std::uint64_t n = 16; n <= (1ULL << 20); n *= 2) {
        BoundInputs in;
        in.n = n;
        in.beta = 1.0;
        in.B = 1.25;
        in.kl_bar = std::log(2.0 * static_cast<double>(n));
        in.emp_excess = 0.0;
        in.eta = std::sqrt(static_cast<double>(n)) * bound_constants(in.B).eta_max / 24.0;
        double total = main_bound(in).total;
        CHECK(total <= prev + 1e-15);
        prev = total;
    }
    BoundInputs in;
    in.n = 4096;
    in.beta = 1.0;
    in.B = 1.25;
    in.emp_excess = 0.0;
    in.eta = 0.01;
    double last = -1.0;
    for (double klv : {0.0, 0.5, 2.0, 8.0, 32.0}) {
        in.kl_bar = klv;
        double t = main_bound(in).total;
        CHECK(t > last);
        last = t;
    }
}

TEST_CASE("baseline bounds: worked values") {
    CHECK(baseline_pac_bayes(0.0, 400, 0.1, 0.0) ==
          doctest::Approx(2.0 * std::log(2.0 * 20.0 / 0.1) / 400.0).epsilon(1e-12));
    double num = std::log(2048.0) + std::log(2.0 * 32.0 / 0.05);
    CHECK(baseline_pac_bayes(std::log(2048.0), 1024, 0.05, 0.1) ==
          doctest::Approx(std::sqrt(2.0 * 0.1 * num / 1024.0) + 2.0 * num / 1024.0)
              .epsilon(1e-12));
    CHECK(baseline_mi(0.0, 10) == 0.0);
    CHECK(baseline_mi(2.0, 4) == doctest::Approx(1.0));
    CHECK(baseline_mi(std::log(2048.0), 1024) == doctest::Approx(0.1220).epsilon(1e-3));
    CHECK_THROWS_AS(baseline_pac_bayes(-1.0, 10, 0.1, 0.0), invalid_input);
    CHECK_THROWS_AS(baseline_mi(-1.0, 10), invalid_input);
}

TEST_CASE("brute-force ESI of the full gap bound on a tiny problem") {
    // 4-atom noisy threshold problem, n = 3, full enumeration of D^n
    std::vector<int> domain{1, 2};
    std::vector<double> px{0.5, 0.5};
    auto p = make_noisy_threshold_problem(domain, px, 2, 0.1);
    const auto& atoms = p.dist.atoms;
    const std::size_t n = 3;
    auto erm_fn = [&](const Sample& z) { return threshold_erm(p.cls, z); };
    auto erm = make_threshold_erm_algorithm(p.cls);
    auto prior = make_enumeration_prior(erm_fn, p.cls);
    const Posterior star = point_mass(p.f_star);

    for (double beta : {0.0, 1.0}) {
        auto cert = best_B(p, beta);
        REQUIRE(cert.feasible);
        auto bc = bound_constants(cert.B);
        double eta = std::sqrt(static_cast<double>(n)) * bc.eta_max / 24.0;
        double expectation = 0.0;
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            Sample z0;
            double w = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                z0.push_back(atoms[idx[i]]);
                w *= p.dist.mass[idx[i]];
            }
            Posterior out = erm.run(z0);
            double gap = population_loss(p, out) - empirical_loss(p, out, z0);
            auto ekl = expected_kl_ghost(erm.run, prior, z0, p.dist, true, 0, 0);
            REQUIRE(ekl.exact);
            BoundInputs in;
            in.n = n;
            in.beta = beta;
            in.B = cert.B;
            in.kl_bar = ekl.value;
            in.emp_excess = empirical_loss(p, out, z0) - empirical_loss(p, star, z0);
            in.eta = eta;
            expectation += w * std::exp(eta * (gap - main_bound(in).total));
            std::size_t pos = 0;
            while (pos < n && ++idx[pos] == atoms.size()) {
                idx[pos] = 0;
                ++pos;
            }
            if (pos == n) break;
        }
        CHECK(expectation <= 1.0 + 1e-9);
    }
}
