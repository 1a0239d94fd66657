#include "doctest.h"

#include <cmath>

#include "cpb/bernstein.hpp"
#include "cpb/lemma1.hpp"
#include "helpers.hpp"

using namespace cpb;
using test::noise_problem;

TEST_CASE("excess moments: f_star is zero, f_7 matches the disagreement mass") {
    auto p = noise_problem(10, 5, 0.1);
    auto star = excess_moments(p, p.f_star);
    CHECK(star.first == 0.0);
    CHECK(star.second == 0.0);
    // f_7 vs f_5 disagree on x in {5,6}: first = 0.8 * 0.2, second = 0.2
    auto m7 = excess_moments(p, 7);
    CHECK(m7.first == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(m7.second == doctest::Approx(0.20).epsilon(1e-12));
}

TEST_CASE("zero-one loss: second moment equals the disagreement probability") {
    auto p = noise_problem(8, 3, 0.2);
    for (int f = 0; f < p.cls.size(); ++f) {
        double disagree = 0.0;
        for (std::size_t a = 0; a < p.dist.atoms.size(); ++a)
            if (p.cls.predict(f, p.dist.atoms[a].x) != p.cls.predict(p.f_star, p.dist.atoms[a].x))
                disagree += p.dist.mass[a];
        CHECK(excess_moments(p, f).second == doctest::Approx(disagree).epsilon(1e-12));
    }
}

TEST_CASE("second moment dominates the squared first moment") {
    for (double noise : {0.05, 0.1, 0.25, 0.4}) {
        auto p = noise_problem(9, 4, noise);
        for (int f = 0; f < p.cls.size(); ++f) {
            auto m = excess_moments(p, f);
            if (m.first >= 0.0) CHECK(m.second >= m.first * m.first - 1e-12);
        }
    }
}

TEST_CASE("best_B: singleton class is trivial") {
    auto p = make_problem(make_distribution({{0, 1.0}, {1, 0.0}}, {0.5, 0.5}),
                          make_table_class({0, 1}, {{1, 0}}));
    auto cert = best_B(p, 1.0);
    CHECK(cert.B == 1.0);
    CHECK(cert.feasible);
}

TEST_CASE("best_B: label-noise thresholds give exactly 1/(1-2p) at beta=1") {
    for (double p_noise : {0.05, 0.1, 0.2, 0.3}) {
        auto p = noise_problem(10, 5, p_noise);
        auto cert = best_B(p, 1.0);
        CHECK(cert.feasible);
        CHECK(std::abs(cert.B - 1.0 / (1.0 - 2.0 * p_noise)) <= 1e-10);
        // enumeration oracle: every ratio equals 1/(1-2p)
        for (int f = 0; f < p.cls.size(); ++f) {
            auto m = excess_moments(p, f);
            if (m.first > 1e-12)
                CHECK(m.second / m.first == doctest::Approx(1.0 / (1.0 - 2.0 * p_noise)));
        }
    }
}

TEST_CASE("best_B at beta=0 never exceeds 4 and is nondecreasing in beta") {
    Rng rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        double noise = 0.05 + 0.4 * uniform01(rng);
        int dmax = 4 + static_cast<int>(rng() % 7);
        auto p = noise_problem(dmax, 1 + static_cast<int>(rng() % dmax), noise);
        auto b0 = best_B(p, 0.0);
        CHECK(b0.B <= 4.0);
        double prev = b0.B;
        for (double beta : {0.25, 0.5, 0.75, 1.0}) {
            auto c = best_B(p, beta);
            REQUIRE(c.feasible);
            CHECK(c.B >= prev - 1e-12);
            prev = c.B;
        }
    }
}

TEST_CASE("best_B reports the violator when beta > 0 is impossible") {
    // two hypotheses with equal population loss but different per-atom losses
    auto dist = make_distribution({{0, 0.0}, {1, 0.0}}, {0.5, 0.5});
    auto cls = make_table_class({0, 1}, {{0, 0}, {0, 0}});
    auto p = make_table_problem(dist, cls, {{0.2, 0.4}, {0.4, 0.2}});
    CHECK(p.f_star == 0);
    auto c1 = best_B(p, 1.0);
    CHECK_FALSE(c1.feasible);
    CHECK(c1.violator == 1);
    auto c0 = best_B(p, 0.0);  // beta = 0 stays vacuous
    CHECK(c0.feasible);
    CHECK(c0.B == 1.0);
    CHECK_THROWS_AS(best_B(p, 1.5), invalid_input);
}

TEST_CASE("linearized margin: f_star, the noisy f_7, and the beta=0 reduction") {
    auto p = noise_problem(10, 5, 0.1);
    double C = c_const(2.0, 0.25);
    double B = best_B(p, 1.0).B;
    double eta = 0.9 / (2.0 * B * C);
    CHECK(linearized_margin(p, p.f_star, C, eta, 1.0, B) >= 0.0);
    CHECK(linearized_margin(p, 7, C, eta, 1.0, B) >= 0.0);

    double B0 = best_B(p, 0.0).B;
    double eta0 = 0.9 / (2.0 * B0 * C);
    for (int f = 0; f < p.cls.size(); ++f) {
        // beta=0: reduces to c eta second <= 2 B c eta
        auto m = excess_moments(p, f);
        double margin = linearized_margin(p, f, C, eta0, 0.0, B0);
        CHECK(margin == doctest::Approx(2.0 * B0 * C * eta0 - C * eta0 * m.second).epsilon(1e-12));
        CHECK(margin >= -1e-12);
    }

    CHECK_THROWS_AS(linearized_margin(p, 7, C, 1.0 / (2.0 * B * C), 1.0, B), invalid_input);
    CHECK_THROWS_AS(linearized_margin(p, 7, -1.0, eta, 1.0, B), invalid_input);
}

TEST_CASE("linearized margin holds over the whole class for certified (B, beta)") {
    double C = c_const(2.0, 0.25);
    Rng rng(43);
    for (int rep = 0; rep < 10; ++rep) {
        double noise = 0.05 + 0.4 * uniform01(rng);
        auto p = noise_problem(10, 1 + static_cast<int>(rng() % 10), noise);
        for (double beta : {0.0, 0.5, 1.0}) {
            auto cert = best_B(p, beta);
            REQUIRE(cert.feasible);
            double eta = 0.9 / (2.0 * cert.B * C);
            for (int f = 0; f < p.cls.size(); ++f)
                CHECK(linearized_margin(p, f, C, eta, beta, cert.B) >= -1e-12);
        }
    }
}
