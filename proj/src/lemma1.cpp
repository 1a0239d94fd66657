#include "cpb/lemma1.hpp"

#include <cmath>
#include <limits>

#include "cpb/esi.hpp"

namespace cpb {

double c_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw invalid_input("c_gamma: gamma in (0,1)");
    return 2.0 * theta_fn(gamma);
}

double c_const(double A, double eta) {
    if (!(A > 0.0)) throw invalid_input("c_const: A must be > 0");
    if (!(eta > 0.0 && eta < 1.0)) throw invalid_input("c_const: eta in (0,1)");
    double q = eta / (1.0 - eta);
    double gamma = std::sqrt(A) * q;
    if (gamma >= 1.0) throw invalid_input("c_const: void for sqrt(A)*eta/(1-eta) >= 1");
    return (A + std::sqrt(A) * q * c_gamma(gamma)) / (1.0 - eta);
}

LemmaConstants lemma_constants(double A, double eta) {
    LemmaConstants lc;
    lc.A = A;
    lc.eta = eta;
    lc.c_gamma_value = c_gamma(std::sqrt(A) * eta / (1.0 - eta));
    lc.C_value = c_const(A, eta);
    return lc;
}

double lemma1_margin(double r0, double r1, double eta, double C) {
    if (std::abs(r0) > 1.0 + 1e-12 || std::abs(r1) > 1.0 + 1e-12)
        throw invalid_input("lemma1_margin: |r0|,|r1| <= 1 required");
    if (!(eta > 0.0)) throw invalid_input("lemma1_margin: eta must be > 0");
    if (C < 0.0) throw invalid_input("lemma1_margin: C must be >= 0");
    return 0.5 * std::exp(eta * (r1 - r0 - eta * C * r1 * r1)) +
           0.5 * std::exp(eta * (r0 - r1 - eta * C * r0 * r0));
}

namespace {

struct GridWorst {
    double margin = -std::numeric_limits<double>::infinity();
    double r0 = 0.0;
    double r1 = 0.0;
};

GridWorst sweep_one(double eta, double C, double r_step, double lo) {
    const int steps = static_cast<int>(std::llround((1.0 - lo) / r_step));
    GridWorst w;
    for (int i = 0; i <= steps; ++i) {
        double r0 = std::min(1.0, lo + i * r_step);
        for (int j = 0; j <= steps; ++j) {
            double r1 = std::min(1.0, lo + j * r_step);
            double m = lemma1_margin(r0, r1, eta, C);
            if (m > w.margin) {
                w.margin = m;
                w.r0 = r0;
                w.r1 = r1;
            }
        }
    }
    return w;
}

}  // namespace

SweepReport lemma1_sweep(double r_step, const std::vector<double>& etas, CRule rule,
                         double fixed_C) {
    if (!(r_step > 0.0 && r_step <= 0.5)) throw invalid_input("lemma1_sweep: bad r_step");
    if (etas.empty()) throw invalid_input("lemma1_sweep: empty eta list");
    SweepReport rep;
    rep.r_step = r_step;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    const double lo = rule == CRule::SameSign ? 0.0 : -1.0;
    for (double eta : etas) {
        SweepPoint pt;
        pt.eta = eta;
        double C = fixed_C;
        if (rule != CRule::Fixed) {
            try {
                C = c_const(rule == CRule::SameSign ? 1.0 : 2.0, eta);
            } catch (const invalid_input&) {
                pt.in_domain = false;
                rep.per_eta.push_back(pt);
                continue;
            }
        }
        pt.C_used = C;
        GridWorst w = sweep_one(eta, C, r_step, lo);
        pt.worst_margin = w.margin;
        pt.worst_r0 = w.r0;
        pt.worst_r1 = w.r1;
        rep.per_eta.push_back(pt);
        if (w.margin > rep.worst_margin) {
            rep.worst_margin = w.margin;
            rep.worst_r0 = w.r0;
            rep.worst_r1 = w.r1;
            rep.worst_eta = eta;
        }
    }
    return rep;
}

double optimal_constant(double eta, double r_step, double tol) {
    if (!(eta > 0.0 && eta <= 0.7)) throw invalid_input("optimal_constant: eta in (0, 0.7]");
    if (!(tol > 0.0)) throw invalid_input("optimal_constant: tol must be > 0");
    auto passes = [&](double C) {
        return sweep_one(eta, C, r_step, -1.0).margin <= 1.0 + 1e-12;
    };
    double hi = 1.0;
    while (!passes(hi)) {
        hi *= 2.0;
        if (hi > 1e4) return std::numeric_limits<double>::infinity();
    }
    double lo = 0.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (passes(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace cpb
