#pragma once
#include <vector>

#include "cpb/errors.hpp"

namespace cpb {

// c_gamma = 2(-log(1-gamma) - gamma)/gamma^2 on (0,1); increasing, -> 1 as
// gamma -> 0.
double c_gamma(double gamma);

// C_{A,eta} = (1/(1-eta)) * (A + sqrt(A) * (eta/(1-eta)) * c_{sqrt(A) eta/(1-eta)}).
// Defined while sqrt(A) eta/(1-eta) < 1; A=2 gives the general-sign constant
// (C_{2,1/4} ~ 3.6064), A=1 the same-sign improvement.
double c_const(double A, double eta);

struct LemmaConstants {
    double A = 0.0;
    double eta = 0.0;
    double c_gamma_value = 0.0;  // c at gamma = sqrt(A) eta/(1-eta)
    double C_value = 0.0;
};
LemmaConstants lemma_constants(double A, double eta);

// Exact two-point expectation of the randomized statement
//   r_Sbar - r_S  esi_eta  eta C r_Sbar^2     with S ~ Ber(1/2):
//   (1/2) exp(eta(r1 - r0 - eta C r1^2)) + (1/2) exp(eta(r0 - r1 - eta C r0^2)).
double lemma1_margin(double r0, double r1, double eta, double C);

enum class CRule {
    GeneralSign,  // C = c_const(2, eta), grid over [-1,1]^2
    SameSign,     // C = c_const(1, eta), grid over [0,1]^2
    Fixed,        // caller-supplied C, grid over [-1,1]^2
};

struct SweepPoint {
    double eta = 0.0;
    double C_used = 0.0;
    double worst_margin = 0.0;
    double worst_r0 = 0.0;
    double worst_r1 = 0.0;
    bool in_domain = true;  // false when the C formula is void at this eta
};

struct SweepReport {
    double r_step = 0.0;
    std::vector<SweepPoint> per_eta;
    // Worst margin over all in-domain grid points, with its arguments.
    double worst_margin = 0.0;
    double worst_r0 = 0.0;
    double worst_r1 = 0.0;
    double worst_eta = 0.0;
};

SweepReport lemma1_sweep(double r_step, const std::vector<double>& etas, CRule rule,
                         double fixed_C = 0.0);

// Smallest C >= 0 for which the full-grid sweep at this eta stays <= 1+1e-12,
// found by bisection to tolerance tol. Returns +infinity if no C <= 1e4 works.
double optimal_constant(double eta, double r_step = 0.01, double tol = 1e-3);

}  // namespace cpb
