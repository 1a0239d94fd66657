#pragma once
#include "cpb/core.hpp"

namespace cpb {

// First and second moments of the excess loss of f against f_star.
struct ExcessMoments {
    double first = 0.0;   // E[loss(f) - loss(f*)], >= 0 by optimality
    double second = 0.0;  // E[(loss(f) - loss(f*))^2]
};

ExcessMoments excess_moments(const LearningProblem& p, int f);

struct BernsteinCertificate {
    double beta = 0.0;
    double B = 1.0;           // smallest valid constant, floored at 1
    int witnessed_by = -1;    // hypothesis attaining the sup ratio (-1 if floor binds)
    bool feasible = true;     // false iff some f has first = 0 but second > 0 (beta > 0)
    int violator = -1;        // the offending hypothesis when infeasible
};

// second(f) <= B * first(f)^beta for all f, with 0^beta := 0 for beta > 0
// and 0^0 := 1.
BernsteinCertificate best_B(const LearningProblem& p, double beta);

// Linearized condition: for c > 0 and eta < 1/(2Bc),
//   c eta second <= min(1/2, beta) first + (1-beta)(2Bc eta)^{1/(1-beta)},
// the last term vanishing at beta = 1. Returns RHS - LHS.
double linearized_margin(const LearningProblem& p, int f, double c, double eta, double beta,
                         double B);

}  // namespace cpb
