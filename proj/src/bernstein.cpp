#include "cpb/bernstein.hpp"

#include <cmath>

namespace cpb {

ExcessMoments excess_moments(const LearningProblem& p, int f) {
    ExcessMoments m;
    for (std::size_t a = 0; a < p.dist.atoms.size(); ++a) {
        double d = p.loss_of(f, p.dist.atoms[a]) - p.loss_of(p.f_star, p.dist.atoms[a]);
        m.first += p.dist.mass[a] * d;
        m.second += p.dist.mass[a] * d * d;
    }
    return m;
}

BernsteinCertificate best_B(const LearningProblem& p, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw invalid_input("best_B: beta in [0,1]");
    BernsteinCertificate cert;
    cert.beta = beta;
    for (int f = 0; f < p.cls.size(); ++f) {
        if (f == p.f_star) continue;
        ExcessMoments m = excess_moments(p, f);
        if (m.first <= 1e-12) {
            // first = 0: constraint is second <= B (beta = 0, 0^0 = 1) or
            // second <= 0 (beta > 0, 0^beta = 0).
            if (beta > 0.0) {
                if (m.second > 1e-12) {
                    cert.feasible = false;
                    cert.violator = f;
                }
            } else if (m.second > cert.B) {
                cert.B = m.second;
                cert.witnessed_by = f;
            }
            continue;
        }
        double ratio = m.second / std::pow(m.first, beta);
        if (ratio > cert.B) {
            cert.B = ratio;
            cert.witnessed_by = f;
        }
    }
    return cert;
}

double linearized_margin(const LearningProblem& p, int f, double c, double eta, double beta,
                         double B) {
    if (!(c > 0.0)) throw invalid_input("linearized_margin: c must be > 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw invalid_input("linearized_margin: beta in [0,1]");
    if (!(B >= 1.0)) throw invalid_input("linearized_margin: B must be >= 1");
    if (!(eta > 0.0 && eta < 1.0 / (2.0 * B * c)))
        throw invalid_input("linearized_margin: need 0 < eta < 1/(2Bc)");
    ExcessMoments m = excess_moments(p, f);
    double lhs = c * eta * m.second;
    double slack = beta >= 1.0 ? 0.0
                               : (1.0 - beta) * std::pow(2.0 * B * c * eta, 1.0 / (1.0 - beta));
    double rhs = std::min(0.5, beta) * m.first + slack;
    return rhs - lhs;
}

}  // namespace cpb
