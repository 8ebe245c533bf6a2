#pragma once

#include <Eigen/Dense>

#include "fringe/error.hpp"

namespace fringe::fisher {

// Fisher information of the two complex-visibility parameters after an
// adjustable phase shift delta. The matrix is a rank-1 outer product of
// (cos(phi-delta), sin(phi-delta)), so one eigenvalue is always zero and
// the trace norm carries all the information.
struct FisherResult {
    Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
    double lambda1 = 0.0;  // the (numerically) zero eigenvalue
    double lambda2 = 0.0;
    double trace_norm = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
};

// Ideal direct detection of a weak field with mean photon number epsilon
// and visibility amplitude g:
//   F = epsilon / (1 - Re(g e^{i(phi-delta)})^2) * R(phi-delta),
// trace norm >= epsilon for every g in [0,1).
FisherResult fisher_ideal(double epsilon, double g, double phi, double delta);

// Practical heralded measurement with retrieval efficiency eta and measured
// visibility V:
//   F = eta*epsilon / (2 (1 - Re(V e^{i(phi-delta)})^2)) * R(phi-delta),
// trace norm <= eta*epsilon / (2(1 - V^2)), equality at delta = phi.
FisherResult fisher_practical(double eta, double epsilon, double v, double phi,
                              double delta);

// Trace norm relative to the epsilon^2 ceiling of spatially local
// strategies; > 1 means the nonlocal measurement extracts more information
// per trial.
double compare_local_bound(double epsilon, const FisherResult& f);

}  // namespace fringe::fisher
