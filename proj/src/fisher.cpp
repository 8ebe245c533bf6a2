#include "fringe/fisher.hpp"

#include <cmath>

namespace fringe::fisher {

namespace {

constexpr double kSingularTol = 1e-12;

FisherResult assemble(double scale, double epsilon, double phi, double delta) {
    const double c = std::cos(phi - delta);
    const double s = std::sin(phi - delta);
    FisherResult r;
    r.matrix << scale * c * c, scale * s * c, scale * s * c, scale * s * s;
    // Closed-form eigenvalues of the rank-1 trig outer product.
    const double tr = r.matrix.trace();
    const double det = r.matrix.determinant();
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    r.lambda1 = 0.5 * (tr - disc);
    r.lambda2 = 0.5 * (tr + disc);
    r.trace_norm = r.lambda1 + r.lambda2;
    r.epsilon = epsilon;
    r.delta = delta;
    return r;
}

}  // namespace

FisherResult fisher_ideal(double epsilon, double g, double phi, double delta) {
    if (epsilon < 0.0)
        throw_error(ErrorKind::domain, "epsilon must be nonnegative");
    if (g < 0.0 || g >= 1.0)
        throw_error(ErrorKind::domain, "g must be in [0,1)");
    const double re = g * std::cos(phi - delta);
    const double denom = 1.0 - re * re;
    if (denom < kSingularTol)
        throw_error(ErrorKind::singularity,
                    "fringe-locked divergence: Re(g e^{i(phi-delta)}) = +-1");
    return assemble(epsilon / denom, epsilon, phi, delta);
}

FisherResult fisher_practical(double eta, double epsilon, double v, double phi,
                              double delta) {
    if (eta < 0.0 || eta > 1.0)
        throw_error(ErrorKind::domain, "eta must be in [0,1]");
    if (epsilon < 0.0)
        throw_error(ErrorKind::domain, "epsilon must be nonnegative");
    if (v < 0.0 || v > 1.0)
        throw_error(ErrorKind::domain, "V must be in [0,1]");
    const double re = v * std::cos(phi - delta);
    const double denom = 2.0 * (1.0 - re * re);
    if (denom < kSingularTol)
        throw_error(ErrorKind::singularity,
                    "fringe-locked divergence: Re(V e^{i(phi-delta)}) = +-1");
    return assemble(eta * epsilon / denom, epsilon, phi, delta);
}

double compare_local_bound(double epsilon, const FisherResult& f) {
    if (epsilon <= 0.0)
        throw_error(ErrorKind::domain, "epsilon must be positive");
    return f.trace_norm / (epsilon * epsilon);
}

}  // namespace fringe::fisher
