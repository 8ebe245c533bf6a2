#include "fringe/visibility.hpp"

#include <cmath>

namespace fringe::visibility {

double v_h(double x, double g2_s, double g2_e) {
    if (x <= 0.0)
        throw_error(ErrorKind::domain, "brightness ratio must be positive");
    if (g2_s < 0.0 || g2_e < 0.0)
        throw_error(ErrorKind::domain, "g2 values must be nonnegative");
    return 2.0 * x / (x * x * g2_s + g2_e + 2.0 * x);
}

double optimal_ratio(double g2_s, double g2_e) {
    if (g2_e < 0.0)
        throw_error(ErrorKind::domain, "g2_e must be nonnegative");
    if (g2_s <= 0.0)
        throw_error(ErrorKind::singularity,
                    "no interior optimum: v_h is unbounded in x for g2_s = 0");
    return std::sqrt(g2_e / g2_s);
}

double v_snr(double snr, double eta_ro, double p_ro) {
    if (snr < 0.0 || eta_ro < 0.0 || p_ro < 0.0)
        throw_error(ErrorKind::domain, "snr inputs must be nonnegative");
    const double sig = snr * eta_ro;
    if (sig + p_ro <= 0.0)
        throw_error(ErrorKind::domain, "degenerate all-zero snr inputs");
    return sig / (sig + p_ro);
}

double v_c(double g2_windowed) {
    if (g2_windowed < 1.0 || g2_windowed > 2.0)
        throw_error(ErrorKind::domain, "windowed g2 must lie in [1,2]");
    return std::sqrt(g2_windowed - 1.0);
}

double v_p(const std::vector<double>& sigmas_rad) {
    double s2 = 0.0;
    for (double s : sigmas_rad) {
        if (!std::isfinite(s))
            throw_error(ErrorKind::domain, "phase SD must be finite");
        s2 += s * s;
    }
    return std::exp(-0.5 * s2);
}

double hom_g2(double g2_a, double g2_b, double eta, double zeta) {
    if (zeta <= 0.0)
        throw_error(ErrorKind::domain, "relative intensity must be positive");
    if (eta < 0.0 || eta > 1.0)
        throw_error(ErrorKind::domain, "overlap must be in [0,1]");
    return (g2_a + zeta * zeta * g2_b + 2.0 * (1.0 - eta) * zeta) /
           ((1.0 + zeta) * (1.0 + zeta));
}

HomOverlap eta_from_hom(double g2_hom_measured, double g2_a, double g2_b,
                        double zeta) {
    if (zeta <= 0.0)
        throw_error(ErrorKind::domain, "relative intensity must be positive");
    HomOverlap r;
    r.eta = (g2_a + zeta * zeta * g2_b + 2.0 * zeta -
             (1.0 + zeta) * (1.0 + zeta) * g2_hom_measured) /
            (2.0 * zeta);
    r.physical = r.eta >= 0.0 && r.eta <= 1.0;
    return r;
}

double v_i(double eta_l, double eta_r) {
    if (eta_l < 0.0 || eta_l > 1.0 || eta_r < 0.0 || eta_r > 1.0)
        throw_error(ErrorKind::domain, "overlaps must be in [0,1]");
    return std::sqrt(eta_l * eta_r);
}

void BudgetInputs::validate() const {
    if (snr < 0.0 || eta_ro < 0.0 || p_ro < 0.0 || g2_e < 0.0 || g2_s < 0.0)
        throw_error(ErrorKind::domain, "budget inputs must be nonnegative");
    if (x <= 0.0)
        throw_error(ErrorKind::domain, "brightness ratio must be positive");
    if (!std::isfinite(sigma_thi) || !std::isfinite(sigma_woi) ||
        !std::isfinite(sigma_wri))
        throw_error(ErrorKind::domain, "phase SDs must be finite");
}

VisibilityBudget budget(const BudgetInputs& in) {
    in.validate();
    VisibilityBudget b;
    b.v_snr = v_snr(in.snr, in.eta_ro, in.p_ro);
    b.v_h = in.v_h_override ? *in.v_h_override : v_h(in.x, in.g2_s, in.g2_e);
    b.v_c = v_c(in.g2_s_windowed);
    b.v_p = v_p({in.sigma_thi, in.sigma_woi, in.sigma_wri});
    b.v_i = in.v_i_override ? *in.v_i_override : v_i(in.eta_l, in.eta_r);
    b.v_theory = b.v_snr * b.v_h * b.v_c * b.v_p * b.v_i;
    return b;
}

double full_visibility(const PhotonTriple& pe, double d, double psi,
                       const PhotonTriple& ps, double g, double phi,
                       double xi) {
    if (pe.p0 < 0 || pe.p1 < 0 || pe.p2 < 0 || ps.p0 < 0 || ps.p1 < 0 ||
        ps.p2 < 0)
        throw_error(ErrorKind::domain, "photon probabilities must be >= 0");
    if (xi < 0.0 || xi > 1.0)
        throw_error(ErrorKind::domain, "xi must be in [0,1]");
    if (d < 0.0 || d > 1.0 || g < 0.0 || g > 1.0)
        throw_error(ErrorKind::domain,
                    "normalized coherence amplitudes must be in [0,1]");
    const double denom = pe.p0 * ps.p2 + pe.p2 * ps.p0 + 2.0 * pe.p1 * ps.p1;
    if (denom <= 0.0)
        throw_error(ErrorKind::singularity,
                    "no coincidence weight: visibility denominator is zero");
    return 2.0 * pe.p1 * ps.p1 * d * g * std::cos(psi - phi) * xi / denom;
}

}  // namespace fringe::visibility
