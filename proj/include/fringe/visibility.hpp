#pragma once

#include <optional>
#include <vector>

#include "fringe/error.hpp"

namespace fringe::visibility {

// Multi-photon ceiling of the coincidence visibility,
//   V_H = 2x / (x^2 g2_s + g2_e + 2x),
// with x the single-photon brightness ratio between the probe field and the
// heralded reference field.
double v_h(double x, double g2_s, double g2_e);

// Brightness ratio maximizing v_h: x* = sqrt(g2_e / g2_s). Returns 0 for an
// ideal single-photon reference (supremum at vanishing probe brightness).
double optimal_ratio(double g2_s, double g2_e);

// Herald signal-to-noise factor: snr*eta_ro / (snr*eta_ro + p_ro).
double v_snr(double snr, double eta_ro, double p_ro);

// Coherence factor of a finite detection window: sqrt(g2_windowed - 1).
double v_c(double g2_windowed);

// Residual phase jitter of the locked interferometers, Gaussian model:
// exp(-sum(sigma_i^2)/2).
double v_p(const std::vector<double>& sigmas_rad);

// Hong-Ou-Mandel cross-correlation of two fields with relative intensity
// zeta and mode overlap eta:
//   (g2_a + zeta^2 g2_b + 2(1-eta) zeta) / (1+zeta)^2.
double hom_g2(double g2_a, double g2_b, double eta, double zeta);

struct HomOverlap {
    double eta = 0.0;
    bool physical = false;  // true when eta landed inside [0,1]
};

// Inverts hom_g2 for the overlap. Out-of-range results are returned as-is
// with physical = false, never clamped.
HomOverlap eta_from_hom(double g2_hom_measured, double g2_a, double g2_b,
                        double zeta);

// Mode-indistinguishability factor combining the two nodes' HOM overlaps:
// sqrt(eta_l * eta_r).
double v_i(double eta_l, double eta_r);

struct BudgetInputs {
    double snr = 0.0;
    double eta_ro = 0.0;
    double p_ro = 0.0;
    double g2_e = 0.0;
    double g2_s = 2.0;           // zero-delay value, used by the v_h term
    double g2_s_windowed = 2.0;  // value seen through the window, used by v_c
    double x = 1.0;              // brightness ratio
    double sigma_thi = 0.0;
    double sigma_woi = 0.0;
    double sigma_wri = 0.0;
    double eta_l = 1.0;
    double eta_r = 1.0;
    double zeta = 1.0;

    // Published factor values may be supplied directly; when present they
    // take the place of the derived v_h / v_i terms (the tabulated factors
    // are measured quantities, not always reproducible from the raw
    // inputs above).
    std::optional<double> v_h_override;
    std::optional<double> v_i_override;

    void validate() const;
};

struct VisibilityBudget {
    double v_snr = 1.0;
    double v_h = 1.0;
    double v_c = 1.0;
    double v_p = 1.0;
    double v_i = 1.0;
    double v_theory = 1.0;
};

// Evaluates the five factors and their product.
VisibilityBudget budget(const BudgetInputs& in);

// Photon probabilities of one field in the coincidence bookkeeping: p1 is
// the probability of a single photon in a given arm, p2 of one photon in
// each arm, p0 of vacuum.
struct PhotonTriple {
    double p0 = 1.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

// Coincidence visibility of the interfered pair of fields,
//   V = 2 pe1 ps1 d g cos(psi - phi) xi /
//       (pe0 ps2 + pe2 ps0 + 2 pe1 ps1),
// with d, g the normalized coherence amplitudes and xi the mode-overlap
// factor.
double full_visibility(const PhotonTriple& pe, double d, double psi,
                       const PhotonTriple& ps, double g, double phi,
                       double xi);

}  // namespace fringe::visibility
