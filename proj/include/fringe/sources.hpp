#pragma once

#include <vector>

#include "fringe/fock.hpp"

namespace fringe::sources {

// Photon-number distribution of one detection window, together with the
// moments derived from it. Truncated distributions are renormalized over
// 0..n_max, and mean/g2 are computed from the stored probabilities so the
// stored fields are always self-consistent.
struct PhotonNumberDist {
    std::vector<double> p;  // p[n], n = 0..n_max
    double mean = 0.0;
    double g2 = 0.0;        // <n(n-1)> / <n>^2; 0 when mean is 0

    int n_max() const { return static_cast<int>(p.size()) - 1; }
    void validate() const;
};

// Bose-Einstein statistics, p_n = nbar^n / (1+nbar)^(n+1).
PhotonNumberDist thermal_dist(double nbar, int n_max);

// Poisson statistics.
PhotonNumberDist coherent_dist(double nbar, int n_max);

enum class CoherenceForm { exponential, gaussian };

// First-order temporal coherence model. Both forms are normalized so that
// the one-sided area of |g1| equals the coherence time:
//   exponential: |g1(t)| = exp(-|t|/tau_c)          (Lorentzian spectrum)
//   gaussian:    |g1(t)| = exp(-pi (t/tau_c)^2 / 4) (Doppler-broadened)
// The gaussian form is the default for vapor-cell scattering.
struct CoherenceModel {
    CoherenceForm form = CoherenceForm::gaussian;
    double tau_c_ns = 15.4;
};

double g1(const CoherenceModel& model, double tau_ns);

// Siegert relation g2(tau) = 1 + |g1(tau)|^2 for chaotic light.
double g2_tau(const CoherenceModel& model, double tau_ns);

// Zero-delay g2 seen through a finite integration window:
//   1 + (1/T^2) Int_0^T Int_0^T |g1(t - t')|^2 dt dt'
// evaluated by adaptive quadrature. Decays from 2 (T -> 0) to 1 (T -> inf).
double windowed_g2(const CoherenceModel& model, double window_ns);

// Parameters of the heralded read-out field shared by two memories. The
// four probabilities describe the joint photon occupation of the two
// read-out modes (the X block) and must sum to 1. d is the magnitude of the
// |10><01| matrix element, bounded by sqrt(p01*p10); psi its phase. g2_e is
// the unconditional second-order correlation of the two-mode field and
// fixes the total two-photon mass, g2_e * (p01+p10)^2 / 2.
struct EntangledAncilla {
    double p00 = 1.0;
    double p01 = 0.0;
    double p10 = 0.0;
    double p11 = 0.0;
    double d = 0.0;
    double psi = 0.0;
    double g2_e = 0.0;
    double eta_ro = 0.0;  // retrieval efficiency, bookkeeping for configs

    // Symmetric field with total single-photon probability p1_total
    // (typically the retrieval efficiency) and normalized coherence
    // d_norm in [0,1]. Two-photon mass is split binomially, half of it in
    // |11>, so the per-arm relation p11 = g2_e * p01^2 holds.
    static EntangledAncilla from_physical(double p1_total, double g2_e,
                                          double d_norm, double psi,
                                          double eta_ro);

    // Pure X block, no photon mass beyond |11>; g2_e is set accordingly.
    static EntangledAncilla x_state(double p00, double p01, double p10,
                                    double p11, double d, double psi);

    void validate() const;
    double single_photon_total() const { return p01 + p10; }
    double two_photon_total() const {
        return 0.5 * g2_e * single_photon_total() * single_photon_total();
    }
};

// Split stellar/thermal field parameters in the same X-block form. g is the
// normalized complex-visibility amplitude in [0,1]; the matrix element is
// g * sqrt(p01*p10). g2_s uses the per-arm convention p11 = g2_s * p01^2.
struct SignalState {
    double p00 = 1.0;
    double p01 = 0.0;
    double p10 = 0.0;
    double p11 = 0.0;
    double g = 0.0;
    double phi = 0.0;
    double g2_s = 2.0;

    // Balanced split of a thermal beam with mean nbar_arm per arm.
    static SignalState from_thermal(double nbar_arm, double g, double phi);

    void validate() const;
};

// Density matrix of the read-out field: the Eq-style X block plus the
// two-photon populations implied by g2_e. The extra |20>,|02> mass
// (two_photon_total - p11) is funded from p00. Requires n_max >= 2 whenever
// that extra mass is nonzero.
fock::FockState build_ancilla_state(const EntangledAncilla& a, int n_max);

// Density matrix of the split thermal field: joint photon statistics of a
// balanced split of a thermal beam (total mean 2*nbar_arm), renormalized at
// the cutoff, with a single-photon coherence g * sqrt(q01*q10) * e^{i phi}.
// Each arm's marginal distribution is thermal with mean nbar_arm; in the
// weak limit the total mean 2*nbar_arm is the epsilon of the weak-field
// expansion used by the Fisher analysis.
fock::FockState build_signal_state(double nbar_arm, double g, double phi,
                                   int n_max);

}  // namespace fringe::sources
