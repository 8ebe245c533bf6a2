#pragma once

#include <array>
#include <vector>

#include "fringe/error.hpp"

namespace fringe::phaselock {

// Path bookkeeping of the three locked interferometers. Lengths in meters,
// wave numbers in rad/m, phases in radians. Suffixes _a/_b label the two
// nodes.
//
// The locking beams define three servo conditions:
//   THI (thermal paths, double pass):  2 k_p (dL + d_delta)        = phi_th
//   WOI (write-out + read-out paths):  k_p (dL + 2 d_delta
//                                            + dL_ro + dL_wo)      = phi_woro
//   WRI (write + read paths):          k_wr (dL_w + dL_r)          = phi_wr
// with dX = X_b - X_a. When these hold and the wave-number near-equalities
// k_p = k_wo = k_ro = k_th and k_wr = k_w = k_r are exact, the relative
// phase of the final one-photon-per-node state equals
// phi_th - phi_woro - phi_wr, independent of every path length.
struct PathConfig {
    double L_a = 0.0, L_b = 0.0;            // thermal-field paths
    double delta_a = 0.0, delta_b = 0.0;    // locking-beam excess paths
    double Lw_a = 0.0, Lw_b = 0.0;          // write paths
    double Lwo_a = 0.0, Lwo_b = 0.0;        // write-out paths
    double Lr_a = 0.0, Lr_b = 0.0;          // read paths
    double Lro_a = 0.0, Lro_b = 0.0;        // read-out paths
    double k_th = 0.0;                      // thermal light
    double k_p = 0.0;                       // THI/WOI locking beam
    double k_wr = 0.0;                      // WRI locking beam
    double k_w = 0.0, k_wo = 0.0;           // write, write-out
    double k_r = 0.0, k_ro = 0.0;           // read, read-out
    double Phi_w_a = 0.0, Phi_w_b = 0.0;    // write-laser initial phases
    double Phi_r_a = 0.0, Phi_r_b = 0.0;    // read-laser initial phases

    void validate() const;
};

// Relative deviations of the wave numbers from the near-equality
// assumptions; all zero when the equalities are exact.
struct WavenumberDeviations {
    double th_vs_p = 0.0;
    double wo_vs_p = 0.0;
    double ro_vs_p = 0.0;
    double w_vs_wr = 0.0;
    double r_vs_wr = 0.0;
};

WavenumberDeviations wavenumber_deviations(const PathConfig& cfg);

// Set points of the three locks, wrapped to (-pi, pi].
struct LockState {
    double phi_th = 0.0;
    double phi_woro = 0.0;
    double phi_wr = 0.0;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double x);

LockState lock_setpoints(const PathConfig& cfg);

// Heralding outcome of the write-out interference; flips the fringe by pi.
enum class HeraldSign { plus, minus };

class UnlockedError : public Error {
  public:
    UnlockedError(double r_th, double r_woro, double r_wr);
    std::array<double, 3> residuals;  // per-condition lock residuals (rad)
};

// Relative phase between |HV> and |VH> of the post-selected two-photon
// state, evaluated by substituting the full per-beam path phases. The
// computation groups every term as (wave-number difference) * length, so
// with exact wave-number equalities the result reduces to
// phi_th - phi_woro - phi_wr identically; detunings and unequal laser
// initial phases shift it by exactly their first-principles contribution:
//   (k_th-k_p) dL - (k_wo-k_p) dLwo - (k_ro-k_p) dLro
//   - (k_w-k_wr) dLw - (k_r-k_wr) dLr + dPhi_w + dPhi_r.
// Throws UnlockedError when cfg does not satisfy `lock` within lock_tol.
double residual_phase(const PathConfig& cfg, const LockState& lock,
                      HeraldSign sign = HeraldSign::plus,
                      double lock_tol = 1e-6);

struct DriftEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Monte Carlo estimate of the fringe-contrast factor E[cos(sum_i theta_i)]
// with independent Gaussian phase residuals theta_i ~ N(0, sigma_i).
// Converges to exp(-sum sigma_i^2 / 2). Trials use counter-based streams,
// so any partitioning reproduces the same result.
DriftEstimate drift_vp(const std::vector<double>& sigmas_rad, long trials,
                       std::uint64_t seed);

}  // namespace fringe::phaselock
