#include "fringe/phaselock.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fringe/rng.hpp"

namespace fringe::phaselock {

namespace {
constexpr double kPi = std::numbers::pi;
}

void PathConfig::validate() const {
    const double lengths[] = {L_a,   L_b,   delta_a, delta_b, Lw_a,  Lw_b,
                              Lwo_a, Lwo_b, Lr_a,    Lr_b,    Lro_a, Lro_b};
    for (double v : lengths)
        if (v < 0.0 || !std::isfinite(v))
            throw_error(ErrorKind::invalid_argument,
                        "path lengths must be finite and nonnegative");
    const double ks[] = {k_th, k_p, k_wr, k_w, k_wo, k_r, k_ro};
    for (double k : ks)
        if (k <= 0.0 || !std::isfinite(k))
            throw_error(ErrorKind::invalid_argument,
                        "wave numbers must be finite and positive");
}

WavenumberDeviations wavenumber_deviations(const PathConfig& cfg) {
    WavenumberDeviations d;
    d.th_vs_p = (cfg.k_th - cfg.k_p) / cfg.k_p;
    d.wo_vs_p = (cfg.k_wo - cfg.k_p) / cfg.k_p;
    d.ro_vs_p = (cfg.k_ro - cfg.k_p) / cfg.k_p;
    d.w_vs_wr = (cfg.k_w - cfg.k_wr) / cfg.k_wr;
    d.r_vs_wr = (cfg.k_r - cfg.k_wr) / cfg.k_wr;
    return d;
}

double wrap_angle(double x) {
    double r = std::remainder(x, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

LockState lock_setpoints(const PathConfig& cfg) {
    cfg.validate();
    const double dL = cfg.L_b - cfg.L_a;
    const double dDelta = cfg.delta_b - cfg.delta_a;
    LockState s;
    s.phi_th = wrap_angle(2.0 * cfg.k_p * (dL + dDelta));
    s.phi_woro = wrap_angle(cfg.k_p * (dL + 2.0 * dDelta +
                                       (cfg.Lro_b - cfg.Lro_a) +
                                       (cfg.Lwo_b - cfg.Lwo_a)));
    s.phi_wr =
        wrap_angle(cfg.k_wr * ((cfg.Lw_b - cfg.Lw_a) + (cfg.Lr_b - cfg.Lr_a)));
    return s;
}

UnlockedError::UnlockedError(double r_th, double r_woro, double r_wr)
    : Error(ErrorKind::unlocked,
            [&] {
                std::ostringstream os;
                os << "lock conditions violated; residuals (rad): thi="
                   << r_th << " woi=" << r_woro << " wri=" << r_wr;
                return os.str();
            }()),
      residuals{r_th, r_woro, r_wr} {}

double residual_phase(const PathConfig& cfg, const LockState& lock,
                      HeraldSign sign, double lock_tol) {
    cfg.validate();
    const LockState derived = lock_setpoints(cfg);
    const double r_th = wrap_angle(derived.phi_th - lock.phi_th);
    const double r_woro = wrap_angle(derived.phi_woro - lock.phi_woro);
    const double r_wr = wrap_angle(derived.phi_wr - lock.phi_wr);
    if (std::abs(r_th) > lock_tol || std::abs(r_woro) > lock_tol ||
        std::abs(r_wr) > lock_tol)
        throw UnlockedError(r_th, r_woro, r_wr);

    const double dL = cfg.L_b - cfg.L_a;
    const double dLw = cfg.Lw_b - cfg.Lw_a;
    const double dLwo = cfg.Lwo_b - cfg.Lwo_a;
    const double dLr = cfg.Lr_b - cfg.Lr_a;
    const double dLro = cfg.Lro_b - cfg.Lro_a;

    // Exact detuning terms: each is a wave-number difference times a length
    // difference, so equal wave numbers cancel exactly rather than through
    // the difference of two large path phases.
    const double detuning = (cfg.k_th - cfg.k_p) * dL -
                            (cfg.k_wo - cfg.k_p) * dLwo -
                            (cfg.k_ro - cfg.k_p) * dLro -
                            (cfg.k_w - cfg.k_wr) * dLw -
                            (cfg.k_r - cfg.k_wr) * dLr;
    const double laser = (cfg.Phi_w_b - cfg.Phi_w_a) +
                         (cfg.Phi_r_b - cfg.Phi_r_a);

    double phase = lock.phi_th - lock.phi_woro - lock.phi_wr + detuning + laser;
    if (sign == HeraldSign::minus) phase += kPi;
    return wrap_angle(phase);
}

DriftEstimate drift_vp(const std::vector<double>& sigmas_rad, long trials,
                       std::uint64_t seed) {
    if (trials <= 0)
        throw_error(ErrorKind::invalid_argument, "trials must be positive");
    double sum = 0.0;
    double sum2 = 0.0;
    for (long t = 0; t < trials; ++t) {
        CounterRng rng(seed, static_cast<std::uint64_t>(t));
        double theta = 0.0;
        for (double s : sigmas_rad) theta += s * rng.gauss();
        const double c = std::cos(theta);
        sum += c;
        sum2 += c * c;
    }
    DriftEstimate e;
    e.value = sum / static_cast<double>(trials);
    const double var =
        std::max(0.0, sum2 / trials - e.value * e.value);
    e.stderr_ = std::sqrt(var / static_cast<double>(trials));
    return e;
}

}  // namespace fringe::phaselock
