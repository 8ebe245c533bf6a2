#include "fringe/sources.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace fringe::sources {

namespace {

constexpr double kProbTol = 1e-9;

void moments_from_probs(PhotonNumberDist& d) {
    double norm = 0.0;
    for (double v : d.p) norm += v;
    if (norm <= 0.0)
        throw_error(ErrorKind::domain, "distribution has zero total mass");
    for (double& v : d.p) v /= norm;
    double n1 = 0.0, n2f = 0.0;
    for (int n = 0; n < static_cast<int>(d.p.size()); ++n) {
        n1 += n * d.p[n];
        n2f += static_cast<double>(n) * (n - 1) * d.p[n];
    }
    d.mean = n1;
    d.g2 = n1 > 0.0 ? n2f / (n1 * n1) : 0.0;
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

void PhotonNumberDist::validate() const {
    double sum = 0.0;
    for (double v : p) {
        if (v < -kProbTol)
            throw_error(ErrorKind::invalid_argument,
                        "negative photon-number probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw_error(ErrorKind::invalid_argument,
                    "photon-number probabilities do not sum to 1");
}

PhotonNumberDist thermal_dist(double nbar, int n_max) {
    if (nbar < 0.0)
        throw_error(ErrorKind::domain, "thermal mean must be nonnegative");
    if (n_max < 1)
        throw_error(ErrorKind::invalid_argument, "n_max must be >= 1");
    PhotonNumberDist d;
    d.p.resize(n_max + 1);
    if (nbar == 0.0) {
        d.p[0] = 1.0;
    } else {
        const double r = nbar / (1.0 + nbar);
        double v = 1.0 / (1.0 + nbar);
        for (int n = 0; n <= n_max; ++n) {
            d.p[n] = v;
            v *= r;
        }
    }
    moments_from_probs(d);
    return d;
}

PhotonNumberDist coherent_dist(double nbar, int n_max) {
    if (nbar < 0.0)
        throw_error(ErrorKind::domain, "coherent mean must be nonnegative");
    if (n_max < 1)
        throw_error(ErrorKind::invalid_argument, "n_max must be >= 1");
    PhotonNumberDist d;
    d.p.resize(n_max + 1);
    double v = std::exp(-nbar);
    for (int n = 0; n <= n_max; ++n) {
        d.p[n] = v;
        v *= nbar / static_cast<double>(n + 1);
    }
    moments_from_probs(d);
    return d;
}

double g1(const CoherenceModel& model, double tau_ns) {
    const double t = std::abs(tau_ns);
    switch (model.form) {
        case CoherenceForm::exponential:
            return std::exp(-t / model.tau_c_ns);
        case CoherenceForm::gaussian: {
            const double x = t / model.tau_c_ns;
            return std::exp(-std::numbers::pi * x * x / 4.0);
        }
    }
    return 0.0;
}

double g2_tau(const CoherenceModel& model, double tau_ns) {
    const double g = g1(model, tau_ns);
    return 1.0 + g * g;
}

double windowed_g2(const CoherenceModel& model, double window_ns) {
    if (window_ns <= 0.0)
        throw_error(ErrorKind::domain, "window width must be positive");
    const double T = window_ns;
    // Double integral reduced to 2 Int_0^T (T - tau) |g1|^2 dtau.
    const auto integrand = [&](double tau) {
        const double g = g1(model, tau);
        return (T - tau) * g * g;
    };
    const double area = integrate(integrand, 0.0, T, 1e-13 * T * T + 1e-15);
    return 1.0 + 2.0 * area / (T * T);
}

EntangledAncilla EntangledAncilla::from_physical(double p1_total, double g2_e,
                                                 double d_norm, double psi,
                                                 double eta_ro) {
    if (p1_total < 0.0 || p1_total > 1.0)
        throw_error(ErrorKind::domain, "p1_total must be in [0,1]");
    if (g2_e < 0.0) throw_error(ErrorKind::domain, "g2_e must be >= 0");
    if (d_norm < 0.0 || d_norm > 1.0)
        throw_error(ErrorKind::domain, "d_norm must be in [0,1]");
    EntangledAncilla a;
    a.p01 = a.p10 = 0.5 * p1_total;
    const double p2 = 0.5 * g2_e * p1_total * p1_total;
    a.p11 = 0.5 * p2;
    a.p00 = 1.0 - p1_total - a.p11;
    a.d = d_norm * std::sqrt(a.p01 * a.p10);
    a.psi = psi;
    a.g2_e = g2_e;
    a.eta_ro = eta_ro;
    a.validate();
    return a;
}

EntangledAncilla EntangledAncilla::x_state(double p00, double p01, double p10,
                                           double p11, double d, double psi) {
    EntangledAncilla a;
    a.p00 = p00;
    a.p01 = p01;
    a.p10 = p10;
    a.p11 = p11;
    a.d = d;
    a.psi = psi;
    const double p1 = p01 + p10;
    a.g2_e = p1 > 0.0 ? 2.0 * p11 / (p1 * p1) : 0.0;
    a.validate();
    return a;
}

void EntangledAncilla::validate() const {
    if (p00 < -kProbTol || p01 < -kProbTol || p10 < -kProbTol ||
        p11 < -kProbTol)
        throw_error(ErrorKind::invalid_argument, "negative probability");
    if (std::abs(p00 + p01 + p10 + p11 - 1.0) > kProbTol)
        throw_error(ErrorKind::invalid_argument,
                    "ancilla probabilities do not sum to 1");
    if (d < 0.0 || d > std::sqrt(std::max(0.0, p01 * p10)) + kProbTol)
        throw_error(ErrorKind::invalid_argument,
                    "coherence exceeds sqrt(p01*p10)");
    if (g2_e < 0.0)
        throw_error(ErrorKind::invalid_argument, "g2_e must be >= 0");
}

SignalState SignalState::from_thermal(double nbar_arm, double g, double phi) {
    if (nbar_arm < 0.0)
        throw_error(ErrorKind::domain, "nbar_arm must be nonnegative");
    if (g < 0.0 || g > 1.0)
        throw_error(ErrorKind::domain, "g must be in [0,1]");
    const double mu = 2.0 * nbar_arm;  // total mean before the split
    SignalState s;
    s.p01 = s.p10 = 0.5 * mu / ((1.0 + mu) * (1.0 + mu));
    s.p11 = 0.5 * mu * mu / std::pow(1.0 + mu, 3);
    // The small residual (|20>, |02> and higher) is lumped into p00 so the
    // block probabilities stay normalized.
    s.p00 = 1.0 - s.p01 - s.p10 - s.p11;
    s.g = g;
    s.phi = phi;
    s.g2_s = s.p01 > 0.0 ? s.p11 / (s.p01 * s.p01) : 2.0;
    s.validate();
    return s;
}

void SignalState::validate() const {
    if (p00 < -kProbTol || p01 < -kProbTol || p10 < -kProbTol ||
        p11 < -kProbTol)
        throw_error(ErrorKind::invalid_argument, "negative probability");
    if (std::abs(p00 + p01 + p10 + p11 - 1.0) > kProbTol)
        throw_error(ErrorKind::invalid_argument,
                    "signal probabilities do not sum to 1");
    if (g < 0.0 || g > 1.0)
        throw_error(ErrorKind::invalid_argument, "g must be in [0,1]");
}

fock::FockState build_ancilla_state(const EntangledAncilla& a, int n_max) {
    a.validate();
    const double extra = a.two_photon_total() - a.p11;
    if (extra < -1e-9)
        throw_error(ErrorKind::invalid_argument,
                    "p11 exceeds the two-photon mass implied by g2_e");
    const double p20 = std::max(0.0, 0.5 * extra);
    if (p20 > 1e-15 && n_max < 2)
        throw_error(ErrorKind::invalid_argument,
                    "n_max = 1 cannot hold the |20>,|02> populations");
    const double p00 = a.p00 - 2.0 * p20;
    if (p00 < -kProbTol)
        throw_error(ErrorKind::invalid_argument,
                    "vacuum probability cannot fund the two-photon mass");

    fock::FockState s(n_max, 2);
    s.matrix().setZero();
    s.set_element({0, 0}, {0, 0}, std::max(0.0, p00));
    s.set_element({0, 1}, {0, 1}, a.p01);
    s.set_element({1, 0}, {1, 0}, a.p10);
    s.set_element({1, 1}, {1, 1}, a.p11);
    const fock::Complex dd =
        a.d * std::exp(fock::Complex(0.0, a.psi));
    s.set_element({1, 0}, {0, 1}, dd);
    s.set_element({0, 1}, {1, 0}, std::conj(dd));
    if (p20 > 0.0) {
        s.set_element({2, 0}, {2, 0}, p20);
        s.set_element({0, 2}, {0, 2}, p20);
    }
    return s;
}

fock::FockState build_signal_state(double nbar_arm, double g, double phi,
                                   int n_max) {
    if (nbar_arm < 0.0)
        throw_error(ErrorKind::domain, "nbar_arm must be nonnegative");
    if (g < 0.0 || g > 1.0)
        throw_error(ErrorKind::domain, "g must be in [0,1]");

    const double mu = 2.0 * nbar_arm;
    const int levels = n_max + 1;

    // Joint statistics of a balanced split: total photon number is thermal
    // with mean mu, split binomially between the arms.
    auto total_prob = [&](int n) {
        if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
        return std::pow(mu / (1.0 + mu), n) / (1.0 + mu);
    };
    auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i)
            r *= static_cast<double>(n - k + i) / static_cast<double>(i);
        return r;
    };

    fock::FockState s(n_max, 2);
    s.matrix().setZero();
    double norm = 0.0;
    for (int a = 0; a < levels; ++a)
        for (int b = 0; b < levels; ++b) {
            const int n = a + b;
            const double q =
                total_prob(n) * binom(n, a) / std::pow(2.0, n);
            s.set_element({a, b}, {a, b}, q);
            norm += q;
        }
    s.matrix() /= norm;

    const double q01 = s.element({0, 1}, {0, 1}).real();
    const double q10 = s.element({1, 0}, {1, 0}).real();
    const fock::Complex gg =
        g * std::sqrt(q01 * q10) * std::exp(fock::Complex(0.0, phi));
    s.set_element({1, 0}, {0, 1}, gg);
    s.set_element({0, 1}, {1, 0}, std::conj(gg));
    return s;
}

}  // namespace fringe::sources
