#include "fringe/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "fringe/rng.hpp"

namespace fringe::mcsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::size_t EventStream::total_events() const {
    std::size_t n = 0;
    for (const auto& c : channels) n += c.size();
    return n;
}

void EventStream::validate() const {
    if (duration_ns <= 0.0)
        throw_error(ErrorKind::invalid_argument, "duration must be positive");
    for (const auto& c : channels) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] < 0.0 || c[i] > duration_ns)
                throw_error(ErrorKind::invalid_argument,
                            "timestamp outside [0, duration]");
            if (i > 0 && c[i] < c[i - 1])
                throw_error(ErrorKind::invalid_argument,
                            "timestamps must be sorted ascending");
        }
    }
}

void write_stream(const EventStream& stream, const std::string& path) {
    stream.validate();
    std::ofstream out(path);
    if (!out)
        throw_error(ErrorKind::parse, "cannot open stream file for writing: " + path);
    out << "# duration_ns=" << static_cast<long long>(std::llround(stream.duration_ns))
        << "\n";
    char buf[64];
    for (int label = 1; label <= EventStream::kChannelCount; ++label) {
        for (double t : stream.channel(label)) {
            std::snprintf(buf, sizeof(buf), "%d\t%.6f\n", label, t);
            out << buf;
        }
    }
}

EventStream read_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_error(ErrorKind::parse, "cannot open stream file: " + path);
    EventStream s;
    std::string line;
    int line_no = 0;
    bool have_duration = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("duration_ns=");
            if (pos != std::string::npos) {
                try {
                    s.duration_ns = std::stod(line.substr(pos + 12));
                    have_duration = true;
                } catch (const std::exception&) {
                    throw_error(ErrorKind::parse,
                                "bad duration header at line " +
                                    std::to_string(line_no) + ": " + line);
                }
            }
            continue;
        }
        std::istringstream ls(line);
        int channel = 0;
        double t = 0.0;
        if (!(ls >> channel >> t) || channel < 1 ||
            channel > EventStream::kChannelCount)
            throw_error(ErrorKind::parse, "malformed stream line " +
                                              std::to_string(line_no) + ": " +
                                              line);
        s.channel(channel).push_back(t);
    }
    if (!have_duration)
        throw_error(ErrorKind::parse,
                    "stream file is missing the '# duration_ns=' header");
    for (auto& c : s.channels) std::sort(c.begin(), c.end());
    s.validate();
    return s;
}

EventStream simulate_thermal_stream(double mean_rate_per_ns,
                                    const sources::CoherenceModel& model,
                                    double duration_ns, std::uint64_t seed) {
    if (mean_rate_per_ns < 0.0)
        throw_error(ErrorKind::domain, "rate must be nonnegative");
    if (duration_ns < 10.0 * model.tau_c_ns)
        throw_error(ErrorKind::domain,
                    "duration must cover at least 10 coherence times");

    EventStream s;
    s.duration_ns = duration_ns;
    if (mean_rate_per_ns == 0.0) return s;

    const double dt = model.tau_c_ns / 40.0;
    const long steps = static_cast<long>(std::ceil(duration_ns / dt));
    CounterRng rng(seed);
    auto& out = s.channel(1);

    auto emit = [&](long k, double intensity) {
        const double mean = mean_rate_per_ns * dt * intensity;
        const int n = rng.poisson(mean);
        const std::size_t first = out.size();
        for (int i = 0; i < n; ++i) {
            const double t = (static_cast<double>(k) + rng.uniform01()) * dt;
            if (t <= duration_ns) out.push_back(t);
        }
        if (n > 1) std::sort(out.begin() + first, out.end());
    };

    if (model.form == sources::CoherenceForm::exponential) {
        // Ornstein-Uhlenbeck complex field: lag-k autocorrelation
        // exp(-k dt / tau_c), unit mean intensity.
        const double rho = std::exp(-dt / model.tau_c_ns);
        const double drive = std::sqrt(0.5 * (1.0 - rho * rho));
        std::complex<double> field(std::sqrt(0.5) * rng.gauss(),
                                   std::sqrt(0.5) * rng.gauss());
        for (long k = 0; k < steps; ++k) {
            field = rho * field +
                    drive * std::complex<double>(rng.gauss(), rng.gauss());
            emit(k, std::norm(field) );
        }
    } else {
        // Moving-average filter: a Gaussian kernel convolved with itself
        // gives the Gaussian g1, exp(-pi tau^2 / (4 tau_c^2)).
        const double a = kPi / (2.0 * model.tau_c_ns * model.tau_c_ns);
        const int half = static_cast<int>(std::ceil(3.5 * model.tau_c_ns / dt));
        std::vector<double> h(2 * half + 1);
        double norm2 = 0.0;
        for (int j = -half; j <= half; ++j) {
            const double tj = j * dt;
            h[j + half] = std::exp(-a * tj * tj);
            norm2 += h[j + half] * h[j + half];
        }
        const double scale = 1.0 / std::sqrt(2.0 * norm2);
        for (auto& v : h) v *= scale;  // unit mean intensity per quadrature

        const int taps = 2 * half + 1;
        std::vector<std::complex<double>> noise(taps);
        for (auto& z : noise) z = {rng.gauss(), rng.gauss()};
        int head = 0;
        for (long k = 0; k < steps; ++k) {
            noise[head] = {rng.gauss(), rng.gauss()};
            head = (head + 1) % taps;
            std::complex<double> field = 0.0;
            for (int j = 0; j < taps; ++j)
                field += h[j] * noise[(head + j) % taps];
            emit(k, std::norm(field));
        }
    }
    return s;
}

EventStream simulate_poisson_stream(double mean_rate_per_ns,
                                    double duration_ns, std::uint64_t seed) {
    if (mean_rate_per_ns < 0.0)
        throw_error(ErrorKind::domain, "rate must be nonnegative");
    if (duration_ns <= 0.0)
        throw_error(ErrorKind::domain, "duration must be positive");
    EventStream s;
    s.duration_ns = duration_ns;
    CounterRng rng(seed);
    double t = 0.0;
    if (mean_rate_per_ns > 0.0) {
        while (true) {
            t += -std::log(rng.uniform01()) / mean_rate_per_ns;
            if (t > duration_ns) break;
            s.channel(1).push_back(t);
        }
    }
    return s;
}

namespace {

std::vector<double> merged_events(const EventStream& stream) {
    std::vector<double> all;
    all.reserve(stream.total_events());
    for (const auto& c : stream.channels)
        all.insert(all.end(), c.begin(), c.end());
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

std::vector<G2Point> estimate_g2(const EventStream& stream, double bin_ns,
                                 double tau_max_ns) {
    if (bin_ns <= 0.0 || tau_max_ns <= bin_ns)
        throw_error(ErrorKind::invalid_argument, "bad g2 binning");
    const auto all = merged_events(stream);
    if (all.empty())
        throw_error(ErrorKind::invalid_argument, "empty event stream");

    const int bins = static_cast<int>(std::floor(tau_max_ns / bin_ns));
    std::vector<double> hist(bins, 0.0);
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t k = i + 1; k < all.size(); ++k) {
            const double lag = all[k] - all[i];
            if (lag >= tau_max_ns) break;
            hist[static_cast<int>(lag / bin_ns)] += 1.0;
        }
    }

    const double T = stream.duration_ns;
    const double rate = static_cast<double>(all.size()) / T;
    // Expected pairs per bin for uncorrelated light: rate^2 * T * bin.
    const double denom = rate * rate * T * bin_ns;
    std::vector<G2Point> curve(bins);
    for (int b = 0; b < bins; ++b) {
        curve[b].tau_ns = (b + 0.5) * bin_ns;
        curve[b].g2 = hist[b] / denom;
    }
    return curve;
}

std::vector<WindowedG2Point> windowed_g2_curve(
    const EventStream& stream, const std::vector<double>& windows_ns) {
    const auto all = merged_events(stream);
    if (all.empty())
        throw_error(ErrorKind::invalid_argument, "empty event stream");
    std::vector<WindowedG2Point> out;
    out.reserve(windows_ns.size());
    for (double w : windows_ns) {
        if (w <= 0.0)
            throw_error(ErrorKind::invalid_argument,
                        "window width must be positive");
        const long m = static_cast<long>(std::floor(stream.duration_ns / w));
        if (m < 1)
            throw_error(ErrorKind::invalid_argument,
                        "window wider than the stream");
        double sum_n = 0.0;
        double sum_nn1 = 0.0;
        std::size_t i = 0;
        for (long win = 0; win < m; ++win) {
            const double hi = (win + 1) * w;
            long n = 0;
            while (i < all.size() && all[i] < hi) {
                ++n;
                ++i;
            }
            sum_n += n;
            sum_nn1 += static_cast<double>(n) * (n - 1);
        }
        WindowedG2Point p;
        p.window_ns = w;
        p.g2 = sum_n > 0.0 ? static_cast<double>(m) * sum_nn1 / (sum_n * sum_n)
                           : 0.0;
        out.push_back(p);
    }
    return out;
}

void ExperimentConfig::validate() const {
    ancilla.validate();
    if (nbar_arm < 0.0)
        throw_error(ErrorKind::invalid_argument, "nbar_arm must be >= 0");
    if (signal_g < 0.0 || signal_g > 1.0)
        throw_error(ErrorKind::invalid_argument, "signal_g must be in [0,1]");
    if (g2_s0 < 0.0)
        throw_error(ErrorKind::invalid_argument, "g2_s0 must be >= 0");
    if (g2_windowed < 1.0 || g2_windowed > 2.0)
        throw_error(ErrorKind::invalid_argument,
                    "g2_windowed must be in [1,2]");
    if (detectors.efficiency <= 0.0 || detectors.efficiency > 1.0)
        throw_error(ErrorKind::invalid_argument,
                    "detector efficiency must be in (0,1]");
    if (detectors.window_ns <= 0.0)
        throw_error(ErrorKind::invalid_argument, "window must be positive");
    if (xi < 0.0 || xi > 1.0)
        throw_error(ErrorKind::invalid_argument, "xi must be in [0,1]");
    if (phase_points.empty())
        throw_error(ErrorKind::invalid_argument, "phase_points is empty");
    if (trials_per_point < 1)
        throw_error(ErrorKind::invalid_argument,
                    "trials_per_point must be >= 1");
    if (workers < 1)
        throw_error(ErrorKind::invalid_argument, "workers must be >= 1");
    if (arm_loss_db < 0.0)
        throw_error(ErrorKind::invalid_argument, "arm_loss_db must be >= 0");
}

SectorModel derive_sector_model(const ExperimentConfig& cfg) {
    cfg.validate();
    SectorModel m;

    // Reference and probe occupation in the ratio-formula convention
    // (vacuum factors at unity, per-arm pair relation p2 = g2 * p1^2).
    m.pe.p0 = 1.0;
    m.pe.p1 = cfg.ancilla.p01;  // = p10 for the symmetric builder
    m.pe.p2 = cfg.ancilla.p11;

    const double nbar_eff =
        cfg.nbar_arm * std::pow(10.0, -cfg.arm_loss_db / 10.0);
    const double mu = 2.0 * nbar_eff;
    m.ps.p0 = 1.0;
    m.ps.p1 = 0.5 * mu / ((1.0 + mu) * (1.0 + mu));
    m.ps.p2 = cfg.g2_s0 * m.ps.p1 * m.ps.p1;

    // Noise-herald trials replay the same event mixture at the read-out
    // noise click rate p_ro instead of the retrieval efficiency.
    if (cfg.detectors.snr > 0.0) {
        m.s_real = cfg.detectors.snr / (1.0 + cfg.detectors.snr);
        const double eta = 2.0 * m.pe.p1;
        if (eta <= 0.0)
            throw_error(ErrorKind::invalid_argument,
                        "herald noise model needs a nonzero retrieval "
                        "efficiency");
        m.noise_scale = std::max(0.0, cfg.detectors.p_ro) / eta;
        const double d_e = m.pe.p2 + m.ps.p2 + 2.0 * m.pe.p1 * m.ps.p1;
        if (m.noise_scale * d_e > 1.0)
            throw_error(ErrorKind::invalid_argument,
                        "read-out noise rate too large for the trial model");
    } else {
        m.s_real = 1.0;
        m.noise_scale = 0.0;
    }

    const double d_norm =
        cfg.ancilla.p01 > 0.0
            ? cfg.ancilla.d /
                  std::sqrt(cfg.ancilla.p01 * cfg.ancilla.p10)
            : 0.0;
    m.contrast = d_norm * cfg.signal_g *
                 visibility::v_c(cfg.g2_windowed) * cfg.xi;

    double s2 = 0.0;
    for (double s : cfg.sigmas_rad) s2 += s * s;
    m.sigma_total = std::sqrt(s2);
    m.phi = cfg.signal_phi;
    m.efficiency = cfg.detectors.efficiency;
    m.brightness_ratio = m.pe.p1 > 0.0 ? m.ps.p1 / m.pe.p1 : 0.0;
    return m;
}

double analytic_visibility(const ExperimentConfig& cfg) {
    const SectorModel m = derive_sector_model(cfg);
    const double vp = std::exp(-0.5 * m.sigma_total * m.sigma_total);
    const double denom_real =
        m.pe.p2 + m.ps.p2 + 2.0 * m.pe.p1 * m.ps.p1;
    if (denom_real <= 0.0)
        throw_error(ErrorKind::singularity, "no coincidence weight");
    const double fringe = 2.0 * m.pe.p1 * m.ps.p1 * m.contrast * vp /
                          denom_real;
    // Noise trials dilute the fringe by the herald signal-to-noise factor.
    const double snr_factor =
        m.s_real / (m.s_real + (1.0 - m.s_real) * m.noise_scale);
    return fringe * snr_factor;
}

namespace {

// One heralded trial; returns the detector pair index 0..3 for the pattern
// order {13, 14, 23, 24} or -1 when no valid coincidence occurs.
int sample_trial(const SectorModel& m, double psi, CounterRng& rng) {
    const bool real = rng.uniform01() <= m.s_real;
    const double scale = real ? 1.0 : m.noise_scale;

    const double w_ref_pair = scale * m.pe.p2;
    const double w_probe_pair = scale * m.ps.p2;
    const double w_cross = scale * 2.0 * m.pe.p1 * m.ps.p1;

    const double u = rng.uniform01();
    int pattern;
    if (u <= w_ref_pair + w_probe_pair) {
        pattern = static_cast<int>(rng.uniform01() * 4.0);
        if (pattern > 3) pattern = 3;
    } else if (u <= w_ref_pair + w_probe_pair + w_cross) {
        double c = 0.0;
        if (real && m.contrast > 0.0) {
            double theta = psi - m.phi;
            if (m.sigma_total > 0.0) theta += m.sigma_total * rng.gauss();
            c = m.contrast * std::cos(theta);
        }
        // Pattern probabilities {(1+c)/4, (1-c)/4, (1-c)/4, (1+c)/4} in the
        // order {13, 14, 23, 24}; cumulative boundaries q, 1/2, 1-q.
        const double v = rng.uniform01();
        const double q = 0.25 * (1.0 + c);
        if (v <= q)
            pattern = 0;
        else if (v <= 0.5)
            pattern = 1;
        else if (v <= 1.0 - q)
            pattern = 2;
        else
            pattern = 3;
    } else {
        return -1;
    }

    if (m.efficiency < 1.0) {
        if (rng.uniform01() > m.efficiency) return -1;
        if (rng.uniform01() > m.efficiency) return -1;
    }
    return pattern;
}

}  // namespace

FringeScanResult run_fringe_scan(const ExperimentConfig& cfg) {
    const SectorModel model = derive_sector_model(cfg);
    FringeScanResult result;
    result.psi = cfg.phase_points;
    result.counts.resize(cfg.phase_points.size());

    const int workers = cfg.workers;
    for (std::size_t point = 0; point < cfg.phase_points.size(); ++point) {
        const double psi = cfg.phase_points[point];
        std::vector<std::array<long, 4>> partial(
            workers, std::array<long, 4>{0, 0, 0, 0});

        auto run_range = [&](int w, long lo, long hi) {
            auto& acc = partial[w];
            for (long t = lo; t < hi; ++t) {
                CounterRng rng(cfg.seed, static_cast<std::uint64_t>(point),
                               static_cast<std::uint64_t>(t));
                const int pattern = sample_trial(model, psi, rng);
                if (pattern >= 0) ++acc[pattern];
            }
        };

        if (workers == 1) {
            run_range(0, 0, cfg.trials_per_point);
        } else {
            std::vector<std::thread> pool;
            const long chunk =
                (cfg.trials_per_point + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const long lo = w * chunk;
                const long hi = std::min<long>(cfg.trials_per_point,
                                               lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(run_range, w, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        CoincidenceCounts c;
        for (const auto& acc : partial) {
            c.n13 += acc[0];
            c.n14 += acc[1];
            c.n23 += acc[2];
            c.n24 += acc[3];
        }
        result.counts[point] = c;
    }
    return result;
}

double FringeFit::visibility_stderr() const {
    if (offset == 0.0) return 0.0;
    const double v = amplitude / offset;
    const double ra = amplitude_stderr / offset;
    const double rc = v * offset_stderr / offset;
    return std::sqrt(ra * ra + rc * rc);
}

FringeFit fit_fringe(const std::vector<double>& psi,
                     const std::vector<double>& y) {
    const std::size_t n = psi.size();
    if (n != y.size() || n < 4)
        throw_error(ErrorKind::invalid_argument,
                    "fit needs >= 4 (psi, y) pairs");

    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = std::cos(psi[i]);
        x(i, 2) = std::sin(psi[i]);
        b(i) = y[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < 3)
        throw_error(ErrorKind::invalid_argument,
                    "degenerate psi grid: cosine fit is rank deficient");
    const Eigen::Vector3d beta = qr.solve(b);

    const Eigen::VectorXd resid = b - x * beta;
    const double dof = static_cast<double>(n) - 3.0;
    const double s2 = dof > 0.0 ? resid.squaredNorm() / dof : 0.0;
    const Eigen::Matrix3d cov =
        s2 * (x.transpose() * x).inverse();

    FringeFit f;
    f.offset = beta(0);
    f.amplitude = std::hypot(beta(1), beta(2));
    f.phase = std::atan2(beta(2), beta(1));
    f.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    f.offset_stderr = std::sqrt(std::max(0.0, cov(0, 0)));
    if (f.amplitude > 0.0) {
        const double ca = beta(1) / f.amplitude;
        const double sa = beta(2) / f.amplitude;
        Eigen::Vector3d grad(0.0, ca, sa);
        f.amplitude_stderr =
            std::sqrt(std::max(0.0, double(grad.transpose() * cov * grad)));
    } else {
        f.amplitude_stderr =
            std::sqrt(std::max(0.0, 0.5 * (cov(1, 1) + cov(2, 2))));
    }
    return f;
}

FringeFit fit_scan(const FringeScanResult& scan) {
    std::vector<double> y(scan.counts.size());
    for (std::size_t i = 0; i < scan.counts.size(); ++i)
        y[i] = static_cast<double>(scan.counts[i].n13 + scan.counts[i].n24);
    return fit_fringe(scan.psi, y);
}

}  // namespace fringe::mcsim
