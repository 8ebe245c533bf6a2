#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fringe/sources.hpp"
#include "fringe/visibility.hpp"

namespace fringe::mcsim {

// Time-tagged detection record, the digital twin of a time tagger. Channel
// labels 1..4 are the coincidence detectors, label 5 the herald channel.
struct EventStream {
    static constexpr int kChannelCount = 5;

    double duration_ns = 0.0;
    std::array<std::vector<double>, kChannelCount> channels;

    std::vector<double>& channel(int label) { return channels.at(label - 1); }
    const std::vector<double>& channel(int label) const {
        return channels.at(label - 1);
    }
    std::size_t total_events() const;
    void validate() const;  // sorted timestamps inside [0, duration]
};

// Plain-text export, one `channel<TAB>timestamp_ns` line per event after a
// `# duration_ns=<int>` header.
void write_stream(const EventStream& stream, const std::string& path);
EventStream read_stream(const std::string& path);

// Chaotic-light point process: a stationary complex Gaussian field with the
// model's g1 autocorrelation drives Poisson detection on |E|^2 (grid step
// tau_c/40), which reproduces g2(tau) = 1 + |g1(tau)|^2 by construction.
// Events land on channel 1. Requires duration >= 10 tau_c.
EventStream simulate_thermal_stream(double mean_rate_per_ns,
                                    const sources::CoherenceModel& model,
                                    double duration_ns, std::uint64_t seed);

// Constant-intensity Poisson stream on channel 1 (coherent-light baseline).
EventStream simulate_poisson_stream(double mean_rate_per_ns,
                                    double duration_ns, std::uint64_t seed);

struct G2Point {
    double tau_ns = 0.0;
    double g2 = 0.0;
};

// Normalized pair-lag histogram of all recorded events (bins of width
// bin_ns, lags up to tau_max_ns). Requires tau_max << duration.
std::vector<G2Point> estimate_g2(const EventStream& stream, double bin_ns,
                                 double tau_max_ns);

struct WindowedG2Point {
    double window_ns = 0.0;
    double g2 = 0.0;
};

// g2(0) from per-window factorial moments, one point per window width.
std::vector<WindowedG2Point> windowed_g2_curve(
    const EventStream& stream, const std::vector<double>& windows_ns);

struct DetectorSpec {
    double efficiency = 1.0;
    double window_ns = 20.0;
    double snr = -1.0;  // herald signal-to-noise; <= 0 means noiseless
    double p_ro = 0.0;  // read-out noise click probability per trial
};

// One fringe-scan experiment. Each trial is a heralded entanglement
// attempt: with probability snr/(1+snr) the herald is genuine; otherwise it
// was a noise click and the retrieved field is replaced by read-out noise
// at click rate p_ro with no coherence. Coincidence events are drawn
// sector by sector with the same bookkeeping as the visibility budget: one
// photon at each node from the reference field (weight pe2), from the
// probe field (ps2), or one from each (2*pe1*ps1) carrying the
// interference term, with the vacuum factors of the ratio formula kept at
// unity exactly as the multi-photon ceiling does. Noise-herald trials
// reproduce the same event mixture scaled by p_ro/eta_ro, which is the
// bookkeeping behind the herald signal-to-noise factor. Phase jitter
// (Gaussian, sigma per interferometer), windowed coherence loss
// sqrt(g2_windowed - 1), mode overlap xi and the normalized coherence
// amplitudes multiply the fringe contrast; detector efficiency thins each
// of the two photons independently. The fitted visibility therefore
// converges to v_snr * v_h * (d g v_c xi) * v_p, the factor product of the
// analytic budget.
struct ExperimentConfig {
    sources::EntangledAncilla ancilla;  // genuine-herald read-out field
    double nbar_arm = 0.0;              // probe mean photons per arm
    double signal_g = 1.0;              // complex-visibility amplitude
    double signal_phi = 0.0;            // complex-visibility phase
    double g2_s0 = 2.0;                 // zero-delay probe g2 (pair weight)
    sources::CoherenceModel coherence;
    DetectorSpec detectors;
    double g2_windowed = 2.0;           // probe g2 through the window
    std::array<double, 3> sigmas_rad{0.0, 0.0, 0.0};
    double xi = 1.0;
    std::vector<double> phase_points;   // scanned reference phases psi
    long trials_per_point = 0;
    std::uint64_t seed = 1;
    double delay_ns = 0.0;              // relative memory read-out delay
    double arm_loss_db = 0.0;           // extra probe loss (delayed arm)
    int workers = 1;

    void validate() const;
};

struct CoincidenceCounts {
    long n13 = 0;
    long n14 = 0;
    long n23 = 0;
    long n24 = 0;

    long total() const { return n13 + n14 + n23 + n24; }
};

struct FringeScanResult {
    std::vector<double> psi;
    std::vector<CoincidenceCounts> counts;
};

// Sector weights and fringe contrast implied by an ExperimentConfig; the
// Monte Carlo sampler and the analytic expectation share these numbers.
struct SectorModel {
    double s_real = 1.0;    // genuine-herald probability per trial
    visibility::PhotonTriple pe;  // reference field, p0 pinned to 1
    visibility::PhotonTriple ps;  // probe field, p0 pinned to 1
    double noise_scale = 0.0;     // noise-trial rate factor p_ro / eta_ro
    double contrast = 0.0;        // d * g * v_c * xi
    double sigma_total = 0.0;
    double phi = 0.0;
    double efficiency = 1.0;
    double brightness_ratio = 0.0;  // ps.p1 / pe.p1
};

SectorModel derive_sector_model(const ExperimentConfig& cfg);

// Expected fringe visibility of the scan, i.e. the value the fitted
// amplitude/offset ratio converges to as trials -> infinity.
double analytic_visibility(const ExperimentConfig& cfg);

// Runs the scan. Identical configs (seed included) give identical counts
// for any worker count: every (phase point, trial) pair owns a counter
// stream and counts merge by integer addition.
FringeScanResult run_fringe_scan(const ExperimentConfig& cfg);

struct FringeFit {
    double amplitude = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double amplitude_stderr = 0.0;
    double offset_stderr = 0.0;
    double residual_rms = 0.0;

    double visibility() const { return amplitude / offset; }
    double visibility_stderr() const;
};

// Least-squares fit of y = offset + amplitude * cos(psi - phase). Needs at
// least 4 points and a nondegenerate psi grid; exact on noiseless data.
FringeFit fit_fringe(const std::vector<double>& psi,
                     const std::vector<double>& y);

// Convenience: fits the N13 + N24 fringe of a scan result.
FringeFit fit_scan(const FringeScanResult& scan);

}  // namespace fringe::mcsim
