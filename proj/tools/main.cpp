// nonlocal-fringe: analysis and simulation CLI for the memory-assisted
// nonlocal interferometer model. Commands read a flat key-value config,
// apply --override assignments, and write CSV with 12 significant digits.
// Exit codes: 0 success, 2 usage/config error, 3 numeric/singularity error.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "fringe/config.hpp"
#include "fringe/fisher.hpp"
#include "fringe/mcsim.hpp"
#include "fringe/phaselock.hpp"
#include "fringe/sources.hpp"
#include "fringe/visibility.hpp"

namespace {

namespace cfgns = fringe::config;
using fringe::Error;
using fringe::ErrorKind;
using cfgns::format_number;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    std::vector<std::string> overrides;
};

cfgns::Config load_config(const CommonOpts& o) {
    if (o.config_path.empty())
        fringe::throw_error(ErrorKind::missing_key,
                            "--config PATH is required for this command");
    auto cfg = cfgns::Config::load(o.config_path);
    for (const auto& ov : o.overrides) cfg.apply_override(ov);
    return cfg;
}

// Writes to the path, or stdout when the path is empty.
void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fringe::throw_error(ErrorKind::parse,
                            "cannot open output file: " + path);
    out << content;
}

std::string sanitize_label(double v) {
    std::string s = format_number(v);
    for (char& c : s)
        if (c == '.' || c == '-' || c == '+') c = '_';
    return s;
}

int cmd_vh_curve(const CommonOpts& o) {
    const auto cfg = load_config(o);
    const double g2_s = cfg.get_double("vh_curve.g2_s0");
    const auto g2_e_list = cfg.get_double_list("vh_curve.g2_e_list");
    const double x_min = cfg.get_double("vh_curve.x_min");
    const double x_max = cfg.get_double("vh_curve.x_max");
    const long points = cfg.get_long_or("vh_curve.points", 200);
    if (x_min <= 0.0 || x_max <= x_min || points < 2)
        fringe::throw_error(ErrorKind::parse,
                            "vh_curve needs 0 < x_min < x_max and points >= 2");

    std::ostringstream out;
    for (double g2_e : g2_e_list) {
        if (g2_e <= 0.0) {
            out << "# x_star g2_e=" << format_number(g2_e)
                << " x=0 (supremum at vanishing probe brightness, v_h -> 1)\n";
            continue;
        }
        const double xs = fringe::visibility::optimal_ratio(g2_s, g2_e);
        out << "# x_star g2_e=" << format_number(g2_e)
            << " x=" << format_number(xs) << " v_h="
            << format_number(fringe::visibility::v_h(xs, g2_s, g2_e)) << "\n";
    }
    std::vector<std::string> header{"x"};
    for (double g2_e : g2_e_list)
        header.push_back("v_h_g2e_" + sanitize_label(g2_e));
    out << cfgns::csv_row(header);

    const double lr = std::log(x_max / x_min);
    for (long i = 0; i < points; ++i) {
        const double x =
            x_min * std::exp(lr * static_cast<double>(i) / (points - 1));
        std::vector<std::string> row{format_number(x)};
        for (double g2_e : g2_e_list)
            row.push_back(format_number(fringe::visibility::v_h(x, g2_s, g2_e)));
        out << cfgns::csv_row(row);
    }
    emit(o.out_path, out.str());
    return 0;
}

fringe::visibility::BudgetInputs budget_inputs(const cfgns::Config& cfg,
                                               const std::string& section) {
    fringe::visibility::BudgetInputs in;
    const std::string p = "budget." + section + ".";
    in.snr = cfg.get_double(p + "snr");
    in.eta_ro = cfg.get_double(p + "eta_ro");
    in.p_ro = cfg.get_double(p + "p_ro");
    in.g2_e = cfg.get_double(p + "g2_e");
    in.g2_s = cfg.get_double(p + "g2_s0");
    in.g2_s_windowed = cfg.get_double(p + "g2_s_windowed");
    in.x = cfg.get_double(p + "x");
    in.sigma_thi = cfg.get_double(p + "sigma_thi_rad");
    in.sigma_woi = cfg.get_double(p + "sigma_woi_rad");
    in.sigma_wri = cfg.get_double(p + "sigma_wri_rad");
    in.eta_l = cfg.get_double(p + "eta_l");
    in.eta_r = cfg.get_double(p + "eta_r");
    in.zeta = cfg.get_double_or(p + "zeta", 1.0);
    if (cfg.has(p + "v_h")) in.v_h_override = cfg.get_double(p + "v_h");
    if (cfg.has(p + "v_i")) in.v_i_override = cfg.get_double(p + "v_i");
    return in;
}

int cmd_budget(const CommonOpts& o) {
    const auto cfg = load_config(o);
    const auto columns = cfg.sections("budget");
    if (columns.empty())
        fringe::throw_error(ErrorKind::missing_key,
                            "config has no [budget.<column>] sections");

    std::ostringstream csv;
    csv << cfgns::csv_row(
        {"column", "v_snr", "v_h", "v_c", "v_p", "v_i", "v_theory"});
    std::ostringstream table;
    table << "visibility budget\n";
    for (const auto& col : columns) {
        const auto b = fringe::visibility::budget(budget_inputs(cfg, col));
        csv << cfgns::csv_row({col, format_number(b.v_snr),
                               format_number(b.v_h), format_number(b.v_c),
                               format_number(b.v_p), format_number(b.v_i),
                               format_number(b.v_theory)});
        char line[256];
        std::snprintf(line, sizeof(line),
                      "  %-16s v_snr=%.4f v_h=%.4f v_c=%.4f v_p=%.4f "
                      "v_i=%.4f  ->  v_theory=%.4f\n",
                      col.c_str(), b.v_snr, b.v_h, b.v_c, b.v_p, b.v_i,
                      b.v_theory);
        table << line;
    }
    std::cout << table.str();
    if (!o.out_path.empty()) emit(o.out_path, csv.str());
    return 0;
}

int cmd_fisher_scan(const CommonOpts& o) {
    const auto cfg = load_config(o);
    const double epsilon = cfg.get_double("fisher.epsilon");
    const double g = cfg.get_double("fisher.g");
    const double v = cfg.get_double("fisher.v");
    const double eta = cfg.get_double("fisher.eta");
    const double phi = cfg.get_double_or("fisher.phi_rad", 0.0);
    const double lo = cfg.get_double_or("fisher.delta_min_rad",
                                        phi - std::numbers::pi);
    const double hi = cfg.get_double_or("fisher.delta_max_rad",
                                        phi + std::numbers::pi);
    const long points = cfg.get_long_or("fisher.points", 241);
    if (hi <= lo || points < 2)
        fringe::throw_error(ErrorKind::parse, "bad fisher delta range");

    std::ostringstream out;
    out << cfgns::csv_row({"delta_rad", "trace_norm_ideal",
                           "trace_norm_practical", "local_bound", "singular"});
    for (long i = 0; i < points; ++i) {
        const double delta =
            lo + (hi - lo) * static_cast<double>(i) / (points - 1);
        std::string ideal = "nan", practical = "nan", flag = "0";
        try {
            ideal = format_number(
                fringe::fisher::fisher_ideal(epsilon, g, phi, delta)
                    .trace_norm);
            practical = format_number(
                fringe::fisher::fisher_practical(eta, epsilon, v, phi, delta)
                    .trace_norm);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::singularity) throw;
            flag = "1";
        }
        out << cfgns::csv_row({format_number(delta), ideal, practical,
                               format_number(epsilon * epsilon), flag});
    }
    emit(o.out_path, out.str());
    return 0;
}

fringe::mcsim::ExperimentConfig mc_config(const cfgns::Config& cfg,
                                          const std::string& profile,
                                          std::uint64_t seed, int workers) {
    fringe::mcsim::ExperimentConfig ec;
    const std::string p = profile + ".";
    ec.ancilla = fringe::sources::EntangledAncilla::from_physical(
        cfg.get_double(p + "eta_ro"), cfg.get_double(p + "g2_e"),
        cfg.get_double_or(p + "d", 1.0), 0.0, cfg.get_double(p + "eta_ro"));
    ec.nbar_arm = cfg.get_double(p + "nbar_arm");
    ec.signal_g = cfg.get_double_or(p + "g", 1.0);
    ec.signal_phi = cfg.get_double_or(p + "phi_rad", 0.0);
    ec.g2_s0 = cfg.get_double_or(p + "g2_s0", 2.0);
    const std::string form = cfg.get_string_or(p + "coherence_form", "gaussian");
    if (form == "exponential")
        ec.coherence.form = fringe::sources::CoherenceForm::exponential;
    else if (form == "gaussian")
        ec.coherence.form = fringe::sources::CoherenceForm::gaussian;
    else
        fringe::throw_error(ErrorKind::parse,
                            "coherence_form must be exponential or gaussian");
    ec.coherence.tau_c_ns = cfg.get_double_or(p + "tau_c_ns", 15.4);
    ec.detectors.efficiency = cfg.get_double_or(p + "efficiency", 1.0);
    ec.detectors.window_ns = cfg.get_double_or(p + "window_ns", 20.0);
    ec.detectors.snr = cfg.get_double_or(p + "snr", -1.0);
    ec.detectors.p_ro = cfg.get_double_or(p + "p_ro", 0.0);
    if (cfg.has(p + "g2_s_windowed"))
        ec.g2_windowed = cfg.get_double(p + "g2_s_windowed");
    else
        ec.g2_windowed =
            fringe::sources::windowed_g2(ec.coherence, ec.detectors.window_ns);
    if (cfg.has(p + "sigmas_rad")) {
        const auto s = cfg.get_double_list(p + "sigmas_rad");
        if (s.size() != 3)
            fringe::throw_error(ErrorKind::parse,
                                "sigmas_rad needs exactly 3 entries");
        ec.sigmas_rad = {s[0], s[1], s[2]};
    }
    if (cfg.has(p + "xi"))
        ec.xi = cfg.get_double(p + "xi");
    else if (cfg.has(p + "eta_l"))
        ec.xi = fringe::visibility::v_i(cfg.get_double(p + "eta_l"),
                                        cfg.get_double(p + "eta_r"));
    if (cfg.has(p + "phase_points_rad")) {
        ec.phase_points = cfg.get_double_list(p + "phase_points_rad");
    } else {
        const long n = cfg.get_long_or(p + "phase_point_count", 12);
        for (long i = 0; i < n; ++i)
            ec.phase_points.push_back(2.0 * std::numbers::pi *
                                      static_cast<double>(i) /
                                      static_cast<double>(n));
    }
    ec.trials_per_point = cfg.get_long(p + "trials_per_point");
    ec.seed = seed;
    ec.delay_ns = cfg.get_double_or(p + "delay_ns", 0.0);
    ec.arm_loss_db = cfg.get_double_or(p + "arm_loss_db", 0.0);
    ec.workers = workers;
    return ec;
}

int cmd_mc(const CommonOpts& o, const std::string& profile, int workers) {
    const auto cfg = load_config(o);
    const auto ec = mc_config(cfg, profile, o.seed, workers);
    const auto scan = fringe::mcsim::run_fringe_scan(ec);
    const auto model = fringe::mcsim::derive_sector_model(ec);

    std::ostringstream out;
    out << cfgns::csv_row({"psi_rad", "N13", "N14", "N23", "N24"});
    for (std::size_t i = 0; i < scan.psi.size(); ++i) {
        const auto& c = scan.counts[i];
        out << cfgns::csv_row(
            {format_number(scan.psi[i]), std::to_string(c.n13),
             std::to_string(c.n14), std::to_string(c.n23),
             std::to_string(c.n24)});
    }
    emit(o.out_path, out.str());

    const auto fit = fringe::mcsim::fit_scan(scan);
    char line[256];
    std::snprintf(line, sizeof(line), "V_fit=%.6f +- %.6f\n",
                  fit.visibility(), fit.visibility_stderr());
    std::cout << line;
    std::snprintf(line, sizeof(line),
                  "V_analytic=%.6f x=%.4f trials_per_point=%ld\n",
                  fringe::mcsim::analytic_visibility(ec),
                  model.brightness_ratio, ec.trials_per_point);
    std::cout << line;
    return 0;
}

int cmd_g2(const CommonOpts& o, const std::string& stream_path,
           const std::string& dump_stream, const std::string& windows_out) {
    const auto cfg = load_config(o);
    fringe::mcsim::EventStream stream;
    if (!stream_path.empty()) {
        stream = fringe::mcsim::read_stream(stream_path);
    } else {
        fringe::sources::CoherenceModel model;
        const std::string form = cfg.get_string_or("g2.form", "exponential");
        if (form == "exponential")
            model.form = fringe::sources::CoherenceForm::exponential;
        else if (form == "gaussian")
            model.form = fringe::sources::CoherenceForm::gaussian;
        else if (form != "coherent")
            fringe::throw_error(
                ErrorKind::parse,
                "g2.form must be exponential, gaussian or coherent");
        model.tau_c_ns = cfg.get_double_or("g2.tau_c_ns", 15.4);
        const double rate = cfg.get_double("g2.rate_per_ns");
        const double duration = cfg.get_double("g2.duration_ns");
        stream = form == "coherent"
                     ? fringe::mcsim::simulate_poisson_stream(rate, duration,
                                                              o.seed)
                     : fringe::mcsim::simulate_thermal_stream(rate, model,
                                                              duration, o.seed);
    }
    if (!dump_stream.empty()) fringe::mcsim::write_stream(stream, dump_stream);

    const double bin = cfg.get_double_or("g2.bin_ns", 2.0);
    const double tau_max = cfg.get_double_or("g2.tau_max_ns", 100.0);
    const auto curve = fringe::mcsim::estimate_g2(stream, bin, tau_max);
    std::ostringstream out;
    out << cfgns::csv_row({"tau_ns", "g2"});
    for (const auto& p : curve)
        out << cfgns::csv_row({format_number(p.tau_ns), format_number(p.g2)});
    emit(o.out_path, out.str());

    std::vector<double> windows{2.5, 5, 10, 20, 40, 60, 80, 160};
    if (cfg.has("g2.windows_ns")) windows = cfg.get_double_list("g2.windows_ns");
    const auto wcurve = fringe::mcsim::windowed_g2_curve(stream, windows);
    std::ostringstream wout;
    wout << cfgns::csv_row({"window_ns", "g2_windowed"});
    for (const auto& p : wcurve)
        wout << cfgns::csv_row(
            {format_number(p.window_ns), format_number(p.g2)});
    std::string wpath = windows_out;
    if (wpath.empty() && !o.out_path.empty()) wpath = o.out_path + ".windows.csv";
    if (wpath.empty()) std::cout << "\n";
    emit(wpath, wout.str());
    return 0;
}

fringe::phaselock::PathConfig path_config(const cfgns::Config& cfg) {
    fringe::phaselock::PathConfig pc;
    const std::string p = "phaselock.";
    pc.L_a = cfg.get_double(p + "L_a_m");
    pc.L_b = cfg.get_double(p + "L_b_m");
    pc.delta_a = cfg.get_double(p + "delta_a_m");
    pc.delta_b = cfg.get_double(p + "delta_b_m");
    pc.Lw_a = cfg.get_double(p + "Lw_a_m");
    pc.Lw_b = cfg.get_double(p + "Lw_b_m");
    pc.Lwo_a = cfg.get_double(p + "Lwo_a_m");
    pc.Lwo_b = cfg.get_double(p + "Lwo_b_m");
    pc.Lr_a = cfg.get_double(p + "Lr_a_m");
    pc.Lr_b = cfg.get_double(p + "Lr_b_m");
    pc.Lro_a = cfg.get_double(p + "Lro_a_m");
    pc.Lro_b = cfg.get_double(p + "Lro_b_m");
    pc.k_th = cfg.get_double(p + "k_th_rad_m");
    pc.k_p = cfg.get_double(p + "k_p_rad_m");
    pc.k_wr = cfg.get_double(p + "k_wr_rad_m");
    pc.k_w = cfg.get_double(p + "k_w_rad_m");
    pc.k_wo = cfg.get_double(p + "k_wo_rad_m");
    pc.k_r = cfg.get_double(p + "k_r_rad_m");
    pc.k_ro = cfg.get_double(p + "k_ro_rad_m");
    pc.Phi_w_a = cfg.get_double_or(p + "Phi_w_a_rad", 0.0);
    pc.Phi_w_b = cfg.get_double_or(p + "Phi_w_b_rad", 0.0);
    pc.Phi_r_a = cfg.get_double_or(p + "Phi_r_a_rad", 0.0);
    pc.Phi_r_b = cfg.get_double_or(p + "Phi_r_b_rad", 0.0);
    return pc;
}

int cmd_phase_check(const CommonOpts& o) {
    const auto cfg = load_config(o);
    const auto pc = path_config(cfg);
    const auto lock = fringe::phaselock::lock_setpoints(pc);
    const auto dev = fringe::phaselock::wavenumber_deviations(pc);

    char line[256];
    std::snprintf(line, sizeof(line),
                  "lock set-points (rad): phi_th=%.9f phi_woro=%.9f "
                  "phi_wr=%.9f\n",
                  lock.phi_th, lock.phi_woro, lock.phi_wr);
    std::cout << line;

    const auto derived = fringe::phaselock::lock_setpoints(pc);
    std::snprintf(line, sizeof(line),
                  "lock residuals (rad): thi=%.3e woi=%.3e wri=%.3e\n",
                  fringe::phaselock::wrap_angle(derived.phi_th - lock.phi_th),
                  fringe::phaselock::wrap_angle(derived.phi_woro -
                                                lock.phi_woro),
                  fringe::phaselock::wrap_angle(derived.phi_wr - lock.phi_wr));
    std::cout << line;

    const double residual = fringe::phaselock::residual_phase(pc, lock);
    const double expected = fringe::phaselock::wrap_angle(
        lock.phi_th - lock.phi_woro - lock.phi_wr);
    std::snprintf(line, sizeof(line),
                  "fringe phase (rad): residual=%.9f set-point "
                  "combination=%.9f difference=%.3e\n",
                  residual, expected,
                  fringe::phaselock::wrap_angle(residual - expected));
    std::cout << line;
    std::snprintf(line, sizeof(line),
                  "wave-number deviations (relative): th=%.3e wo=%.3e "
                  "ro=%.3e w=%.3e r=%.3e\n",
                  dev.th_vs_p, dev.wo_vs_p, dev.ro_vs_p, dev.w_vs_wr,
                  dev.r_vs_wr);
    std::cout << line;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis and Monte Carlo engine for a memory-assisted "
                 "nonlocal interferometer"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string mc_profile = "mc.local";
    int mc_workers = 1;
    std::string g2_stream, g2_dump, g2_windows_out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "config file path");
        sub->add_option("--out", common.out_path, "output CSV path");
        sub->add_option("--seed", common.seed, "random seed");
        sub->add_option("--override", common.overrides,
                        "key=value config override (repeatable)");
    };

    auto* vh = app.add_subcommand("vh-curve",
                                  "multi-photon visibility ceiling vs "
                                  "brightness ratio");
    add_common(vh);
    auto* budget = app.add_subcommand("budget", "visibility factor budget");
    add_common(budget);
    auto* fisher = app.add_subcommand("fisher-scan",
                                      "Fisher information vs analysis phase");
    add_common(fisher);
    auto* mc = app.add_subcommand("mc", "Monte Carlo fringe scan");
    add_common(mc);
    mc->add_option("--profile", mc_profile, "config section to run");
    mc->add_option("--workers", mc_workers, "worker threads");
    auto* g2 = app.add_subcommand("g2", "second-order correlation study");
    add_common(g2);
    g2->add_option("--stream", g2_stream, "read events from a stream file");
    g2->add_option("--dump-stream", g2_dump, "write the simulated stream");
    g2->add_option("--out-windows", g2_windows_out,
                   "output path for the windowed-g2 table");
    auto* phase = app.add_subcommand("phase-check",
                                     "phase-locking residual verification");
    add_common(phase);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (vh->parsed()) return cmd_vh_curve(common);
        if (budget->parsed()) return cmd_budget(common);
        if (fisher->parsed()) return cmd_fisher_scan(common);
        if (mc->parsed()) return cmd_mc(common, mc_profile, mc_workers);
        if (g2->parsed())
            return cmd_g2(common, g2_stream, g2_dump, g2_windows_out);
        if (phase->parsed()) return cmd_phase_check(common);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::parse:
            case ErrorKind::missing_key:
            case ErrorKind::invalid_argument:
                return 2;
            default:
                return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
