// Black-box checks of the nonlocal-fringe binary: golden outputs for the
// shipped config, determinism across runs and worker counts, exit codes.
// argv: <binary> <source-dir>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::printf("[ ok ] %s\n", what.c_str());
    } else {
        ++g_failures;
        std::printf("[FAIL] %s\n", what.c_str());
    }
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s <binary> <source-dir>\n", argv[0]);
        return 64;
    }
    const std::string bin = argv[1];
    const std::filesystem::path src(argv[2]);
    const std::string cfg = (src / "configs" / "paper.cfg").string();
    const auto tmp = std::filesystem::temp_directory_path() / "fringe_cli";
    std::filesystem::create_directories(tmp);
    const auto out = [&](const std::string& name) {
        return (tmp / name).string();
    };

    // Golden CSVs pinned from the shipped config.
    const auto golden_dir = src / "tests" / "golden";
    struct GoldenCase {
        std::string name;
        std::string cmd;
    };
    const GoldenCase cases[] = {
        {"budget.csv", bin + " budget --config " + cfg + " --out " +
                           out("budget.csv") + " > /dev/null"},
        {"vh_curve.csv", bin + " vh-curve --config " + cfg + " --out " +
                             out("vh_curve.csv")},
        {"fisher_scan.csv", bin + " fisher-scan --config " + cfg + " --out " +
                                out("fisher_scan.csv")},
        {"mc_smoke.csv", bin + " mc --config " + cfg +
                             " --profile mc.smoke --seed 7 --out " +
                             out("mc_smoke.csv") + " > /dev/null"},
    };
    for (const auto& c : cases) {
        const int rc = run(c.cmd);
        check(rc == 0, c.name + " command exits 0");
        const auto golden = golden_dir / c.name;
        if (std::filesystem::exists(golden)) {
            check(slurp(golden) == slurp(tmp / c.name),
                  c.name + " matches the golden file");
        } else {
            check(false, c.name + " golden file missing");
        }
    }

    // Determinism: same seed, two runs, byte-identical; different worker
    // counts, byte-identical.
    run(bin + " mc --config " + cfg + " --profile mc.smoke --seed 3 --out " +
        out("mc_a.csv") + " > /dev/null");
    run(bin + " mc --config " + cfg + " --profile mc.smoke --seed 3 --out " +
        out("mc_b.csv") + " > /dev/null");
    run(bin + " mc --config " + cfg +
        " --profile mc.smoke --seed 3 --workers 4 --out " + out("mc_c.csv") +
        " > /dev/null");
    check(slurp(tmp / "mc_a.csv") == slurp(tmp / "mc_b.csv"),
          "mc output is run-to-run deterministic");
    check(slurp(tmp / "mc_a.csv") == slurp(tmp / "mc_c.csv"),
          "mc output is worker-count independent");
    run(bin + " mc --config " + cfg + " --profile mc.smoke --seed 4 --out " +
        out("mc_d.csv") + " > /dev/null");
    check(slurp(tmp / "mc_a.csv") != slurp(tmp / "mc_d.csv"),
          "different seeds change the counts");

    // Overrides feed the engine: x10 phase noise lowers v_p.
    run(bin + " budget --config " + cfg + " --out " + out("budget_base.csv") +
        " > /dev/null");
    run(bin + " budget --config " + cfg +
        " --override budget.local-20ns.sigma_thi_rad=0.43 --out " +
        out("budget_noisy.csv") + " > /dev/null");
    check(slurp(tmp / "budget_base.csv") != slurp(tmp / "budget_noisy.csv"),
          "sigma override changes the budget");

    // g2 on a short coherent stream: flat curve near 1.
    {
        const int rc =
            run(bin + " g2 --config " + cfg +
                " --override g2.form=coherent"
                " --override g2.duration_ns=200000 --seed 5 --out " +
                out("g2_coherent.csv") + " --out-windows " +
                out("g2_coherent_windows.csv"));
        check(rc == 0, "g2 command exits 0");
        std::ifstream in(tmp / "g2_coherent.csv");
        std::string line;
        std::getline(in, line);
        check(line == "tau_ns,g2", "g2 CSV header");
        bool flat = true;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            const double v = std::stod(line.substr(comma + 1));
            if (std::abs(v - 1.0) > 0.12) flat = false;
        }
        check(flat, "coherent stream g2 stays near 1");
    }

    // Stream file round trip through the CLI.
    {
        run(bin + " g2 --config " + cfg +
            " --override g2.duration_ns=100000 --seed 6 --dump-stream " +
            out("stream.txt") + " --out " + out("g2_sim.csv") +
            " --out-windows " + out("g2_sim_windows.csv"));
        const int rc = run(bin + " g2 --config " + cfg + " --stream " +
                           out("stream.txt") + " --out " +
                           out("g2_replay.csv") + " --out-windows " +
                           out("g2_replay_windows.csv"));
        check(rc == 0, "g2 replay from a stream file exits 0");
        check(slurp(tmp / "g2_sim.csv") == slurp(tmp / "g2_replay.csv"),
              "replayed stream reproduces the g2 curve");
    }

    // phase-check prints the residual lines.
    {
        const std::string capture = out("phase.txt");
        const int rc = run(bin + " phase-check --config " + cfg + " > " +
                           capture);
        check(rc == 0, "phase-check exits 0");
        const auto text = slurp(capture);
        check(text.find("lock set-points") != std::string::npos &&
                  text.find("lock residuals") != std::string::npos &&
                  text.find("fringe phase") != std::string::npos,
              "phase-check reports set-points and residuals");
    }

    // Singular scan points are flagged, not dropped: V = 1 diverges where
    // cos^2(phi - delta) = 1, i.e. at delta = 0 and +-pi of the shipped
    // grid.
    {
        const int rc = run(bin + " fisher-scan --config " + cfg +
                           " --override fisher.v=1.0 --out " +
                           out("fisher_singular.csv"));
        check(rc == 0, "fisher-scan with V=1 still exits 0");
        std::ifstream in(tmp / "fisher_singular.csv");
        std::string line;
        std::getline(in, line);
        int rows = 0, flagged = 0, nan_practical = 0;
        while (std::getline(in, line)) {
            ++rows;
            if (line.back() == '1') {
                ++flagged;
                if (line.find("nan") != std::string::npos) ++nan_practical;
            }
        }
        check(rows == 241, "fisher scan row count");
        check(flagged == 3 && nan_practical == 3,
              "three singular rows are marked and carry nan values");
    }

    // The sigma override propagates quantitatively: v_p column of the
    // modified local row equals exp(-sum sigma^2 / 2).
    {
        std::ifstream in(tmp / "budget_noisy.csv");
        std::string line;
        std::getline(in, line);  // header
        std::getline(in, line);  // local-20ns
        std::istringstream row(line);
        std::string cell;
        double v_p = 0.0;
        for (int col = 0; std::getline(row, cell, ','); ++col)
            if (col == 4) v_p = std::stod(cell);
        const double s2 = 0.43 * 0.43 + 0.063 * 0.063 + 0.081 * 0.081;
        check(std::abs(v_p - std::exp(-0.5 * s2)) < 1e-9,
              "overridden v_p follows exp(-sigma^2/2)");
    }

    // Malformed stream files report the offending line and exit 2.
    {
        std::ofstream bad(tmp / "bad_stream.txt");
        bad << "# duration_ns=1000\n1\t5.0\nth7s is junk\n";
        bad.close();
        const int rc = run(bin + " g2 --config " + cfg + " --stream " +
                           out("bad_stream.txt") + " --out " +
                           out("bad_g2.csv") + " 2> " + out("bad_err.txt"));
        check(rc == 2, "malformed stream exits 2");
        check(slurp(tmp / "bad_err.txt").find("line 3") != std::string::npos,
              "stream parse error names the offending line");
    }

    // Detuned write-out wave number: the deviation report and the fringe
    // phase difference both become nonzero.
    {
        const std::string capture = out("phase_detuned.txt");
        const int rc = run(bin + " phase-check --config " + cfg +
                           " --override phaselock.k_wo_rad_m=8052871.1 > " +
                           capture);
        check(rc == 0, "detuned phase-check exits 0");
        const auto text = slurp(capture);
        check(text.find("wo=1.242e-08") != std::string::npos,
              "wave-number deviation reported");
        check(text.find("difference=0.000e+00") == std::string::npos,
              "detuning shifts the fringe phase off the set-point value");
    }

    // Exit codes: usage/config = 2, numeric domain = 3.
    check(run(bin + " budget --config /nonexistent.cfg") == 2,
          "missing config exits 2");
    check(run(bin + " nonsense 2> /dev/null") == 2, "unknown command exits 2");
    check(run(bin + " budget --config " + cfg +
              " --override budget.local-20ns.g2_s_windowed=2.5 --out " +
              out("bad.csv") + " 2> /dev/null") == 3,
          "domain error exits 3");
    check(run(bin + " vh-curve --config " + cfg +
              " --override vh_curve.g2_e_list=, 2> /dev/null") == 2,
          "empty list exits 2");

    std::printf("%s\n", g_failures == 0 ? "cli tests passed"
                                        : "cli tests FAILED");
    return g_failures == 0 ? 0 : 1;
}
