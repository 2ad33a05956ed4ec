// Command-line front end; talks to the core exclusively through the C API.
//
// Subcommands: modeset, amplitudes, series, solve, sweep, scan, verify.
// Exit codes: 0 ok, 2 validation error, 3 excluded epsilon, 4 criterion failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsp.h"

namespace {

int status_to_exit(nsp_status s) {
    switch (s) {
        case NSP_OK: return 0;
        case NSP_ERR_INVALID: return 2;
        case NSP_ERR_EXCLUDED_EPS: return 3;
        case NSP_ERR_CRITERION: return 4;
        default: return 5;
    }
}

int fail(nsp_status s) {
    std::cerr << "error: " << nsp_last_error() << "\n";
    return status_to_exit(s);
}

struct StringGuard {
    char* s = nullptr;
    ~StringGuard() { nsp_string_free(s); }
};

struct ModesetGuard {
    nsp_modeset* ms = nullptr;
    ~ModesetGuard() { nsp_modeset_free(ms); }
};

bool emit(const char* text, const std::string& path) {
    const std::string s(text ? text : "");
    if (path.empty()) {
        std::cout << s;
        if (!s.empty() && s.back() != '\n') std::cout << "\n";
        return true;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return false;
    }
    out << s;
    return true;
}

// --modeset accepts inline JSON, a path to a JSON file, or a bare list "7,8".
nsp_status load_modeset(const std::string& spec, nsp_modeset** out) {
    std::string text = spec;
    if (!spec.empty() && spec[0] != '[' && spec[0] != '{') {
        std::ifstream in(spec);
        if (in) {
            text.assign(std::istreambuf_iterator<char>(in), {});
        } else {
            text = "[" + spec + "]";  // bare comma list
        }
    }
    return nsp_modeset_parse(text.c_str(), out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonant periodic solutions of the cubic NLS: mode sets, "
                 "Lindstedt series, Newton solves, Diophantine scans"};
    app.require_subcommand(1);

    // modeset
    auto* cmd_modeset = app.add_subcommand("modeset", "Construct a resonant mode set");
    long ms_n = 2;
    std::vector<long> ms_gaps;
    std::string ms_out;
    cmd_modeset->add_option("--n", ms_n, "Number of modes N")->required();
    cmd_modeset->add_option("--gaps", ms_gaps,
                            "Increasing gaps i1,i2,... (N-1 entries; consecutive block "
                            "when omitted)")
        ->delimiter(',');
    cmd_modeset->add_option("--out", ms_out, "Write the JSON report to a file");

    // amplitudes
    auto* cmd_amp = app.add_subcommand("amplitudes", "Solve the eps=0 packet amplitudes");
    std::string amp_modeset, amp_out;
    cmd_amp->add_option("--modeset", amp_modeset, "Mode set (JSON, file, or list)")
        ->required();
    cmd_amp->add_option("--out", amp_out, "Write the JSON report to a file");

    // series
    auto* cmd_series = app.add_subcommand("series", "Lindstedt series ladder summary");
    long series_m0 = 1;
    std::string series_modeset, series_out;
    double series_eps = 1e-3;
    int series_order = 8;
    bool series_dump = false;
    cmd_series->add_option("--m0", series_m0, "Single-mode packet wave number");
    cmd_series->add_option("--modeset", series_modeset, "Mode set (overrides --m0)");
    cmd_series->add_option("--eps", series_eps, "Perturbation parameter")->required();
    cmd_series->add_option("--order", series_order, "Highest series order K");
    cmd_series->add_flag("--dump", series_dump, "Include full coefficient arrays");
    cmd_series->add_option("--out", series_out, "Write the JSON report to a file");

    // solve
    auto* cmd_solve = app.add_subcommand("solve", "Newton solve of the truncated system");
    std::string solve_modeset, solve_out;
    double solve_eps = 1e-3, solve_tol = 1e-10;
    long solve_nmax = 400, solve_mmax = 20;
    int solve_maxiter = 40;
    cmd_solve->add_option("--modeset", solve_modeset, "Mode set (JSON, file, or list)")
        ->required();
    cmd_solve->add_option("--eps", solve_eps, "Perturbation parameter")->required();
    cmd_solve->add_option("--nmax", solve_nmax, "Time-frequency cutoff");
    cmd_solve->add_option("--mmax", solve_mmax, "Space-frequency cutoff");
    cmd_solve->add_option("--tol", solve_tol, "Residual tolerance");
    cmd_solve->add_option("--max-iter", solve_maxiter, "Newton iteration cap");
    cmd_solve->add_option("--out", solve_out, "Write the JSON report to a file");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "Scaling sweep over eps");
    std::string sweep_modeset, sweep_out, sweep_csv;
    std::vector<double> sweep_eps;
    long sweep_nmax = 400, sweep_mmax = 20;
    cmd_sweep->add_option("--modeset", sweep_modeset, "Mode set (JSON, file, or list)")
        ->required();
    cmd_sweep->add_option("--eps-list", sweep_eps, "Comma-separated eps values")
        ->required()
        ->delimiter(',');
    cmd_sweep->add_option("--nmax", sweep_nmax, "Time-frequency cutoff");
    cmd_sweep->add_option("--mmax", sweep_mmax, "Space-frequency cutoff");
    cmd_sweep->add_option("--out", sweep_out, "Write the JSON report to a file");
    cmd_sweep->add_option("--csv", sweep_csv, "Write the CSV series to a file");

    // scan
    auto* cmd_scan = app.add_subcommand("scan", "Diophantine excision scan over [0, eps0]");
    double scan_eps0 = 1e-2;
    int scan_grid = 1000;
    long scan_nmax = 1000;
    bool scan_second = false;
    std::string scan_out, scan_csv;
    cmd_scan->add_option("--eps0", scan_eps0, "Upper end of the scanned interval")
        ->required();
    cmd_scan->add_option("--grid", scan_grid, "Sample count (>= 100)");
    cmd_scan->add_option("--nmax", scan_nmax, "Resonance truncation");
    cmd_scan->add_flag("--second", scan_second, "Include the second Melnikov family");
    cmd_scan->add_option("--out", scan_out, "Write the JSON report to a file");
    cmd_scan->add_option("--csv", scan_csv, "Write the (eps, good) CSV to a file");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "Run a verification suite");
    std::string verify_suite = "all";
    cmd_verify->add_option("--suite", verify_suite,
                           "q-residual | determinant | tree-oracle | scaling | lemma1 | "
                           "lemma4 | measure | symmetry | jacobian | all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cmd_modeset->parsed()) {
        ModesetGuard ms;
        const nsp_status s =
            ms_gaps.empty()
                ? nsp_modeset_lemma5(ms_n, &ms.ms)
                : nsp_modeset_lemma6(ms_n, ms_gaps.data(), (long)ms_gaps.size(), &ms.ms);
        if (s != NSP_OK) return fail(s);
        StringGuard rep;
        const nsp_status sr = nsp_modeset_report(ms.ms, &rep.s);
        if (sr != NSP_OK) return fail(sr);
        return emit(rep.s, ms_out) ? 0 : 2;
    }

    if (cmd_amp->parsed()) {
        ModesetGuard ms;
        nsp_status s = load_modeset(amp_modeset, &ms.ms);
        if (s != NSP_OK) return fail(s);
        StringGuard rep;
        s = nsp_amplitudes_report(ms.ms, &rep.s);
        if (s != NSP_OK) return fail(s);
        return emit(rep.s, amp_out) ? 0 : 2;
    }

    if (cmd_series->parsed()) {
        ModesetGuard ms;
        nsp_status s = series_modeset.empty()
                           ? nsp_modeset_parse(
                                 ("[" + std::to_string(series_m0) + "]").c_str(), &ms.ms)
                           : load_modeset(series_modeset, &ms.ms);
        if (s != NSP_OK) return fail(s);
        StringGuard rep;
        s = nsp_series_report(ms.ms, series_eps, series_order, series_dump ? 1 : 0, &rep.s);
        if (s != NSP_OK) return fail(s);
        return emit(rep.s, series_out) ? 0 : 2;
    }

    if (cmd_solve->parsed()) {
        ModesetGuard ms;
        nsp_status s = load_modeset(solve_modeset, &ms.ms);
        if (s != NSP_OK) return fail(s);
        StringGuard rep;
        s = nsp_solve(ms.ms, solve_eps, solve_nmax, solve_mmax, solve_tol, solve_maxiter,
                      &rep.s);
        if (s != NSP_OK) return fail(s);
        return emit(rep.s, solve_out) ? 0 : 2;
    }

    if (cmd_sweep->parsed()) {
        ModesetGuard ms;
        nsp_status s = load_modeset(sweep_modeset, &ms.ms);
        if (s != NSP_OK) return fail(s);
        StringGuard rep, csv;
        s = nsp_sweep(ms.ms, sweep_eps.data(), (long)sweep_eps.size(), sweep_nmax,
                      sweep_mmax, &rep.s, &csv.s);
        if (s != NSP_OK) return fail(s);
        if (!emit(rep.s, sweep_out)) return 2;
        if (!sweep_csv.empty() && !emit(csv.s, sweep_csv)) return 2;
        return 0;
    }

    if (cmd_scan->parsed()) {
        StringGuard rep, csv;
        const nsp_status s = nsp_scan(scan_eps0, scan_grid, scan_nmax,
                                      scan_second ? 1 : 0, &rep.s, &csv.s);
        if (s != NSP_OK) return fail(s);
        if (!emit(rep.s, scan_out)) return 2;
        if (!scan_csv.empty() && !emit(csv.s, scan_csv)) return 2;
        return 0;
    }

    if (cmd_verify->parsed()) {
        StringGuard text;
        const nsp_status s = nsp_verify(verify_suite.c_str(), &text.s);
        if (text.s != nullptr) std::cout << text.s;
        if (s != NSP_OK && s != NSP_ERR_CRITERION) return fail(s);
        return status_to_exit(s);
    }

    return 2;
}
