#include "nsp.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "core/amplitudes.hpp"
#include "core/diophantine.hpp"
#include "core/errors.hpp"
#include "core/modeset.hpp"
#include "core/series.hpp"
#include "core/solver.hpp"
#include "core/verify.hpp"

struct nsp_modeset {
    nsp::ModeSet set;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
nsp_status guarded(F&& f) {
    try {
        return f();
    } catch (const nsp::excluded_epsilon& e) {
        g_last_error = e.what();
        return NSP_ERR_EXCLUDED_EPS;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return NSP_ERR_INVALID;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NSP_ERR_INTERNAL;
    }
}

nsp_status require(bool cond, const char* message) {
    if (cond) return NSP_OK;
    g_last_error = message;
    return NSP_ERR_INVALID;
}

}  // namespace

extern "C" {

const char* nsp_version_string(void) { return "nsp 1.0.0"; }

const char* nsp_last_error(void) { return g_last_error.c_str(); }

void nsp_string_free(char* s) { std::free(s); }

nsp_status nsp_modeset_lemma5(long n_count, nsp_modeset** out) {
    if (require(out != nullptr, "null output") != NSP_OK) return NSP_ERR_INVALID;
    return guarded([&] {
        *out = new nsp_modeset{nsp::construct_lemma5(n_count)};
        return NSP_OK;
    });
}

nsp_status nsp_modeset_lemma6(long n_count, const long* gaps, long gap_count,
                              nsp_modeset** out) {
    if (require(out != nullptr && (gaps != nullptr || gap_count == 0), "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        *out = new nsp_modeset{
            nsp::construct_lemma6(n_count, std::vector<long>(gaps, gaps + gap_count))};
        return NSP_OK;
    });
}

nsp_status nsp_modeset_parse(const char* json, nsp_modeset** out) {
    if (require(json != nullptr && out != nullptr, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        *out = new nsp_modeset{nsp::modeset_from_json(nlohmann::json::parse(json))};
        return NSP_OK;
    });
}

void nsp_modeset_free(nsp_modeset* ms) { delete ms; }

long nsp_modeset_size(const nsp_modeset* ms) {
    return ms == nullptr ? 0 : ms->set.n_count();
}

nsp_status nsp_modeset_entries(const nsp_modeset* ms, long* out, long capacity) {
    if (require(ms != nullptr && out != nullptr, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    if (require(capacity >= ms->set.n_count(), "capacity too small") != NSP_OK)
        return NSP_ERR_INVALID;
    const auto& modes = ms->set.m_plus();
    for (std::size_t i = 0; i < modes.size(); ++i) out[i] = modes[i];
    return NSP_OK;
}

nsp_status nsp_validate_modeset(const long* modes, long count, char** json_out) {
    if (require(modes != nullptr && json_out != nullptr && count > 0, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        const auto rep = nsp::validate_modeset(std::vector<long>(modes, modes + count));
        *json_out = dup_string(nsp::modeset_report_json(rep).dump(2));
        return NSP_OK;
    });
}

nsp_status nsp_modeset_report(const nsp_modeset* ms, char** json_out) {
    if (require(ms != nullptr && json_out != nullptr, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        const auto rep = nsp::validate_modeset(ms->set.m_plus());
        *json_out = dup_string(nsp::modeset_report_json(rep).dump(2));
        return NSP_OK;
    });
}

nsp_status nsp_amplitudes_report(const nsp_modeset* ms, char** json_out) {
    if (require(ms != nullptr && json_out != nullptr, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        const auto av = nsp::solve_amplitudes(ms->set);
        *json_out = dup_string(nsp::amplitudes_report_json(av).dump(2));
        return NSP_OK;
    });
}

nsp_status nsp_series_report(const nsp_modeset* ms, double eps, int order,
                             int dump_coefficients, char** json_out) {
    if (require(ms != nullptr && json_out != nullptr, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        nsp::SeriesLadder ladder(nsp::solve_amplitudes(ms->set),
                                 nsp::FrequencyState::bare(eps), order);
        ladder.extend_to(order);
        *json_out =
            dup_string(nsp::series_report_json(ladder, dump_coefficients != 0).dump(2));
        return NSP_OK;
    });
}

nsp_status nsp_solve(const nsp_modeset* ms, double eps, long n_max, long m_max,
                     double tol, int max_iter, char** json_out) {
    if (require(ms != nullptr && json_out != nullptr, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        nsp::SolveOptions opt;
        opt.n_max = n_max;
        opt.m_max = m_max;
        if (tol > 0.0) opt.tol = tol;
        if (max_iter > 0) opt.max_iter = max_iter;
        const nsp::SolveResult res = nsp::newton_solve(ms->set, eps, opt);
        *json_out = dup_string(nsp::solve_report_json(res.report).dump(2));
        return NSP_OK;
    });
}

nsp_status nsp_sweep(const nsp_modeset* ms, const double* eps_list, long eps_count,
                     long n_max, long m_max, char** json_out, char** csv_out) {
    if (require(ms != nullptr && eps_list != nullptr && eps_count > 0 &&
                    json_out != nullptr && csv_out != nullptr,
                "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        nsp::SolveOptions opt;
        opt.n_max = n_max;
        opt.m_max = m_max;
        const nsp::SweepReport rep = nsp::scaling_sweep(
            ms->set, std::vector<double>(eps_list, eps_list + eps_count), opt);
        *json_out = dup_string(nsp::sweep_report_json(rep).dump(2));
        *csv_out = dup_string(nsp::sweep_report_csv(rep));
        return NSP_OK;
    });
}

nsp_status nsp_scan(double eps0, int grid, long n_max, int include_second,
                    char** json_out, char** csv_out) {
    if (require(json_out != nullptr && csv_out != nullptr, "null output") != NSP_OK)
        return NSP_ERR_INVALID;
    return guarded([&] {
        const nsp::ScanReport rep = nsp::scan_epsilon(eps0, grid, nsp::DiophantineParams{},
                                                      n_max, {}, include_second != 0);
        *json_out = dup_string(nsp::scan_report_json(rep).dump(2));
        *csv_out = dup_string(nsp::scan_report_csv(rep));
        return NSP_OK;
    });
}

nsp_status nsp_verify(const char* suite, char** text_out) {
    if (require(suite != nullptr && text_out != nullptr, "null input") != NSP_OK)
        return NSP_ERR_INVALID;
    nsp_status status = NSP_OK;
    const nsp_status guard_status = guarded([&] {
        const auto results = nsp::run_suite(suite);
        *text_out = dup_string(nsp::format_results(results));
        if (!nsp::all_passed(results)) {
            g_last_error = "one or more criteria failed";
            status = NSP_ERR_CRITERION;
        }
        return NSP_OK;
    });
    return guard_status == NSP_OK ? status : guard_status;
}

}  // extern "C"
