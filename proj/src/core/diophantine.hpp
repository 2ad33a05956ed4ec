#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "core/series.hpp"

namespace nsp {

struct DiophantineParams {
    double c0 = 0.5;    // C0 <= 1/2
    double tau = 3.5;   // tau > tau0 + 1 > 2
    double tau0 = 2.0;
    double c = 2.0;     // c > 1

    DiophantineParams() = default;
    DiophantineParams(double c0_, double tau_, double tau0_, double c_);
};

struct Witness {
    std::string condition;  // "base", "first-melnikov", "second-melnikov"
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t m_prime = 0;  // second condition only
    int sign = +1;             // inner sign: +1 for m^2 + m'^2, -1 for m^2 - m'^2
    double value = 0.0;        // |divisor|
    double bound = 0.0;
};

struct CheckResult {
    bool pass = true;
    std::optional<Witness> witness;
};

/// Preliminary condition |omega n - m| >= min(c C0 |n|^{-tau0}, 1/2), n != m.
/// The bound is capped at 1/2: integer separation makes larger bounds vacuous,
/// matching the paper's normalization of C0.
CheckResult check_base(double eps, const DiophantineParams& p, std::int64_t n_max);

enum class MelnikovOrder { first, second };

/// First: |omega n - omega_tilde_m^2| >= C0 |n|^{-tau} for n != m^2.
/// Second: |omega n - (omega_tilde_m^2 +- omega_tilde_{m'}^2)| >= C0 |n|^{-tau}
/// for |n| != |m^2 +- m'^2|, pairs restricted to m + m' <= |n| + 2.
CheckResult check_melnikov(double eps, const FrequencyState& fs,
                           const DiophantineParams& p, std::int64_t n_max,
                           MelnikovOrder order);

struct ExcludedInterval {
    double lo = 0.0;
    double hi = 0.0;
    Witness witness;
};

struct ScanReport {
    double eps0 = 0.0;
    int grid = 0;
    std::int64_t n_max = 0;
    std::vector<ExcludedInterval> excluded;  // merged, disjoint, ascending
    double excluded_measure = 0.0;
    double good_fraction = 1.0;
    std::vector<std::pair<double, bool>> samples;  // (eps, good)
};

/// eps -> counterterm source; when absent the zeroth iterate nu == 0 is used.
using FrequencyProvider = std::function<FrequencyState(double)>;

/// Excise, with exact interval endpoints, every resonance of the base, first
/// and (optionally) second Melnikov families inside [0, eps0]; the grid only
/// controls sample reporting density.
ScanReport scan_epsilon(double eps0, int grid, const DiophantineParams& p,
                        std::int64_t n_max, const FrequencyProvider& provider = {},
                        bool include_second = true);

/// Re-evaluate the witness family of this interval at a given eps.
bool violates_at(double eps, const Witness& w, const DiophantineParams& p,
                 const FrequencyProvider& provider = {});

nlohmann::json scan_report_json(const ScanReport& rep);
std::string scan_report_csv(const ScanReport& rep);

}  // namespace nsp
