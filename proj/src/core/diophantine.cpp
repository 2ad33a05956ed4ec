#include "core/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nsp {

DiophantineParams::DiophantineParams(double c0_, double tau_, double tau0_, double c_)
    : c0(c0_), tau(tau_), tau0(tau0_), c(c_) {
    if (!(c0 > 0.0 && c0 <= 0.5))
        throw std::invalid_argument("DiophantineParams: need 0 < C0 <= 1/2");
    if (!(tau0 > 1.0 && tau > tau0 + 1.0))
        throw std::invalid_argument("DiophantineParams: need tau > tau0 + 1 > 2");
    if (!(c > 1.0)) throw std::invalid_argument("DiophantineParams: need c > 1");
}

namespace {

double base_bound(const DiophantineParams& p, std::int64_t n) {
    return std::min(p.c * p.c0 * std::pow(double(n), -p.tau0), 0.5);
}

double melnikov_bound(const DiophantineParams& p, std::int64_t n) {
    return p.c0 * std::pow(double(n), -p.tau);
}

// T = m^2 + m'^2 with m >= m' >= 1 and m + m' <= cap.
std::vector<std::pair<long, long>> sum_representations(std::int64_t t, std::int64_t cap) {
    std::vector<std::pair<long, long>> reps;
    for (long mp = 1; 2 * std::int64_t(mp) * mp <= t; ++mp) {
        const std::int64_t rest = t - std::int64_t(mp) * mp;
        const long m = static_cast<long>(std::llround(std::sqrt(double(rest))));
        if (std::int64_t(m) * m == rest && m >= mp && m + mp <= cap)
            reps.emplace_back(m, mp);
    }
    return reps;
}

// T = m^2 - m'^2 with m > m' >= 1 and m + m' <= cap; factorizations d * e with
// d < e of equal parity give m = (e+d)/2, m' = (e-d)/2.
std::vector<std::pair<long, long>> diff_representations(std::int64_t t, std::int64_t cap) {
    std::vector<std::pair<long, long>> reps;
    for (std::int64_t d = 1; d * d < t; ++d) {
        if (t % d != 0) continue;
        const std::int64_t e = t / d;
        if ((e - d) % 2 != 0) continue;
        const long m = static_cast<long>((e + d) / 2);
        const long mp = static_cast<long>((e - d) / 2);
        if (mp >= 1 && m <= cap - mp) reps.emplace_back(m, mp);
    }
    std::sort(reps.begin(), reps.end());
    return reps;
}

}  // namespace

CheckResult check_base(double eps, const DiophantineParams& p, std::int64_t n_max) {
    const double omega = 1.0 + eps;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double bound = base_bound(p, n);
        const std::int64_t center = std::llround(omega * double(n));
        for (std::int64_t m = center - 1; m <= center + 1; ++m) {
            if (m == 0 || m == n) continue;
            const double d = std::abs(omega * double(n) - double(m));
            if (d < bound)
                return {false, Witness{"base", n, m, 0, +1, d, bound}};
        }
    }
    return {true, std::nullopt};
}

namespace {

CheckResult check_first(double eps, const FrequencyState& fs,
                        const DiophantineParams& p, std::int64_t n_max) {
    const double omega = 1.0 + eps;
    double nu_span = 0.0;
    for (const auto& [m, v] : fs.nu) nu_span = std::max(nu_span, std::abs(v));

    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double bound = melnikov_bound(p, n);
        const double target = omega * double(n);
        const double lo = std::max(1.0, target - nu_span - 1.0);
        const double hi = target + nu_span + 1.0;
        const long m_lo = std::max<long>(1, static_cast<long>(std::floor(std::sqrt(lo))));
        const long m_hi = static_cast<long>(std::ceil(std::sqrt(hi))) + 1;
        for (long m = m_lo; m <= m_hi; ++m) {
            if (n == std::int64_t(m) * m) continue;
            const double d = std::abs(target - fs.omega_tilde_sq(m));
            if (d < bound)
                return {false, Witness{"first-melnikov", n, m, 0, +1, d, bound}};
        }
    }
    return {true, std::nullopt};
}

CheckResult check_second(double eps, const FrequencyState& fs,
                         const DiophantineParams& p, std::int64_t n_max) {
    const double omega = 1.0 + eps;
    double nu_span = 0.0;
    for (const auto& [m, v] : fs.nu) nu_span = std::max(nu_span, std::abs(v));

    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double bound = melnikov_bound(p, n);
        const double target = omega * double(n);
        const std::int64_t t_lo =
            std::max<std::int64_t>(1, std::int64_t(std::floor(target - 2.0 * nu_span - 1.0)));
        const std::int64_t t_hi = std::int64_t(std::ceil(target + 2.0 * nu_span + 1.0));
        for (std::int64_t t = t_lo; t <= t_hi; ++t) {
            // Near-resonant pairs have m + m' <= t; unit-difference pairs reach
            // m + m' = t = n + k, so the cap must track t rather than n.
            const std::int64_t cap = t + 1;
            if (t == n) continue;  // |n| != |m^2 +- m'^2| quantifier
            for (const auto& [m, mp] : sum_representations(t, cap)) {
                const double d =
                    std::abs(target - (fs.omega_tilde_sq(m) + fs.omega_tilde_sq(mp)));
                if (d < bound)
                    return {false, Witness{"second-melnikov", n, m, mp, +1, d, bound}};
            }
            for (const auto& [m, mp] : diff_representations(t, cap)) {
                const double d =
                    std::abs(target - (fs.omega_tilde_sq(m) - fs.omega_tilde_sq(mp)));
                if (d < bound)
                    return {false, Witness{"second-melnikov", n, m, mp, -1, d, bound}};
            }
        }
    }
    return {true, std::nullopt};
}

}  // namespace

CheckResult check_melnikov(double eps, const FrequencyState& fs,
                           const DiophantineParams& p, std::int64_t n_max,
                           MelnikovOrder order) {
    return order == MelnikovOrder::first ? check_first(eps, fs, p, n_max)
                                         : check_second(eps, fs, p, n_max);
}

namespace {

FrequencyState provided_state(const FrequencyProvider& provider, double eps) {
    return provider ? provider(eps) : FrequencyState::bare(eps);
}

}  // namespace

bool violates_at(double eps, const Witness& w, const DiophantineParams& p,
                 const FrequencyProvider& provider) {
    const double omega = 1.0 + eps;
    const FrequencyState fs = provided_state(provider, eps);
    if (w.condition == "base")
        return std::abs(omega * double(w.n) - double(w.m)) < base_bound(p, w.n);
    if (w.condition == "first-melnikov")
        return std::abs(omega * double(w.n) - fs.omega_tilde_sq(w.m)) <
               melnikov_bound(p, w.n);
    const double combo = fs.omega_tilde_sq(w.m) + double(w.sign) * fs.omega_tilde_sq(w.m_prime);
    return std::abs(omega * double(w.n) - combo) < melnikov_bound(p, w.n);
}

ScanReport scan_epsilon(double eps0, int grid, const DiophantineParams& p,
                        std::int64_t n_max, const FrequencyProvider& provider,
                        bool include_second) {
    if (grid < 100) throw std::invalid_argument("scan_epsilon: grid must be >= 100");
    if (!(eps0 > 0.0)) throw std::invalid_argument("scan_epsilon: eps0 must be positive");

    // Intervals keep their true endpoints; only the measure is clipped to
    // [0, eps0], so boundary samples still classify by the open violation set.
    std::vector<ExcludedInterval> raw;
    auto add = [&](double lo, double hi, Witness w) {
        if (hi <= 0.0 || lo >= eps0 || lo >= hi) return;
        raw.push_back({lo, hi, std::move(w)});
    };

    for (std::int64_t n = 1; n <= n_max; ++n) {
        // Base family: |eps n - k| < r with m = n + k.
        {
            const double r = base_bound(p, n);
            const std::int64_t k_hi = std::int64_t(std::ceil(eps0 * double(n) + r));
            for (std::int64_t k = 1; k <= k_hi; ++k)
                add((double(k) - r) / double(n), (double(k) + r) / double(n),
                    Witness{"base", n, n + k, 0, +1, 0.0, r});
        }
        const double r = melnikov_bound(p, n);
        const std::int64_t k_hi = std::int64_t(std::ceil(eps0 * double(n) + 1.0));

        // With counterterms the resonance |eps n - k + shift(eps)| < r sits at
        // a shifted center; iterate it to a fixed point and widen by the
        // derivative lower bound |d f / d eps| >= n/2 of the excision
        // estimates, so the excised interval covers the true violation set.
        auto add_resonance = [&](std::int64_t k, const auto& shift_at, Witness w) {
            if (!provider) {
                add((double(k) - r) / double(n), (double(k) + r) / double(n), std::move(w));
                return;
            }
            double center = double(k) / double(n);
            for (int it = 0; it < 24; ++it) {
                const double f = center * double(n) - double(k) + shift_at(center);
                if (std::abs(f) < r / 4.0) break;
                center = (double(k) - shift_at(center)) / double(n);
            }
            const double hw = 2.0 * r / double(n);
            add(center - hw, center + hw, std::move(w));
        };

        for (std::int64_t k = 1; k <= k_hi; ++k) {
            const std::int64_t t = n + k;

            // First Melnikov: t a perfect square.
            const long mr = static_cast<long>(std::llround(std::sqrt(double(t))));
            if (std::int64_t(mr) * mr == t) {
                add_resonance(
                    k, [&](double e) { return provider(e).nu_at(mr); },
                    Witness{"first-melnikov", n, mr, 0, +1, 0.0, r});
            }
            if (!include_second) continue;
            for (const auto& [m, mp] : sum_representations(t, t + 1)) {
                add_resonance(
                    k, [&, m = m, mp = mp](double e) {
                        const FrequencyState fs = provider(e);
                        return fs.nu_at(m) + fs.nu_at(mp);
                    },
                    Witness{"second-melnikov", n, m, mp, +1, 0.0, r});
            }
            for (const auto& [m, mp] : diff_representations(t, t + 1)) {
                add_resonance(
                    k, [&, m = m, mp = mp](double e) {
                        const FrequencyState fs = provider(e);
                        return fs.nu_at(m) - fs.nu_at(mp);
                    },
                    Witness{"second-melnikov", n, m, mp, -1, 0.0, r});
            }
        }
    }

    std::sort(raw.begin(), raw.end(),
              [](const ExcludedInterval& a, const ExcludedInterval& b) {
                  return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
              });
    ScanReport rep;
    rep.eps0 = eps0;
    rep.grid = grid;
    rep.n_max = n_max;
    for (const auto& iv : raw) {
        if (!rep.excluded.empty() && iv.lo <= rep.excluded.back().hi)
            rep.excluded.back().hi = std::max(rep.excluded.back().hi, iv.hi);
        else
            rep.excluded.push_back(iv);
    }
    for (const auto& iv : rep.excluded)
        rep.excluded_measure += std::min(iv.hi, eps0) - std::max(iv.lo, 0.0);
    rep.good_fraction = 1.0 - rep.excluded_measure / eps0;

    for (int i = 1; i <= grid; ++i) {
        const double eps = eps0 * double(i) / double(grid);
        bool good = true;
        auto it = std::upper_bound(rep.excluded.begin(), rep.excluded.end(), eps,
                                   [](double e, const ExcludedInterval& iv) {
                                       return e < iv.lo;
                                   });
        if (it != rep.excluded.begin()) {
            --it;
            good = !(eps > it->lo && eps < it->hi);
        }
        rep.samples.emplace_back(eps, good);
    }
    return rep;
}

nlohmann::json scan_report_json(const ScanReport& rep) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& iv : rep.excluded) {
        intervals.push_back({{"lo", iv.lo},
                             {"hi", iv.hi},
                             {"condition", iv.witness.condition},
                             {"n", iv.witness.n},
                             {"m", iv.witness.m},
                             {"m_prime", iv.witness.m_prime},
                             {"sign", iv.witness.sign}});
    }
    return {
        {"eps0", rep.eps0},
        {"grid", rep.grid},
        {"n_max", rep.n_max},
        {"excluded_intervals", intervals},
        {"excluded_measure", rep.excluded_measure},
        {"good_fraction", rep.good_fraction},
    };
}

std::string scan_report_csv(const ScanReport& rep) {
    std::string csv = "eps,good\n";
    char line[64];
    for (const auto& [eps, good] : rep.samples) {
        std::snprintf(line, sizeof line, "%.12g,%d\n", eps, good ? 1 : 0);
        csv += line;
    }
    return csv;
}

}  // namespace nsp
