#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <unordered_map>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "core/errors.hpp"

namespace nsp {

namespace {

// Packed (n, m) key for the hot convolution maps.
inline std::int64_t pack(std::int64_t n, std::int64_t m) {
    return (n << 20) ^ (m & 0xFFFFF);
}
inline Mode unpack(std::int64_t key) {
    std::int64_t m = key & 0xFFFFF;
    if (m & 0x80000) m -= 0x100000;
    return Mode{(key ^ (m & 0xFFFFF)) >> 20, m};
}

using PackedMap = std::unordered_map<std::int64_t, double>;

// Master coefficients (m >= 1) with the odd extension made explicit.
struct RealField {
    std::map<Mode, double> master;

    std::vector<std::pair<Mode, double>> full() const {
        std::vector<std::pair<Mode, double>> out;
        out.reserve(2 * master.size());
        for (const auto& [p, v] : master) {
            out.push_back({p, v});
            out.push_back({Mode{p.n, -p.m}, -v});
        }
        return out;
    }
};

struct ConvData {
    PackedMap pair;      // T(N,M) = sum u_{p2} u_{p3}, p2+p3 = (N,M)
    PackedMap autocorr;  // U(D) = sum u_p u_{p+D}
    PackedMap cubic;     // C(n,m) = sum -p1+p2+p3 = (n,m)
};

ConvData convolutions(const RealField& u, bool with_autocorr) {
    ConvData d;
    const auto full = u.full();
    d.pair.reserve(full.size() * full.size() / 4 + 16);
    for (const auto& [p2, v2] : full)
        for (const auto& [p3, v3] : full)
            d.pair[pack(p2.n + p3.n, p2.m + p3.m)] += v2 * v3;
    if (with_autocorr) {
        d.autocorr.reserve(d.pair.size());
        for (const auto& [p1, v1] : full)
            for (const auto& [p2, v2] : full)
                d.autocorr[pack(p2.n - p1.n, p2.m - p1.m)] += v1 * v2;
    }
    d.cubic.reserve(d.pair.size() * 2);
    for (const auto& [p1, v1] : full)
        for (const auto& [key, t] : d.pair) {
            const Mode q = unpack(key);
            d.cubic[pack(q.n - p1.n, q.m - p1.m)] += v1 * t;
        }
    return d;
}

inline double lookup(const PackedMap& m, std::int64_t n, std::int64_t mm) {
    auto it = m.find(pack(n, mm));
    return it == m.end() ? 0.0 : it->second;
}

double weight_of(Mode p, double r) {
    return std::exp(r * double(std::abs(p.n) + std::abs(p.m)));
}

}  // namespace

std::map<long, double> measure_counterterms(const FourierField& u, double eps,
                                            long m_track) {
    double s0 = 0.0;
    for (const auto& [p, z] : u.coeffs()) s0 += z.real() * z.real();
    std::map<long, double> nu;
    for (long m = 1; m <= m_track; ++m) {
        double sb = 0.0;
        for (const auto& [p, z] : u.coeffs())
            sb += z.real() * u.at(p.n, p.m + 2 * m).real();
        nu[m] = -eps * (2.0 * s0 - 2.0 * sb);
    }
    return nu;
}

SolveResult newton_solve(const ModeSet& set, double eps, const SolveOptions& opt) {
    const Lattice lat(opt.n_max, opt.m_max);
    if (opt.m_max >= (1 << 19) || opt.n_max >= (std::int64_t(1) << 42))
        throw std::invalid_argument("newton_solve: lattice exceeds the packed-key range");
    if (set.max_mode() > opt.m_max)
        throw std::invalid_argument("newton_solve: lattice m_max below the mode set");
    if (set.max_mode() * set.max_mode() > opt.n_max)
        throw std::invalid_argument("newton_solve: lattice cannot hold the packet diagonal");
    const AmplitudeVector av = solve_amplitudes(set);
    const NormParams norm(opt.norm_radius);

    SolveReport rep;
    rep.eps = eps;

    // eps = 0: the packet itself is the exact solution of the rescaled problem.
    if (eps == 0.0) {
        rep.converged = true;
        rep.admissible = true;
        rep.divisor_min = 1.0;
        rep.support = set.n_count();
        FourierField u0 = av.packet(lat);
        rep.residual_norm = weighted_norm(pde_residual(u0, 0.0, lat), norm);
        return {rep, std::move(u0)};
    }
    if (!(eps > 0.0)) throw std::invalid_argument("newton_solve: eps must be >= 0");

    // Cantor-set screens: the preliminary condition on the box, then the
    // small-divisor safety threshold on every off-diagonal lattice point.
    const CheckResult base = check_base(eps, opt.dio, opt.n_max);
    if (!base.pass)
        throw excluded_epsilon("base condition", base.witness->n, base.witness->m);

    const double omega = 1.0 + eps;
    const double safety = std::pow(eps, opt.divisor_exponent);
    rep.divisor_min = std::numeric_limits<double>::infinity();
    for (std::int64_t n = 1; n <= opt.n_max; ++n)
        for (std::int64_t m = 0; m <= opt.m_max; ++m) {
            if (n == m * m) continue;
            const double d = std::abs(omega * double(n) - double(m) * m);
            if (d < rep.divisor_min) {
                rep.divisor_min = d;
                rep.divisor_argmin = Mode{n, m};
            }
        }
    if (rep.divisor_min < safety)
        throw excluded_epsilon("small-divisor safety threshold", rep.divisor_argmin.n,
                               rep.divisor_argmin.m);
    rep.admissible = true;

    // Initial guess: the packet on its diagonal master modes.
    RealField u;
    for (long m : set.m_plus()) u.master[Mode{m * m, m}] = av.a(m);

    auto is_master = [&](Mode p) { return p.m >= 1 && lat.contains(p); };

    constexpr std::size_t kSupportCap = 8000;
    for (int iter = 0; iter <= opt.max_iter; ++iter) {
        ConvData conv = convolutions(u, true);

        // Full residual on every lattice master the cubic or the support touches.
        std::map<Mode, double> f;
        for (const auto& [p, v] : u.master)
            f[p] = (omega * double(p.n) - double(p.m) * p.m) * v;
        for (const auto& [key, c] : conv.cubic) {
            const Mode p = unpack(key);
            if (!is_master(p)) continue;
            f[p] -= eps * c;
        }

        // The odd mirror doubles every master contribution in the full-field norm.
        double rnorm = 0.0;
        for (const auto& [p, v] : f) rnorm += 2.0 * std::abs(v) * weight_of(p, opt.norm_radius);
        rep.residual_history.push_back(rnorm);
        if (rnorm <= opt.tol) {
            rep.converged = true;
            rep.iterations = iter;
            break;
        }
        if (iter == opt.max_iter) {
            rep.iterations = iter;
            break;
        }

        // Grow the active set: pull in off-support modes by weighted residual
        // contribution until what is left behind cannot hold the norm above tol.
        {
            std::vector<std::pair<double, Mode>> cand;
            double tail = 0.0;
            for (const auto& [p, v] : f) {
                if (u.master.count(p)) continue;
                const double contrib = 2.0 * std::abs(v) * weight_of(p, opt.norm_radius);
                cand.push_back({contrib, p});
                tail += contrib;
            }
            std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
                return a.first > b.first || (a.first == b.first && a.second < b.second);
            });
            for (const auto& [contrib, p] : cand) {
                if (tail <= opt.tol / 4.0) break;
                u.master[p] = 0.0;
                tail -= contrib;
            }
            if (u.master.size() > kSupportCap)
                throw std::runtime_error("newton_solve: active support exploded");
        }

        // Assemble the Jacobian on the active set. Diagonal (Q) rows carry an
        // overall factor eps; scale them out so the LU sees a balanced system.
        const std::vector<Mode> idx = [&] {
            std::vector<Mode> v;
            v.reserve(u.master.size());
            for (const auto& [p, val] : u.master) v.push_back(p);
            return v;
        }();
        const long nn = static_cast<long>(idx.size());
        Eigen::MatrixXd jac(nn, nn);
        Eigen::VectorXd rhs(nn);
        for (long i = 0; i < nn; ++i) {
            const Mode p = idx[i];
            const double row_scale = is_diagonal(p) ? 1.0 / eps : 1.0;
            for (long j = 0; j < nn; ++j) {
                const Mode q = idx[j];
                double deriv =
                    lookup(conv.pair, p.n + q.n, p.m + q.m) -
                    lookup(conv.pair, p.n + q.n, p.m - q.m) +
                    2.0 * (lookup(conv.autocorr, p.n - q.n, p.m - q.m) -
                           lookup(conv.autocorr, p.n - q.n, p.m + q.m));
                double entry = -eps * deriv;
                if (i == j) entry += omega * double(p.n) - double(p.m) * p.m;
                jac(i, j) = row_scale * entry;
            }
            auto it = f.find(p);
            rhs(i) = -row_scale * (it == f.end() ? 0.0 : it->second);
        }

        const Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
        const double damping = (iter == 0) ? 0.5 : 1.0;
        for (long i = 0; i < nn; ++i) u.master[idx[i]] += damping * step(i);
    }

    // Final field and cross-checked report quantities through fourier-core.
    FourierField uf(lat);
    for (const auto& [p, v] : u.master) {
        if (v == 0.0) continue;
        uf.set(p, Complex{v, 0.0});
        uf.set(Mode{p.n, -p.m}, Complex{-v, 0.0});
    }
    rep.support = u.master.size();
    rep.residual_norm = weighted_norm(pde_residual(uf, eps, lat), norm);
    rep.converged = rep.converged && rep.residual_norm <= opt.tol;

    const FourierField u0 = av.packet(lat);
    rep.distance = std::sqrt(eps) * weighted_norm(uf - u0, norm);
    rep.c_constant = rep.distance / std::pow(eps, 1.5);
    rep.nu_out = measure_counterterms(uf, eps, opt.m_max);

    // Quadratic-tail constant from the recorded residuals.
    for (std::size_t i = 0; i + 1 < rep.residual_history.size(); ++i) {
        const double r0 = rep.residual_history[i];
        const double r1 = rep.residual_history[i + 1];
        if (r0 < 1e-4 && r1 > 1e-14 && r0 > 0.0)
            rep.quad_c = std::max(rep.quad_c, r1 / (r0 * r0));
    }

    return {rep, std::move(uf)};
}

FrequencyIterationResult frequency_iteration(const ModeSet& set, double eps, int order,
                                             const SplitRule& split, double fp_tol,
                                             int max_rounds) {
    const AmplitudeVector av = solve_amplitudes(set);
    const long m_track = 3 * set.max_mode() + 2;
    const DiophantineParams dio{};

    FrequencyIterationResult out;
    out.fs = FrequencyState::bare(eps);

    for (int round = 1; round <= max_rounds; ++round) {
        SeriesLadder ladder(av, out.fs, order);
        const std::int64_t melnikov_n_max = ladder.lattice().n_max;
        const CheckResult first =
            check_melnikov(eps, out.fs, dio, melnikov_n_max, MelnikovOrder::first);
        if (!first.pass)
            throw excluded_epsilon("first Melnikov condition", first.witness->n,
                                   first.witness->m);
        const CheckResult second =
            check_melnikov(eps, out.fs, dio, melnikov_n_max, MelnikovOrder::second);
        if (!second.pass)
            throw excluded_epsilon("second Melnikov condition", second.witness->n,
                                   second.witness->m, second.witness->m_prime);

        ladder.extend_to(order);
        const FourierField u = ladder.sum(1.0);
        std::map<long, double> nu_hat = measure_counterterms(u, eps, m_track);

        double delta = 0.0;
        for (const auto& [m, v] : nu_hat)
            delta = std::max(delta, std::abs(v - out.fs.nu_at(m)));
        out.fs = split ? split(eps, nu_hat) : FrequencyState::with_nu(eps, nu_hat);
        out.rounds = round;
        out.final_increment = delta;
        if (delta <= fp_tol) return out;
    }
    throw std::runtime_error("frequency_iteration: no fixed point within max_rounds");
}

SweepReport scaling_sweep(const ModeSet& set, const std::vector<double>& eps_list,
                          const SolveOptions& opt) {
    SweepReport rep;
    rep.points.resize(eps_list.size());

    int threads = 1;
    if (const char* env = std::getenv("NSP_THREADS")) threads = std::max(1, std::atoi(env));

    auto run_one = [&](std::size_t i) {
        SweepPoint pt;
        pt.eps = eps_list[i];
        try {
            const SolveResult res = newton_solve(set, eps_list[i], opt);
            pt.converged = res.report.converged;
            pt.residual = res.report.residual_norm;
            pt.distance = res.report.distance;
            pt.c_constant = res.report.c_constant;
        } catch (const excluded_epsilon&) {
            pt.excluded = true;
        }
        return pt;
    };

    if (threads > 1) {
        std::vector<std::future<SweepPoint>> futs(eps_list.size());
        for (std::size_t i = 0; i < eps_list.size(); ++i)
            futs[i] = std::async(std::launch::async, run_one, i);
        for (std::size_t i = 0; i < eps_list.size(); ++i) rep.points[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < eps_list.size(); ++i) rep.points[i] = run_one(i);
    }

    double span_lo = 0.0, span_hi = 0.0;
    std::vector<std::pair<double, double>> fit;  // (log eps, log distance)
    for (const auto& pt : rep.points) {
        if (!pt.converged || pt.distance <= 0.0) continue;
        rep.converged_count++;
        fit.emplace_back(std::log(pt.eps), std::log(pt.distance));
        span_lo = span_lo == 0.0 ? pt.eps : std::min(span_lo, pt.eps);
        span_hi = std::max(span_hi, pt.eps);
    }
    if (rep.converged_count < 4 || std::log10(span_hi / span_lo) < 1.45)
        throw std::runtime_error(
            "scaling_sweep: insufficient data (need >= 4 converged eps spanning >= 1.45 "
            "decades)");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : fit) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = double(fit.size());
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

nlohmann::json solve_report_json(const SolveReport& rep) {
    nlohmann::json nu = nlohmann::json::object();
    for (const auto& [m, v] : rep.nu_out) nu[std::to_string(m)] = v;
    return {
        {"eps", rep.eps},
        {"converged", rep.converged},
        {"iterations", rep.iterations},
        {"residual_norm", rep.residual_norm},
        {"distance", rep.distance},
        {"c_constant", rep.c_constant},
        {"nu_out", nu},
        {"divisor_min", rep.divisor_min},
        {"divisor_argmin", {{"n", rep.divisor_argmin.n}, {"m", rep.divisor_argmin.m}}},
        {"admissible", rep.admissible},
        {"quadratic_tail_c", rep.quad_c},
        {"residual_history", rep.residual_history},
        {"support", rep.support},
    };
}

nlohmann::json sweep_report_json(const SweepReport& rep) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : rep.points)
        pts.push_back({{"eps", pt.eps},
                       {"converged", pt.converged},
                       {"excluded", pt.excluded},
                       {"residual", pt.residual},
                       {"distance", pt.distance},
                       {"c", pt.c_constant}});
    return {{"points", pts}, {"converged_count", rep.converged_count}, {"slope", rep.slope}};
}

std::string sweep_report_csv(const SweepReport& rep) {
    std::string csv = "eps,converged,excluded,residual,distance,c,slope_so_far\n";
    char line[160];
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (const auto& pt : rep.points) {
        double slope_so_far = 0.0;
        if (pt.converged && pt.distance > 0.0) {
            const double x = std::log(pt.eps), y = std::log(pt.distance);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1;
        }
        if (n >= 2) slope_so_far = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        std::snprintf(line, sizeof line, "%.12g,%d,%d,%.12g,%.12g,%.12g,%.12g\n", pt.eps,
                      pt.converged ? 1 : 0, pt.excluded ? 1 : 0, pt.residual, pt.distance,
                      pt.c_constant, slope_so_far);
        csv += line;
    }
    return csv;
}

}  // namespace nsp
