#include "core/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "core/amplitudes.hpp"
#include "core/diophantine.hpp"
#include "core/errors.hpp"
#include "core/lattice.hpp"
#include "core/modeset.hpp"
#include "core/series.hpp"
#include "core/solver.hpp"
#include "core/tree.hpp"

namespace nsp {

namespace {

std::vector<ModeSet> acceptance_modesets() {
    std::vector<ModeSet> sets;
    sets.push_back(ModeSet({1}));
    sets.push_back(construct_lemma5(2));
    sets.push_back(construct_lemma6(3, {1, 2}));
    sets.push_back(construct_lemma5(4));
    return sets;
}

CriterionResult q_residual_criterion() {
    CriterionResult res{"q-residual exactness (N=1..4)", true, "", 0.0};
    std::ostringstream detail;
    for (const ModeSet& set : acceptance_modesets()) {
        const AmplitudeVector av = solve_amplitudes(set);
        double worst = 0.0;
        for (const auto& [m, r] : q_residual_eps0(av)) worst = std::max(worst, std::abs(r));
        bool exact_zero = true;
        for (const auto& [m, r] : q_residual_eps0_exact(av)) exact_zero &= r.is_zero();
        if (worst > 1e-12 || !exact_zero) res.pass = false;
        detail << "N=" << set.n_count() << " max|res|=" << worst
               << (exact_zero ? " exact=0; " : " exact!=0; ");
    }
    res.detail = detail.str();
    return res;
}

CriterionResult determinant_criterion() {
    CriterionResult res{"Lemma 8 determinant", true, "", 0.0};
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    double worst_rel = 0.0;
    for (long n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 8; ++trial) {
            const double p = dist(rng), q = dist(rng);
            Eigen::MatrixXd mat = Eigen::MatrixXd::Constant(n, n, q);
            mat.diagonal().setConstant(p);
            const double direct = mat.partialPivLu().determinant();
            const double closed = det_constant_matrix(n, p, q);
            const double rel = std::abs(closed - direct) / std::max(1.0, std::abs(direct));
            worst_rel = std::max(worst_rel, rel);
        }
    }

    const AmplitudeVector av78 = solve_amplitudes(construct_lemma5(2));
    const LinearizationMatrix lm = build_linearization(av78, 10);
    const double direct_a = lm.resonant.partialPivLu().determinant();
    const double closed_a = to_double(det_resonant_exact(av78));
    const double expected = -28.0 * (109.0 / 7.0) * (4.0 / 7.0);
    const double rel_a = std::max(std::abs(direct_a - expected), std::abs(closed_a - expected)) /
                         std::abs(expected);

    res.pass = worst_rel <= 1e-10 && rel_a <= 1e-12;
    std::ostringstream detail;
    detail << "max rel err (N<=8, random p,q) = " << worst_rel << "; det A({7,8}) direct="
           << direct_a << " closed=" << closed_a << " expected=" << expected;
    res.detail = detail.str();
    return res;
}

CriterionResult tree_oracle_criterion() {
    CriterionResult res{"tree/recursion equivalence (k=1,2)", true, "", 0.0};
    const AmplitudeVector av = solve_amplitudes(ModeSet({1}));
    double worst = 0.0;
    for (double eps : {1e-2, 1e-3}) {
        const FrequencyState fs = FrequencyState::bare(eps);
        SeriesLadder ladder(av, fs, 2);
        ladder.extend_to(2);
        for (int k = 1; k <= 2; ++k) {
            std::set<Mode> targets;
            for (const auto& [p, z] : ladder.coeff(k).coeffs()) targets.insert(p);
            for (const TreeNode& t : enumerate_trees(k, av, fs)) targets.insert(t.momentum);
            for (const Mode& p : targets) {
                if (std::abs(p.m) > 5) continue;
                const double oracle = tree_oracle(k, p.n, p.m, av, fs);
                const double series = ladder.coeff(k).at(p).real();
                worst = std::max(worst, std::abs(oracle - series));
            }
        }
    }
    res.pass = worst <= 1e-12;
    std::ostringstream detail;
    detail << "max |oracle - series| = " << worst << " over eps in {1e-2,1e-3}";
    res.detail = detail.str();
    return res;
}

const std::vector<double> kSweepEps = {1.0e-4, 2.2e-4, 4.7e-4, 1.0e-3, 2.2e-3, 3.0e-3};

CriterionResult scaling_criterion(const ModeSet& set, const SolveOptions& opt,
                                  const std::string& label) {
    CriterionResult res{label, true, "", 0.0};
    SweepReport sweep = scaling_sweep(set, kSweepEps, opt);
    double worst_res = 0.0;
    for (const auto& pt : sweep.points)
        if (pt.converged) worst_res = std::max(worst_res, pt.residual);
    res.pass = sweep.converged_count >= 4 && worst_res <= opt.tol && sweep.slope >= 1.3 &&
               sweep.slope <= 1.7;
    std::ostringstream detail;
    detail << "slope=" << sweep.slope << " converged=" << sweep.converged_count
           << " max residual=" << worst_res;
    res.detail = detail.str();
    return res;
}

CriterionResult lemma1_criterion() {
    CriterionResult res{"Lemma 1 scan (eps=0.01, n,m<=200)", true, "", 0.0};
    const ScaleAssignment sa = assign_scales(Lattice(200, 200), FrequencyState::bare(0.01));
    res.pass = sa.lemma1_ok;
    std::ostringstream detail;
    detail << (sa.lemma1_ok ? "no violation" : "violations found") << "; h0=" << sa.h0;
    res.detail = detail.str();
    return res;
}

CriterionResult lemma4_criterion() {
    CriterionResult res{"Lemma 4 empirical counterterm bound", true, "", 0.0};
    const ModeSet set({1});
    SolveOptions opt;
    opt.n_max = 200;
    opt.m_max = 16;
    const double pinned = 12.0 * to_double(set.norm_sq());  // theory gives ~6||a||^2
    std::ostringstream detail;
    for (double eps : {1e-4, 1e-3}) {
        const SolveResult sol = newton_solve(set, eps, opt);
        double worst_ratio = 0.0;
        for (const auto& [m, v] : sol.report.nu_out)
            worst_ratio = std::max(worst_ratio, std::abs(v) / eps);

        // Symmetry nu_m = nu_{-m}: evaluate the channel sums at +-m directly.
        double s0 = 0.0;
        for (const auto& [p, z] : sol.u.coeffs()) s0 += z.real() * z.real();
        double sym_defect = 0.0;
        for (long m = 1; m <= opt.m_max; ++m) {
            double sb_pos = 0.0, sb_neg = 0.0;
            for (const auto& [p, z] : sol.u.coeffs()) {
                sb_pos += z.real() * sol.u.at(p.n, p.m + 2 * m).real();
                sb_neg += z.real() * sol.u.at(p.n, p.m - 2 * m).real();
            }
            const double nu_pos = -eps * (2.0 * s0 - 2.0 * sb_pos);
            const double nu_neg = -eps * (2.0 * s0 - 2.0 * sb_neg);
            sym_defect = std::max(sym_defect, std::abs(nu_pos - nu_neg));
        }
        if (!sol.report.converged || worst_ratio > pinned || sym_defect > 1e-12)
            res.pass = false;
        detail << "eps=" << eps << " max|nu|/eps=" << worst_ratio
               << " sym defect=" << sym_defect << "; ";
    }
    res.detail = detail.str() + "bound=" + std::to_string(pinned);
    return res;
}

CriterionResult measure_criterion() {
    CriterionResult res{"measure trend of the admissible set", true, "", 0.0};
    const DiophantineParams dio{};
    std::vector<double> eps0 = {1e-2, 1e-3, 1e-4};
    std::vector<double> good, mass;
    for (double e : eps0) {
        const ScanReport rep = scan_epsilon(e, 1000, dio, 1000);
        good.push_back(rep.good_fraction);
        mass.push_back(rep.excluded_measure);
    }
    const bool monotone = good[0] <= good[1] && good[1] <= good[2];

    // Fit log(excluded mass) against log(eps0) over the nonzero masses.
    std::vector<std::pair<double, double>> fit;
    for (std::size_t i = 0; i < eps0.size(); ++i)
        if (mass[i] > 0.0) fit.emplace_back(std::log(eps0[i]), std::log(mass[i]));
    double delta = 0.0;
    bool fit_ok = fit.size() >= 2;
    if (fit_ok) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto& [x, y] : fit) sx += x, sy += y, sxx += x * x, sxy += x * y;
        const double n = double(fit.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        delta = slope - 1.0;
    }
    res.pass = monotone && fit_ok && delta > 0.0;
    std::ostringstream detail;
    detail << "good_fraction = {" << good[0] << ", " << good[1] << ", " << good[2]
           << "}, excluded mass = {" << mass[0] << ", " << mass[1] << ", " << mass[2]
           << "}, fitted 1+delta = " << (1.0 + delta);
    res.detail = detail.str();
    return res;
}

CriterionResult symmetry_criterion() {
    CriterionResult res{"symmetry and reality invariants", true, "", 0.0};
    double worst_odd = 0.0, worst_imag = 0.0;

    // cubic_term output on a random odd field
    {
        std::mt19937 rng(777);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const Lattice lat(60, 10);
        FourierField f(lat);
        for (int i = 0; i < 25; ++i) {
            const std::int64_t n = std::int64_t(rng() % 41) - 20;
            const std::int64_t m = 1 + std::int64_t(rng() % 10);
            f.add(Mode{n, m}, Complex{dist(rng), 0.0});
        }
        f = enforce_oddness(f);
        const FourierField cube = cubic_term(f, f, f, lat);
        worst_odd = std::max(worst_odd, cube.oddness_defect());
        worst_imag = std::max(worst_imag, cube.reality_defect());
    }
    // series ladders
    {
        SeriesLadder one(solve_amplitudes(ModeSet({1})), FrequencyState::bare(1e-3), 4);
        one.extend_to(4);
        SeriesLadder two(solve_amplitudes(construct_lemma5(2)), FrequencyState::bare(1e-3), 3);
        two.extend_to(3);
        for (const SeriesLadder* ladder : {&one, &two})
            for (int k = 0; k <= ladder->order(); ++k) {
                worst_odd = std::max(worst_odd, ladder->coeff(k).oddness_defect());
                for (const auto& [p, z] : ladder->coeff(k).coeffs())
                    if (is_diagonal(p)) worst_imag = std::max(worst_imag, std::abs(z.imag()));
            }
    }
    // Newton solutions
    {
        SolveOptions opt1;
        opt1.n_max = 200;
        opt1.m_max = 16;
        const SolveResult s1 = newton_solve(ModeSet({1}), 1e-3, opt1);
        SolveOptions opt2;
        const SolveResult s2 = newton_solve(construct_lemma5(2), 1e-3, opt2);
        for (const SolveResult* s : {&s1, &s2}) {
            worst_odd = std::max(worst_odd, s->u.oddness_defect());
            for (const auto& [p, z] : s->u.coeffs())
                if (is_diagonal(p)) worst_imag = std::max(worst_imag, std::abs(z.imag()));
        }
    }

    res.pass = worst_odd <= 1e-14 && worst_imag <= 1e-12;
    std::ostringstream detail;
    detail << "max oddness defect = " << worst_odd << ", max diagonal Im = " << worst_imag;
    res.detail = detail.str();
    return res;
}

CriterionResult jacobian_criterion() {
    CriterionResult res{"resonant block vs finite differences", true, "", 0.0};
    double worst = 0.0;
    for (const ModeSet& set : {ModeSet({1}), construct_lemma5(2)}) {
        const AmplitudeVector av = solve_amplitudes(set);
        const auto& modes = set.m_plus();
        const long n = set.n_count();
        const long top = set.max_mode();
        const Lattice lat = Lattice::diagonal_complete(top * top, top);

        // Brute-force Q residual as a function of the amplitude vector.
        auto residual = [&](const std::vector<double>& a) {
            FourierField v0(lat);
            for (long i = 0; i < n; ++i) {
                v0.set(Mode{modes[i] * modes[i], modes[i]}, Complex{a[i], 0.0});
                v0.set(Mode{modes[i] * modes[i], -modes[i]}, Complex{-a[i], 0.0});
            }
            const FourierField cube = cubic_term(v0, v0, v0, lat);
            std::vector<double> r(n);
            for (long i = 0; i < n; ++i)
                r[i] = double(modes[i] * modes[i]) * a[i] -
                       cube.at(modes[i] * modes[i], modes[i]).real();
            return r;
        };

        std::vector<double> a0(n);
        for (long i = 0; i < n; ++i) a0[i] = av.a(modes[i]);
        const LinearizationMatrix lm = build_linearization(av, top);

        const double h = 1e-5;
        for (long j = 0; j < n; ++j) {
            std::vector<double> ap = a0, am = a0;
            ap[j] += h;
            am[j] -= h;
            const auto rp = residual(ap), rm = residual(am);
            for (long i = 0; i < n; ++i) {
                const double fd = (rp[i] - rm[i]) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - lm.resonant(i, j)));
            }
        }
    }
    res.pass = worst <= 1e-6;
    std::ostringstream detail;
    detail << "max |FD - A| = " << worst;
    res.detail = detail.str();
    return res;
}

template <typename F>
CriterionResult timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult res = f();
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace

std::vector<CriterionResult> run_suite(const std::string& suite) {
    std::vector<CriterionResult> out;
    const bool all = suite == "all";

    SolveOptions one_mode;
    one_mode.n_max = 200;
    one_mode.m_max = 16;
    SolveOptions multi_mode;  // defaults: 400 x 20

    if (all || suite == "q-residual") out.push_back(timed(q_residual_criterion));
    if (all || suite == "determinant") out.push_back(timed(determinant_criterion));
    if (all || suite == "tree-oracle") out.push_back(timed(tree_oracle_criterion));
    if (all || suite == "scaling") {
        out.push_back(timed([&] {
            return scaling_criterion(ModeSet({1}), one_mode,
                                     "scaling exponent, one-mode packet");
        }));
        out.push_back(timed([&] {
            return scaling_criterion(construct_lemma5(2), multi_mode,
                                     "scaling exponent, {7,8} packet");
        }));
    }
    if (all || suite == "lemma1") out.push_back(timed(lemma1_criterion));
    if (all || suite == "lemma4") out.push_back(timed(lemma4_criterion));
    if (all || suite == "measure") out.push_back(timed(measure_criterion));
    if (all || suite == "symmetry") out.push_back(timed(symmetry_criterion));
    if (all || suite == "jacobian") out.push_back(timed(jacobian_criterion));

    if (out.empty()) throw std::invalid_argument("run_suite: unknown suite " + suite);
    return out;
}

std::string format_results(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.elapsed_seconds
           << " s): " << r.detail << "\n";
    }
    return os.str();
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace nsp
