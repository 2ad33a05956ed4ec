#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/solver.hpp"

using namespace nsp;

namespace {

SolveOptions small_one_mode() {
    SolveOptions opt;
    opt.n_max = 120;
    opt.m_max = 12;
    return opt;
}

}  // namespace

TEST_CASE("eps = 0 returns the packet exactly") {
    const SolveResult res = newton_solve(ModeSet({1}), 0.0, small_one_mode());
    CHECK(res.report.converged);
    CHECK(res.report.residual_norm == 0.0);
    CHECK(res.report.distance == 0.0);
    CHECK(res.u.support_size() == 2);
    CHECK(res.u.at(1, 1).real() == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("one-mode solve at eps = 1e-3") {
    const SolveResult res = newton_solve(ModeSet({1}), 1e-3, small_one_mode());
    REQUIRE(res.report.converged);
    CHECK(res.report.admissible);
    CHECK(res.report.residual_norm <= 1e-10);
    CHECK(res.report.iterations <= 15);

    // distance = sqrt(eps) ||u - u0||, of size C eps^1.5
    CHECK(res.report.distance > 0.0);
    CHECK(res.report.c_constant > 0.0);
    CHECK(res.report.c_constant < 1e3);
    MESSAGE("measured C = distance/eps^1.5 = ", res.report.c_constant);

    // gauge structure: the cubic keeps every excited mode at n = m0^2
    for (const auto& [p, z] : res.u.coeffs()) CHECK(p.n == 1);

    // oddness and reality
    CHECK(res.u.oddness_defect() <= 1e-14);
    CHECK(res.u.reality_defect() == 0.0);
}

TEST_CASE("excluded eps raises the dedicated error") {
    CHECK_THROWS_AS(newton_solve(ModeSet({1}), 0.01, small_one_mode()), excluded_epsilon);
    try {
        newton_solve(ModeSet({1}), 0.01, small_one_mode());
    } catch (const excluded_epsilon& e) {
        CHECK(e.n() == 100);
        CHECK(e.m() == 101);
    }
}

TEST_CASE("measured counterterms match the leading channel sums") {
    // nu_m = -eps(2 sum u^2 - 2 Sb): for one mode, the b channel contributes
    // only at |m| = m0, so nu_m0/eps -> -6 alpha and nu_m/eps -> -4 alpha.
    const double eps = 1e-3;
    const SolveResult res = newton_solve(ModeSet({1}), eps, small_one_mode());
    const double alpha = 1.0 / 3.0;
    CHECK(res.report.nu_out.at(1) / eps ==
          doctest::Approx(-6.0 * alpha).epsilon(0.02));
    for (long m : {2L, 3L, 5L})
        CHECK(res.report.nu_out.at(m) / eps ==
              doctest::Approx(-4.0 * alpha).epsilon(0.02));
}

TEST_CASE("newton tail contracts at least quadratically") {
    const SolveResult res = newton_solve(ModeSet({1}), 1e-3, small_one_mode());
    const auto& hist = res.report.residual_history;
    REQUIRE(hist.size() >= 2);
    for (std::size_t i = 0; i + 1 < hist.size(); ++i) {
        if (hist[i] >= 1e-4) continue;
        CHECK(hist[i + 1] <= std::max(1e4 * hist[i] * hist[i], 1e-13));
    }
    MESSAGE("quadratic-tail constant: ", res.report.quad_c);
}

TEST_CASE("multi-mode solve and truncation robustness") {
    const ModeSet set = construct_lemma5(2);
    SolveOptions coarse;
    coarse.n_max = 200;
    coarse.m_max = 16;
    SolveOptions fine;
    fine.n_max = 300;
    fine.m_max = 20;

    const double eps = 1e-4;
    const SolveResult a = newton_solve(set, eps, coarse);
    const SolveResult b = newton_solve(set, eps, fine);
    REQUIRE(a.report.converged);
    REQUIRE(b.report.converged);

    double worst = 0.0;
    for (const auto& [p, z] : a.u.coeffs())
        worst = std::max(worst, std::abs(z - b.u.at(p)));
    CHECK(worst <= 1e-8);
}

TEST_CASE("newton solution agrees with the summed series through order 2") {
    const ModeSet set({1});
    const NormParams norm(0.05);
    auto difference = [&](double eps) {
        // tight tolerance: the eps^3 truncation gap must sit above the
        // solver's own support-tail noise
        SolveOptions opt = small_one_mode();
        opt.tol = 1e-12;
        const SolveResult sol = newton_solve(set, eps, opt);
        REQUIRE(sol.report.converged);
        SeriesLadder ladder(solve_amplitudes(set), FrequencyState::bare(eps), 2);
        ladder.extend_to(2);
        const FourierField s = ladder.sum(1.0).rehomed(sol.u.lattice());
        return weighted_norm(sol.u - s, norm);
    };
    const double d1 = difference(1e-3);
    const double d3 = difference(3e-3);
    CHECK(d1 < 1e-5);
    // truncation error decays at least like eps^2 across the pair
    CHECK(d3 / d1 >= 9.0 * 0.6);
}

TEST_CASE("frequency iteration reaches its fixed point quickly") {
    const FrequencyIterationResult fi = frequency_iteration(ModeSet({1}), 1e-3, 3);
    CHECK(fi.rounds <= 10);
    CHECK(fi.final_increment <= 1e-12);
    CHECK(fi.fs.nu_at(1) / 1e-3 == doctest::Approx(-2.0).epsilon(0.05));

    // counterterm smallness across two decades: max |nu|/eps below 12 ||a||^2 = 4
    for (double eps : {1e-4, 1e-3, 1e-2}) {
        const FrequencyIterationResult r = frequency_iteration(ModeSet({1}), eps, 3);
        CHECK(r.fs.c3_estimate() <= 4.0);
    }

    const FrequencyIterationResult tiny = frequency_iteration(ModeSet({1}), 1e-4, 3);
    // nu -> 0 with eps
    CHECK(std::abs(tiny.fs.nu_at(1)) < std::abs(fi.fs.nu_at(1)));
}

TEST_CASE("frequency iteration is split independent") {
    const auto custom_split = [](double eps, const std::map<long, double>& nu) {
        std::map<long, double> a, b;
        for (const auto& [m, v] : nu) {
            a[m] = v / 3.0;
            b[m] = -2.0 * v / 3.0;
        }
        return FrequencyState::with_split(eps, a, b);
    };
    const ModeSet set({1});
    const FrequencyIterationResult d = frequency_iteration(set, 1e-3, 3);
    const FrequencyIterationResult c = frequency_iteration(set, 1e-3, 3, custom_split);

    double worst_nu = 0.0;
    for (const auto& [m, v] : d.fs.nu)
        worst_nu = std::max(worst_nu, std::abs(v - c.fs.nu_at(m)));
    CHECK(worst_nu <= 1e-10);

    const AmplitudeVector av = solve_amplitudes(set);
    SeriesLadder ld(av, d.fs, 3), lc(av, c.fs, 3);
    ld.extend_to(3);
    lc.extend_to(3);
    const FourierField sum_d = ld.sum(1.0);
    const FourierField sum_c = lc.sum(1.0);
    double worst = 0.0;
    for (const auto& [p, z] : sum_d.coeffs())
        worst = std::max(worst, std::abs(z - sum_c.at(p)));
    CHECK(worst <= 1e-10);
}

TEST_CASE("sweep rejects insufficient data") {
    SolveOptions opt = small_one_mode();
    CHECK_THROWS_AS(scaling_sweep(ModeSet({1}), {1e-3, 2e-3, 3e-3}, opt),
                    std::runtime_error);
}

TEST_CASE("light one-mode scaling sweep") {
    SolveOptions opt;
    opt.n_max = 100;
    opt.m_max = 10;
    const SweepReport rep =
        scaling_sweep(ModeSet({1}), {1e-4, 3e-4, 1e-3, 3e-3}, opt);
    CHECK(rep.converged_count == 4);
    CHECK(rep.slope >= 1.3);
    CHECK(rep.slope <= 1.7);
    MESSAGE("one-mode sweep slope: ", rep.slope);
}
