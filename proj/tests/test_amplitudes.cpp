#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/amplitudes.hpp"

using namespace nsp;

namespace {

// Cofactor-expansion determinant, the elementary oracle for small matrices.
double det_cofactor(const Eigen::MatrixXd& a) {
    const long n = a.rows();
    if (n == 1) return a(0, 0);
    double det = 0.0;
    for (long j = 0; j < n; ++j) {
        Eigen::MatrixXd minor(n - 1, n - 1);
        for (long r = 1; r < n; ++r)
            for (long c = 0, cc = 0; c < n; ++c)
                if (c != j) minor(r - 1, cc++) = a(r, c);
        det += ((j % 2 == 0) ? 1.0 : -1.0) * a(0, j) * det_cofactor(minor);
    }
    return det;
}

}  // namespace

TEST_CASE("amplitude squares: frozen exact values") {
    const AmplitudeVector one = solve_amplitudes(ModeSet({5}));
    CHECK(one.a_sq(5) == Rational(25, 3));  // A = m0 / sqrt(3)
    CHECK(one.a(5) == doctest::Approx(5.0 / std::sqrt(3.0)).epsilon(1e-15));

    const AmplitudeVector two = solve_amplitudes(construct_lemma5(2));
    CHECK(two.a_sq(7) == Rational(109, 7));
    CHECK(two.a_sq(8) == Rational(4, 7));
    CHECK(two.norm_sq_exact() == Rational(113, 7));

    const AmplitudeVector three = solve_amplitudes(construct_lemma6(3, {1, 2}));
    CHECK(three.norm_sq_exact() == Rational(1589, 11));
    CHECK(three.a_sq(22) == Rational(1032, 11));
    CHECK(three.a_sq(23) == Rational(537, 11));
    CHECK(three.a_sq(24) == Rational(20, 11));
    // consistency: the squares sum back to ||a||^2
    CHECK(three.a_sq(22) + three.a_sq(23) + three.a_sq(24) == three.norm_sq_exact());
}

TEST_CASE("eps=0 Q residual vanishes through the full convolution") {
    for (const ModeSet& set : {ModeSet({1}), construct_lemma5(2), construct_lemma6(3, {1, 2}),
                               construct_lemma5(4)}) {
        const AmplitudeVector av = solve_amplitudes(set);
        for (const auto& [m, r] : q_residual_eps0(av)) {
            CAPTURE(m);
            CHECK(std::abs(r) <= 1e-12);
        }
        for (const auto& [m, r] : q_residual_eps0_exact(av)) {
            CAPTURE(m);
            CHECK(r.is_zero());
        }
    }
}

TEST_CASE("perturbed amplitude produces a first-order residual") {
    const AmplitudeVector av = solve_amplitudes(construct_lemma5(2));
    const LinearizationMatrix lm = build_linearization(av, 8);
    const double delta = 1e-3 * av.a(8);

    const long top = 8;
    const Lattice lat = Lattice::diagonal_complete(top * top, top);
    FourierField v0(lat);
    v0.set(Mode{49, 7}, Complex{av.a(7), 0.0});
    v0.set(Mode{49, -7}, Complex{-av.a(7), 0.0});
    v0.set(Mode{64, 8}, Complex{av.a(8) + delta, 0.0});
    v0.set(Mode{64, -8}, Complex{-(av.a(8) + delta), 0.0});
    const FourierField cube = cubic_term(v0, v0, v0, lat);

    const double r8 = 64.0 * (av.a(8) + delta) - cube.at(64, 8).real();
    const double r7 = 49.0 * av.a(7) - cube.at(49, 7).real();
    // columns of the resonant block predict the response to the a_8 bump
    CHECK(r8 == doctest::Approx(lm.resonant(1, 1) * delta).epsilon(5e-3));
    CHECK(r7 == doctest::Approx(lm.resonant(0, 1) * delta).epsilon(5e-3));
    CHECK(std::abs(r8) > 1e-6);
}

TEST_CASE("det_D closed form") {
    CHECK(det_constant_matrix(1, 4.25, 9.0) == doctest::Approx(4.25));
    // N=2, p=6, q=8: (p-q)(p+q) = -28 = det [[6,8],[8,6]]
    CHECK(det_constant_matrix(2, 6, 8) == doctest::Approx(-28.0));
    Eigen::MatrixXd d2(2, 2);
    d2 << 6, 8, 8, 6;
    CHECK(det_cofactor(d2) == doctest::Approx(-28.0));
    // N=3, p=6, q=8: (-2)^2 (6+16) = 88
    CHECK(det_constant_matrix(3, 6, 8) == doctest::Approx(88.0));
    Eigen::MatrixXd d3 = Eigen::MatrixXd::Constant(3, 3, 8.0);
    d3.diagonal().setConstant(6.0);
    CHECK(det_cofactor(d3) == doctest::Approx(88.0));
}

TEST_CASE("det_D vs cofactor oracle on random entries") {
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (long n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 4; ++trial) {
            const double p = dist(rng), q = dist(rng);
            Eigen::MatrixXd mat = Eigen::MatrixXd::Constant(n, n, q);
            mat.diagonal().setConstant(p);
            const double oracle = det_cofactor(mat);
            CHECK(det_constant_matrix(n, p, q) ==
                  doctest::Approx(oracle).epsilon(1e-10).scale(std::max(1.0, std::abs(oracle))));
        }
    }
}

TEST_CASE("resonant block: frozen {7,8} values and the diagonal identity") {
    const AmplitudeVector av = solve_amplitudes(construct_lemma5(2));
    const LinearizationMatrix lm = build_linearization(av, 10);

    const double det_direct = lm.resonant.determinant();
    const double det_closed = to_double(det_resonant_exact(av));
    const double expected = -28.0 * (109.0 / 7.0) * (4.0 / 7.0);  // -12208/49
    CHECK(det_direct == doctest::Approx(expected).epsilon(1e-12));
    CHECK(det_closed == doctest::Approx(expected).epsilon(1e-14));
    CHECK(det_resonant_exact(av) == Rational(-12208, 49));

    // A_{m,m} = m^2 - 4||a||^2 - 5 a_m^2 equals -6 a_m^2 on the solution
    for (long i = 0; i < 2; ++i) {
        const long m = lm.modes[i];
        const double lhs =
            double(m) * m - 4.0 * av.norm_sq() - 5.0 * to_double(av.a_sq(m));
        CHECK(lhs == doctest::Approx(-6.0 * to_double(av.a_sq(m))).epsilon(1e-12));
        CHECK(lm.resonant(i, i) == doctest::Approx(lhs).epsilon(1e-12));
    }

    // off-diagonal -8 a_m a_m'
    CHECK(lm.resonant(0, 1) == doctest::Approx(-8.0 * av.a(7) * av.a(8)).epsilon(1e-14));

    // tail diagonal at m=1: 1 - 452/7 = -445/7, nonzero
    CHECK(lm.tail.at(1) == doctest::Approx(-445.0 / 7.0).epsilon(1e-14));
    for (const auto& [m, t] : lm.tail) CHECK(t != 0.0);
}

TEST_CASE("inverse of the resonant block") {
    const AmplitudeVector av = solve_amplitudes(construct_lemma5(2));
    const LinearizationMatrix lm = build_linearization(av, 8);
    const Eigen::MatrixXd inv = invert_resonant_block(lm);
    CHECK((inv * lm.resonant - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);

    // identity in, identity out
    LinearizationMatrix id;
    id.modes = {1, 2};
    id.resonant = Eigen::MatrixXd::Identity(2, 2);
    CHECK((invert_resonant_block(id) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);

    // one-mode block is the scalar -2 m0^2
    const AmplitudeVector one = solve_amplitudes(ModeSet({3}));
    const LinearizationMatrix lm1 = build_linearization(one, 5);
    CHECK(lm1.resonant(0, 0) == doctest::Approx(-2.0 * 9.0).epsilon(1e-13));
    CHECK(invert_resonant_block(lm1)(0, 0) == doctest::Approx(-1.0 / 18.0).epsilon(1e-13));

    LinearizationMatrix sing;
    sing.modes = {1};
    sing.resonant = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(invert_resonant_block(sing), std::runtime_error);
}

TEST_CASE("nonsingularity margin for validated multi-mode sets") {
    for (const ModeSet& set :
         {construct_lemma5(2), construct_lemma6(3, {1, 2}), construct_lemma5(4),
          construct_lemma6(5, {1, 3, 4, 9})}) {
        const long n = set.n_count();
        CHECK(6 < (n - 1) * 8);  // p < (N-1) q for N >= 2
        const AmplitudeVector av = solve_amplitudes(set);
        Rational prod = 1;
        for (long m : set.m_plus()) prod *= av.a_sq(m);
        const Rational bound = 28 * prod;
        CHECK(boost::multiprecision::abs(det_resonant_exact(av)) >= bound);
    }
}

TEST_CASE("resonant block matches finite differences of the brute-force residual") {
    const ModeSet set = construct_lemma5(2);
    const AmplitudeVector av = solve_amplitudes(set);
    const LinearizationMatrix lm = build_linearization(av, 8);
    const auto& modes = set.m_plus();
    const Lattice lat = Lattice::diagonal_complete(64, 8);

    auto residual = [&](double a7, double a8) {
        FourierField v0(lat);
        v0.set(Mode{49, 7}, Complex{a7, 0.0});
        v0.set(Mode{49, -7}, Complex{-a7, 0.0});
        v0.set(Mode{64, 8}, Complex{a8, 0.0});
        v0.set(Mode{64, -8}, Complex{-a8, 0.0});
        const FourierField cube = cubic_term(v0, v0, v0, lat);
        return std::pair{49.0 * a7 - cube.at(49, 7).real(),
                         64.0 * a8 - cube.at(64, 8).real()};
    };

    const double h = 1e-5;
    const double a7 = av.a(modes[0]), a8 = av.a(modes[1]);
    const auto [rp7, rp8] = residual(a7 + h, a8);
    const auto [rm7, rm8] = residual(a7 - h, a8);
    CHECK(std::abs((rp7 - rm7) / (2 * h) - lm.resonant(0, 0)) <= 1e-6);
    CHECK(std::abs((rp8 - rm8) / (2 * h) - lm.resonant(1, 0)) <= 1e-6);
}
