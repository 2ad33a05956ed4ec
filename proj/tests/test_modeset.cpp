#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "core/modeset.hpp"

using namespace nsp;

TEST_CASE("structural validation") {
    CHECK_THROWS_AS(validate_modeset({}), std::invalid_argument);
    CHECK_THROWS_AS(validate_modeset({3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(validate_modeset({5, 4}), std::invalid_argument);
    CHECK_THROWS_AS(validate_modeset({0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(validate_modeset({-2, 3}), std::invalid_argument);
}

TEST_CASE("consecutive block of Lemma 5 at N=2 is {7,8}") {
    const ModeSet s = construct_lemma5(2);
    CHECK(s.m_plus() == std::vector<long>{7, 8});
    CHECK(s.weight() == 113);
    CHECK(lemma5_chosen_j(2) == 0);
    // 4M = 452 and 452 mod 7 = 4, so 4||a||^2 = 452/7 is not an integer.
    CHECK(s.norm_sq() == Rational(113, 7));

    const ModeSetReport rep = validate_modeset({7, 8});
    CHECK(rep.valid());
    CHECK_FALSE(rep.four_norm_sq_integer);
    CHECK(rep.amplitude_sq.at(7) == Rational(109, 7));
    CHECK(rep.amplitude_sq.at(8) == Rational(4, 7));
}

TEST_CASE("Lemma 5 j-selection: never do both candidates collapse") {
    for (long n = 2; n <= 12; ++n) {
        int integer_count = 0;
        for (int j = 0; j <= 1; ++j) {
            const long m_n = (4 * n + j) * (n - 1);
            Integer m = 0;
            for (long k = 1; k <= n; ++k) {
                const long v = m_n - (n - k);
                m += Integer(v) * v;
            }
            if (4 * m % (4 * n - 1) == 0) ++integer_count;
        }
        CHECK(integer_count <= 1);
        CHECK_NOTHROW(construct_lemma5(n));
    }
    CHECK_THROWS_AS(construct_lemma5(1), std::invalid_argument);
}

TEST_CASE("infeasible candidate {1,100}") {
    const ModeSetReport rep = validate_modeset({1, 100});
    CHECK_FALSE(rep.feasible);
    CHECK_FALSE(rep.valid());
    // 100^2 = 10000 > 40004/7
    CHECK(rep.four_norm_sq == Rational(40004, 7));
    CHECK_THROWS_AS(ModeSet({1, 100}), std::invalid_argument);
}

TEST_CASE("singletons are always nondegenerate") {
    // 4 m0^2 / 3 is never a perfect square, so every singleton validates.
    for (long m0 : {1L, 2L, 3L, 7L, 12L, 49L}) {
        const ModeSetReport rep = validate_modeset({m0});
        CHECK(rep.valid());
        CHECK(rep.amplitude_sq.at(m0) == Rational(Integer(m0) * m0, 3));
    }
    CHECK(validate_modeset({3}).four_norm_sq == Rational(12));
}

TEST_CASE("Lemma 6 at N=3, gaps {1,2} gives {22,23,24}") {
    const ModeSet s = construct_lemma6(3, {1, 2});
    CHECK(s.m_plus() == std::vector<long>{22, 23, 24});
    CHECK(s.weight() == 1589);
    CHECK(4 * s.norm_sq() == Rational(6356, 11));

    // minimality: one step down with the same gaps is infeasible
    const ModeSetReport down = validate_modeset({21, 22, 23});
    CHECK_FALSE(down.feasible);
}

TEST_CASE("Lemma 6 with unit gap reproduces the Lemma 5 family") {
    CHECK(construct_lemma6(2, {1}).m_plus() == construct_lemma5(2).m_plus());
}

TEST_CASE("Lemma 6 argument guards") {
    CHECK_THROWS_AS(construct_lemma6(1, {}), std::invalid_argument);
    CHECK_THROWS_AS(construct_lemma6(3, {1}), std::invalid_argument);
    CHECK_THROWS_AS(construct_lemma6(3, {2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(construct_lemma6(3, {0, 1}), std::invalid_argument);
}

TEST_CASE("constructed sets always validate, with positive amplitude squares") {
    std::vector<ModeSet> sets;
    for (long n = 2; n <= 6; ++n) sets.push_back(construct_lemma5(n));
    sets.push_back(construct_lemma6(2, {3}));
    sets.push_back(construct_lemma6(3, {1, 2}));
    sets.push_back(construct_lemma6(3, {2, 5}));
    sets.push_back(construct_lemma6(4, {1, 2, 3}));
    sets.push_back(construct_lemma6(4, {2, 3, 7}));
    sets.push_back(construct_lemma6(5, {1, 3, 4, 9}));

    for (const ModeSet& s : sets) {
        const ModeSetReport rep = validate_modeset(s.m_plus());
        CHECK(rep.valid());
        Rational total = 0;
        for (long m : s.m_plus()) {
            CHECK(s.amplitude_sq(m) > 0);
            total += s.amplitude_sq(m);
        }
        CHECK(total == s.norm_sq());  // sum a_m^2 = ||a||^2
    }
}

TEST_CASE("Lemma 6 outputs are wave packets: window width equals the top gap") {
    for (const auto& gaps : std::vector<std::vector<long>>{{1, 2}, {2, 5}, {1, 2, 3}}) {
        const ModeSet s = construct_lemma6(static_cast<long>(gaps.size()) + 1, gaps);
        CHECK(s.m_plus().front() == s.max_mode() - gaps.back());
        CHECK(s.m_plus().front() > 0);
    }
}

TEST_CASE("Lemma 6 squeezes 4||a||^2 between consecutive squares") {
    const ModeSet s = construct_lemma6(3, {1, 2});
    const Rational four = 4 * s.norm_sq();
    const Integer top = s.max_mode();
    CHECK(four > Rational(top * top));
    CHECK(four < Rational((top + 1) * (top + 1)));
}

TEST_CASE("json forms") {
    CHECK(modeset_from_json(nlohmann::json::parse("[7,8]")).m_plus() ==
          std::vector<long>{7, 8});
    CHECK(modeset_from_json(nlohmann::json::parse("{\"m_plus\":[7,8]}")).m_plus() ==
          std::vector<long>{7, 8});
    CHECK_THROWS_AS(modeset_from_json(nlohmann::json::parse("{\"x\":1}")),
                    std::invalid_argument);

    const auto rep = validate_modeset({7, 8});
    const nlohmann::json j = modeset_report_json(rep);
    CHECK(j["m_plus"] == nlohmann::json::parse("[7,8]"));
    CHECK(j["amplitude_squares"]["7"] == "109/7");
    CHECK(j["valid"] == true);
}
