// Exercises the shared-library surface the way an external consumer would.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "nsp.h"

namespace {

struct Str {
    char* s = nullptr;
    ~Str() { nsp_string_free(s); }
    std::string view() const { return s ? std::string(s) : std::string(); }
};

}  // namespace

TEST_CASE("modeset construction and introspection") {
    nsp_modeset* ms = nullptr;
    REQUIRE(nsp_modeset_lemma5(2, &ms) == NSP_OK);
    CHECK(nsp_modeset_size(ms) == 2);
    long entries[2] = {0, 0};
    REQUIRE(nsp_modeset_entries(ms, entries, 2) == NSP_OK);
    CHECK(entries[0] == 7);
    CHECK(entries[1] == 8);

    Str rep;
    REQUIRE(nsp_modeset_report(ms, &rep.s) == NSP_OK);
    const auto j = nlohmann::json::parse(rep.view());
    CHECK(j["valid"] == true);
    CHECK(j["amplitude_squares"]["7"] == "109/7");
    nsp_modeset_free(ms);
}

TEST_CASE("modeset parsing accepts both encodings") {
    nsp_modeset* a = nullptr;
    nsp_modeset* b = nullptr;
    REQUIRE(nsp_modeset_parse("[7,8]", &a) == NSP_OK);
    REQUIRE(nsp_modeset_parse("{\"m_plus\":[7,8]}", &b) == NSP_OK);
    CHECK(nsp_modeset_size(a) == nsp_modeset_size(b));
    nsp_modeset_free(a);
    nsp_modeset_free(b);

    nsp_modeset* bad = nullptr;
    CHECK(nsp_modeset_parse("{\"oops\":1}", &bad) == NSP_ERR_INVALID);
    CHECK(std::strlen(nsp_last_error()) > 0);
}

TEST_CASE("invalid candidates are reported, not thrown") {
    const long modes[2] = {1, 100};
    Str rep;
    REQUIRE(nsp_validate_modeset(modes, 2, &rep.s) == NSP_OK);
    const auto j = nlohmann::json::parse(rep.view());
    CHECK(j["valid"] == false);
    CHECK(j["checks"]["feasible"] == false);
}

TEST_CASE("lemma6 via the C surface") {
    const long gaps[2] = {1, 2};
    nsp_modeset* ms = nullptr;
    REQUIRE(nsp_modeset_lemma6(3, gaps, 2, &ms) == NSP_OK);
    long entries[3];
    REQUIRE(nsp_modeset_entries(ms, entries, 3) == NSP_OK);
    CHECK(entries[0] == 22);
    CHECK(entries[2] == 24);
    nsp_modeset_free(ms);
}

TEST_CASE("amplitudes and series reports") {
    nsp_modeset* ms = nullptr;
    REQUIRE(nsp_modeset_parse("[1]", &ms) == NSP_OK);

    Str amp;
    REQUIRE(nsp_amplitudes_report(ms, &amp.s) == NSP_OK);
    const auto ja = nlohmann::json::parse(amp.view());
    CHECK(ja["amplitude_squares"]["1"] == "1/3");

    Str ser;
    REQUIRE(nsp_series_report(ms, 1e-3, 3, 0, &ser.s) == NSP_OK);
    const auto js = nlohmann::json::parse(ser.view());
    CHECK(js["order"] == 3);
    CHECK(js["per_order"].size() == 4);
    nsp_modeset_free(ms);
}

TEST_CASE("solve: success and the excluded-epsilon code") {
    nsp_modeset* ms = nullptr;
    REQUIRE(nsp_modeset_parse("[1]", &ms) == NSP_OK);

    Str rep;
    REQUIRE(nsp_solve(ms, 1e-3, 120, 12, 1e-10, 40, &rep.s) == NSP_OK);
    const auto j = nlohmann::json::parse(rep.view());
    CHECK(j["converged"] == true);
    CHECK(j["residual_norm"].get<double>() <= 1e-10);

    Str rep2;
    CHECK(nsp_solve(ms, 0.01, 120, 12, 1e-10, 40, &rep2.s) == NSP_ERR_EXCLUDED_EPS);
    nsp_modeset_free(ms);
}

TEST_CASE("scan emits json and csv") {
    Str json, csv;
    REQUIRE(nsp_scan(1e-3, 200, 300, 1, &json.s, &csv.s) == NSP_OK);
    const auto j = nlohmann::json::parse(json.view());
    CHECK(j["good_fraction"].get<double>() >= 0.0);
    CHECK(csv.view().rfind("eps,good\n", 0) == 0);
}

TEST_CASE("verify: quick suite and the unknown-suite error") {
    Str text;
    REQUIRE(nsp_verify("determinant", &text.s) == NSP_OK);
    CHECK(text.view().find("[PASS]") != std::string::npos);

    Str none;
    CHECK(nsp_verify("no-such-suite", &none.s) == NSP_ERR_INVALID);
}

TEST_CASE("version string") {
    CHECK(std::strlen(nsp_version_string()) > 0);
}
