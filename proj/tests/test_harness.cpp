#include <catch2/catch.hpp>

#include "oracle_p3_run.hpp"
#include "su4check/report.hpp"
#include "su4check/suites.hpp"

using namespace su4check;

TEST_CASE("reports are deterministic modulo timestamps") {
    auto a = report_to_json(run_counting(5));
    auto b = report_to_json(run_counting(5));
    CHECK(reports_equal_modulo_timestamps(a, b));
    CHECK(a["suite"] == "counting");
    CHECK(a["prime"] == 5);
    REQUIRE(a.contains("checks"));
    REQUIRE(a.contains("pass"));
    // checks are sorted by id
    std::string prev;
    for (auto& c : a["checks"]) {
        std::string id = c["id"];
        CHECK(prev <= id);
        prev = id;
        CHECK(c.contains("anchor"));
        CHECK(c["expected"].is_string());
        CHECK(c["computed"].is_string());
        CHECK(c["pass"].is_boolean());
        CHECK(c["ms"].is_number());
    }
}

TEST_CASE("timestamp normalization only touches the ms fields") {
    auto a = report_to_json(run_omega4(5));
    auto n = normalize_timestamps(a);
    CHECK(n["checks"][0]["ms"] == 0.0);
    auto a2 = a;
    a2["checks"][0]["computed"] = "tampered";
    CHECK_FALSE(reports_equal_modulo_timestamps(a, a2));
}

TEST_CASE("library structure-oracle run matches the independent oracle") {
    auto lib = report_to_json(run_structure_oracle(3));
    auto orc = report_to_json(oracle3::oracle_structure_report());
    CHECK(reports_equal_modulo_timestamps(lib, orc));
}
