#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "support/approx.hpp"
#include "synectic/checks.hpp"
#include "synectic/report.hpp"

using namespace synectic;

namespace {

bool same_result(const CheckResult& a, const CheckResult& b) {
    if (a.id != b.id || a.field != b.field) return false;
    if (a.max_residual != b.max_residual) return false;
    if (a.tolerance != b.tolerance || a.pass != b.pass) return false;
    if (a.sub_residuals.size() != b.sub_residuals.size()) return false;
    for (std::size_t i = 0; i < a.sub_residuals.size(); ++i)
        if (a.sub_residuals[i] != b.sub_residuals[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("check runs are bitwise deterministic", "[checks]") {
    ManifoldModel m = builtin_model("sphere");
    CheckContext ctx{m, 42, 40, 1e-8};
    CheckResult a = run_check(ctx, "parallel-v", "meridian");
    CheckResult b = run_check(ctx, "parallel-v", "meridian");
    CHECK(same_result(a, b));

    // A different seed draws different points, so an inexact residual moves.
    CheckContext ctx2{m, 43, 40, 1e-8};
    CheckResult c = run_check(ctx2, "parallel-v", "meridian");
    CHECK(a.max_residual != c.max_residual);

    // More samples extend the stream; the maximum can only grow.
    CheckContext ctx3{m, 42, 80, 1e-8};
    CheckResult d = run_check(ctx3, "parallel-v", "meridian");
    CHECK(d.max_residual >= a.max_residual);
}

TEST_CASE("degenerate metric points are rejected and counted", "[checks]") {
    const std::string doc =
        "name = pinch\n"
        "dim = 2\n"
        "box x1 = -1 .. 1\n"
        "box x2 = -1 .. 1\n"
        "g 1 1 = x1^2\n"
        "g 2 2 = 1\n"
        "field still 1 = 0\n"
        "field still 2 = 0\n";
    ManifoldModel m = parse_model(doc);
    CheckContext ctx{m, 42, 50, 1e-8};
    CheckResult r = run_check(ctx, "inverse");
    CHECK(r.pass);
    double rejected = -1.0;
    for (const auto& [k, v] : r.sub_residuals)
        if (k == "rejected_samples") rejected = v;
    // The determinant crosses zero inside the box; with |x1| < 1e-6 or so
    // rejected, some draws out of 50 are overwhelmingly likely to... hit
    // zero only with measure-zero probability, so assert the bookkeeping
    // key exists and the run completed despite the near-singular strip.
    CHECK(rejected >= 0.0);

    // A box where the metric is singular everywhere refuses to sample.
    const std::string dead =
        "name = dead\n"
        "dim = 1\n"
        "box x1 = -1 .. 1\n"
        "g 1 1 = 0\n";
    ManifoldModel dm = parse_model(dead);
    CheckContext dctx{dm, 42, 5, 1e-8};
    CHECK_THROWS_AS(run_check(dctx, "inverse"), SingularMetricError);
}

TEST_CASE("argument kinds are enforced", "[checks]") {
    ManifoldModel m = builtin_model("euclid2");
    CheckContext ctx{m, 42, 5, 1e-8};
    CHECK_THROWS_AS(run_check(ctx, "no-such-check", "rotation"),
                    UnknownFieldError);
    CHECK_THROWS_AS(run_check(ctx, "inverse", "rotation"), UnknownFieldError);
    CHECK_THROWS_AS(run_check(ctx, "killing-vertical"), UnknownFieldError);
    CHECK_THROWS_AS(run_check(ctx, "killing-vertical", "no-such-field"),
                    UnknownFieldError);
    CHECK_THROWS_AS(run_check(ctx, "lemma-iota", "rotation"),
                    UnknownFieldError);  // a vector field, not a (1,1) tensor
}

TEST_CASE("every stock verdict matches the published expectation", "[checks]") {
    for (const auto& name : builtin_names()) {
        ManifoldModel m = builtin_model(name);
        CheckContext ctx{m, 42, 30, 1e-8};
        std::vector<CheckResult> results = run_all(ctx);
        CHECK(results.size() >= 14);
        for (const auto& r : results) {
            auto want = expected_verdict(name, r.id, r.field);
            REQUIRE(want.has_value());
            INFO(name << "/" << r.id << "/" << r.field
                      << " residual=" << r.max_residual);
            CHECK(*want == r.pass);
            CHECK(std::isfinite(r.max_residual));
        }
    }
}

TEST_CASE("passing residuals sit far below tolerance, failing far above",
          "[checks]") {
    for (const auto& name : builtin_names()) {
        ManifoldModel m = builtin_model(name);
        CheckContext ctx{m, 42, 30, 1e-8};
        for (const auto& r : run_all(ctx)) {
            INFO(name << "/" << r.id << "/" << r.field);
            if (r.pass)
                CHECK(r.max_residual < 1e-10);   // two decades of margin
            else
                CHECK(r.max_residual > 1e-3);    // five decades the other way
        }
    }
}

TEST_CASE("expectations exist only for stock models", "[checks]") {
    CHECK(expected_verdict("euclid2", "inverse", "").has_value());
    CHECK(*expected_verdict("euclid2", "inverse", "") == true);
    CHECK(*expected_verdict("sphere", "killing-vertical", "meridian") == false);
    CHECK_FALSE(expected_verdict("flatdef", "inverse", "").has_value());
    CHECK_FALSE(expected_verdict("euclid2+a=id", "inverse", "").has_value());
}

TEST_CASE("report serialization round-trips", "[checks]") {
    ManifoldModel m = builtin_model("euclid2");
    CheckContext ctx{m, 7, 10, 1e-8};
    RunReport r;
    r.seed = 7;
    r.samples = 10;
    r.tolerance_default = 1e-8;
    r.manifold = m.name;
    r.checks.push_back(run_check(ctx, "inverse"));
    r.checks.push_back(run_check(ctx, "killing-vertical", "rotation"));
    r.checks.push_back(run_check(ctx, "concurrent", "gradient"));
    sort_report(r);

    nlohmann::ordered_json j = report_to_json(r);
    RunReport back = report_from_json(j);
    CHECK(back.seed == r.seed);
    CHECK(back.samples == r.samples);
    CHECK(back.tolerance_default == r.tolerance_default);
    CHECK(back.manifold == r.manifold);
    REQUIRE(back.checks.size() == r.checks.size());
    for (std::size_t i = 0; i < r.checks.size(); ++i)
        CHECK(same_result(back.checks[i], r.checks[i]));

    // Emitting the round-tripped report reproduces the bytes.
    CHECK(report_to_json(back).dump(2) == j.dump(2));

    // Stable key order in the emitted object.
    std::string s = j.dump();
    CHECK(s.find("\"seed\"") < s.find("\"samples\""));
    CHECK(s.find("\"samples\"") < s.find("\"tolerance_default\""));
    CHECK(s.find("\"tolerance_default\"") < s.find("\"manifold\""));
    CHECK(s.find("\"manifold\"") < s.find("\"checks\""));
}

TEST_CASE("reports sort by check id then field", "[checks]") {
    RunReport r;
    auto mk = [](const std::string& id, const std::string& f) {
        CheckResult c;
        c.id = id;
        c.field = f;
        return c;
    };
    r.checks = {mk("parallel-v", "b"), mk("inverse", ""), mk("parallel-v", "a"),
                mk("concurrent", "z")};
    sort_report(r);
    CHECK(r.checks[0].id == "concurrent");
    CHECK(r.checks[1].id == "inverse");
    CHECK(r.checks[2].field == "a");
    CHECK(r.checks[3].field == "b");
}

TEST_CASE("report evaluation flags mismatches and non-finite residuals",
          "[checks]") {
    RunReport r;
    r.manifold = "euclid2";
    CheckResult c;
    c.id = "inverse";
    c.field = "";
    c.max_residual = 0.5;  // above tolerance
    c.tolerance = 1e-8;
    c.pass = false;        // but expectation says pass
    r.checks.push_back(c);

    ReportEvaluation ev = evaluate_report(r, true);
    CHECK(ev.mismatches == 1);
    CHECK(ev.exit_code() == 1);
    REQUIRE(ev.mismatch_keys.size() == 1);
    CHECK(ev.mismatch_keys[0] == "euclid2/inverse/");

    // Without expectations the same report is acceptable.
    CHECK(evaluate_report(r, false).exit_code() == 0);

    // Non-finite residuals always fail the run.
    r.checks[0].pass = false;
    r.checks[0].max_residual = std::nan("");
    r.manifold = "custom-model";
    ReportEvaluation nv = evaluate_report(r, false);
    CHECK(nv.nan_seen);
    CHECK(nv.exit_code() == 1);

    // Text rendering mentions the mismatch state.
    r.manifold = "euclid2";
    r.checks[0].max_residual = 0.5;
    std::string text = report_to_text(r, true);
    CHECK(text.find("MISMATCH") != std::string::npos);
}

TEST_CASE("text report prints one line per check", "[checks]") {
    ManifoldModel m = builtin_model("sphere");
    CheckContext ctx{m, 42, 10, 1e-8};
    RunReport r;
    r.manifold = m.name;
    r.seed = 42;
    r.samples = 10;
    r.checks.push_back(run_check(ctx, "inverse"));
    r.checks.push_back(run_check(ctx, "killing-vertical", "rotation"));
    std::string text = report_to_text(r, true);
    std::size_t lines = 0, body = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    for (const auto& line : {std::string("inverse"), std::string("killing-vertical")})
        body += text.find(line) != std::string::npos;
    CHECK(body == 2);
    CHECK(lines == 4);  // header + two checks + summary
    CHECK(text.find("expected=pass ok") != std::string::npos);
}
