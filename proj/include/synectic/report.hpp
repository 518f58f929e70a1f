#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "synectic/checks.hpp"

namespace synectic {

struct RunReport {
    std::uint64_t seed = 42;
    std::size_t samples = 100;
    double tolerance_default = 1e-8;
    std::string manifold;
    std::vector<CheckResult> checks;
};

// Deterministic report order: check id, then field name.
inline void sort_report(RunReport& r) {
    std::stable_sort(r.checks.begin(), r.checks.end(),
                     [](const CheckResult& a, const CheckResult& b) {
                         if (a.id != b.id) return a.id < b.id;
                         return a.field < b.field;
                     });
}

// ---------------------------------------------------------------------------
// Expected verdicts for the stock models
// ---------------------------------------------------------------------------

// Every (model, check, field) combination the stock catalog produces has a
// fixed expected verdict; the combinations listed here pass, all others
// fail.  Each entry traces to a property of the underlying geometry (for
// example: a lift preserves the synectic metric exactly when the base
// field preserves the base metric and the deformation tensor).
inline const std::set<std::string>& builtin_pass_set() {
    static const std::set<std::string> s = {
        // euclid2 — flat plane, zero deformation.
        "euclid2/killing-vertical/rotation",
        "euclid2/killing-vertical/translation",
        "euclid2/killing-complete/rotation",
        "euclid2/killing-complete/translation",
        "euclid2/harmonic-vertical/dilation",
        "euclid2/harmonic-vertical/gradient",
        "euclid2/harmonic-vertical/position",
        "euclid2/harmonic-vertical/translation",
        "euclid2/harmonic-complete/translation",
        "euclid2/parallel-v/translation",
        "euclid2/parallel-c/translation",
        "euclid2/parallel-h/translation",
        "euclid2/concurrent/dilation",
        "euclid2/concurrent/gradient",
        "euclid2/concurrent/position",
        "euclid2/concurrent/translation",
        "euclid2/lemma-iota/zero",
        "euclid2/metric-compat-lc/",
        "euclid2/metric-compat-mc/",
        "euclid2/inverse/",
        "euclid2/remark-decomposition/",
        "euclid2/lie-block-decomp/",
        // sphere — round metric, zero deformation.
        "sphere/killing-vertical/rotation",
        "sphere/killing-complete/rotation",
        "sphere/harmonic-vertical/meridian",
        "sphere/lemma-iota/zero",
        "sphere/metric-compat-lc/",
        "sphere/metric-compat-mc/",
        "sphere/inverse/",
        "sphere/remark-decomposition/",
        "sphere/lie-block-decomp/",
        // poincare — hyperbolic half-plane, zero deformation.
        "poincare/killing-vertical/dilation",
        "poincare/killing-vertical/htranslation",
        "poincare/killing-complete/dilation",
        "poincare/killing-complete/htranslation",
        "poincare/harmonic-vertical/vertical",
        "poincare/lemma-iota/zero",
        "poincare/metric-compat-lc/",
        "poincare/metric-compat-mc/",
        "poincare/inverse/",
        "poincare/remark-decomposition/",
        "poincare/lie-block-decomp/",
    };
    return s;
}

// Expected verdict (true = pass) for a stock model, or nullopt when the
// model is not one of the built-ins.
inline std::optional<bool> expected_verdict(const std::string& manifold,
                                            const std::string& id,
                                            const std::string& field) {
    const auto& names = builtin_names();
    if (std::find(names.begin(), names.end(), manifold) == names.end())
        return std::nullopt;
    return builtin_pass_set().count(manifold + "/" + id + "/" + field) > 0;
}

// ---------------------------------------------------------------------------
// Evaluation and serialization
// ---------------------------------------------------------------------------

struct ReportEvaluation {
    std::size_t mismatches = 0;   // verdicts differing from expectation
    bool nan_seen = false;        // any non-finite residual
    std::vector<std::string> mismatch_keys;

    // 0 = all expectations met; 1 = mismatch or non-finite residual.
    int exit_code() const { return (mismatches == 0 && !nan_seen) ? 0 : 1; }
};

inline ReportEvaluation evaluate_report(const RunReport& r,
                                        bool use_expectations) {
    ReportEvaluation ev;
    for (const auto& c : r.checks) {
        if (!std::isfinite(c.max_residual)) ev.nan_seen = true;
        for (const auto& [k, v] : c.sub_residuals)
            if (!std::isfinite(v)) ev.nan_seen = true;
        if (use_expectations) {
            auto want = expected_verdict(r.manifold, c.id, c.field);
            if (want && *want != c.pass) {
                ++ev.mismatches;
                ev.mismatch_keys.push_back(r.manifold + "/" + c.id + "/" +
                                           c.field);
            }
        }
    }
    return ev;
}

inline nlohmann::ordered_json report_to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["samples"] = r.samples;
    j["tolerance_default"] = r.tolerance_default;
    j["manifold"] = r.manifold;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json jc;
        jc["id"] = c.id;
        jc["field"] = c.field;
        jc["max_residual"] = c.max_residual;
        jc["tolerance"] = c.tolerance;
        jc["verdict"] = c.pass ? "pass" : "fail";
        nlohmann::ordered_json subs = nlohmann::ordered_json::object();
        for (const auto& [k, v] : c.sub_residuals) subs[k] = v;
        jc["sub_residuals"] = subs;
        j["checks"].push_back(jc);
    }
    return j;
}

inline RunReport report_from_json(const nlohmann::ordered_json& j) {
    RunReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.samples = j.at("samples").get<std::size_t>();
    r.tolerance_default = j.at("tolerance_default").get<double>();
    r.manifold = j.at("manifold").get<std::string>();
    for (const auto& jc : j.at("checks")) {
        CheckResult c;
        c.id = jc.at("id").get<std::string>();
        c.field = jc.at("field").get<std::string>();
        c.max_residual = jc.at("max_residual").get<double>();
        c.tolerance = jc.at("tolerance").get<double>();
        c.pass = jc.at("verdict").get<std::string>() == "pass";
        for (const auto& [k, v] : jc.at("sub_residuals").items())
            c.sub_residuals.emplace_back(k, v.get<double>());
        r.checks.push_back(std::move(c));
    }
    return r;
}

inline std::string report_to_text(const RunReport& r, bool use_expectations) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "# manifold=%s seed=%llu samples=%zu tolerance=%g\n",
                  r.manifold.c_str(),
                  static_cast<unsigned long long>(r.seed), r.samples,
                  r.tolerance_default);
    out += buf;
    for (const auto& c : r.checks) {
        std::string expect = "";
        if (use_expectations) {
            auto want = expected_verdict(r.manifold, c.id, c.field);
            if (want)
                expect = (*want == c.pass)
                             ? (std::string("  expected=") +
                                (*want ? "pass" : "fail") + " ok")
                             : (std::string("  expected=") +
                                (*want ? "pass" : "fail") + " MISMATCH");
        }
        std::snprintf(buf, sizeof buf, "%-22s %-14s %12.6e  tol=%g  %-4s%s\n",
                      c.id.c_str(), c.field.empty() ? "-" : c.field.c_str(),
                      c.max_residual, c.tolerance, c.pass ? "pass" : "fail",
                      expect.c_str());
        out += buf;
    }
    ReportEvaluation ev = evaluate_report(r, use_expectations);
    std::snprintf(buf, sizeof buf,
                  "# %zu checks, %zu expectation mismatches%s\n",
                  r.checks.size(), ev.mismatches,
                  ev.nan_seen ? ", NON-FINITE RESIDUALS" : "");
    out += buf;
    return out;
}

}  // namespace synectic
