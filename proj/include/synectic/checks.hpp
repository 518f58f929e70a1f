#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "synectic/bundle.hpp"
#include "synectic/catalog.hpp"
#include "synectic/errors.hpp"
#include "synectic/manifold.hpp"
#include "synectic/rng.hpp"

namespace synectic {

// ---------------------------------------------------------------------------
// Check catalog
// ---------------------------------------------------------------------------

// What kind of argument a check consumes.
enum class CheckKind {
    Field,     // runs once per vector field
    Endo,      // runs once per (1,1) tensor field
    Manifold,  // runs once per model
};

struct CheckSpec {
    std::string id;
    CheckKind kind;
    std::string summary;
};

inline const std::vector<CheckSpec>& check_catalog() {
    static const std::vector<CheckSpec> specs = {
        {"killing-vertical", CheckKind::Field,
         "vertical lift preserves the synectic metric (Lie derivative)"},
        {"killing-complete", CheckKind::Field,
         "complete lift preserves the synectic metric (Lie derivative)"},
        {"harmonic-vertical", CheckKind::Field,
         "covector of the vertical lift is closed and divergence-free"},
        {"harmonic-complete", CheckKind::Field,
         "covector of the complete lift is closed and divergence-free"},
        {"parallel-v", CheckKind::Field,
         "vertical lift is parallel under the metric connection"},
        {"parallel-c", CheckKind::Field,
         "complete lift is parallel under the metric connection"},
        {"parallel-h", CheckKind::Field,
         "horizontal lift is parallel under the metric connection"},
        {"concurrent", CheckKind::Field,
         "derivative of the complete lift is a multiple of the identity"},
        {"lemma-iota", CheckKind::Endo,
         "induced vertical field of a (1,1) tensor preserves the metric"},
        {"metric-compat-lc", CheckKind::Manifold,
         "Levi-Civita connection of the bundle parallelizes the metric"},
        {"metric-compat-mc", CheckKind::Manifold,
         "torsionful metric connection parallelizes the metric"},
        {"inverse", CheckKind::Manifold,
         "closed-form inverse of the synectic metric"},
        {"remark-decomposition", CheckKind::Manifold,
         "metric connection = lifted base connection + vertical block"},
        {"lie-block-decomp", CheckKind::Manifold,
         "generic Lie derivative matches its four-block expansion"},
    };
    return specs;
}

inline const CheckSpec* find_check(const std::string& id) {
    for (const auto& s : check_catalog())
        if (s.id == id) return &s;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Results and sampling
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string id;
    std::string field;  // vector field or tensor name; empty for model-wide
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;  // max_residual <= tolerance and finite
    // Ordered diagnostic scalars; also carries the rejected-sample count.
    std::vector<std::pair<std::string, double>> sub_residuals;
};

struct CheckContext {
    const ManifoldModel& model;
    std::uint64_t seed = 42;
    std::size_t samples = 100;
    double tolerance = 1e-8;
};

namespace check_detail {

struct SampleSet {
    std::vector<TangentPoint> points;
    std::size_t rejected = 0;
};

// Uniform draws from the model's sample box with fiber components in
// [-2, 2]; points where the metric degenerates are counted and redrawn.
inline SampleSet draw_samples(const ManifoldModel& m, Rng& rng,
                              std::size_t count) {
    SampleSet out;
    out.points.reserve(count);
    const std::size_t cap = 200 * count + 1000;
    std::size_t attempts = 0;
    while (out.points.size() < count) {
        if (++attempts > cap)
            throw SingularMetricError(
                "sample box for '" + m.name +
                "' rejects nearly all points (degenerate metric)");
        TangentPoint tp;
        tp.x.resize(m.n);
        tp.y.resize(m.n);
        for (std::size_t k = 0; k < m.n; ++k)
            tp.x[k] = rng.uniform(m.box[k].first, m.box[k].second);
        for (std::size_t k = 0; k < m.n; ++k) tp.y[k] = rng.uniform(-2.0, 2.0);
        try {
            BaseFrame f = base_frame(m, tp.x);
            if (std::abs(f.det_g) < 1e-12) {
                ++out.rejected;
                continue;
            }
        } catch (const SingularMetricError&) {
            ++out.rejected;
            continue;
        } catch (const DomainError&) {
            ++out.rejected;
            continue;
        }
        out.points.push_back(std::move(tp));
    }
    return out;
}

inline void note(CheckResult& r, const std::string& key, double v) {
    for (auto& [k, old] : r.sub_residuals)
        if (k == key) {
            if (v > old) old = v;
            return;
        }
    r.sub_residuals.emplace_back(key, v);
}

// Lie derivative of the deformation tensor along a base vector field:
// X^k d_k a_ji + a_ki d_j X^k + a_jk d_i X^k.
inline double lie_of_deformation_max(const BaseFrame& f, const VectorFrame& vf) {
    double worst = 0.0;
    for (std::size_t j = 0; j < f.n; ++j)
        for (std::size_t i = 0; i < f.n; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < f.n; ++k) {
                v += vf.up[k].v * f.da.at({k, j, i});
                v += f.a.at({k, i}) * vf.up[k].d[j];
                v += f.a.at({j, k}) * vf.up[k].d[i];
            }
            worst = std::max(worst, std::abs(v));
        }
    return worst;
}

inline double closedness_max(const BundleCovec& w) {
    const std::size_t N = 2 * w.n;
    double worst = 0.0;
    for (std::size_t A = 0; A < N; ++A)
        for (std::size_t B = A + 1; B < N; ++B)
            worst = std::max(worst,
                             std::abs(w.jac.at({A, B}) - w.jac.at({B, A})));
    return worst;
}

// Polynomial bundle vector field with analytically exact Jacobian; used to
// probe the Lie-derivative block expansion away from lifted fields.
inline BundleVec poly_bundle_vec(Rng& rng, const TangentPoint& tp) {
    const std::size_t n = tp.x.size();
    const std::size_t N = 2 * n;
    std::vector<double> coords(tp.x);
    coords.insert(coords.end(), tp.y.begin(), tp.y.end());

    BundleVec v;
    v.n = n;
    v.comp = MultiIndexArray({N}, {Variance::Upper});
    v.jac = MultiIndexArray({N, N}, {Variance::Upper, Variance::Lower});
    for (std::size_t A = 0; A < N; ++A) {
        for (int term = 0; term < 3; ++term) {
            double c = rng.uniform(-1.0, 1.0);
            std::vector<int> e(N);
            for (auto& ek : e) ek = static_cast<int>(rng.next() % 3);
            double val = c;
            for (std::size_t k = 0; k < N; ++k) val *= std::pow(coords[k], e[k]);
            v.comp.at({A}) += val;
            for (std::size_t B = 0; B < N; ++B) {
                if (e[B] == 0) continue;
                double d = c * e[B];
                for (std::size_t k = 0; k < N; ++k)
                    d *= std::pow(coords[k], k == B ? e[k] - 1 : int(e[k]));
                v.jac.at({A, B}) += d;
            }
        }
    }
    return v;
}

}  // namespace check_detail

// ---------------------------------------------------------------------------
// Check bodies
// ---------------------------------------------------------------------------

// Runs one check.  `field` names a vector field for Field checks, a (1,1)
// tensor for Endo checks, and must be empty for Manifold checks.
inline CheckResult run_check(const CheckContext& ctx, const std::string& id,
                             const std::string& field = "") {
    const CheckSpec* spec = find_check(id);
    if (!spec) throw UnknownFieldError("unknown check id: " + id);
    if (spec->kind == CheckKind::Manifold && !field.empty())
        throw UnknownFieldError("check '" + id + "' does not take a field");
    if (spec->kind != CheckKind::Manifold && field.empty())
        throw UnknownFieldError("check '" + id + "' needs a field name");

    const ManifoldModel& mm = ctx.model;
    const std::size_t n = mm.n;

    CheckResult r;
    r.id = id;
    r.field = field;
    r.tolerance = ctx.tolerance;

    std::string label = mm.name + "/" + id;
    if (!field.empty()) label += "/" + field;
    Rng rng{derive_seed(ctx.seed, label)};
    check_detail::SampleSet ss =
        check_detail::draw_samples(mm, rng, ctx.samples);

    auto bump = [&](double v) { r.max_residual = std::max(r.max_residual, v); };

    if (id == "killing-vertical" || id == "killing-complete") {
        const bool complete = (id == "killing-complete");
        const auto& comps = mm.field(field);
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            BundleMetric m = synectic_metric(f, tp.y);
            VectorFrame vf = vector_frame(f, comps);
            BundleVec lift = complete ? complete_lift(f, tp.y, vf)
                                      : vertical_lift(f, tp.y, vf);
            MultiIndexArray lie = lie_derivative_bundle(m, lift);
            bump(lie.max_abs());
            check_detail::note(
                r, "block_route_gap",
                max_abs_diff(lie, isometry_condition_blocks(f, tp.y, lift)));
            check_detail::note(r, "base_killing",
                               killing_deviation(f, vf).max_abs());
            if (complete)
                check_detail::note(r, "deformation_lie",
                                   check_detail::lie_of_deformation_max(f, vf));
        }
    } else if (id == "harmonic-vertical" || id == "harmonic-complete") {
        const bool complete = (id == "harmonic-complete");
        const auto& comps = mm.field(field);
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            BundleMetric m = synectic_metric(f, tp.y);
            VectorFrame vf = vector_frame(f, comps);
            BundleVec lift = complete ? complete_lift(f, tp.y, vf)
                                      : vertical_lift(f, tp.y, vf);
            BundleCovec w = associated_covector(m, lift);
            double closed = check_detail::closedness_max(w);
            double codif = std::abs(
                bundle_divergence(m, levi_civita_bundle(f, tp.y), w));
            bump(std::max(closed, codif));
            check_detail::note(r, "closedness", closed);
            check_detail::note(r, "codifferential", codif);
        }
    } else if (id == "parallel-v" || id == "parallel-c" || id == "parallel-h") {
        const auto& comps = mm.field(field);
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            VectorFrame vf = vector_frame(f, comps);
            BundleConnection mc = metric_connection_bundle(f, tp.y);
            BundleVec lift = id == "parallel-v"   ? vertical_lift(f, tp.y, vf)
                             : id == "parallel-c" ? complete_lift(f, tp.y, vf)
                                                  : horizontal_lift(f, tp.y, vf);
            MultiIndexArray nab = bundle_nabla_vec(mc, lift);
            MultiIndexArray closed =
                id == "parallel-v"
                    ? vector_derivative_blocks_vertical(f, tp.y, vf)
                : id == "parallel-c"
                    ? vector_derivative_blocks_complete(f, tp.y, vf)
                    : vector_derivative_blocks_horizontal(f, tp.y, vf);
            bump(nab.max_abs());
            check_detail::note(r, "block_route_gap", max_abs_diff(nab, closed));
            double base = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t h = 0; h < n; ++h)
                    base = std::max(base, std::abs(vf.nabla_up.at({j, h})));
            check_detail::note(r, "base_gradient", base);
        }
    } else if (id == "concurrent") {
        const auto& comps = mm.field(field);
        // First pass: derivative arrays and the base-trace average.
        std::vector<MultiIndexArray> nabs;
        nabs.reserve(ss.points.size());
        double trace_sum = 0.0;
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            VectorFrame vf = vector_frame(f, comps);
            BundleConnection mc = metric_connection_bundle(f, tp.y);
            nabs.push_back(bundle_nabla_vec(mc, complete_lift(f, tp.y, vf)));
            for (std::size_t j = 0; j < n; ++j)
                trace_sum += vf.nabla_up.at({j, j});
            check_detail::note(r, "nabla_a", f.nabla_a.max_abs());
        }
        const double t_star =
            ss.points.empty()
                ? 0.0
                : trace_sum / (static_cast<double>(n) *
                               static_cast<double>(ss.points.size()));
        for (const auto& nab : nabs) {
            double worst = 0.0;
            for (std::size_t B = 0; B < 2 * n; ++B)
                for (std::size_t A = 0; A < 2 * n; ++A)
                    worst = std::max(
                        worst, std::abs(nab.at({B, A}) - (B == A ? t_star : 0.0)));
            bump(worst);
        }
        r.sub_residuals.emplace_back("fitted_t", t_star);
    } else if (id == "lemma-iota") {
        const auto& comps = mm.endo(field);
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            BundleMetric m = synectic_metric(f, tp.y);
            EndoFrame C = endo_frame(f, comps);
            MultiIndexArray lie = lie_derivative_bundle(m, iota_lift(f, tp.y, C));
            bump(lie.max_abs());
            double gap = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    double want = 0.0;
                    for (std::size_t h = 0; h < n; ++h)
                        want += f.g.at({h, i}) * C.comp.at({h, j});
                    gap = std::max(gap, std::abs(lie.at({n + j, i}) - want));
                }
            check_detail::note(r, "block13_vs_gC", gap);
        }
    } else if (id == "metric-compat-lc" || id == "metric-compat-mc") {
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            BundleMetric m = synectic_metric(f, tp.y);
            BundleConnection c = id == "metric-compat-lc"
                                     ? levi_civita_bundle(f, tp.y)
                                     : metric_connection_bundle(f, tp.y);
            bump(metric_compat_residual(m, c).max_abs());
        }
    } else if (id == "inverse") {
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            BundleMetric m = synectic_metric(f, tp.y);
            double worst = 0.0;
            for (std::size_t B = 0; B < 2 * n; ++B)
                for (std::size_t A = 0; A < 2 * n; ++A) {
                    double idv = 0.0;
                    for (std::size_t E = 0; E < 2 * n; ++E)
                        idv += m.comp.at({B, E}) * m.inv.at({E, A});
                    worst = std::max(worst, std::abs(idv - (B == A ? 1.0 : 0.0)));
                }
            bump(worst);
        }
    } else if (id == "remark-decomposition") {
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            MultiIndexArray diff = metric_connection_bundle(f, tp.y).coeff;
            diff -= lifted_base_connection(f, tp.y).coeff;
            double worst = 0.0;
            for (std::size_t A = 0; A < 2 * n; ++A)
                for (std::size_t B = 0; B < 2 * n; ++B)
                    for (std::size_t C = 0; C < 2 * n; ++C) {
                        double want = (A >= n && B < n && C < n)
                                          ? f.h_tensor.at({A - n, B, C})
                                          : 0.0;
                        worst = std::max(worst,
                                         std::abs(diff.at({A, B, C}) - want));
                    }
            bump(worst);
        }
    } else if (id == "lie-block-decomp") {
        for (const auto& tp : ss.points) {
            BaseFrame f = base_frame(mm, tp.x);
            BundleMetric m = synectic_metric(f, tp.y);
            BundleVec X = check_detail::poly_bundle_vec(rng, tp);
            bump(max_abs_diff(lie_derivative_bundle(m, X),
                              isometry_condition_blocks(f, tp.y, X)));
        }
    } else {
        throw UnknownFieldError("unknown check id: " + id);
    }

    r.sub_residuals.emplace_back("rejected_samples",
                                 static_cast<double>(ss.rejected));
    r.pass = std::isfinite(r.max_residual) && r.max_residual <= r.tolerance;
    return r;
}

// Runs every applicable check over the model's declared fields/tensors in
// catalog order (alphabetical within a kind, by map order).
inline std::vector<CheckResult> run_all(const CheckContext& ctx) {
    std::vector<CheckResult> out;
    for (const auto& spec : check_catalog()) {
        switch (spec.kind) {
            case CheckKind::Field:
                for (const auto& kv : ctx.model.fields)
                    out.push_back(run_check(ctx, spec.id, kv.first));
                break;
            case CheckKind::Endo:
                for (const auto& kv : ctx.model.endos)
                    out.push_back(run_check(ctx, spec.id, kv.first));
                break;
            case CheckKind::Manifold:
                out.push_back(run_check(ctx, spec.id));
                break;
        }
    }
    return out;
}

}  // namespace synectic
