#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "support/approx.hpp"
#include "support/fd.hpp"
#include "synectic/base_geometry.hpp"
#include "synectic/catalog.hpp"
#include "synectic/rng.hpp"

using namespace synectic;

namespace {

std::vector<double> sample_point(const ManifoldModel& m, Rng& rng) {
    std::vector<double> x(m.n);
    for (std::size_t k = 0; k < m.n; ++k)
        x[k] = rng.uniform(m.box[k].first, m.box[k].second);
    return x;
}

// Independent plain-double Gauss-Jordan inverse for the oracles below.
std::vector<double> invert_plain(std::vector<double> A, std::size_t n) {
    std::vector<double> B(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) B[i * n + i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        REQUIRE(std::abs(A[piv * n + col]) > 1e-13);
        for (std::size_t c = 0; c < n; ++c) {
            std::swap(A[piv * n + c], A[col * n + c]);
            std::swap(B[piv * n + c], B[col * n + c]);
        }
        double inv = 1.0 / A[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            A[col * n + c] *= inv;
            B[col * n + c] *= inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double fct = A[r * n + col];
            for (std::size_t c = 0; c < n; ++c) {
                A[r * n + c] -= fct * A[col * n + c];
                B[r * n + c] -= fct * B[col * n + c];
            }
        }
    }
    return B;
}

// Connection coefficients from finite differences of the metric values
// only — no jets, no shared code with the implementation under test.
std::vector<double> fd_christoffel(const ManifoldModel& m, const std::vector<double>& x) {
    const std::size_t n = m.n;
    std::vector<double> g(n * n), dg(n * n * n);  // dg[s][j][i]
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            g[j * n + i] = m.g_at(j, i).value(x);
            for (std::size_t s = 0; s < n; ++s)
                dg[(s * n + j) * n + i] = fd_partial(
                    [&](std::span<const double> p) { return m.g_at(j, i).value(p); }, x, s);
        }
    auto ginv = invert_plain(g, n);
    std::vector<double> G(n * n * n, 0.0);  // [k][j][i]
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (std::size_t s = 0; s < n; ++s)
                    v += ginv[k * n + s] * (dg[(j * n + s) * n + i] +
                                            dg[(i * n + s) * n + j] -
                                            dg[(s * n + j) * n + i]);
                G[(k * n + j) * n + i] = 0.5 * v;
            }
    return G;
}

}  // namespace

TEST_CASE("inverse metric and determinant", "[base]") {
    Rng rng{derive_seed(42, "base-inverse")};
    for (const auto& nm : builtin_names()) {
        ManifoldModel m = builtin_model(nm);
        for (int t = 0; t < 10; ++t) {
            auto x = sample_point(m, rng);
            BaseFrame f = base_frame(m, x);
            for (std::size_t j = 0; j < f.n; ++j)
                for (std::size_t i = 0; i < f.n; ++i) {
                    double id = 0.0;
                    for (std::size_t s = 0; s < f.n; ++s)
                        id += f.g.at({j, s}) * f.ginv.at({s, i});
                    CHECK(near(id, j == i ? 1.0 : 0.0, 1e-13));
                }
            if (nm == "sphere") {
                double s = std::sin(x[0]);
                CHECK(near_rel(f.det_g, s * s, 1e-12));
            }
        }
    }

    // A metric with a vanishing direction is rejected.
    ManifoldModel bad = builtin_euclid2();
    std::map<std::pair<std::size_t, std::size_t>, ScalarField> g;
    g[{0, 0}] = field_const(1.0);  // g_22 stays zero
    bad.metric = symmetric_components(2, g);
    std::vector<double> x = {0.5, 0.5};
    CHECK_THROWS_AS(base_frame(bad, x), SingularMetricError);
}

TEST_CASE("connection coefficients match the closed forms and finite differences",
          "[base]") {
    Rng rng{derive_seed(42, "base-gamma")};
    for (const auto& nm : builtin_names()) {
        ManifoldModel m = builtin_model(nm);
        for (int t = 0; t < 10; ++t) {
            auto x = sample_point(m, rng);
            BaseFrame f = base_frame(m, x);
            auto ref = m.reference_christoffel(x);
            auto fd = fd_christoffel(m, x);
            for (std::size_t k = 0; k < f.n; ++k)
                for (std::size_t j = 0; j < f.n; ++j)
                    for (std::size_t i = 0; i < f.n; ++i) {
                        INFO(nm << " G^" << k + 1 << "_" << j + 1 << i + 1);
                        double got = f.gamma.at({k, j, i});
                        CHECK(near_rel(got, ref[(k * f.n + j) * f.n + i], 1e-11));
                        CHECK(near_rel(got, fd[(k * f.n + j) * f.n + i], 1e-5));
                    }
        }
    }

    // Worked values on the unit sphere at co-latitude pi/4.
    ManifoldModel sph = builtin_sphere();
    std::vector<double> x = {3.14159265358979323846 / 4.0, 1.0};
    BaseFrame f = base_frame(sph, x);
    CHECK(near(f.gamma.at({0, 1, 1}), -0.5, 1e-14));
    CHECK(near(f.gamma.at({1, 0, 1}), 1.0, 1e-14));
    CHECK(near(f.gamma.at({1, 1, 0}), 1.0, 1e-14));
    CHECK(near(f.gamma.at({0, 0, 0}), 0.0, 1e-14));
}

TEST_CASE("connection coefficient partials match finite differences", "[base]") {
    Rng rng{derive_seed(42, "base-dgamma")};
    for (const auto& nm : builtin_names()) {
        ManifoldModel m = builtin_model(nm);
        for (int t = 0; t < 5; ++t) {
            auto x = sample_point(m, rng);
            BaseFrame f = base_frame(m, x);
            const double h = 1e-4;
            for (std::size_t s = 0; s < f.n; ++s) {
                auto xp = x, xm = x;
                xp[s] += h;
                xm[s] -= h;
                BaseFrame fp = base_frame(m, xp), fm = base_frame(m, xm);
                for (std::size_t k = 0; k < f.n; ++k)
                    for (std::size_t j = 0; j < f.n; ++j)
                        for (std::size_t i = 0; i < f.n; ++i) {
                            double fd = (fp.gamma.at({k, j, i}) - fm.gamma.at({k, j, i})) /
                                        (2.0 * h);
                            INFO(nm << " d_" << s + 1 << " G^" << k + 1 << "_" << j + 1
                                    << i + 1);
                            CHECK(near_rel(f.gamma_partials.at({s, k, j, i}), fd, 1e-5));
                        }
            }
        }
    }
}

TEST_CASE("the metric is parallel", "[base]") {
    Rng rng{derive_seed(42, "base-nabla-g")};
    for (const auto& nm : builtin_names()) {
        ManifoldModel m = builtin_model(nm);
        for (int t = 0; t < 10; ++t) {
            BaseFrame f = base_frame(m, sample_point(m, rng));
            MultiIndexArray ng = covariant_derivative_02(f, f.g2);
            INFO(nm);
            CHECK(ng.max_abs() < 1e-12);
        }
    }
}

TEST_CASE("curvature of the model spaces", "[base]") {
    Rng rng{derive_seed(42, "base-curv")};

    ManifoldModel e2 = builtin_euclid2();
    for (int t = 0; t < 5; ++t) {
        BaseFrame f = base_frame(e2, sample_point(e2, rng));
        CHECK(f.riemann.max_abs() < 1e-13);
        CHECK(std::abs(f.scalar_curvature) < 1e-13);
    }

    ManifoldModel sph = builtin_sphere();
    for (int t = 0; t < 10; ++t) {
        BaseFrame f = base_frame(sph, sample_point(sph, rng));
        CHECK(near_rel(f.scalar_curvature, 2.0, 1e-10));
        // Ricci = g on the unit sphere.
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < 2; ++i)
                CHECK(near(f.ricci.at({j, i}), f.g.at({j, i}), 1e-11));
    }

    ManifoldModel poi = builtin_poincare();
    for (int t = 0; t < 10; ++t) {
        BaseFrame f = base_frame(poi, sample_point(poi, rng));
        CHECK(near_rel(f.scalar_curvature, -2.0, 1e-10));
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < 2; ++i)
                CHECK(near(f.ricci.at({j, i}), -f.g.at({j, i}), 1e-11));
    }

    // Algebraic identities at random points of every model.
    for (const auto& nm : builtin_names()) {
        ManifoldModel m = builtin_model(nm);
        for (int t = 0; t < 5; ++t) {
            BaseFrame f = base_frame(m, sample_point(m, rng));
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t j = 0; j < 2; ++j)
                    for (std::size_t i = 0; i < 2; ++i)
                        for (std::size_t h = 0; h < 2; ++h) {
                            // Antisymmetry in the first pair.
                            CHECK(near(f.riemann.at({k, j, i, h}),
                                       -f.riemann.at({j, k, i, h}), 1e-11));
                            // First Bianchi identity.
                            double cyc = f.riemann.at({k, j, i, h}) +
                                         f.riemann.at({j, i, k, h}) +
                                         f.riemann.at({i, k, j, h});
                            CHECK(near(cyc, 0.0, 1e-11));
                        }
        }
    }
}

TEST_CASE("two routes to the metric Lie derivative agree", "[base]") {
    Rng rng{derive_seed(42, "base-lie")};
    for (const auto& nm : builtin_names()) {
        ManifoldModel m = builtin_model(nm);
        for (const auto& [fname, comps] : m.fields) {
            for (int t = 0; t < 5; ++t) {
                BaseFrame f = base_frame(m, sample_point(m, rng));
                VectorFrame v = vector_frame(f, comps);
                MultiIndexArray kd = killing_deviation(f, v);
                MultiIndexArray lie = lie_derivative_metric(f, v);
                INFO(nm << " / " << fname);
                CHECK(max_abs_diff(kd, lie) < 1e-11);
            }
        }
    }
}

TEST_CASE("flow-invariance census of the catalog fields", "[base]") {
    Rng rng{derive_seed(42, "base-killing")};
    auto max_deviation = [&](const ManifoldModel& m, const std::string& fname) {
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            BaseFrame f = base_frame(m, sample_point(m, rng));
            VectorFrame v = vector_frame(f, m.field(fname));
            worst = std::max(worst, killing_deviation(f, v).max_abs());
        }
        return worst;
    };

    ManifoldModel e2 = builtin_euclid2();
    CHECK(max_deviation(e2, "rotation") < 1e-12);
    CHECK(max_deviation(e2, "translation") < 1e-12);
    CHECK(max_deviation(e2, "dilation") > 1.0);  // D_j X_i + D_i X_j = 2 delta

    ManifoldModel sph = builtin_sphere();
    CHECK(max_deviation(sph, "rotation") < 1e-12);
    CHECK(max_deviation(sph, "meridian") > 0.1);

    ManifoldModel poi = builtin_poincare();
    CHECK(max_deviation(poi, "htranslation") < 1e-12);
    CHECK(max_deviation(poi, "dilation") < 1e-12);
    CHECK(max_deviation(poi, "vertical") > 0.01);
}

TEST_CASE("deformation tensor derivative and its raised symmetrization", "[base]") {
    Rng rng{derive_seed(42, "base-h")};

    // a proportional to the metric is parallel, so H vanishes.
    ManifoldModel poi = builtin_poincare().with_a(
        a_scaled_metric(builtin_poincare(), 0.5), "+a=g/2");
    for (int t = 0; t < 10; ++t) {
        BaseFrame f = base_frame(poi, sample_point(poi, rng));
        CHECK(f.nabla_a.max_abs() < 1e-12);
        CHECK(f.h_tensor.max_abs() < 1e-12);
    }

    // a = diag(x1^2, 0) on the flat plane: the only nonzero entry of H is
    // H^1_11 = x1.
    ManifoldModel e2 = builtin_euclid2().with_a(a_diag_x1_squared(2), "+a=x1^2");
    for (int t = 0; t < 10; ++t) {
        auto x = sample_point(e2, rng);
        BaseFrame f = base_frame(e2, x);
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t i = 0; i < 2; ++i) {
                    double want = (k == 0 && j == 0 && i == 0) ? x[0] : 0.0;
                    CHECK(near(f.h_tensor.at({k, j, i}), want, 1e-13));
                }
        // With a flat metric the covariant and partial derivatives agree.
        CHECK(max_abs_diff(f.nabla_a, f.da) < 1e-14);
    }

    // Finite-difference oracle for (D a) on a curved background.
    ManifoldModel pid = builtin_poincare().with_a(a_identity(2), "+a=id");
    for (int t = 0; t < 5; ++t) {
        auto x = sample_point(pid, rng);
        BaseFrame f = base_frame(pid, x);
        auto G = pid.reference_christoffel(x);
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t i = 0; i < 2; ++i) {
                    double fd = fd_partial(
                        [&](std::span<const double> p) {
                            return pid.a_at(j, i).value(p);
                        },
                        x, s);
                    for (std::size_t l = 0; l < 2; ++l) {
                        fd -= G[(l * 2 + s) * 2 + j] * pid.a_at(l, i).value(x);
                        fd -= G[(l * 2 + s) * 2 + i] * pid.a_at(j, l).value(x);
                    }
                    CHECK(near_rel(f.nabla_a.at({s, j, i}), fd, 1e-6));
                }
    }
}

TEST_CASE("vector frames: derivatives, lowering, divergence", "[base]") {
    Rng rng{derive_seed(42, "base-vec")};

    ManifoldModel sph = builtin_sphere();
    for (int t = 0; t < 5; ++t) {
        auto x = sample_point(sph, rng);
        BaseFrame f = base_frame(sph, x);

        VectorFrame mer = vector_frame(f, sph.field("meridian"));
        // div X = G^1_11 + G^2_21 = cot(x1) for the unit meridian flow.
        CHECK(near_rel(divergence(f, mer), std::cos(x[0]) / std::sin(x[0]), 1e-11));

        // Lowering the covariant derivative slot-by-slot agrees with the
        // directly computed derivative of the lowered field.
        MultiIndexArray lowered = lower_index(f, mer.nabla_up, 1);
        CHECK(max_abs_diff(lowered, mer.nabla_low) < 1e-12);
        MultiIndexArray back = raise_index(f, lowered, 1);
        CHECK(max_abs_diff(back, mer.nabla_up) < 1e-12);

        // Lowered component jets against finite differences of g X.
        VectorFrame rot = vector_frame(f, sph.field("rotation"));
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(near(rot.low[i].v, f.g.at({i, 1}), 1e-13));  // X = (0,1)
            for (std::size_t s = 0; s < 2; ++s) {
                double fd = fd_partial(
                    [&](std::span<const double> p) {
                        double acc = 0.0;
                        for (std::size_t hh = 0; hh < 2; ++hh)
                            acc += sph.g_at(i, hh).value(p) *
                                   sph.field("rotation")[hh].value(p);
                        return acc;
                    },
                    x, s);
                CHECK(near_rel(rot.low[i].d[s], fd, 1e-6));
            }
        }
    }

    ManifoldModel e2 = builtin_euclid2();
    std::vector<double> origin_free = {0.7, -1.1};
    BaseFrame f = base_frame(e2, origin_free);
    CHECK(near(divergence(f, vector_frame(f, e2.field("dilation"))), 2.0, 1e-13));
    CHECK(near(divergence(f, vector_frame(f, e2.field("rotation"))), 0.0, 1e-13));

    // The a-lowered jets follow a X.
    ManifoldModel ed = e2.with_a(a_diag_x1_squared(2), "+a");
    BaseFrame fd_frame = base_frame(ed, origin_free);
    VectorFrame dil = vector_frame(fd_frame, ed.field("dilation"));
    CHECK(near(dil.alow[0].v, origin_free[0] * origin_free[0] * origin_free[0], 1e-13));
    CHECK(near(dil.alow[1].v, 0.0, 1e-13));
}

TEST_CASE("covector frames against finite differences", "[base]") {
    Rng rng{derive_seed(42, "base-cov")};
    ManifoldModel sph = builtin_sphere();
    for (int t = 0; t < 5; ++t) {
        auto x = sample_point(sph, rng);
        BaseFrame f = base_frame(sph, x);
        CovectorFrame w = covector_frame(f, sph.form("phi"));
        auto G = sph.reference_christoffel(x);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < 2; ++i) {
                double fd = fd_partial(
                    [&](std::span<const double> p) {
                        return sph.form("phi")[i].value(p);
                    },
                    x, j);
                for (std::size_t s = 0; s < 2; ++s)
                    fd -= G[(s * 2 + j) * 2 + i] * sph.form("phi")[s].value(x);
                CHECK(near_rel(w.nabla.at({j, i}), fd, 1e-6));
            }
    }
}

TEST_CASE("endomorphism frames carry values and partials", "[base]") {
    ManifoldModel e2 = builtin_euclid2();
    std::vector<double> x = {0.25, 0.5};
    BaseFrame f = base_frame(e2, x);
    EndoFrame c = endo_frame(f, e2.endo("nilpotent"));
    CHECK(c.comp.at({0, 1}) == 1.0);
    CHECK(c.comp.at({0, 0}) == 0.0);
    CHECK(c.dcomp.max_abs() == 0.0);
    CHECK_THROWS_AS(endo_frame(f, std::vector<ScalarField>(3, field_const(0.0))),
                    ShapeError);
}
