#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "synectic/base_geometry.hpp"
#include "synectic/errors.hpp"
#include "synectic/tensor.hpp"

namespace synectic {

// Geometry on the tangent bundle of the base manifold.  A point carries
// base coordinates x and fiber coordinates y; bundle indices A run over
// 0..2n-1 with the fiber block stored at offset n.  Throughout, the
// bundle metric is the complete lift of g deformed by the vertical lift
// of the symmetric tensor a:
//
//   comp = [ a_ji + y^s d_s g_ji   g_ji ]        (value block layout,
//          [ g_ji                  0    ]         rows B, cols A)
//
// and its closed-form inverse swaps the blocks:
//
//   inv  = [ 0       g^ji                    ]
//          [ g^ji    y^s d_s g^ji - a^ji     ]
struct TangentPoint {
    std::vector<double> x, y;
};

struct BundleMetric {
    std::size_t n = 0;
    std::vector<double> y;
    MultiIndexArray comp;  // (2n,2n) Lower,Lower
    MultiIndexArray der;   // (2n,2n,2n) [C][B][A] = d_C comp_BA
    MultiIndexArray inv;   // (2n,2n) Upper,Upper
};

inline BundleMetric synectic_metric(const BaseFrame& f, std::span<const double> y) {
    const std::size_t n = f.n;
    if (y.size() != n) throw ShapeError("fiber point has wrong dimension");
    const std::size_t N = 2 * n;

    BundleMetric m;
    m.n = n;
    m.y.assign(y.begin(), y.end());
    m.comp = MultiIndexArray({N, N}, {Variance::Lower, Variance::Lower});
    m.der = MultiIndexArray({N, N, N},
                            {Variance::Lower, Variance::Lower, Variance::Lower});
    m.inv = MultiIndexArray({N, N}, {Variance::Upper, Variance::Upper});

    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const Jet2& gji = f.g2[j * n + i];
            double ydg = 0.0;
            for (std::size_t s = 0; s < n; ++s) ydg += y[s] * gji.d[s];
            m.comp.at({j, i}) = f.a.at({j, i}) + ydg;
            m.comp.at({n + j, i}) = gji.v;
            m.comp.at({j, n + i}) = gji.v;

            for (std::size_t c = 0; c < n; ++c) {
                double yddg = 0.0;
                for (std::size_t s = 0; s < n; ++s) yddg += y[s] * gji.hess(c, s);
                m.der.at({c, j, i}) = f.a2[j * n + i].d[c] + yddg;
                m.der.at({n + c, j, i}) = gji.d[c];
                m.der.at({c, n + j, i}) = gji.d[c];
                m.der.at({c, j, n + i}) = gji.d[c];
            }
        }

    // a^{ji} = g^{ja} a_{ab} g^{bi}; d_s g^{ji} rides in the inverse jets.
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const Jet1& gup = f.ginv1[j * n + i];
            m.inv.at({j, n + i}) = gup.v;
            m.inv.at({n + j, i}) = gup.v;
            double ydginv = 0.0;
            for (std::size_t s = 0; s < n; ++s) ydginv += y[s] * gup.d[s];
            double araised = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q)
                    araised += f.ginv.at({j, p}) * f.a.at({p, q}) * f.ginv.at({q, i});
            m.inv.at({n + j, n + i}) = ydginv - araised;
        }
    return m;
}

// Connection coefficients on the bundle, stored as coeff(A, B, C) for
// Gamma^A_BC where B is the differentiation index:
//   D_B X^A = d_B X^A + Gamma^A_BE X^E
//   D_B w_A = d_B w_A - Gamma^E_BA w_E
struct BundleConnection {
    std::size_t n = 0;
    MultiIndexArray coeff;  // (2n,2n,2n) Upper,Lower,Lower
};

namespace detail {

inline BundleConnection build_bundle_connection(const BaseFrame& f,
                                                std::span<const double> y,
                                                bool with_h, bool with_r) {
    const std::size_t n = f.n;
    if (y.size() != n) throw ShapeError("fiber point has wrong dimension");
    const std::size_t N = 2 * n;
    BundleConnection c;
    c.n = n;
    c.coeff =
        MultiIndexArray({N, N, N}, {Variance::Upper, Variance::Lower, Variance::Lower});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                double G = f.gamma.at({k, j, i});
                c.coeff.at({k, j, i}) = G;
                c.coeff.at({n + k, n + j, i}) = G;
                c.coeff.at({n + k, j, n + i}) = G;

                double v = 0.0;
                for (std::size_t t = 0; t < n; ++t)
                    v += y[t] * f.gamma_partials.at({t, k, j, i});
                if (with_h) v += f.h_tensor.at({k, j, i});
                if (with_r)
                    for (std::size_t r = 0; r < n; ++r)
                        v -= y[r] * f.riemann.at({r, j, i, k});
                c.coeff.at({n + k, j, i}) = v;
            }
    return c;
}

}  // namespace detail

// Levi-Civita connection of the bundle metric (torsion-free).
inline BundleConnection levi_civita_bundle(const BaseFrame& f, std::span<const double> y) {
    return detail::build_bundle_connection(f, y, /*with_h=*/true, /*with_r=*/false);
}

// The metric connection of the bundle metric: parallelizes it as well,
// at the price of torsion carried by the curvature term.
inline BundleConnection metric_connection_bundle(const BaseFrame& f,
                                                 std::span<const double> y) {
    return detail::build_bundle_connection(f, y, /*with_h=*/true, /*with_r=*/true);
}

// The base Levi-Civita connection lifted to the bundle without any
// deformation contribution; the metric connection above differs from it
// by a purely vertical block built from the h tensor.
inline BundleConnection lifted_base_connection(const BaseFrame& f,
                                               std::span<const double> y) {
    return detail::build_bundle_connection(f, y, /*with_h=*/false, /*with_r=*/true);
}

// Independent route to the Levi-Civita coefficients straight from the
// assembled metric components, their partials and the inverse:
//   Gamma^A_BC = 1/2 g^{AE} (d_B g_EC + d_C g_EB - d_E g_BC)
inline BundleConnection christoffel_of_bundle_metric(const BundleMetric& m) {
    const std::size_t N = 2 * m.n;
    BundleConnection c;
    c.n = m.n;
    c.coeff =
        MultiIndexArray({N, N, N}, {Variance::Upper, Variance::Lower, Variance::Lower});
    for (std::size_t A = 0; A < N; ++A)
        for (std::size_t B = 0; B < N; ++B)
            for (std::size_t C = 0; C < N; ++C) {
                double v = 0.0;
                for (std::size_t E = 0; E < N; ++E)
                    v += m.inv.at({A, E}) * (m.der.at({B, E, C}) + m.der.at({C, E, B}) -
                                             m.der.at({E, B, C}));
                c.coeff.at({A, B, C}) = 0.5 * v;
            }
    return c;
}

// A vector or covector field on the bundle at one point, with its full
// Jacobian: jac(A, B) = d_B of component A.
struct BundleVec {
    std::size_t n = 0;
    MultiIndexArray comp;  // (2n) Upper
    MultiIndexArray jac;   // (2n,2n) Upper,Lower
};

struct BundleCovec {
    std::size_t n = 0;
    MultiIndexArray comp;  // (2n) Lower
    MultiIndexArray jac;   // (2n,2n) Lower,Lower
};

namespace detail {

inline BundleVec make_bundle_vec(std::size_t n) {
    BundleVec v;
    v.n = n;
    v.comp = MultiIndexArray({2 * n}, {Variance::Upper});
    v.jac = MultiIndexArray({2 * n, 2 * n}, {Variance::Upper, Variance::Lower});
    return v;
}

inline BundleCovec make_bundle_covec(std::size_t n) {
    BundleCovec w;
    w.n = n;
    w.comp = MultiIndexArray({2 * n}, {Variance::Lower});
    w.jac = MultiIndexArray({2 * n, 2 * n}, {Variance::Lower, Variance::Lower});
    return w;
}

}  // namespace detail

// ---- lifts of a base vector field ----

// (0, X^h): fiber copy of the field.
inline BundleVec vertical_lift(const BaseFrame& f, std::span<const double> /*y*/,
                               const VectorFrame& X) {
    const std::size_t n = f.n;
    BundleVec v = detail::make_bundle_vec(n);
    for (std::size_t h = 0; h < n; ++h) {
        v.comp.at({n + h}) = X.up[h].v;
        for (std::size_t b = 0; b < n; ++b) v.jac.at({n + h, b}) = X.up[h].d[b];
    }
    return v;
}

// (X^h, y^s d_s X^h).
inline BundleVec complete_lift(const BaseFrame& f, std::span<const double> y,
                               const VectorFrame& X) {
    const std::size_t n = f.n;
    BundleVec v = detail::make_bundle_vec(n);
    for (std::size_t h = 0; h < n; ++h) {
        v.comp.at({h}) = X.up[h].v;
        double yd = 0.0;
        for (std::size_t s = 0; s < n; ++s) yd += y[s] * X.up[h].d[s];
        v.comp.at({n + h}) = yd;
        for (std::size_t b = 0; b < n; ++b) {
            v.jac.at({h, b}) = X.up[h].d[b];
            double ydd = 0.0;
            for (std::size_t s = 0; s < n; ++s) ydd += y[s] * X.up[h].hess(s, b);
            v.jac.at({n + h, b}) = ydd;
            v.jac.at({n + h, n + b}) = X.up[h].d[b];
        }
    }
    return v;
}

// (X^h, -y^s G^h_si X^i): the horizontal distribution of the base
// connection.
inline BundleVec horizontal_lift(const BaseFrame& f, std::span<const double> y,
                                 const VectorFrame& X) {
    const std::size_t n = f.n;
    BundleVec v = detail::make_bundle_vec(n);
    for (std::size_t h = 0; h < n; ++h) {
        v.comp.at({h}) = X.up[h].v;
        double fib = 0.0;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t i = 0; i < n; ++i)
                fib -= y[s] * f.gamma.at({h, s, i}) * X.up[i].v;
        v.comp.at({n + h}) = fib;
        for (std::size_t b = 0; b < n; ++b) {
            v.jac.at({h, b}) = X.up[h].d[b];
            double d = 0.0;
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t i = 0; i < n; ++i)
                    d -= y[s] * (f.gamma_partials.at({b, h, s, i}) * X.up[i].v +
                                 f.gamma.at({h, s, i}) * X.up[i].d[b]);
            v.jac.at({n + h, b}) = d;
            double db = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                db -= f.gamma.at({h, b, i}) * X.up[i].v;
            v.jac.at({n + h, n + b}) = db;
        }
    }
    return v;
}

// (0, y^i C^k_i): the vertical field induced by a (1,1) tensor.
inline BundleVec iota_lift(const BaseFrame& f, std::span<const double> y,
                           const EndoFrame& C) {
    const std::size_t n = f.n;
    BundleVec v = detail::make_bundle_vec(n);
    for (std::size_t k = 0; k < n; ++k) {
        double fib = 0.0;
        for (std::size_t i = 0; i < n; ++i) fib += y[i] * C.comp.at({k, i});
        v.comp.at({n + k}) = fib;
        for (std::size_t b = 0; b < n; ++b) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += y[i] * C.dcomp.at({b, k, i});
            v.jac.at({n + k, b}) = d;
            v.jac.at({n + k, n + b}) = C.comp.at({k, b});
        }
    }
    return v;
}

// ---- lifts of a base 1-form ----

// (w_i, 0).
inline BundleCovec vertical_lift_form(const BaseFrame& f, std::span<const double> /*y*/,
                                      const CovectorFrame& w) {
    const std::size_t n = f.n;
    BundleCovec v = detail::make_bundle_covec(n);
    for (std::size_t i = 0; i < n; ++i) {
        v.comp.at({i}) = w.low[i].v;
        for (std::size_t b = 0; b < n; ++b) v.jac.at({i, b}) = w.low[i].d[b];
    }
    return v;
}

// (y^s d_s w_i, w_i).
inline BundleCovec complete_lift_form(const BaseFrame& f, std::span<const double> y,
                                      const CovectorFrame& w) {
    const std::size_t n = f.n;
    BundleCovec v = detail::make_bundle_covec(n);
    for (std::size_t i = 0; i < n; ++i) {
        double yd = 0.0;
        for (std::size_t s = 0; s < n; ++s) yd += y[s] * w.low[i].d[s];
        v.comp.at({i}) = yd;
        v.comp.at({n + i}) = w.low[i].v;
        for (std::size_t b = 0; b < n; ++b) {
            double ydd = 0.0;
            for (std::size_t s = 0; s < n; ++s) ydd += y[s] * w.low[i].hess(s, b);
            v.jac.at({i, b}) = ydd;
            v.jac.at({i, n + b}) = w.low[i].d[b];
            v.jac.at({n + i, b}) = w.low[i].d[b];
        }
    }
    return v;
}

// (-y^s G^k_si w_k, w_i).
inline BundleCovec horizontal_lift_form(const BaseFrame& f, std::span<const double> y,
                                        const CovectorFrame& w) {
    const std::size_t n = f.n;
    BundleCovec v = detail::make_bundle_covec(n);
    for (std::size_t i = 0; i < n; ++i) {
        double first = 0.0;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t k = 0; k < n; ++k)
                first -= y[s] * f.gamma.at({k, s, i}) * w.low[k].v;
        v.comp.at({i}) = first;
        v.comp.at({n + i}) = w.low[i].v;
        for (std::size_t b = 0; b < n; ++b) {
            double d = 0.0;
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t k = 0; k < n; ++k)
                    d -= y[s] * (f.gamma_partials.at({b, k, s, i}) * w.low[k].v +
                                 f.gamma.at({k, s, i}) * w.low[k].d[b]);
            v.jac.at({i, b}) = d;
            double db = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                db -= f.gamma.at({k, b, i}) * w.low[k].v;
            v.jac.at({i, n + b}) = db;
            v.jac.at({n + i, b}) = w.low[i].d[b];
        }
    }
    return v;
}

// ---- associated covectors ----

// Generic route: lower the field with the bundle metric, with the
// Jacobian assembled by the product rule from the metric's partials.
inline BundleCovec associated_covector(const BundleMetric& m, const BundleVec& X) {
    const std::size_t N = 2 * m.n;
    BundleCovec w = detail::make_bundle_covec(m.n);
    for (std::size_t A = 0; A < N; ++A) {
        double v = 0.0;
        for (std::size_t C = 0; C < N; ++C) v += m.comp.at({A, C}) * X.comp.at({C});
        w.comp.at({A}) = v;
        for (std::size_t B = 0; B < N; ++B) {
            double d = 0.0;
            for (std::size_t C = 0; C < N; ++C)
                d += m.der.at({B, A, C}) * X.comp.at({C}) +
                     m.comp.at({A, C}) * X.jac.at({C, B});
            w.jac.at({A, B}) = d;
        }
    }
    return w;
}

// Closed forms for the three lifts (components only; the generic route
// above carries the Jacobians).  Layout: first block then fiber block.
inline MultiIndexArray associated_vertical(const BaseFrame& f, std::span<const double>,
                                           const VectorFrame& X) {
    MultiIndexArray out({2 * f.n}, {Variance::Lower});
    for (std::size_t i = 0; i < f.n; ++i) out.at({i}) = X.low[i].v;
    return out;
}

inline MultiIndexArray associated_complete(const BaseFrame& f, std::span<const double> y,
                                           const VectorFrame& X) {
    const std::size_t n = f.n;
    MultiIndexArray out({2 * n}, {Variance::Lower});
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t s = 0; s < n; ++s) v += y[s] * X.low[i].d[s];
        v += X.alow[i].v;
        out.at({i}) = v;
        out.at({n + i}) = X.low[i].v;
    }
    return out;
}

inline MultiIndexArray associated_horizontal(const BaseFrame& f, std::span<const double> y,
                                             const VectorFrame& X) {
    const std::size_t n = f.n;
    MultiIndexArray out({2 * n}, {Variance::Lower});
    for (std::size_t i = 0; i < n; ++i) {
        double v = X.alow[i].v;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t h = 0; h < n; ++h)
                v += y[s] * f.gamma.at({h, s, i}) * X.low[h].v;
        out.at({i}) = v;
        out.at({n + i}) = X.low[i].v;
    }
    return out;
}

// ---- covariant derivatives on the bundle ----

// Returns [B][A] = D_B X^A.
inline MultiIndexArray bundle_nabla_vec(const BundleConnection& c, const BundleVec& X) {
    const std::size_t N = 2 * c.n;
    MultiIndexArray out({N, N}, {Variance::Lower, Variance::Upper});
    for (std::size_t B = 0; B < N; ++B)
        for (std::size_t A = 0; A < N; ++A) {
            double v = X.jac.at({A, B});
            for (std::size_t E = 0; E < N; ++E)
                v += c.coeff.at({A, B, E}) * X.comp.at({E});
            out.at({B, A}) = v;
        }
    return out;
}

// Returns [B][A] = D_B w_A.
inline MultiIndexArray bundle_nabla_covec(const BundleConnection& c,
                                          const BundleCovec& w) {
    const std::size_t N = 2 * c.n;
    MultiIndexArray out({N, N}, {Variance::Lower, Variance::Lower});
    for (std::size_t B = 0; B < N; ++B)
        for (std::size_t A = 0; A < N; ++A) {
            double v = w.jac.at({A, B});
            for (std::size_t E = 0; E < N; ++E)
                v -= c.coeff.at({E, B, A}) * w.comp.at({E});
            out.at({B, A}) = v;
        }
    return out;
}

// [C][B][A] = D_C g_BA; identically zero when the connection
// parallelizes the bundle metric.
inline MultiIndexArray metric_compat_residual(const BundleMetric& m,
                                              const BundleConnection& c) {
    const std::size_t N = 2 * m.n;
    MultiIndexArray out({N, N, N}, {Variance::Lower, Variance::Lower, Variance::Lower});
    for (std::size_t C = 0; C < N; ++C)
        for (std::size_t B = 0; B < N; ++B)
            for (std::size_t A = 0; A < N; ++A) {
                double v = m.der.at({C, B, A});
                for (std::size_t E = 0; E < N; ++E)
                    v -= c.coeff.at({E, C, B}) * m.comp.at({E, A}) +
                         c.coeff.at({E, C, A}) * m.comp.at({B, E});
                out.at({C, B, A}) = v;
            }
    return out;
}

// T^A_BC = Gamma^A_BC - Gamma^A_CB.
inline MultiIndexArray bundle_torsion(const BundleConnection& c) {
    const std::size_t N = 2 * c.n;
    MultiIndexArray out({N, N, N}, {Variance::Upper, Variance::Lower, Variance::Lower});
    for (std::size_t A = 0; A < N; ++A)
        for (std::size_t B = 0; B < N; ++B)
            for (std::size_t C = 0; C < N; ++C)
                out.at({A, B, C}) = c.coeff.at({A, B, C}) - c.coeff.at({A, C, B});
    return out;
}

// [B][A] Lie derivative of the bundle metric along X, from partial
// derivatives only.
inline MultiIndexArray lie_derivative_bundle(const BundleMetric& m, const BundleVec& X) {
    const std::size_t N = 2 * m.n;
    MultiIndexArray out({N, N}, {Variance::Lower, Variance::Lower});
    for (std::size_t B = 0; B < N; ++B)
        for (std::size_t A = 0; A < N; ++A) {
            double v = 0.0;
            for (std::size_t C = 0; C < N; ++C)
                v += X.comp.at({C}) * m.der.at({C, B, A}) +
                     m.comp.at({C, A}) * X.jac.at({C, B}) +
                     m.comp.at({B, C}) * X.jac.at({C, A});
            out.at({B, A}) = v;
        }
    return out;
}

// The same tensor assembled block by block from base-sized pieces: the
// flow of X preserves the bundle metric exactly when all four blocks
// vanish.  Layout matches lie_derivative_bundle ([B][A]).
inline MultiIndexArray isometry_condition_blocks(const BaseFrame& f,
                                                 std::span<const double> y,
                                                 const BundleVec& X) {
    const std::size_t n = f.n;
    const std::size_t N = 2 * n;
    MultiIndexArray out({N, N}, {Variance::Lower, Variance::Lower});
    auto hess_dg = [&](std::size_t hh, std::size_t j, std::size_t i) {
        // d_h (y^s d_s g_ji)
        double v = 0.0;
        for (std::size_t s = 0; s < n; ++s) v += y[s] * f.g2[j * n + i].hess(hh, s);
        return v;
    };
    auto ydg = [&](std::size_t j, std::size_t i) {
        double v = 0.0;
        for (std::size_t s = 0; s < n; ++s) v += y[s] * f.dg.at({s, j, i});
        return v;
    };

    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            // Base-base block.
            double v = 0.0;
            for (std::size_t h = 0; h < n; ++h) {
                v += X.comp.at({h}) * hess_dg(h, j, i) +
                     X.comp.at({n + h}) * f.dg.at({h, j, i});
                v += ydg(j, h) * X.jac.at({h, i}) +
                     f.g.at({j, h}) * X.jac.at({n + h, i});
                v += ydg(h, i) * X.jac.at({h, j}) +
                     f.g.at({h, i}) * X.jac.at({n + h, j});
                v += X.comp.at({h}) * f.da.at({h, j, i}) +
                     f.a.at({j, h}) * X.jac.at({h, i}) +
                     f.a.at({h, i}) * X.jac.at({h, j});
            }
            out.at({j, i}) = v;

            // Fiber-base block (derivative slot barred).
            v = 0.0;
            for (std::size_t h = 0; h < n; ++h) {
                v += X.comp.at({h}) * f.dg.at({h, j, i});
                v += f.g.at({j, h}) * X.jac.at({h, i});
                v += ydg(h, i) * X.jac.at({h, n + j}) +
                     f.g.at({h, i}) * X.jac.at({n + h, n + j});
                v += f.a.at({h, i}) * X.jac.at({h, n + j});
            }
            out.at({n + j, i}) = v;

            // Base-fiber block.
            v = 0.0;
            for (std::size_t h = 0; h < n; ++h) {
                v += X.comp.at({h}) * f.dg.at({h, j, i});
                v += f.g.at({h, i}) * X.jac.at({h, j});
                v += ydg(j, h) * X.jac.at({h, n + i}) +
                     f.g.at({j, h}) * X.jac.at({n + h, n + i});
                v += f.a.at({j, h}) * X.jac.at({h, n + i});
            }
            out.at({j, n + i}) = v;

            // Fiber-fiber block.
            v = 0.0;
            for (std::size_t h = 0; h < n; ++h)
                v += f.g.at({j, h}) * X.jac.at({h, n + i}) +
                     f.g.at({h, i}) * X.jac.at({h, n + j});
            out.at({n + j, n + i}) = v;
        }
    return out;
}

// ---- closed-form derivative blocks for the lifted fields ----
// All return [B][A] like the generic routes they cross-check.

// D of the associated covector of the vertical lift, under the bundle
// Levi-Civita connection.
inline MultiIndexArray covector_derivative_blocks_vertical(const BaseFrame& f,
                                                           std::span<const double>,
                                                           const VectorFrame& X) {
    const std::size_t n = f.n;
    MultiIndexArray out({2 * n, 2 * n}, {Variance::Lower, Variance::Lower});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out.at({j, i}) = X.nabla_low.at({j, i});
    return out;
}

// D of the associated covector of the complete lift, under the bundle
// Levi-Civita connection.
inline MultiIndexArray covector_derivative_blocks_complete(const BaseFrame& f,
                                                           std::span<const double> y,
                                                           const VectorFrame& X) {
    const std::size_t n = f.n;
    MultiIndexArray out({2 * n, 2 * n}, {Variance::Lower, Variance::Lower});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            // y^s d_s (D_j X_i): expand the covariant derivative before
            // differentiating.
            double v = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                double ds = X.low[i].hess(s, j);
                for (std::size_t l = 0; l < n; ++l)
                    ds -= f.gamma_partials.at({s, l, j, i}) * X.low[l].v +
                          f.gamma.at({l, j, i}) * X.low[l].d[s];
                v += y[s] * ds;
            }
            // + D_j (a X)_i - H^m_ji X_m
            double naj = X.alow[i].d[j];
            for (std::size_t l = 0; l < n; ++l)
                naj -= f.gamma.at({l, j, i}) * X.alow[l].v;
            v += naj;
            for (std::size_t mm = 0; mm < n; ++mm)
                v -= f.h_tensor.at({mm, j, i}) * X.low[mm].v;
            out.at({j, i}) = v;
            out.at({j, n + i}) = X.nabla_low.at({j, i});
            out.at({n + j, i}) = X.nabla_low.at({j, i});
        }
    return out;
}

// D of the three vector lifts under the metric connection.
inline MultiIndexArray vector_derivative_blocks_vertical(const BaseFrame& f,
                                                         std::span<const double>,
                                                         const VectorFrame& X) {
    const std::size_t n = f.n;
    MultiIndexArray out({2 * n, 2 * n}, {Variance::Lower, Variance::Upper});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t h = 0; h < n; ++h)
            out.at({j, n + h}) = X.nabla_up.at({j, h});
    return out;
}

inline MultiIndexArray vector_derivative_blocks_complete(const BaseFrame& f,
                                                         std::span<const double> y,
                                                         const VectorFrame& X) {
    const std::size_t n = f.n;
    MultiIndexArray out({2 * n, 2 * n}, {Variance::Lower, Variance::Upper});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t h = 0; h < n; ++h) {
            out.at({j, h}) = X.nabla_up.at({j, h});
            out.at({n + j, n + h}) = X.nabla_up.at({j, h});
            // y^s d_s (D_j X^h) + H^h_jm X^m - y^k R_kjm^h X^m
            double v = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                double ds = X.up[h].hess(s, j);
                for (std::size_t l = 0; l < n; ++l)
                    ds += f.gamma_partials.at({s, h, j, l}) * X.up[l].v +
                          f.gamma.at({h, j, l}) * X.up[l].d[s];
                v += y[s] * ds;
            }
            for (std::size_t mm = 0; mm < n; ++mm) {
                v += f.h_tensor.at({h, j, mm}) * X.up[mm].v;
                for (std::size_t k = 0; k < n; ++k)
                    v -= y[k] * f.riemann.at({k, j, mm, h}) * X.up[mm].v;
            }
            out.at({j, n + h}) = v;
        }
    return out;
}

inline MultiIndexArray vector_derivative_blocks_horizontal(const BaseFrame& f,
                                                           std::span<const double> y,
                                                           const VectorFrame& X) {
    const std::size_t n = f.n;
    MultiIndexArray out({2 * n, 2 * n}, {Variance::Lower, Variance::Upper});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t h = 0; h < n; ++h) {
            out.at({j, h}) = X.nabla_up.at({j, h});
            // -y^s G^h_si (D_j X^i) + H^h_jm X^m
            double v = 0.0;
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t i = 0; i < n; ++i)
                    v -= y[s] * f.gamma.at({h, s, i}) * X.nabla_up.at({j, i});
            for (std::size_t mm = 0; mm < n; ++mm)
                v += f.h_tensor.at({h, j, mm}) * X.up[mm].v;
            out.at({j, n + h}) = v;
        }
    return out;
}

// g^{BA} D_B w_A with the bundle inverse metric.
inline double bundle_divergence(const BundleMetric& m, const BundleConnection& c,
                                const BundleCovec& w) {
    MultiIndexArray nab = bundle_nabla_covec(c, w);
    const std::size_t N = 2 * m.n;
    double v = 0.0;
    for (std::size_t B = 0; B < N; ++B)
        for (std::size_t A = 0; A < N; ++A) v += m.inv.at({B, A}) * nab.at({B, A});
    return v;
}

}  // namespace synectic
