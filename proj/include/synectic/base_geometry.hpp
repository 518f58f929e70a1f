#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "synectic/errors.hpp"
#include "synectic/jet.hpp"
#include "synectic/manifold.hpp"
#include "synectic/tensor.hpp"

namespace synectic {

// Gauss-Jordan inverse of an n*n matrix of first-order jets, with partial
// pivoting on the value part.  The derivative slots ride along, so the
// result carries the first partials of the inverse as well.  det_out
// receives the determinant of the value part.
inline std::vector<Jet1> invert_jet1_matrix(const std::vector<Jet1>& a_in, std::size_t n,
                                            double& det_out) {
    if (a_in.size() != n * n) throw ShapeError("matrix must have n*n entries");
    const std::size_t nvars = a_in[0].d.size();
    std::vector<Jet1> A = a_in;
    std::vector<Jet1> B(n * n, jet1_const(0.0, nvars));
    for (std::size_t i = 0; i < n; ++i) B[i * n + i] = jet1_const(1.0, nvars);

    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col].v) > std::abs(A[piv * n + col].v)) piv = r;
        if (std::abs(A[piv * n + col].v) < 1e-12)
            throw SingularMetricError("matrix is numerically singular");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(A[piv * n + c], A[col * n + c]);
                std::swap(B[piv * n + c], B[col * n + c]);
            }
            det = -det;
        }
        det *= A[col * n + col].v;
        Jet1 inv = jet1_const(1.0, nvars) / A[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            A[col * n + c] = A[col * n + c] * inv;
            B[col * n + c] = B[col * n + c] * inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            Jet1 f = A[r * n + col];
            for (std::size_t c = 0; c < n; ++c) {
                A[r * n + c] = A[r * n + c] - f * A[col * n + c];
                B[r * n + c] = B[r * n + c] - f * B[col * n + c];
            }
        }
    }
    if (std::abs(det) < 1e-12)
        throw SingularMetricError("matrix is numerically singular");
    det_out = det;
    return B;
}

// Everything the geometry needs at one base point: second-order jets of
// the metric and of the deformation tensor a, first-order jets of the
// inverse metric and of the connection coefficients, and plain-value
// views of the derived tensors.
//
// Index layout conventions (all row-major):
//   dg, da            [s][j][i]     = d_s g_ji, d_s a_ji
//   gamma             [k][j][i]     = G^k_ji
//   gamma_partials    [t][k][j][i]  = d_t G^k_ji   (derivative slot first)
//   nabla_a           [s][j][i]     = (D_s a)_ji
//   h_tensor          [k][j][i]     = H^k_ji, the raised symmetrized
//                                     derivative of a entering both
//                                     tangent-bundle connections
//   riemann           [k][j][i][h]  = R_kji^h with the contravariant slot
//                                     last; R_kji^h = d_k G^h_ji - d_j G^h_ki
//                                     + G^h_ks G^s_ji - G^h_js G^s_ki
struct BaseFrame {
    std::size_t n = 0;
    std::vector<double> x;
    double det_g = 0.0;

    std::vector<Jet2> g2, a2;  // n*n component jets
    std::vector<Jet1> ginv1;   // n*n
    std::vector<Jet1> gamma1;  // n*n*n, [k][j][i]

    MultiIndexArray g, a, ginv;
    MultiIndexArray dg, da;
    MultiIndexArray gamma;
    MultiIndexArray gamma_partials;
    MultiIndexArray nabla_a;
    MultiIndexArray h_tensor;
    MultiIndexArray riemann;
    MultiIndexArray ricci;
    double scalar_curvature = 0.0;
};

// (D_s t)_ji for a (0,2) tensor given as n*n second-order jets.
inline MultiIndexArray covariant_derivative_02(const BaseFrame& f,
                                               const std::vector<Jet2>& t) {
    const std::size_t n = f.n;
    if (t.size() != n * n) throw ShapeError("(0,2) tensor must have n*n components");
    MultiIndexArray out({n, n, n}, {Variance::Lower, Variance::Lower, Variance::Lower});
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                double v = t[j * n + i].d[s];
                for (std::size_t l = 0; l < n; ++l) {
                    v -= f.gamma.at({l, s, j}) * t[l * n + i].v;
                    v -= f.gamma.at({l, s, i}) * t[j * n + l].v;
                }
                out.at({s, j, i}) = v;
            }
    return out;
}

inline BaseFrame base_frame(const ManifoldModel& m, std::span<const double> x) {
    const std::size_t n = m.n;
    if (x.size() != n) throw ShapeError("point has wrong dimension");

    BaseFrame f;
    f.n = n;
    f.x.assign(x.begin(), x.end());

    f.g2.reserve(n * n);
    f.a2.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            f.g2.push_back(m.g_at(j, i).jet(x));
            f.a2.push_back(m.a_at(j, i).jet(x));
        }

    std::vector<Jet1> g1(n * n);
    for (std::size_t e = 0; e < n * n; ++e) g1[e] = truncate(f.g2[e]);
    f.ginv1 = invert_jet1_matrix(g1, n, f.det_g);

    // G^k_ji = 1/2 g^{ks} (d_j g_si + d_i g_sj - d_s g_ji), carried as
    // first-order jets so the partials of the coefficients come with it.
    auto dg1 = [&](std::size_t s, std::size_t j, std::size_t i) {
        return derivative(f.g2[j * n + i], s);
    };
    f.gamma1.assign(n * n * n, jet1_const(0.0, n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                Jet1 sum = jet1_const(0.0, n);
                for (std::size_t s = 0; s < n; ++s)
                    sum = sum + f.ginv1[k * n + s] *
                                    (dg1(j, s, i) + dg1(i, s, j) - dg1(s, j, i));
                f.gamma1[(k * n + j) * n + i] = 0.5 * sum;
            }

    // Plain-value views.
    f.g = MultiIndexArray({n, n}, {Variance::Lower, Variance::Lower});
    f.a = f.g;
    f.ginv = MultiIndexArray({n, n}, {Variance::Upper, Variance::Upper});
    f.dg = MultiIndexArray({n, n, n},
                           {Variance::Lower, Variance::Lower, Variance::Lower});
    f.da = f.dg;
    f.gamma =
        MultiIndexArray({n, n, n}, {Variance::Upper, Variance::Lower, Variance::Lower});
    f.gamma_partials = MultiIndexArray(
        {n, n, n, n},
        {Variance::Lower, Variance::Upper, Variance::Lower, Variance::Lower});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            f.g.at({j, i}) = f.g2[j * n + i].v;
            f.a.at({j, i}) = f.a2[j * n + i].v;
            f.ginv.at({j, i}) = f.ginv1[j * n + i].v;
            for (std::size_t s = 0; s < n; ++s) {
                f.dg.at({s, j, i}) = f.g2[j * n + i].d[s];
                f.da.at({s, j, i}) = f.a2[j * n + i].d[s];
            }
        }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                const Jet1& G = f.gamma1[(k * n + j) * n + i];
                f.gamma.at({k, j, i}) = G.v;
                for (std::size_t t = 0; t < n; ++t)
                    f.gamma_partials.at({t, k, j, i}) = G.d[t];
            }

    f.nabla_a = covariant_derivative_02(f, f.a2);

    f.h_tensor =
        MultiIndexArray({n, n, n}, {Variance::Upper, Variance::Lower, Variance::Lower});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (std::size_t s = 0; s < n; ++s)
                    v += f.ginv.at({k, s}) * (f.nabla_a.at({j, s, i}) +
                                              f.nabla_a.at({i, s, j}) -
                                              f.nabla_a.at({s, j, i}));
                f.h_tensor.at({k, j, i}) = 0.5 * v;
            }

    f.riemann = MultiIndexArray(
        {n, n, n, n},
        {Variance::Lower, Variance::Lower, Variance::Lower, Variance::Upper});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t h = 0; h < n; ++h) {
                    double v = f.gamma_partials.at({k, h, j, i}) -
                               f.gamma_partials.at({j, h, k, i});
                    for (std::size_t s = 0; s < n; ++s)
                        v += f.gamma.at({h, k, s}) * f.gamma.at({s, j, i}) -
                             f.gamma.at({h, j, s}) * f.gamma.at({s, k, i});
                    f.riemann.at({k, j, i, h}) = v;
                }

    f.ricci = MultiIndexArray({n, n}, {Variance::Lower, Variance::Lower});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < n; ++k) v += f.riemann.at({k, j, i, k});
            f.ricci.at({j, i}) = v;
        }
    f.scalar_curvature = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            f.scalar_curvature += f.ginv.at({j, i}) * f.ricci.at({j, i});

    return f;
}

// A vector field evaluated at the frame's point: component jets, the
// lowered and a-lowered component jets, and covariant derivatives.
// Layouts: dcomp[s][h] = d_s X^h, nabla_up[j][h] = (D_j X)^h,
// nabla_low[j][i] = D_j X_i.
struct VectorFrame {
    std::size_t n = 0;
    std::vector<Jet2> up;    // X^h
    std::vector<Jet2> low;   // X_i   = g_ih X^h
    std::vector<Jet2> alow;  // (aX)_i = a_ih X^h
    MultiIndexArray comp;
    MultiIndexArray dcomp;
    MultiIndexArray nabla_up;
    MultiIndexArray nabla_low;
};

inline VectorFrame vector_frame(const BaseFrame& f, const std::vector<ScalarField>& comps) {
    const std::size_t n = f.n;
    if (comps.size() != n) throw ShapeError("vector field must have n components");
    VectorFrame v;
    v.n = n;
    for (std::size_t h = 0; h < n; ++h) v.up.push_back(comps[h].jet(f.x));
    for (std::size_t i = 0; i < n; ++i) {
        Jet2 lo = jet2_const(0.0, n), alo = jet2_const(0.0, n);
        for (std::size_t h = 0; h < n; ++h) {
            lo = lo + f.g2[i * n + h] * v.up[h];
            alo = alo + f.a2[i * n + h] * v.up[h];
        }
        v.low.push_back(lo);
        v.alow.push_back(alo);
    }

    v.comp = MultiIndexArray({n}, {Variance::Upper});
    v.dcomp = MultiIndexArray({n, n}, {Variance::Lower, Variance::Upper});
    v.nabla_up = MultiIndexArray({n, n}, {Variance::Lower, Variance::Upper});
    v.nabla_low = MultiIndexArray({n, n}, {Variance::Lower, Variance::Lower});
    for (std::size_t h = 0; h < n; ++h) {
        v.comp.at({h}) = v.up[h].v;
        for (std::size_t s = 0; s < n; ++s) v.dcomp.at({s, h}) = v.up[h].d[s];
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t h = 0; h < n; ++h) {
            double up = v.up[h].d[j];
            for (std::size_t s = 0; s < n; ++s)
                up += f.gamma.at({h, j, s}) * v.up[s].v;
            v.nabla_up.at({j, h}) = up;

            double lo = v.low[h].d[j];
            for (std::size_t s = 0; s < n; ++s)
                lo -= f.gamma.at({s, j, h}) * v.low[s].v;
            v.nabla_low.at({j, h}) = lo;
        }
    return v;
}

// A 1-form at the frame's point; nabla[j][i] = D_j w_i.
struct CovectorFrame {
    std::size_t n = 0;
    std::vector<Jet2> low;  // w_i
    MultiIndexArray comp;
    MultiIndexArray dcomp;  // [s][i] = d_s w_i
    MultiIndexArray nabla;
};

inline CovectorFrame covector_frame(const BaseFrame& f,
                                    const std::vector<ScalarField>& comps) {
    const std::size_t n = f.n;
    if (comps.size() != n) throw ShapeError("1-form must have n components");
    CovectorFrame w;
    w.n = n;
    for (std::size_t i = 0; i < n; ++i) w.low.push_back(comps[i].jet(f.x));
    w.comp = MultiIndexArray({n}, {Variance::Lower});
    w.dcomp = MultiIndexArray({n, n}, {Variance::Lower, Variance::Lower});
    w.nabla = MultiIndexArray({n, n}, {Variance::Lower, Variance::Lower});
    for (std::size_t i = 0; i < n; ++i) {
        w.comp.at({i}) = w.low[i].v;
        for (std::size_t s = 0; s < n; ++s) w.dcomp.at({s, i}) = w.low[i].d[s];
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            double v = w.low[i].d[j];
            for (std::size_t s = 0; s < n; ++s)
                v -= f.gamma.at({s, j, i}) * w.low[s].v;
            w.nabla.at({j, i}) = v;
        }
    return w;
}

// A (1,1) tensor field C^k_i at the frame's point (k first in storage).
struct EndoFrame {
    std::size_t n = 0;
    std::vector<Jet2> comp2;  // n*n jets, [k][i]
    MultiIndexArray comp;     // (n,n) Upper,Lower
    MultiIndexArray dcomp;    // (n,n,n) [s][k][i]
};

inline EndoFrame endo_frame(const BaseFrame& f, const std::vector<ScalarField>& comps) {
    const std::size_t n = f.n;
    if (comps.size() != n * n) throw ShapeError("(1,1) field must have n*n components");
    EndoFrame c;
    c.n = n;
    for (std::size_t e = 0; e < n * n; ++e) c.comp2.push_back(comps[e].jet(f.x));
    c.comp = MultiIndexArray({n, n}, {Variance::Upper, Variance::Lower});
    c.dcomp =
        MultiIndexArray({n, n, n}, {Variance::Lower, Variance::Upper, Variance::Lower});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            c.comp.at({k, i}) = c.comp2[k * n + i].v;
            for (std::size_t s = 0; s < n; ++s)
                c.dcomp.at({s, k, i}) = c.comp2[k * n + i].d[s];
        }
    return c;
}

// D_j X_i + D_i X_j: vanishes exactly when the flow of X preserves g.
inline MultiIndexArray killing_deviation(const BaseFrame& f, const VectorFrame& v) {
    MultiIndexArray out = v.nabla_low;
    for (std::size_t j = 0; j < f.n; ++j)
        for (std::size_t i = 0; i < f.n; ++i)
            out.at({j, i}) = v.nabla_low.at({j, i}) + v.nabla_low.at({i, j});
    return out;
}

// Lie derivative of the metric along X, computed from partial derivatives
// only — an independent route to the same tensor as killing_deviation.
inline MultiIndexArray lie_derivative_metric(const BaseFrame& f, const VectorFrame& v) {
    const std::size_t n = f.n;
    MultiIndexArray out({n, n}, {Variance::Lower, Variance::Lower});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += v.comp.at({k}) * f.dg.at({k, j, i}) +
                     f.g.at({k, i}) * v.dcomp.at({j, k}) +
                     f.g.at({j, k}) * v.dcomp.at({i, k});
            out.at({j, i}) = s;
        }
    return out;
}

// trace of the covariant derivative; equals the coordinate divergence
// plus the connection trace term.
inline double divergence(const BaseFrame&, const VectorFrame& v) {
    double s = 0.0;
    for (std::size_t h = 0; h < v.n; ++h) s += v.nabla_up.at({h, h});
    return s;
}

namespace detail {

inline MultiIndexArray contract_slot_with_matrix(const BaseFrame& f,
                                                 const MultiIndexArray& t,
                                                 std::size_t slot,
                                                 const MultiIndexArray& m,
                                                 Variance need, Variance becomes) {
    if (slot >= t.rank()) throw ShapeError("slot out of range");
    if (t.variance(slot) != need) throw ShapeError("slot has the wrong variance");
    if (t.dim(slot) != f.n) throw ShapeError("slot dimension mismatch");
    auto var = t.variances();
    var[slot] = becomes;
    MultiIndexArray out(t.dims(), var);
    std::vector<std::size_t> idx(t.rank(), 0);
    const std::size_t total = out.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        out.unflatten(flat, idx);
        double s = 0.0;
        std::size_t k = idx[slot];
        for (std::size_t r = 0; r < f.n; ++r) {
            idx[slot] = r;
            s += m.at({k, r}) * t.at(std::span<const std::size_t>(idx));
        }
        idx[slot] = k;
        out.at(std::span<const std::size_t>(idx)) = s;
    }
    return out;
}

}  // namespace detail

// Raise a covariant slot with the inverse metric, preserving slot order.
inline MultiIndexArray raise_index(const BaseFrame& f, const MultiIndexArray& t,
                                   std::size_t slot) {
    return detail::contract_slot_with_matrix(f, t, slot, f.ginv, Variance::Lower,
                                             Variance::Upper);
}

// Lower a contravariant slot with the metric, preserving slot order.
inline MultiIndexArray lower_index(const BaseFrame& f, const MultiIndexArray& t,
                                   std::size_t slot) {
    return detail::contract_slot_with_matrix(f, t, slot, f.g, Variance::Upper,
                                             Variance::Lower);
}

}  // namespace synectic
