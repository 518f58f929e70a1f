#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "synectic/errors.hpp"

namespace synectic {

// Forward-mode jets in m variables.  Jet1 carries a value and a gradient,
// Jet2 additionally a dense m-by-m Hessian (kept symmetric by
// construction).  Arithmetic propagates derivatives exactly through the
// chain rule; there is no truncation anywhere, so agreement with finite
// differences in the tests is a genuine cross-check, not a tautology.
//
// Geometry code evaluates every model scalar (metric, deformation tensor,
// field components) as a Jet2 in the base coordinates.  First derivatives
// of derived quantities such as Christoffel symbols then live naturally in
// Jet1, obtained by the derivative() extraction below.

struct Jet1 {
    double v = 0.0;
    std::vector<double> d;  // d[i] = d/dx_i

    std::size_t vars() const { return d.size(); }
};

struct Jet2 {
    double v = 0.0;
    std::vector<double> d;  // d[i] = d/dx_i
    std::vector<double> h;  // h[i*m + j] = d^2/dx_i dx_j, row-major m*m

    std::size_t vars() const { return d.size(); }

    double hess(std::size_t i, std::size_t j) const { return h[i * vars() + j]; }
};

inline Jet1 jet1_const(double c, std::size_t m) {
    return {c, std::vector<double>(m, 0.0)};
}

inline Jet1 jet1_var(double x, std::size_t m, std::size_t i) {
    Jet1 r{x, std::vector<double>(m, 0.0)};
    r.d[i] = 1.0;
    return r;
}

inline Jet2 jet2_const(double c, std::size_t m) {
    return {c, std::vector<double>(m, 0.0), std::vector<double>(m * m, 0.0)};
}

inline Jet2 jet2_var(double x, std::size_t m, std::size_t i) {
    Jet2 r = jet2_const(x, m);
    r.v = x;
    r.d[i] = 1.0;
    return r;
}

inline void check_same_vars(std::size_t a, std::size_t b) {
    if (a != b) throw ShapeError("jet operands carry different variable counts");
}

// Row s of the Hessian of a Jet2 is the gradient of its s-th partial:
// derivative(u, s) is the first-order jet of du/dx_s.
inline Jet1 derivative(const Jet2& u, std::size_t s) {
    const std::size_t m = u.vars();
    Jet1 r{u.d[s], std::vector<double>(m)};
    for (std::size_t j = 0; j < m; ++j) r.d[j] = u.h[s * m + j];
    return r;
}

inline Jet1 truncate(const Jet2& u) { return {u.v, u.d}; }

// ---- Jet1 arithmetic ----

inline Jet1 operator+(const Jet1& a, const Jet1& b) {
    check_same_vars(a.vars(), b.vars());
    Jet1 r = a;
    r.v += b.v;
    for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] += b.d[i];
    return r;
}

inline Jet1 operator-(const Jet1& a, const Jet1& b) {
    check_same_vars(a.vars(), b.vars());
    Jet1 r = a;
    r.v -= b.v;
    for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] -= b.d[i];
    return r;
}

inline Jet1 operator-(const Jet1& a) {
    Jet1 r = a;
    r.v = -r.v;
    for (double& x : r.d) x = -x;
    return r;
}

inline Jet1 operator*(const Jet1& a, const Jet1& b) {
    check_same_vars(a.vars(), b.vars());
    Jet1 r{a.v * b.v, std::vector<double>(a.vars())};
    for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = a.v * b.d[i] + b.v * a.d[i];
    return r;
}

inline Jet1 operator*(const Jet1& a, double c) {
    Jet1 r = a;
    r.v *= c;
    for (double& x : r.d) x *= c;
    return r;
}

inline Jet1 operator*(double c, const Jet1& a) { return a * c; }

inline Jet1 operator+(const Jet1& a, double c) {
    Jet1 r = a;
    r.v += c;
    return r;
}

inline Jet1 operator+(double c, const Jet1& a) { return a + c; }

inline Jet1 operator-(const Jet1& a, double c) { return a + (-c); }

inline Jet1 operator-(double c, const Jet1& a) { return -(a - c); }

// Composition with a scalar function given value and first derivative at a.v.
inline Jet1 compose(const Jet1& a, double f, double fp) {
    Jet1 r{f, std::vector<double>(a.vars())};
    for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = fp * a.d[i];
    return r;
}

inline Jet1 operator/(const Jet1& a, const Jet1& b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    return a * compose(b, 1.0 / b.v, -1.0 / (b.v * b.v));
}

inline Jet1 operator/(const Jet1& a, double c) {
    if (c == 0.0) throw DomainError("division by zero");
    return a * (1.0 / c);
}

inline Jet1 operator/(double c, const Jet1& b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    return compose(b, c / b.v, -c / (b.v * b.v));
}

// ---- Jet2 arithmetic ----

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    check_same_vars(a.vars(), b.vars());
    Jet2 r = a;
    r.v += b.v;
    for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] += b.d[i];
    for (std::size_t i = 0; i < r.h.size(); ++i) r.h[i] += b.h[i];
    return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    check_same_vars(a.vars(), b.vars());
    Jet2 r = a;
    r.v -= b.v;
    for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] -= b.d[i];
    for (std::size_t i = 0; i < r.h.size(); ++i) r.h[i] -= b.h[i];
    return r;
}

inline Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    r.v = -r.v;
    for (double& x : r.d) x = -x;
    for (double& x : r.h) x = -x;
    return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    check_same_vars(a.vars(), b.vars());
    const std::size_t m = a.vars();
    Jet2 r = jet2_const(a.v * b.v, m);
    for (std::size_t i = 0; i < m; ++i) r.d[i] = a.v * b.d[i] + b.v * a.d[i];
    // Fill the upper triangle and mirror it so the Hessian stays
    // symmetric to the last bit.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double v = a.v * b.h[i * m + j] + b.v * a.h[i * m + j] +
                       a.d[i] * b.d[j] + a.d[j] * b.d[i];
            r.h[i * m + j] = v;
            r.h[j * m + i] = v;
        }
    return r;
}

inline Jet2 operator*(const Jet2& a, double c) {
    Jet2 r = a;
    r.v *= c;
    for (double& x : r.d) x *= c;
    for (double& x : r.h) x *= c;
    return r;
}

inline Jet2 operator*(double c, const Jet2& a) { return a * c; }

inline Jet2 operator+(const Jet2& a, double c) {
    Jet2 r = a;
    r.v += c;
    return r;
}

inline Jet2 operator+(double c, const Jet2& a) { return a + c; }

inline Jet2 operator-(const Jet2& a, double c) { return a + (-c); }

inline Jet2 operator-(double c, const Jet2& a) { return -(a - c); }

// Composition with a scalar function given f, f', f'' at a.v:
//   (f o a)_i  = f' a_i
//   (f o a)_ij = f' a_ij + f'' a_i a_j
inline Jet2 compose(const Jet2& a, double f, double fp, double fpp) {
    const std::size_t m = a.vars();
    Jet2 r = jet2_const(f, m);
    for (std::size_t i = 0; i < m; ++i) r.d[i] = fp * a.d[i];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double v = fp * a.h[i * m + j] + fpp * a.d[i] * a.d[j];
            r.h[i * m + j] = v;
            r.h[j * m + i] = v;
        }
    return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    const double iv = 1.0 / b.v;
    return a * compose(b, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Jet2 operator/(const Jet2& a, double c) {
    if (c == 0.0) throw DomainError("division by zero");
    return a * (1.0 / c);
}

inline Jet2 operator/(double c, const Jet2& b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    const double iv = 1.0 / b.v;
    return compose(b, c * iv, -c * iv * iv, 2.0 * c * iv * iv * iv);
}

// ---- elementary functions ----

inline Jet1 sin(const Jet1& a) { return compose(a, std::sin(a.v), std::cos(a.v)); }
inline Jet1 cos(const Jet1& a) { return compose(a, std::cos(a.v), -std::sin(a.v)); }

inline Jet1 tan(const Jet1& a) {
    const double t = std::tan(a.v);
    return compose(a, t, 1.0 + t * t);
}

inline Jet1 exp(const Jet1& a) {
    const double e = std::exp(a.v);
    return compose(a, e, e);
}

inline Jet1 log(const Jet1& a) {
    if (a.v <= 0.0) throw DomainError("log of non-positive value");
    return compose(a, std::log(a.v), 1.0 / a.v);
}

inline Jet1 sqrt(const Jet1& a) {
    if (a.v <= 0.0) throw DomainError("sqrt of non-positive value");
    const double s = std::sqrt(a.v);
    return compose(a, s, 0.5 / s);
}

inline Jet2 sin(const Jet2& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return compose(a, s, c, -s);
}

inline Jet2 cos(const Jet2& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return compose(a, c, -s, -c);
}

inline Jet2 tan(const Jet2& a) {
    const double t = std::tan(a.v);
    const double sec2 = 1.0 + t * t;
    return compose(a, t, sec2, 2.0 * t * sec2);
}

inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return compose(a, e, e, e);
}

inline Jet2 log(const Jet2& a) {
    if (a.v <= 0.0) throw DomainError("log of non-positive value");
    return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

inline Jet2 sqrt(const Jet2& a) {
    if (a.v <= 0.0) throw DomainError("sqrt of non-positive value");
    const double s = std::sqrt(a.v);
    return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}

// General power, valid only for positive base.  Integer exponents should
// go through pow_int instead, which stays defined for any base.
inline Jet1 pow(const Jet1& a, double p) {
    if (a.v <= 0.0) throw DomainError("fractional power of non-positive base");
    const double f = std::pow(a.v, p);
    return compose(a, f, p * f / a.v);
}

inline Jet2 pow(const Jet2& a, double p) {
    if (a.v <= 0.0) throw DomainError("fractional power of non-positive base");
    const double f = std::pow(a.v, p);
    const double fp = p * f / a.v;
    return compose(a, f, fp, (p - 1.0) * fp / a.v);
}

inline double constant_like(double, double c) { return c; }
inline Jet1 constant_like(const Jet1& u, double c) { return jet1_const(c, u.vars()); }
inline Jet2 constant_like(const Jet2& u, double c) { return jet2_const(c, u.vars()); }

inline double value_of(double x) { return x; }
inline double value_of(const Jet1& u) { return u.v; }
inline double value_of(const Jet2& u) { return u.v; }

// Integer power by repeated multiplication.  Keeps x^k smooth through
// x = 0 for k >= 0, which the general pow cannot do.
template <class T>
T pow_int(const T& u, long k) {
    if (k < 0) return constant_like(u, 1.0) / pow_int(u, -k);
    T acc = constant_like(u, 1.0);
    T base = u;
    while (k > 0) {
        if (k & 1) acc = acc * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return acc;
}

}  // namespace synectic
