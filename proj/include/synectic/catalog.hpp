#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "synectic/manifold.hpp"

namespace synectic {

// Built-in models.  Component functions are C++ closures written in jet
// arithmetic; the expression-language fixtures in the tests evaluate the
// same geometry from parsed text and must agree, which cross-checks the
// two evaluation paths against each other.

namespace catalog_detail {

inline ScalarField coord(std::size_t k) {
    return field_from_callable([k](auto x) { return x[k]; });
}

inline ScalarField coord_neg(std::size_t k) {
    return field_from_callable([k](auto x) { return -x[k]; });
}

inline ScalarField coord_scaled(std::size_t k, double c) {
    return field_from_callable([k, c](auto x) { return c * x[k]; });
}

}  // namespace catalog_detail

inline ManifoldModel builtin_euclid2() {
    using namespace catalog_detail;
    ManifoldModel m;
    m.name = "euclid2";
    m.n = 2;
    m.box = {{-2.0, 2.0}, {-2.0, 2.0}};

    std::map<std::pair<std::size_t, std::size_t>, ScalarField> g;
    g[{0, 0}] = field_const(1.0);
    g[{1, 1}] = field_const(1.0);
    m.metric = symmetric_components(2, g);
    m.a = zero_components(4);

    m.fields["rotation"] = {coord_neg(1), coord(0)};
    m.fields["dilation"] = {coord(0), coord(1)};
    m.fields["position"] = {coord(0), coord(1)};
    m.fields["translation"] = {field_const(1.0), field_const(0.0)};
    m.fields["gradient"] = {coord_scaled(0, 2.0), coord_scaled(1, 2.0)};

    m.forms["dx1"] = {field_const(1.0), field_const(0.0)};
    m.forms["shear"] = {coord(1), field_const(0.0)};

    m.endos["zero"] = zero_components(4);
    m.endos["identity"] = zero_components(4);
    m.endos["identity"][0] = field_const(1.0);
    m.endos["identity"][3] = field_const(1.0);
    m.endos["nilpotent"] = zero_components(4);
    m.endos["nilpotent"][1] = field_const(1.0);  // C^1_2

    m.reference_christoffel = [](std::span<const double>) {
        return std::vector<double>(8, 0.0);
    };
    return m;
}

inline ManifoldModel builtin_sphere() {
    using namespace catalog_detail;
    ManifoldModel m;
    m.name = "sphere";
    m.n = 2;
    m.box = {{0.3, 2.8}, {0.0, 6.28}};

    std::map<std::pair<std::size_t, std::size_t>, ScalarField> g;
    g[{0, 0}] = field_const(1.0);
    g[{1, 1}] = field_from_callable([](auto x) {
        using std::sin;
        auto s = sin(x[0]);
        return s * s;
    });
    m.metric = symmetric_components(2, g);
    m.a = zero_components(4);

    m.fields["rotation"] = {field_const(0.0), field_const(1.0)};
    m.fields["meridian"] = {field_const(1.0), field_const(0.0)};

    m.forms["phi"] = {field_const(0.0), field_from_callable([](auto x) {
                          using std::sin;
                          auto s = sin(x[0]);
                          return s * s;
                      })};

    m.endos["zero"] = zero_components(4);
    m.endos["identity"] = zero_components(4);
    m.endos["identity"][0] = field_const(1.0);
    m.endos["identity"][3] = field_const(1.0);
    m.endos["nilpotent"] = zero_components(4);
    m.endos["nilpotent"][1] = field_const(1.0);

    // [k][j][i] row-major; nonzero: G^1_22 = -sin cos, G^2_12 = G^2_21 = cot.
    m.reference_christoffel = [](std::span<const double> x) {
        std::vector<double> G(8, 0.0);
        double s = std::sin(x[0]), c = std::cos(x[0]);
        G[0 * 4 + 1 * 2 + 1] = -s * c;
        G[1 * 4 + 0 * 2 + 1] = c / s;
        G[1 * 4 + 1 * 2 + 0] = c / s;
        return G;
    };
    return m;
}

inline ManifoldModel builtin_poincare() {
    using namespace catalog_detail;
    ManifoldModel m;
    m.name = "poincare";
    m.n = 2;
    m.box = {{-3.0, 3.0}, {0.5, 5.0}};

    auto inv_x2_sq = field_from_callable([](auto x) { return 1.0 / (x[1] * x[1]); });
    std::map<std::pair<std::size_t, std::size_t>, ScalarField> g;
    g[{0, 0}] = inv_x2_sq;
    g[{1, 1}] = inv_x2_sq;
    m.metric = symmetric_components(2, g);
    m.a = zero_components(4);

    m.fields["htranslation"] = {field_const(1.0), field_const(0.0)};
    m.fields["dilation"] = {coord(0), coord(1)};
    m.fields["vertical"] = {field_const(0.0), field_const(1.0)};

    m.forms["dx1"] = {field_const(1.0), field_const(0.0)};

    m.endos["zero"] = zero_components(4);
    m.endos["identity"] = zero_components(4);
    m.endos["identity"][0] = field_const(1.0);
    m.endos["identity"][3] = field_const(1.0);

    // Nonzero: G^1_12 = G^1_21 = -1/x2, G^2_11 = 1/x2, G^2_22 = -1/x2.
    m.reference_christoffel = [](std::span<const double> x) {
        std::vector<double> G(8, 0.0);
        double r = 1.0 / x[1];
        G[0 * 4 + 0 * 2 + 1] = -r;
        G[0 * 4 + 1 * 2 + 0] = -r;
        G[1 * 4 + 0 * 2 + 0] = r;
        G[1 * 4 + 1 * 2 + 1] = -r;
        return G;
    };
    return m;
}

inline std::vector<std::string> builtin_names() {
    return {"euclid2", "sphere", "poincare"};
}

inline ManifoldModel builtin_model(const std::string& name) {
    if (name == "euclid2") return builtin_euclid2();
    if (name == "sphere") return builtin_sphere();
    if (name == "poincare") return builtin_poincare();
    throw UnknownFieldError("unknown built-in manifold '" + name + "'");
}

// ---- deformation tensor variants used by the verification suite ----

inline std::vector<ScalarField> a_zero(std::size_t n) { return zero_components(n * n); }

inline std::vector<ScalarField> a_identity(std::size_t n) {
    auto a = zero_components(n * n);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = field_const(1.0);
    return a;
}

// a = c * g, sharing the model's metric components.
inline std::vector<ScalarField> a_scaled_metric(const ManifoldModel& m, double c) {
    std::vector<ScalarField> a;
    a.reserve(m.n * m.n);
    for (const auto& gf : m.metric)
        a.push_back({
            [gf, c](std::span<const double> x) { return c * gf.value(x); },
            [gf, c](std::span<const double> x) { return c * gf.jet(x); },
        });
    return a;
}

// a = diag(x1^2, 0, ..., 0).
inline std::vector<ScalarField> a_diag_x1_squared(std::size_t n) {
    auto a = zero_components(n * n);
    a[0] = field_from_callable([](auto x) { return x[0] * x[0]; });
    return a;
}

// a = diag(1, 0, ..., 0).
inline std::vector<ScalarField> a_diag_e1(std::size_t n) {
    auto a = zero_components(n * n);
    a[0] = field_const(1.0);
    return a;
}

}  // namespace synectic
