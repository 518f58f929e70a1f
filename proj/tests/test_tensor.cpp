#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "synectic/rng.hpp"
#include "synectic/tensor.hpp"
#include "support/approx.hpp"

using namespace synectic;

namespace {

MultiIndexArray random_matrix(Rng& rng, Variance v0, Variance v1, std::size_t n = 2) {
    MultiIndexArray m({n, n}, {v0, v1});
    for (double& x : m.flat()) x = rng.uniform(-2.0, 2.0);
    return m;
}

}  // namespace

TEST_CASE("contraction against the identity returns the other factor", "[tensor]") {
    MultiIndexArray id({2, 2}, {Variance::Upper, Variance::Lower});
    id.at({0, 0}) = 1.0;
    id.at({1, 1}) = 1.0;

    Rng rng(11);
    MultiIndexArray v({2}, {Variance::Upper});
    v.at({0}) = rng.uniform(-1.0, 1.0);
    v.at({1}) = rng.uniform(-1.0, 1.0);

    MultiIndexArray r = contract(id, v, 1, 0);
    REQUIRE(r.rank() == 1);
    CHECK(r.variance(0) == Variance::Upper);
    CHECK(near(r.at({0}), v.at({0}), 1e-15));
    CHECK(near(r.at({1}), v.at({1}), 1e-15));
}

TEST_CASE("contraction matches an explicit loop oracle", "[tensor]") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        MultiIndexArray a({2, 3}, {Variance::Lower, Variance::Upper});
        MultiIndexArray b({3, 2}, {Variance::Lower, Variance::Upper});
        for (double& x : a.flat()) x = rng.uniform(-1.0, 1.0);
        for (double& x : b.flat()) x = rng.uniform(-1.0, 1.0);

        MultiIndexArray r = contract(a, b, 1, 0);
        REQUIRE(r.dims() == std::vector<std::size_t>({2, 2}));
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                double sum = 0.0;
                for (std::size_t k = 0; k < 3; ++k)
                    sum += a.at({i, k}) * b.at({k, j});
                CHECK(near(r.at({i, j}), sum, 1e-14));
            }
    }
}

TEST_CASE("contraction is bilinear", "[tensor]") {
    Rng rng(13);
    auto a1 = random_matrix(rng, Variance::Lower, Variance::Upper);
    auto a2 = random_matrix(rng, Variance::Lower, Variance::Upper);
    auto b = random_matrix(rng, Variance::Lower, Variance::Upper);
    double s = rng.uniform(-3.0, 3.0);

    auto lhs = contract(a1 * s + a2, b, 1, 0);
    auto rhs = contract(a1, b, 1, 0) * s + contract(a2, b, 1, 0);
    CHECK(max_abs_diff(lhs, rhs) < 1e-13);
}

TEST_CASE("contraction validates shape and variance", "[tensor]") {
    MultiIndexArray a({2, 2}, {Variance::Lower, Variance::Lower});
    MultiIndexArray b({3}, {Variance::Upper});
    MultiIndexArray c({2}, {Variance::Lower});
    CHECK_THROWS_AS(contract(a, b, 1, 0), ShapeError);   // dimension mismatch
    CHECK_THROWS_AS(contract(a, c, 1, 0), ShapeError);   // same variance
    CHECK_THROWS_AS(contract(a, c, 5, 0), ShapeError);   // slot out of range
}

TEST_CASE("pair symmetrization, scaled and unscaled", "[tensor]") {
    MultiIndexArray a({2, 2}, {Variance::Lower, Variance::Lower});
    a.at({0, 0}) = 1.0;
    a.at({0, 1}) = 2.0;
    a.at({1, 0}) = 4.0;
    a.at({1, 1}) = -3.0;

    auto s = sym_pair(a, 0, 1);  // scaled: (a + a^T)/2
    CHECK(near(s.at({0, 1}), 3.0, 1e-15));
    CHECK(near(s.at({1, 0}), 3.0, 1e-15));
    CHECK(near(s.at({0, 0}), 1.0, 1e-15));

    auto su = sym_pair(a, 0, 1, false);  // unscaled: a + a^T
    CHECK(near(su.at({0, 1}), 6.0, 1e-15));
    CHECK(near(su.at({0, 0}), 2.0, 1e-15));

    auto t = antisym_pair(a, 0, 1);
    CHECK(near(t.at({0, 1}), -1.0, 1e-15));
    CHECK(near(t.at({1, 0}), 1.0, 1e-15));
    CHECK(near(t.at({0, 0}), 0.0, 1e-15));
}

TEST_CASE("antisymmetrizing a symmetrized tensor annihilates it", "[tensor]") {
    Rng rng(14);
    MultiIndexArray a({2, 3, 3}, {Variance::Upper, Variance::Lower, Variance::Lower});
    for (double& x : a.flat()) x = rng.uniform(-5.0, 5.0);
    auto s = sym_pair(a, 1, 2);
    auto z = antisym_pair(s, 1, 2);
    CHECK(z.max_abs() < 1e-14);

    auto t = antisym_pair(a, 1, 2);
    auto z2 = sym_pair(t, 1, 2);
    CHECK(z2.max_abs() < 1e-14);
}

TEST_CASE("symmetrization requires matching slots", "[tensor]") {
    MultiIndexArray a({2, 3}, {Variance::Lower, Variance::Lower});
    CHECK_THROWS_AS(sym_pair(a, 0, 1), ShapeError);  // different dims
    MultiIndexArray b({2, 2}, {Variance::Lower, Variance::Upper});
    CHECK_THROWS_AS(antisym_pair(b, 0, 1), ShapeError);  // different variance
}

TEST_CASE("trace contracts two slots of one tensor", "[tensor]") {
    MultiIndexArray a({2, 2, 2}, {Variance::Upper, Variance::Lower, Variance::Lower});
    // a^k_{ji}: trace over k and j leaves a covector in i.
    a.at({0, 0, 0}) = 1.0;
    a.at({1, 1, 0}) = 2.0;
    a.at({0, 1, 1}) = 5.0;
    a.at({1, 0, 1}) = 7.0;
    auto r = trace(a, 0, 1);
    REQUIRE(r.rank() == 1);
    CHECK(near(r.at({0}), 3.0, 1e-15));
    CHECK(near(r.at({1}), 0.0, 1e-15));
}

TEST_CASE("element access checks rank and range", "[tensor]") {
    MultiIndexArray a({2, 2}, {Variance::Lower, Variance::Lower});
    CHECK_THROWS_AS(a.at({0}), ShapeError);
    CHECK_THROWS_AS(a.at({0, 2}), ShapeError);
    CHECK_THROWS_AS(a += MultiIndexArray({2}, {Variance::Lower}), ShapeError);
}
