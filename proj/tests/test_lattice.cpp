#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latcov/enumerate.hpp"
#include "latcov/errors.hpp"
#include "latcov/lattice.hpp"
#include "oracles.hpp"

using namespace latcov;

namespace {
Vec qv(std::initializer_list<long> xs) {
    Vec v;
    for (long x : xs) v.push_back(Q(x));
    return v;
}
}  // namespace

TEST_CASE("rational strings round-trip in canonical form") {
    CHECK(to_string(parse_rational("6/4")) == "3/2");
    CHECK(to_string(parse_rational("-0/7")) == "0");
    CHECK(to_string(parse_rational("+12")) == "12");
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("1.5"), Error);
    CHECK_THROWS_AS(parse_rational("/3"), Error);
    CHECK_THROWS_AS(parse_rational("3/-4"), Error);
}

TEST_CASE("determinant of identity and diagonal bases") {
    CHECK(determinant(Lattice::integer_grid(3)) == 1);
    CHECK(determinant(Lattice::diagonal(qv({2, 3}))) == 6);
}

TEST_CASE("determinant is invariant under unimodular change of basis") {
    Rng rng(11);
    for (int s = 0; s < 50; ++s) {
        int d = 1 + static_cast<int>(rng.below(5));
        Lattice l = oracle_ref::random_lattice(rng, d);
        IMat u = oracle_ref::random_unimodular(rng, d);
        Lattice t = transform(l, u);
        Mat b(d, Vec(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) b[i][j] = l.basis[j][i];
        CHECK(determinant(l) == abs(oracle_ref::cofactor_det(b)));
        CHECK(determinant(t) == determinant(l));
        CHECK(canonical_basis(t) == canonical_basis(l));
    }
}

TEST_CASE("dual lattice: self-dual grid, diagonal case and determinant identity") {
    Lattice z3 = Lattice::integer_grid(3);
    CHECK(canonical_basis(dual(z3)) == canonical_basis(z3));
    Lattice d = Lattice::diagonal(Vec{Q(2), Q(3)});
    Lattice dd = dual(d);
    CHECK(dd.basis[0] == Vec{Q(1, 2), Q(0)});
    CHECK(dd.basis[1] == Vec{Q(0), Q(1, 3)});
    // every pairing is integral
    for (const auto& x : d.basis)
        for (const auto& y : dd.basis) CHECK(dot(x, y).get_den() == 1);
    // maximality: a slightly longer vector than (1/2, 0) pairs non-integrally
    Vec bad{Q(1, 2) + Q(1, 100), Q(0)};
    CHECK(dot(d.basis[0], bad).get_den() != 1);
    Rng rng(5);
    for (int s = 0; s < 30; ++s) {
        int dim = 1 + static_cast<int>(rng.below(5));
        Lattice l = oracle_ref::random_lattice(rng, dim);
        CHECK(determinant(dual(l)) * determinant(l) == 1);
        CHECK(canonical_basis(dual(dual(l))) == canonical_basis(l));
    }
}

TEST_CASE("primitivity") {
    Lattice z2 = Lattice::integer_grid(2);
    CHECK(is_primitive(qv({1, 0}), z2));
    CHECK_FALSE(is_primitive(qv({2, 4}), z2));
    CHECK_THROWS_AS(is_primitive(qv({0, 0}), z2), Error);
    Lattice d = Lattice::diagonal(Vec{Q(2), Q(3)});
    try {
        is_primitive(qv({1, 0}), d);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotLatticePoint);
    }
    Rng rng(17);
    for (int s = 0; s < 100; ++s) {
        int dim = 2 + static_cast<int>(rng.below(3));
        Lattice l = oracle_ref::random_lattice(rng, dim);
        IVec c(dim);
        for (auto& x : c) x = Z(static_cast<long>(rng.below(11)) - 5);
        if (gcd_all(c) == 0) continue;
        Z g = gcd_all(c);
        for (auto& x : c) x /= g;  // primitive u
        long mult = 2 + static_cast<long>(rng.below(4));
        CHECK(is_primitive(l.point(c), l));
        IVec gc = c;
        for (auto& x : gc) x *= mult;
        // oracle: some divisor >= 2 divides every coordinate
        bool divisible = false;
        Z gg = gcd_all(gc);
        for (long dv = 2; dv <= gg; ++dv)
            if (gg % dv == 0) divisible = true;
        CHECK(divisible);
        CHECK_FALSE(is_primitive(l.point(gc), l));
    }
}

TEST_CASE("hyperplane sections") {
    Lattice z3 = Lattice::integer_grid(3);
    Lattice s = hyperplane_section(z3, qv({0, 0, 1}));
    CHECK(s.rank() == 2);
    CHECK(canonical_basis(s) == Mat{qv({1, 0, 0}), qv({0, 1, 0})});

    Lattice z2 = Lattice::integer_grid(2);
    Lattice h = hyperplane_section(z2, qv({1, 1}));
    REQUIRE(h.rank() == 1);
    CHECK((h.basis[0] == qv({1, -1}) || h.basis[0] == qv({-1, 1})));
    CHECK(gram_determinant(h, euclidean_form(2)) == 2);  // |z|^2 det^2
    // Z^2 ∩ {x+y=0} ∩ B(3) is exactly the multiples of (1,-1)
    for (long x = -3; x <= 3; ++x)
        for (long y = -3; y <= 3; ++y) {
            if (x * x + y * y > 9 || x + y != 0) continue;
            IVec c = coordinates(h, qv({x, y}));
            CHECK(c.size() == 1);
        }
    CHECK_THROWS_AS(hyperplane_section(z2, qv({2, 2})), Error);

    Rng rng(23);
    for (int t = 0; t < 30; ++t) {
        int d = 2 + static_cast<int>(rng.below(3));
        Lattice l = oracle_ref::random_lattice(rng, d, 2);
        Lattice du = dual(l);
        IVec a(d);
        for (auto& x : a) x = Z(static_cast<long>(rng.below(7)) - 3);
        Z g = gcd_all(a);
        if (g == 0) continue;
        for (auto& x : a) x /= g;
        Vec z = du.point(a);
        Lattice sec = hyperplane_section(l, z);
        CHECK(sec.rank() == d - 1);
        for (const auto& b : sec.basis) {
            CHECK(dot(b, z) == 0);
            coordinates(l, b);  // sublattice membership, throws otherwise
        }
        Q gd = gram_determinant(sec, euclidean_form(d));
        Q det = determinant(l);
        CHECK(gd == dot(z, z) * det * det);
        // exhaustive at radius 2: orthogonal lattice points lie in the section
        PointSet pts = enumerate_points(l, Body::ball(2));
        for (size_t i = 0; i < pts.size(); ++i) {
            Vec x = l.point(pts.get(i));
            if (dot(x, z) != 0) continue;
            coordinates(sec, x);
        }
    }
}

TEST_CASE("canonical flats") {
    LinearFlat f = canonical_linear_flat({qv({2, 0}), qv({3, 0})}, 2);
    CHECK(f.dim == 1);
    CHECK(f.rows[0] == qv({1, 0}));
    CHECK(canonical_linear_flat({qv({1, 1}), qv({1, -1})}, 2).dim == 2);
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        std::vector<Vec> gens;
        int m = 1 + static_cast<int>(rng.below(4));
        for (int i = 0; i < m; ++i) {
            Vec v(4);
            for (auto& x : v) x = Q(static_cast<long>(rng.below(7)) - 3);
            gens.push_back(v);
        }
        LinearFlat a = canonical_linear_flat(gens, 4);
        auto shuffled = gens;
        for (size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        for (auto& g : shuffled) g = scale(g, frac(Z(static_cast<long>(rng.below(5)) + 1), Z(3)));
        CHECK(canonical_linear_flat(shuffled, 4) == a);
        CHECK(canonical_linear_flat(a.rows, 4) == a);  // idempotent
        for (const auto& g : gens) CHECK(a.contains(g));
    }
    AffineFlat af = canonical_affine_flat(qv({3, 1}), {qv({1, 0})}, 2);
    CHECK(af.base == qv({0, 1}));
    CHECK(af.contains(qv({-7, 1})));
    CHECK_FALSE(af.contains(qv({0, 0})));
    CHECK(canonical_affine_flat(qv({5, 1}), {qv({2, 0})}, 2) == af);
}

TEST_CASE("ball volume closed forms") {
    const double pi = 3.14159265358979323846;
    CHECK(ball_volume(1, 1) == doctest::Approx(2.0));
    CHECK(ball_volume(2, 1) == doctest::Approx(pi));
    CHECK(ball_volume(3, 1) == doctest::Approx(4 * pi / 3));
    CHECK(ball_volume(4, 2) == doctest::Approx(pi * pi / 2 * 16));
    CHECK(ball_volume(5, 1) == doctest::Approx(8 * pi * pi / 15));
}

TEST_CASE("ellipsoid validation") {
    CHECK_NOTHROW(Body::ellipsoid({qv({2, 1}), qv({1, 2})}));
    CHECK_THROWS_AS(Body::ellipsoid({qv({1, 2}), qv({2, 1})}), Error);
    CHECK_THROWS_AS(Body::ellipsoid({qv({1, 0}), qv({1, 1})}), Error);
}
