#include <doctest.h>

#include "latcov/errors.hpp"
#include "latcov/minima.hpp"
#include "oracles.hpp"

using namespace latcov;

TEST_CASE("grid ball minima are all 1/n") {
    for (int d = 1; d <= 4; ++d)
        for (long n : {1L, 2L, 5L}) {
            MinimaProfile m = successive_minima(Lattice::integer_grid(d), Body::ball(Q(n)));
            REQUIRE(m.r == d);
            for (const auto& l : m.lambda_sq) CHECK(l == Q(1) / Q(n * n));
        }
}

TEST_CASE("anisotropic lattice (x1/n, x2/2, x3/2) has minima (1/n, 1/2, 1/2)") {
    for (long n : {3L, 4L, 8L, 17L}) {
        Lattice l = Lattice::diagonal(Vec{Q(1) / Q(n), Q(1, 2), Q(1, 2)});
        MinimaProfile m = successive_minima(l, Body::ball(1));
        CHECK(m.lambda_sq[0] == Q(1) / Q(n * n));
        CHECK(m.lambda_sq[1] == Q(1, 4));
        CHECK(m.lambda_sq[2] == Q(1, 4));
        CHECK(certify_minima(l, Body::ball(1).form(3), m));
    }
}

TEST_CASE("minima agree with the brute-force oracle") {
    Rng rng(2024);
    for (int s = 0; s < 40; ++s) {
        int d = 1 + static_cast<int>(rng.below(4));
        Lattice l = oracle_ref::random_lattice(rng, d, 3);
        Body k = Body::ball(frac(Z(static_cast<long>(rng.below(5)) + 1), Z(static_cast<long>(rng.below(2)) + 1)));
        Mat f = k.form(d);
        MinimaProfile m = successive_minima(l, f);
        CHECK(m.lambda_sq == oracle_ref::brute_minima_sq(gram(l, f)));
        CHECK(certify_minima(l, f, m));
    }
}

TEST_CASE("scaling covariance is exact") {
    Rng rng(8);
    for (int s = 0; s < 10; ++s) {
        int d = 2 + static_cast<int>(rng.below(3));
        Lattice l = oracle_ref::random_lattice(rng, d, 2);
        MinimaProfile a = successive_minima(l, Body::ball(1));
        Q r = frac(Z(static_cast<long>(rng.below(9)) + 2), Z(3));
        MinimaProfile b = successive_minima(l, Body::ball(r));
        for (int i = 0; i < d; ++i) CHECK(b.lambda_sq[i] == a.lambda_sq[i] / (r * r));
    }
}

TEST_CASE("minima are monotone on hyperplane sublattices") {
    Rng rng(31);
    for (int s = 0; s < 50; ++s) {
        int d = 2 + static_cast<int>(rng.below(3));
        Lattice l = oracle_ref::random_lattice(rng, d, 2);
        Lattice du = dual(l);
        IVec a(d);
        for (auto& x : a) x = Z(static_cast<long>(rng.below(5)) - 2);
        Z g = gcd_all(a);
        if (g == 0) continue;
        for (auto& x : a) x /= g;
        Lattice sec = hyperplane_section(l, du.point(a));
        Mat f = euclidean_form(d);
        MinimaProfile m = successive_minima(l, f), ms = successive_minima(sec, f);
        for (int i = 0; i < d - 1; ++i) CHECK(ms.lambda_sq[i] >= m.lambda_sq[i]);
    }
}

TEST_CASE("Minkowski second theorem") {
    MinkowskiReport z2 = check_minkowski2(Lattice::integer_grid(2), Body::ball(1));
    CHECK(z2.lower_ok);
    CHECK(z2.upper_ok);
    CHECK(z2.middle == doctest::Approx(1.0));
    CHECK(z2.lower == doctest::Approx(3.14159265358979 / 4));
    // equality case in dimension one: vol/det/2 = 1/lambda
    MinkowskiReport z1 = check_minkowski2(Lattice::integer_grid(1), Body::ball(3));
    CHECK(z1.lower_ok);
    CHECK(z1.upper_ok);
    MinkowskiReport skew = check_minkowski2(Lattice::diagonal(Vec{Q(1), Q(1000000)}), Body::ball(1));
    CHECK(skew.lower_ok);
    CHECK(skew.upper_ok);
    CHECK(skew.middle / skew.lower < 1.3);
    Rng rng(77);
    for (int s = 0; s < 40; ++s) {
        int d = 1 + static_cast<int>(rng.below(5));
        Lattice l = oracle_ref::random_lattice(rng, d, 3);
        MinkowskiReport rep = check_minkowski2(l, Body::ball(Q(static_cast<long>(rng.below(3)) + 1)));
        CHECK(rep.lower_ok);
        CHECK(rep.upper_ok);
    }
    Body e = Body::ellipsoid({Vec{Q(2), Q(1)}, Vec{Q(1), Q(3)}});
    MinkowskiReport er = check_minkowski2(Lattice::integer_grid(2), e);
    CHECK(er.lower_ok);
    CHECK(er.upper_ok);
}

TEST_CASE("transference bounds") {
    for (int d = 1; d <= 4; ++d) {
        TransferenceReport t = check_transference(Lattice::integer_grid(d), Body::ball(1));
        CHECK(t.ok);
        for (const auto& p : t.products_sq) CHECK(p == 1);
    }
    TransferenceReport t2 = check_transference(Lattice::diagonal(Vec{Q(2), Q(1, 2)}), Body::ball(1));
    CHECK(t2.ok);
    // lambda = (1/2, 2), mu = (1/2, 2): products are 1/2*2 = 1 twice
    for (const auto& p : t2.products_sq) {
        CHECK(p >= 1);
        CHECK(p <= 4);
    }
    CHECK_THROWS_AS(check_transference(Lattice::integer_grid(2), Body::ellipsoid(identity(2))), Error);
    Rng rng(55);
    for (int s = 0; s < 30; ++s) {
        int d = 1 + static_cast<int>(rng.below(5));
        Lattice l = oracle_ref::random_lattice(rng, d, 3);
        CHECK(check_transference(l, Body::ball(Q(static_cast<long>(rng.below(4)) + 1))).ok);
    }
}

TEST_CASE("point enumerator bound") {
    PointCountReport r = point_count_check(Lattice::integer_grid(2), Body::ball(4));
    CHECK(r.count == 49);
    CHECK(r.bound == 162);
    CHECK(r.ok);
    for (long n : {1L, 3L, 6L}) {
        PointCountReport r1 = point_count_check(Lattice::integer_grid(1), Body::ball(Q(n)));
        CHECK(r1.count == static_cast<size_t>(2 * n + 1));
        CHECK(r1.bound == 2 * n + 1);
    }
}

TEST_CASE("first finiteness reduced basis") {
    ReducedBasis z = reduce_basis(Lattice::integer_grid(3), Body::ball(1));
    CHECK(z.bounds_ok);
    for (int i = 0; i < 3; ++i) CHECK(z.value[i] == 1);
    // Z^5 plus the half-integer point: the five unit minima span an index-2 sublattice
    std::vector<Vec> cols;
    for (int i = 0; i < 4; ++i) {
        Vec e(5, Q(0));
        e[i] = 1;
        cols.push_back(e);
    }
    cols.push_back(Vec(5, Q(1, 2)));
    Lattice half = Lattice::make(cols, 5);
    ReducedBasis h = reduce_basis(half, Body::ball(1));
    CHECK(h.bounds_ok);
    CHECK(determinant(h.lattice) == determinant(half));
    for (const auto& w : h.minima.lambda_sq) CHECK(w == 1);
    // witnesses alone do not form a basis here
    Mat wm;
    for (const auto& w : h.minima.witness_points) wm.push_back(w);
    CHECK(abs(latcov::determinant(wm)) == 2 * determinant(half));
    // body-centred lattice in R^3
    Lattice bcc = Lattice::make({Vec{Q(1), Q(0), Q(0)}, Vec{Q(0), Q(1), Q(0)}, Vec{Q(1, 2), Q(1, 2), Q(1, 2)}}, 3);
    ReducedBasis b = reduce_basis(bcc, Body::ball(2));
    CHECK(b.bounds_ok);
    CHECK(canonical_basis(b.lattice) == canonical_basis(bcc));
}

TEST_CASE("alpha and beta with tie rules") {
    MinimaProfile m;
    m.r = 3;
    m.n = 3;
    long n = 16;
    m.lambda_sq = {Q(1) / Q(n * n), Q(1, 4), Q(1, 4)};
    AlphaBeta ab = alpha_beta(m, 1);
    // alpha^2 = (1/(16*4*4))^{-1/2}... = 4n for k=1
    CHECK(compare(ab.alpha_sq, RootQ{Q(4 * n), 1}) == 0);
    CHECK(ab.q == 3);
    CHECK(compare(ab.beta_sq, RootQ{Q(16), 1}) == 0);
    CHECK(ab.beta_j == 2);
    // equal minima: the longest tail wins, 9^(4/3) < 9^(3/2)
    MinimaProfile g;
    g.r = 4;
    g.lambda_sq = std::vector<Q>(4, Q(1, 9));
    AlphaBeta gb = alpha_beta(g, 2);
    CHECK(gb.j_star == 1);
    CHECK(gb.q == 4);
    CHECK(compare(gb.alpha_sq, RootQ{Q(9 * 9 * 9 * 9), 3}) == 0);
    // an exact tie between j = 1 and j = 2: lambda^2 = (1/4, 1/2, 1/2), k = 2
    // candidates (1/(1/16))^(1/2) = 4 and (1/(1/4))^(1/1) = 4
    MinimaProfile t;
    t.r = 3;
    t.lambda_sq = {Q(1, 4), Q(1, 2), Q(1, 2)};
    AlphaBeta tb = alpha_beta(t, 2);
    CHECK(tb.j_star == 1);
    CHECK(tb.q == 2);  // q picks the smallest re-indexed position independently
    CHECK(compare(tb.alpha_sq, RootQ{Q(4), 1}) == 0);
    CHECK(ab.alpha >= ab.beta);
}

TEST_CASE("product inequalities hold whenever q >= r-k+2") {
    Rng rng(4);
    int checked = 0;
    for (int s = 0; s < 300; ++s) {
        MinimaProfile m;
        m.r = 4 + static_cast<int>(rng.below(3));
        Q cur = frac(Z(1), Z(static_cast<long>(rng.below(20)) + 1));
        for (int i = 0; i < m.r; ++i) {
            m.lambda_sq.push_back(cur);
            cur *= frac(Z(static_cast<long>(rng.below(6)) + 3), Z(3));
        }
        for (int k = 2; k <= m.r - 2; ++k) {
            AlphaBeta ab = alpha_beta(m, k);
            if (ab.q >= m.r - k + 2) ++checked;
            CHECK(check_product_inequalities(m, ab));
        }
    }
    CHECK(checked > 10);
}
