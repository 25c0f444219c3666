#include <doctest.h>

#include <cmath>
#include <set>

#include "latcov/errors.hpp"
#include "latcov/incidence.hpp"
#include "latcov/rng.hpp"

using namespace latcov;

namespace {

using Pts = std::vector<std::vector<int64_t>>;

// Incidences summed over points instead of hyperplanes.
Z count_by_points(const Pts& P, const std::vector<Hyperplane>& H) {
    Z total = 0;
    for (const auto& p : P)
        for (const auto& h : H) {
            int64_t s = 0;
            for (size_t i = 0; i < p.size(); ++i) s += p[i] * h.z[i];
            if (s == h.c) total += 1;
        }
    return total;
}

// K_{r1,r2} by brute force over point subsets.
bool has_krr(const Pts& P, const std::vector<Hyperplane>& H, int r1, int r2) {
    size_t n = P.size();
    std::vector<size_t> idx(r1);
    for (int i = 0; i < r1; ++i) idx[i] = i;
    if (static_cast<size_t>(r1) > n) return false;
    for (;;) {
        int common = 0;
        for (const auto& h : H) {
            bool all = true;
            for (size_t i : idx) all = all && h.contains(P[i]);
            common += all;
        }
        if (common >= r2) return true;
        int i = r1;
        while (i > 0 && idx[i - 1] == n - r1 + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (int j = i; j < r1; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

TEST_CASE("exponent table") {
    CHECK(incidence_exponents(2).exponent == Q(2, 3));
    CHECK(incidence_exponents(3).exponent == Q(7, 10));
    CHECK(incidence_exponents(4).exponent == Q(49, 66));
    CHECK(incidence_exponents(5).exponent == Q(43, 56));
    CHECK(incidence_exponents(6).exponent == Q(73, 92));
    CHECK(*incidence_exponents(4).previous == Q(13, 18));
    CHECK(*incidence_exponents(5).previous == Q(3, 4));
    CHECK(*incidence_exponents(6).previous == Q(25, 32));
    // odd closed form at d = 3 gives the special value too
    Q d3 = 1 - frac(Z(9), Z(30));
    CHECK(d3 == Q(7, 10));
    Q prev = 0;
    for (int d = 3; d <= 20; ++d) {
        ExponentRow row = incidence_exponents(d);
        CHECK(row.exponent > prev);
        CHECK(row.exponent > 0);
        CHECK(row.exponent < 1);
        CHECK(row.exponent < row.upper);
        prev = row.exponent;
        if (d > 3) CHECK(*row.gap == exponent_gap_formula(d));
        // averaging the nondiagonal pair recovers the diagonal exponent
        if (d % 2 == 1) CHECK((row.n_exponent + row.m_exponent) / 2 == row.exponent);
    }
    auto [ne, me] = nondiagonal_exponents(3, 0);
    CHECK(ne == Q(4, 5));
    CHECK(me == Q(3, 5));
}

TEST_CASE("incidence counting") {
    CHECK(count_incidences({{0, 0}}, {Hyperplane{{1, 0}, 0}}).total == 1);
    CHECK(count_incidences({{0, 0}, {1, 1}, {2, 2}}, {Hyperplane{{1, -1}, 0}}).total == 3);
    Rng rng(6);
    for (int s = 0; s < 20; ++s) {
        Pts P;
        std::vector<Hyperplane> H;
        int d = 2 + static_cast<int>(rng.below(2));
        for (int i = 0; i < 30; ++i) {
            std::vector<int64_t> p(d);
            for (auto& x : p) x = static_cast<int64_t>(rng.below(5)) - 2;
            P.push_back(p);
        }
        for (int i = 0; i < 25; ++i) {
            std::vector<int64_t> z(d);
            for (auto& x : z) x = static_cast<int64_t>(rng.below(3)) - 1;
            H.push_back(Hyperplane{z, static_cast<int64_t>(rng.below(3)) - 1});
        }
        IncidenceCount c = count_incidences(P, H);
        CHECK(c.total == count_by_points(P, H));
    }
}

TEST_CASE("K_{r,r} detection") {
    // two copies of the same line through every point
    Pts line{{0, 0}, {1, 0}, {2, 0}};
    FreenessReport dup = check_krr_free(line, {Hyperplane{{0, 1}, 0}, Hyperplane{{0, 1}, 0}}, 3, 2);
    CHECK_FALSE(dup.free);
    CHECK(dup.witness->points.size() == 3);
    // planted K_{2,2}: two points on two planes in R^3
    Pts P{{0, 0, 0}, {1, 0, 0}, {5, 5, 5}};
    std::vector<Hyperplane> H{Hyperplane{{0, 1, 0}, 0}, Hyperplane{{0, 0, 1}, 0}, Hyperplane{{1, 1, 1}, 15}};
    FreenessReport k22 = check_krr_free(P, H, 2, 2);
    CHECK_FALSE(k22.free);
    CHECK(k22.witness->points == std::vector<size_t>{0, 1});
    CHECK(k22.witness->hyperplanes.size() == 2);
    CHECK(check_krr_free(P, H, 2, 3).free);
    FreenessReport sampled = check_krr_free(P, H, 2, 2, false, 1, 200);
    CHECK_FALSE(sampled.free);
    // random agreement with brute force
    Rng rng(17);
    for (int s = 0; s < 30; ++s) {
        Pts Q_;
        std::set<std::vector<int64_t>> seen;
        while (Q_.size() < 10) {
            std::vector<int64_t> p{static_cast<int64_t>(rng.below(4)), static_cast<int64_t>(rng.below(4))};
            if (seen.insert(p).second) Q_.push_back(p);
        }
        std::vector<Hyperplane> L;
        for (int i = 0; i < 12; ++i)
            L.push_back(Hyperplane{{static_cast<int64_t>(rng.below(2)), static_cast<int64_t>(rng.below(3)) - 1},
                                   static_cast<int64_t>(rng.below(4))});
        int r1 = 1 + static_cast<int>(rng.below(3)), r2 = 2 + static_cast<int>(rng.below(2));
        CHECK(check_krr_free(Q_, L, r1, r2).free == !has_krr(Q_, L, r1, r2));
    }
}

TEST_CASE("slope fit") {
    SlopeFit sq = fit_exponent({{Z(2), Z(4)}, {Z(4), Z(16)}, {Z(8), Z(64)}});
    CHECK(sq.slope == doctest::Approx(2.0));
    std::vector<std::pair<Z, Z>> ser;
    for (long x : {4L, 16L, 64L, 256L}) ser.push_back({Z(x), Z(3 * x * static_cast<long>(std::lround(std::sqrt(x))))});
    SlopeFit f = fit_exponent(ser);
    CHECK(std::abs(f.slope - 1.5) < 1e-9);
    CHECK(f.stderr_ < 1e-9);
    CHECK_THROWS_AS(fit_exponent({{Z(1), Z(1)}, {Z(2), Z(2)}}), Error);
    CHECK_THROWS_AS(fit_exponent({{Z(1), Z(1)}, {Z(1), Z(2)}, {Z(3), Z(3)}}), Error);
}

TEST_CASE("planar incidence construction") {
    IncidenceConfig c = build_incidence_config(2, 0, 4, 4, Q(1, 2), 1);
    CHECK(c.P.size() == 49);
    CHECK(c.delta == Q(1, 8));
    CHECK(c.r1 == 2);
    CHECK(c.r2 == 2);
    CHECK(c.incidences == Z(static_cast<unsigned long>(c.P.size() * c.N.size())));
    CHECK(c.hyperplane_bound_ok);
    CHECK(c.freeness.free);
    CHECK(c.freeness.mode == "exhaustive");
    CHECK(static_cast<double>(c.H.size()) <= c.m_target);
    for (const auto& h : c.H) {
        bool meets = false;
        for (const auto& p : c.P) meets = meets || h.contains(p);
        CHECK(meets);
    }
    // the N directions are pairwise independent
    for (size_t a = 0; a < c.N.size(); ++a)
        for (size_t b = a + 1; b < c.N.size(); ++b) CHECK(c.N[a][0] * c.N[b][1] != c.N[a][1] * c.N[b][0]);
}

TEST_CASE("planar incidence slope") {
    std::vector<std::pair<Z, Z>> ser;
    for (long s : {4L, 8L, 16L, 32L}) {
        IncidenceConfig c = build_incidence_config(2, 0, s, s, Q(1, 2), 1, s <= 8 ? 50'000'000 : 0);
        CHECK(c.incidences >= Z(static_cast<unsigned long>(c.P.size() * c.N.size())));
        if (s <= 8) CHECK(c.freeness.mode == "exhaustive");
        CHECK(c.freeness.free);
        Z mn = Z(static_cast<unsigned long>(c.P.size())) * Z(static_cast<unsigned long>(c.H.size()));
        ser.push_back({mn, c.incidences});
        MESSAGE("s=" << s << " |P|=" << c.P.size() << " |N|=" << c.N.size() << " |H|=" << c.H.size()
                     << " I=" << c.incidences.get_str());
    }
    SlopeFit f = fit_exponent(ser);
    MESSAGE("slope " << f.slope);
    CHECK(std::abs(f.slope - 2.0 / 3.0) <= 0.05);
}

TEST_CASE("spatial incidence construction, k = 0") {
    std::vector<std::pair<Z, Z>> ser;
    for (long s : {2L, 3L, 4L, 6L}) {
        IncidenceConfig c = build_incidence_config(3, 0, s, s, Q(1, 2), 2, 5'000'000);
        CHECK(c.r2_measured);
        CHECK(c.freeness.free);
        CHECK(c.incidences == Z(static_cast<unsigned long>(c.P.size() * c.N.size())));
        ser.push_back({Z(static_cast<unsigned long>(c.P.size())) * Z(static_cast<unsigned long>(c.H.size())), c.incidences});
    }
    SlopeFit f = fit_exponent(ser);
    MESSAGE("d=3 slope " << f.slope);
    CHECK(f.slope >= 0.65);
}

TEST_CASE("incidence parameter checks") {
    CHECK_THROWS_AS(build_incidence_config(2, 1, 4, 4, Q(1, 2), 1), Error);
    CHECK_THROWS_AS(build_incidence_config(2, 0, 4, 4, Q(3, 2), 1), Error);
}
