#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latcov/rational.hpp"

namespace latcov {

// <x, z> = c with z primitive and lexicographically positive.
struct Hyperplane {
    std::vector<int64_t> z;
    int64_t c = 0;
    bool contains(const std::vector<int64_t>& x) const;
    bool operator==(const Hyperplane& o) const { return z == o.z && c == o.c; }
    bool operator<(const Hyperplane& o) const { return z != o.z ? z < o.z : c < o.c; }
};

struct ExponentRow {
    int d = 0;
    Q exponent;                  // diagonal lower-bound exponent
    std::optional<Q> previous;   // the earlier bound (d >= 3)
    std::optional<Q> gap;        // exponent - previous, d > 3
    Q upper;                     // d/(d+1)
    int k = -1;                  // k used by the nondiagonal pair
    Q n_exponent, m_exponent;    // nondiagonal pair for that k
};
// Nondiagonal pair for a given k: (1-(k+1)/((k+2-1/d)(d-k)), 1-(d-1)/(dk+2d-1)).
std::pair<Q, Q> nondiagonal_exponents(int d, int k);
ExponentRow incidence_exponents(int d);  // k = floor((d-2)/2)
ExponentRow incidence_exponents(int d, int k);
// Closed form of the gap over the earlier bound: 1/((d+2)(d+3)) odd,
// d^2/((d+2)^2(d^2+2d-2)) even.
Q exponent_gap_formula(int d);

struct IncidenceCount {
    Z total;
    std::vector<size_t> per_hyperplane;
};
// Exact count, grouped by normal: one pass over P per distinct normal.
IncidenceCount count_incidences(const std::vector<std::vector<int64_t>>& P, const std::vector<Hyperplane>& H);

struct KrrWitness {
    std::vector<size_t> points;       // indices into P
    std::vector<size_t> hyperplanes;  // indices into H
};
struct FreenessReport {
    bool free = false;
    std::string mode;  // exhaustive | sampled
    size_t work = 0;
    std::optional<KrrWitness> witness;
};
// K_{r1,r2} in the incidence graph: r1 points all lying on r2 common
// hyperplanes.  Exhaustive mode hashes every r1-subset of every hyperplane's
// incidence set; sampled mode tests `samples` random r1-subsets drawn from
// random hyperplanes.
FreenessReport check_krr_free(const std::vector<std::vector<int64_t>>& P, const std::vector<Hyperplane>& H,
                              int r1, int r2, bool exhaustive = true, uint64_t seed = 0,
                              size_t samples = 20000);
// Exhaustive work estimate: sum over H of C(|h ∩ P|, r1).
Z krr_work(const IncidenceCount& c, int r1);

struct IncidenceConfig {
    int d = 0, k = 0;
    long s = 0, t = 0;
    Q epsilon, delta;
    uint64_t seed = 0;
    std::vector<std::vector<int64_t>> P;
    std::vector<std::vector<int64_t>> N;
    std::vector<Hyperplane> H;
    std::string normals_source;  // directions | linear-evasive
    int64_t prime = 0;           // linear-evasive source only
    int r1 = 0, r2 = 0;
    bool r2_measured = false;
    Z incidences;
    std::vector<size_t> histogram;
    bool hyperplane_bound_ok = false;  // each normal has <= 3st hyperplanes
    double c1 = 0, c2 = 0, n_target = 0, m_target = 0;
    FreenessReport freeness;
};

// Freeness runs exhaustively when the work estimate is at most `exhaustive_limit`.
IncidenceConfig build_incidence_config(int d, int k, long s, long t, const Q& eps, uint64_t seed,
                                       size_t exhaustive_limit = 50'000'000);

struct SlopeFit {
    double slope = 0, stderr_ = 0, intercept = 0;
    size_t points = 0;
};
SlopeFit fit_exponent(const std::vector<std::pair<Z, Z>>& series);

}  // namespace latcov
