#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latcov/lattice.hpp"

namespace latcov {

enum class FlatKind { Linear, Affine };

struct CoverInstance {
    std::vector<std::vector<int64_t>> points;
    int k = 0;
    FlatKind kind = FlatKind::Linear;
    static CoverInstance grid(int d, long n, int k, FlatKind kind);  // Z^d ∩ B^d(n)
};

// Candidate flats with their incidence sets over the instance points.
struct Candidates {
    int d = 0;
    FlatKind kind = FlatKind::Linear;
    std::vector<LinearFlat> linear;
    std::vector<AffineFlat> affine;
    std::vector<std::vector<uint64_t>> bits;  // one bitset per flat
    size_t size() const { return bits.size(); }
};
// Linear: spans of all <= k-subsets of nonzero points (0 lies on every one);
// affine: hulls of all <= (k+1)-subsets.  Deduplicated, not padded.
// TooManyPoints beyond 200 points.
Candidates candidate_flats(const CoverInstance& inst);

struct OracleResult {
    long optimum = 0;
    bool optimal = false;  // false when the node budget ran out
    std::vector<LinearFlat> linear;  // padded to dimension k
    std::vector<AffineFlat> affine;
    size_t candidates = 0;
    size_t points = 0;  // after reduction
    uint64_t nodes = 0;
    long greedy = 0;
};
// Exact minimum cover by branch-and-bound.  Linear instances are first
// reduced to one primitive representative per line through 0, which changes
// no cover.
OracleResult min_cover_exact(const CoverInstance& inst, uint64_t node_budget = 100'000'000);

struct EvasiveOracle {
    long optimum = 0;
    bool optimal = false;
    std::vector<size_t> chosen;  // indices into the points
    uint64_t nodes = 0;
    size_t constraints = 0;
};
// Largest subset with every flat of the kind holding <= r-1 of its points.
// TooManyPoints beyond 40 points.
EvasiveOracle max_evasive_exact(const std::vector<std::vector<int64_t>>& points, int k, int r, FlatKind kind,
                                uint64_t node_budget = 100'000'000);

}  // namespace latcov
