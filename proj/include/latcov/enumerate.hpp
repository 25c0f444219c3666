#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "latcov/lattice.hpp"

namespace latcov {

constexpr size_t kMaxPoints = 10'000'000;

// Integer coefficient vectors in a fixed basis, flattened row by row.
struct PointSet {
    int r = 0;
    std::vector<int64_t> coords;

    size_t size() const { return r == 0 ? 0 : coords.size() / r; }
    const int64_t* at(size_t i) const { return coords.data() + i * r; }
    std::vector<int64_t> get(size_t i) const { return {at(i), at(i) + r}; }
    void push(const int64_t* c) { coords.insert(coords.end(), c, c + r); }
};

// Exact rational LLL on a Gram matrix (delta = 3/4).  Returns U with
// G' = U^T G U reduced; U is unimodular.
IMat lll_gram(const Mat& g, Mat* reduced = nullptr);

// Enumerates {c in Z^r : c^T G c <= T} for a positive definite rational Gram
// matrix.  The search runs on an LLL-reduced copy with floating bounds that
// are padded outward; every candidate is then accepted or rejected by an
// exact integer evaluation, so the output is exactly the requested set.
class Enumerator {
public:
    explicit Enumerator(const Mat& gram);

    int rank() const { return r_; }
    PointSet within(const Q& bound, size_t max_points = kMaxPoints) const;
    Q value(const int64_t* c) const;
    Q value(const std::vector<int64_t>& c) const { return value(c.data()); }
    // min / max of the squared lengths of the reduced basis vectors
    const Q& shortest_reduced() const { return min_diag_; }
    const Q& longest_reduced() const { return max_diag_; }

private:
    int r_;
    Mat gram_;
    std::vector<Z> num_;  // gram_ = num_ / den_
    Z den_;
    IMat u_;              // reduced basis = original * u_
    std::vector<Z> red_num_;
    std::vector<double> mu_;     // r x r, mu_[i*r+j] for j < i
    std::vector<double> bstar_;  // Gram-Schmidt squared lengths
    Q min_diag_, max_diag_;
};

// Lambda ∩ K as coefficient vectors in the lattice basis, sorted
// lexicographically.  TooManyPoints beyond the guard.
PointSet enumerate_points(const Lattice& l, const Body& k, size_t max_points = kMaxPoints);
// Same, at squared body scale <= t (points of Lambda ∩ sqrt(t) K).
PointSet enumerate_points_scaled(const Lattice& l, const Body& k, const Q& t,
                                 size_t max_points = kMaxPoints);

}  // namespace latcov
