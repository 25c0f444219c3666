#pragma once

#include <cstdint>
#include <vector>

#include "latcov/rational.hpp"

namespace latcov {

// Incremental membership test for the rational span of integer vectors.
// Keeps an integer basis of the orthogonal complement; x is in the span iff
// every complement row annihilates it.
class SpanTester {
public:
    explicit SpanTester(int r);
    int dim() const { return static_cast<int>(gens_.size()); }
    bool contains(const int64_t* c) const;
    bool contains(const IVec& c) const;
    void add(const int64_t* c);
    void add(const IVec& c);

private:
    void rebuild();
    int r_;
    std::vector<Vec> gens_;
    IMat perp_;
    std::vector<std::vector<int64_t>> perp64_;
    bool small_ = true;
};

}  // namespace latcov
