#include "latcov/span.hpp"

#include <cstdlib>

namespace latcov {

SpanTester::SpanTester(int r) : r_(r) { rebuild(); }

void SpanTester::rebuild() {
    perp_.clear();
    perp64_.clear();
    Mat rows(gens_.begin(), gens_.end());
    Mat ker = rows.empty() ? identity(r_) : rational_kernel(rows, r_);
    small_ = true;
    for (const auto& k : ker) {
        IVec v = to_integer_primitive(k);
        std::vector<int64_t> v64(r_);
        for (int i = 0; i < r_; ++i) {
            // keep |entry| < 2^40 so int128 sums cannot overflow
            if (!v[i].fits_slong_p() || abs(v[i]) > Z("1099511627776")) small_ = false;
            else v64[i] = v[i].get_si();
        }
        perp_.push_back(v);
        perp64_.push_back(v64);
    }
}

bool SpanTester::contains(const int64_t* c) const {
    if (small_) {
        for (const auto& y : perp64_) {
            __int128 s = 0;
            for (int i = 0; i < r_; ++i) s += static_cast<__int128>(y[i]) * c[i];
            if (s != 0) return false;
        }
        return true;
    }
    for (const auto& y : perp_) {
        Z s = 0;
        for (int i = 0; i < r_; ++i) s += y[i] * Z(static_cast<long>(c[i]));
        if (s != 0) return false;
    }
    return true;
}

bool SpanTester::contains(const IVec& c) const {
    for (const auto& y : perp_) {
        Z s = 0;
        for (int i = 0; i < r_; ++i) s += y[i] * c[i];
        if (s != 0) return false;
    }
    return true;
}

void SpanTester::add(const int64_t* c) {
    Vec v(r_);
    for (int i = 0; i < r_; ++i) v[i] = Q(static_cast<long>(c[i]));
    gens_.push_back(v);
    rebuild();
}

void SpanTester::add(const IVec& c) {
    gens_.push_back(to_q(c));
    rebuild();
}

}  // namespace latcov
