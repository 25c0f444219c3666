#pragma once

#include "latcov/rational.hpp"  // gmp.h must precede mpfr.h

#include <mpfr.h>

#include <functional>
#include <string>

namespace latcov {

// Closed interval with MPFR endpoints rounded outward.
class Interval {
public:
    explicit Interval(mpfr_prec_t prec);
    Interval(const Q& q, mpfr_prec_t prec);
    Interval(const Interval& o);
    Interval& operator=(const Interval& o);
    ~Interval();

    static Interval pi(mpfr_prec_t prec);

    Interval operator+(const Interval& o) const;
    Interval operator-(const Interval& o) const;
    Interval operator*(const Interval& o) const;
    Interval operator/(const Interval& o) const;  // o must not contain 0
    Interval sqrt() const;                        // lower end clamped at 0
    Interval root(unsigned long k) const;         // nonnegative intervals
    Interval pow(unsigned long e) const;          // nonnegative intervals

    bool positive() const { return mpfr_sgn(lo_) > 0; }
    bool negative() const { return mpfr_sgn(hi_) < 0; }
    double lo() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double mid() const;
    std::string str(int digits = 30) const;
    mpfr_prec_t prec() const { return prec_; }

private:
    mpfr_prec_t prec_;
    mpfr_t lo_, hi_;
};

// Sign of a real quantity given by interval enclosures at increasing
// precision.  Returns 0 if undecided at the maximum precision.
int certified_sign(const std::function<Interval(mpfr_prec_t)>& f, mpfr_prec_t max_prec = 8192);

}  // namespace latcov
