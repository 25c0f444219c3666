#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace latcov {

using Q = mpq_class;
using Z = mpz_class;
using Vec = std::vector<Q>;
using Mat = std::vector<Vec>;  // row-major
using IVec = std::vector<Z>;
using IMat = std::vector<IVec>;

// num/den in lowest terms; mpq_class(num, den) does not reduce.
inline Q frac(const Z& num, const Z& den) {
    Q q(num, den);
    q.canonicalize();
    return q;
}

// Grammar: optional sign, decimal digits, optional "/" and positive digits.
Q parse_rational(const std::string& s);
std::string to_string(const Q& q);
std::string to_string(const Z& z);

Q dot(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, const Q& s);
bool is_zero(const Vec& a);
bool is_integral(const Vec& a);

Mat identity(int n);
Mat transpose(const Mat& a);
Mat mat_mul(const Mat& a, const Mat& b);
Vec mat_vec(const Mat& a, const Vec& v);
Q determinant(Mat a);
Mat inverse(const Mat& a);  // throws Singular

// Reduced row echelon form of the rows of `a`; zero rows removed.
struct Echelon {
    Mat rows;
    std::vector<int> pivots;
};
Echelon rref(const Mat& a);
int rank(const Mat& a);
// Basis of {x : a x = 0} over Q (columns of `a` count = unknowns).
Mat rational_kernel(const Mat& a, int ncols);

// Integer helpers.
Z gcd_all(const IVec& v);
Z lcm_denominators(const Vec& v);
IVec to_integer_primitive(const Vec& v);  // scale to coprime integers, same direction
Z floor_sqrt(const Q& x);                 // floor of sqrt(x), x >= 0
Z ceil_q(const Q& x);
Z floor_q(const Q& x);
Z round_q(const Q& x);  // nearest integer, halves toward +inf
Q pow_q(const Q& x, unsigned long e);
Z pow_z(const Z& x, unsigned long e);
void ext_gcd(const Z& a, const Z& b, Z& g, Z& x, Z& y);

// Integer kernel {x in Z^n : A x = 0} of an m x n integer matrix, via
// unimodular column operations (Hermite-style column echelon form).
IMat integer_kernel(const IMat& a, int n);
// Z^r intersected with the rational span of the given vectors (length r).
IMat saturate(const std::vector<Vec>& gens, int r);

Vec to_q(const IVec& v);
Vec to_q(const std::vector<int64_t>& v);

}  // namespace latcov
