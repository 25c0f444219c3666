#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latcov/enumerate.hpp"
#include "latcov/lattice.hpp"

namespace latcov {

// Successive minima stored as exact squared scales.
struct MinimaProfile {
    int n = 0;
    int r = 0;
    std::vector<Q> lambda_sq;                   // nondecreasing
    std::vector<std::vector<int64_t>> witness;  // lattice-basis coefficients
    std::vector<Vec> witness_points;            // ambient coordinates
    // transcript of the doubling search
    std::vector<Q> bounds_tried;
    size_t points_enumerated = 0;
};

MinimaProfile successive_minima(const Lattice& l, const Mat& form);
MinimaProfile successive_minima(const Lattice& l, const Body& k);

// Witness certificate: points strictly below lambda_i span dimension < i and
// the i-th witness sits at lambda_i.
bool certify_minima(const Lattice& l, const Mat& form, const MinimaProfile& m);

// x^(1/e) for rational x > 0: the exact representation of products of minima
// raised to rational exponents.
struct RootQ {
    Q base;
    unsigned long e = 1;
};
int compare(const RootQ& a, const RootQ& b);  // -1, 0, 1
double to_double(const RootQ& a);

// alpha^2 = min_{1<=j<=k} (prod_{i>=j} lambda_i^2)^(-1/(r-j)), beta^2 the
// same minimum over 1 <= j <= r-1.  q is the re-indexed position r-j+1 of
// alpha (smallest q on ties); j_star is the smallest minimizing j.
struct AlphaBeta {
    int k = 0;
    RootQ alpha_sq;
    RootQ beta_sq;
    int j_star = 0;
    int q = 0;
    int beta_j = 0;
    double alpha = 0, beta = 0;
};
AlphaBeta alpha_beta(const MinimaProfile& m, int k);
// (lambda_j ... lambda_r)^2, 1-based j
Q tail_product_sq(const MinimaProfile& m, int j);

// Product inequalities that follow from the choice of q when
// q >= r-k+2: 1/lambda_i <= alpha for i >= r-q+1, and
// (lambda_{r-i+2}..lambda_r)^{(q-i+1)/(i-2)} <= lambda_{r-q+1}..lambda_{r-i+1}
// for 3 <= i <= r-k+2.  Returns true when q < r-k+2 (nothing to check).
bool check_product_inequalities(const MinimaProfile& m, const AlphaBeta& ab);

struct MinkowskiReport {
    bool lower_ok = false;
    bool upper_ok = false;
    double lower = 0, middle = 0, upper = 0;  // decorations
    std::string lower_interval, upper_interval;
};
MinkowskiReport check_minkowski2(const Lattice& l, const Body& k);
MinkowskiReport check_minkowski2(const Lattice& l, const Body& k, const MinimaProfile& m);

struct TransferenceReport {
    bool ok = false;
    std::vector<Q> products_sq;  // (lambda_i mu_{d-i+1})^2
    MinimaProfile primal, dual;
};
TransferenceReport check_transference(const Lattice& l, const Body& k);

struct PointCountReport {
    bool ok = false;
    size_t count = 0;
    Z bound;
};
PointCountReport point_count_check(const Lattice& l, const Body& k);
PointCountReport point_count_check(const Lattice& l, const Body& k, const MinimaProfile& m);

// Basis b_1..b_r with b_i in (3/2)^{i-1} lambda_i K.
struct ReducedBasis {
    IMat coeffs;          // column i = coefficients of b_i in the input basis
    Lattice lattice;      // same lattice, basis (b_1..b_r)
    std::vector<Q> value; // squared body scale of b_i
    MinimaProfile minima;
    bool bounds_ok = false;
    int search_radius = 2;
};
ReducedBasis reduce_basis(const Lattice& l, const Mat& form);
ReducedBasis reduce_basis(const Lattice& l, const Body& k);

}  // namespace latcov
