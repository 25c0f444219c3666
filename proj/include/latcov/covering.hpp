#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latcov/enumerate.hpp"
#include "latcov/minima.hpp"

namespace latcov {

struct ProjectionStep {
    Vec dropped;        // b_1 of the current lattice
    LinearFlat target;  // span of the remaining reduced basis vectors
    Mat map;            // x -> x - <x, b_1*>_F b_1
};

struct Projection {
    std::vector<ProjectionStep> steps;
    Lattice image;
    Mat map;          // composite ambient map
    IMat coeff_map;   // image coefficients = coeff_map * source coefficients
    // Every image of a point of Lambda ∩ K lies in sqrt(radius_sq) K.
    // Measured over the enumerated points, never below 1.
    Q radius_sq = 1;
    Z nominal_radius_factor;  // (2^{n^2}+1)^s, reported next to the measured radius
    size_t points_checked = 0;
    // min / max of lambda_i(image)^2 / lambda_{i+s}(source)^2
    Q band_lo = 1, band_hi = 1;

    std::vector<Vec> dropped() const;
};

// Projects s times, each time along the first reduced-basis vector onto the
// span of the others.  MinimaTooLarge if lambda_r > 1.
Projection project_along_minima(const Lattice& l, const Mat& form, int s);
Projection project_along_minima(const Lattice& l, const Body& body, int s);

// Exact change of frame with T K = unit ball of `form`.  For balls and for
// ellipsoids whose LDL^T pivots are rational squares the form is the identity;
// otherwise T = L^T and the form is diag(D).
struct BallFrame {
    Lattice lattice;  // T L
    Mat form;
    Mat to_frame, from_frame;
    bool exact_ball = false;
};
BallFrame transform_to_ball(const Lattice& l, const Body& body);

struct DualBox {
    Q c;
    int q = 0;
    Lattice dual;
    std::vector<Vec> w;                          // dual minima witnesses
    std::vector<std::vector<int64_t>> w_coeffs;  // ... in the dual basis
    std::vector<Q> mu_sq;
    std::vector<int64_t> a_max;                  // floor(c alpha / mu_i)
    Z d_plus_size, d_size;
    // Dual-basis coordinates, one representative per {z, -z}.
    std::vector<std::vector<int64_t>> d_prime;   // primitive points of D \ {0}
    std::vector<std::vector<int64_t>> normals;   // primitive parts of all of D \ {0}
};
// BoxTooSmall unless |D+| > 2 q c alpha + 1.
DualBox build_dual_box(const Lattice& dual, const MinimaProfile& mu, const RootQ& alpha_sq, int q,
                       const Q& c, const Mat& form);

struct DepthStats {
    size_t nodes = 0, empty = 0, span = 0, simple = 0, dual_box = 0, hyperplanes = 0;
};

struct CoverResult {
    bool affine = false;
    int n = 0, k = 0;
    std::vector<LinearFlat> linear;
    std::vector<AffineFlat> flats_affine;
    size_t covered_points = 0;
    std::string path;  // trivial | simple | dual-box | affine
    MinimaProfile minima;
    std::optional<AlphaBeta> ab;
    double alpha_pow = 0, beta_pow = 0;  // alpha^{r-k}, beta^{r-k}
    double minima_bound = 0;  // (lambda_k..lambda_r)^{-1}, affine: (lambda_{k+1}..lambda_r)^{-1}
    std::vector<DepthStats> tree;
    // top-level dual box, when that path ran
    Q box_c;
    int box_q = 0;
    Z box_d_plus, box_d;
    size_t box_d_prime = 0, box_normals = 0;
    size_t pigeonhole_points = 0;
    // projection summary for simple / affine paths
    Q radius_sq;
    Z nominal_radius_factor;
    bool exact_ball_frame = true;

    size_t size() const { return affine ? flats_affine.size() : linear.size(); }
};

CoverResult cover_linear_simple(const Lattice& l, const Body& body, int k);
CoverResult cover_linear(const Lattice& l, const Body& body, int k);
CoverResult cover_affine(const Lattice& l, const Body& body, int k);

struct CoverCheck {
    bool ok = false;
    size_t points = 0;
    std::optional<Vec> uncovered;
    std::vector<size_t> per_flat;  // |flat ∩ Lambda ∩ K|
};
CoverCheck verify_cover(const CoverResult& cover, const Lattice& l, const Body& body);

}  // namespace latcov
