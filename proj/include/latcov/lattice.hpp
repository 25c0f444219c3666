#pragma once

#include <string>
#include <vector>

#include "latcov/rational.hpp"

namespace latcov {

constexpr int kMaxDim = 8;

// A lattice of rank r embedded in R^n, stored as r basis columns of length n.
// Sections through hyperplanes keep the ambient frame, so r < n occurs.
struct Lattice {
    int n = 0;
    std::vector<Vec> basis;

    int rank() const { return static_cast<int>(basis.size()); }
    Vec point(const IVec& c) const;
    Vec point(const std::vector<int64_t>& c) const;

    static Lattice make(std::vector<Vec> cols, int ambient);
    static Lattice integer_grid(int d);
    static Lattice diagonal(const Vec& diag);
};

// Ellipsoid membership: x^T A x <= 1.  A ball of radius R has form I / R^2.
struct Body {
    enum class Kind { Ball, Ellipsoid };
    Kind kind = Kind::Ball;
    Q radius = 1;
    Mat matrix;

    static Body ball(const Q& r);
    static Body ellipsoid(const Mat& a);  // throws NotPositiveDefinite
    Mat form(int n) const;
    Q value(const Vec& x) const;  // squared body scale x^T A x
    bool is_ball() const { return kind == Kind::Ball; }
};

// x^T F y for a symmetric form F.
Q form_dot(const Mat& f, const Vec& x, const Vec& y);
Mat gram(const Lattice& l, const Mat& f);
Mat euclidean_form(int n);

// |det B| for full-rank lattices; Singular when r < n.
Q determinant(const Lattice& l);
// det(B^T F B): squared covolume in the geometry of F.
Q gram_determinant(const Lattice& l, const Mat& f);

// Basis B (B^T F B)^{-1}: the dual inside span(B) for the form F.
// With F = I and full rank this is (B^{-1})^T.
Lattice dual(const Lattice& l, const Mat& f);
Lattice dual(const Lattice& l);

// Coordinates of v in the basis; NotLatticePoint if v is not in the lattice.
IVec coordinates(const Lattice& l, const Vec& v);
bool is_primitive(const Vec& v, const Lattice& l);

// {x in L : <x, z>_F = 0} for z primitive in dual(L, F).
Lattice hyperplane_section(const Lattice& l, const Vec& z, const Mat& f);
Lattice hyperplane_section(const Lattice& l, const Vec& z);

// Canonical Hermite form of the basis; equal iff same lattice.
Mat canonical_basis(const Lattice& l);
Lattice transform(const Lattice& l, const IMat& u);  // columns B * U

struct LinearFlat {
    int ambient = 0;
    int dim = 0;
    Mat rows;  // reduced row echelon generators
    std::vector<int> pivots;

    bool contains(const Vec& x) const;
    std::string key() const;
};

struct AffineFlat {
    Vec base;  // orthogonal projection of the origin onto the flat
    LinearFlat dir;

    bool contains(const Vec& x) const;
    std::string key() const;
};

LinearFlat canonical_linear_flat(const std::vector<Vec>& gens, int ambient);
AffineFlat canonical_affine_flat(const Vec& point, const std::vector<Vec>& gens, int ambient);
// Extends the flat with standard basis directions (in order) up to dimension k.
LinearFlat pad_flat(const LinearFlat& f, int k);
AffineFlat pad_flat(const AffineFlat& f, int k);

bool operator==(const LinearFlat& a, const LinearFlat& b);
bool operator<(const LinearFlat& a, const LinearFlat& b);
bool operator==(const AffineFlat& a, const AffineFlat& b);
bool operator<(const AffineFlat& a, const AffineFlat& b);

// Volume of B^m(r) from the odd/even closed forms (reports only).
double ball_volume(int m, double r);

}  // namespace latcov
