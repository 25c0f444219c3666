#include "latcov/lattice.hpp"

#include <cmath>

#include "latcov/errors.hpp"

namespace latcov {

Vec Lattice::point(const IVec& c) const {
    Vec x(n, Q(0));
    for (int j = 0; j < rank(); ++j) {
        if (c[j] == 0) continue;
        Q cj(c[j]);
        for (int i = 0; i < n; ++i) x[i] += cj * basis[j][i];
    }
    return x;
}

Vec Lattice::point(const std::vector<int64_t>& c) const {
    Vec x(n, Q(0));
    for (int j = 0; j < rank(); ++j) {
        if (c[j] == 0) continue;
        Q cj(static_cast<long>(c[j]));
        for (int i = 0; i < n; ++i) x[i] += cj * basis[j][i];
    }
    return x;
}

Lattice Lattice::make(std::vector<Vec> cols, int ambient) {
    if (ambient < 1 || ambient > kMaxDim)
        fail(ErrorCode::ParamOutOfRange, "dimension must be in [1, 8]");
    for (const auto& c : cols)
        if (static_cast<int>(c.size()) != ambient)
            fail(ErrorCode::Parse, "basis vector length does not match dimension");
    if (latcov::rank(cols) != static_cast<int>(cols.size()))
        fail(ErrorCode::Singular, "basis vectors are linearly dependent");
    Lattice l;
    l.n = ambient;
    l.basis = std::move(cols);
    return l;
}

Lattice Lattice::integer_grid(int d) {
    std::vector<Vec> cols(d, Vec(d, Q(0)));
    for (int i = 0; i < d; ++i) cols[i][i] = 1;
    return make(std::move(cols), d);
}

Lattice Lattice::diagonal(const Vec& diag) {
    int d = static_cast<int>(diag.size());
    std::vector<Vec> cols(d, Vec(d, Q(0)));
    for (int i = 0; i < d; ++i) cols[i][i] = diag[i];
    return make(std::move(cols), d);
}

Body Body::ball(const Q& r) {
    if (r <= 0) fail(ErrorCode::ParamOutOfRange, "ball radius must be positive");
    Body b;
    b.kind = Kind::Ball;
    b.radius = r;
    return b;
}

Body Body::ellipsoid(const Mat& a) {
    size_t n = a.size();
    for (size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) fail(ErrorCode::Parse, "ellipsoid matrix must be square");
        for (size_t j = 0; j < n; ++j)
            if (a[i][j] != a[j][i]) fail(ErrorCode::NotPositiveDefinite, "matrix is not symmetric");
    }
    // exact LDL^T without pivoting: positive definite iff every pivot > 0
    Mat m = a;
    for (size_t c = 0; c < n; ++c) {
        if (m[c][c] <= 0) fail(ErrorCode::NotPositiveDefinite, "non-positive pivot");
        for (size_t r = c + 1; r < n; ++r) {
            Q f = m[r][c] / m[c][c];
            for (size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
        }
    }
    Body b;
    b.kind = Kind::Ellipsoid;
    b.matrix = a;
    return b;
}

Mat Body::form(int n) const {
    if (kind == Kind::Ellipsoid) {
        if (static_cast<int>(matrix.size()) != n)
            fail(ErrorCode::ParamOutOfRange, "ellipsoid dimension does not match lattice");
        return matrix;
    }
    Mat f(n, Vec(n, Q(0)));
    Q inv = 1 / (radius * radius);
    for (int i = 0; i < n; ++i) f[i][i] = inv;
    return f;
}

Q Body::value(const Vec& x) const {
    if (kind == Kind::Ball) return dot(x, x) / (radius * radius);
    return form_dot(matrix, x, x);
}

Q form_dot(const Mat& f, const Vec& x, const Vec& y) {
    Q s = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        Q t = 0;
        for (size_t j = 0; j < y.size(); ++j)
            if (f[i][j] != 0) t += f[i][j] * y[j];
        s += x[i] * t;
    }
    return s;
}

Mat gram(const Lattice& l, const Mat& f) {
    int r = l.rank();
    Mat g(r, Vec(r));
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
            g[i][j] = form_dot(f, l.basis[i], l.basis[j]);
            g[j][i] = g[i][j];
        }
    return g;
}

Mat euclidean_form(int n) { return identity(n); }

Q determinant(const Lattice& l) {
    if (l.rank() != l.n) fail(ErrorCode::Singular, "determinant needs a full-rank basis");
    Mat b(l.n, Vec(l.n));
    for (int i = 0; i < l.n; ++i)
        for (int j = 0; j < l.n; ++j) b[i][j] = l.basis[j][i];
    Q d = latcov::determinant(b);
    return abs(d);
}

Q gram_determinant(const Lattice& l, const Mat& f) { return latcov::determinant(gram(l, f)); }

Lattice dual(const Lattice& l, const Mat& f) {
    Mat gi = inverse(gram(l, f));
    int r = l.rank();
    std::vector<Vec> cols(r, Vec(l.n, Q(0)));
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < r; ++k) {
            if (gi[k][j] == 0) continue;
            for (int i = 0; i < l.n; ++i) cols[j][i] += l.basis[k][i] * gi[k][j];
        }
    Lattice d;
    d.n = l.n;
    d.basis = std::move(cols);
    return d;
}

Lattice dual(const Lattice& l) { return dual(l, euclidean_form(l.n)); }

IVec coordinates(const Lattice& l, const Vec& v) {
    if (static_cast<int>(v.size()) != l.n) fail(ErrorCode::NotLatticePoint, "wrong vector length");
    // c = G^{-1} B^T v, then confirm B c == v (v might leave the span)
    Mat f = euclidean_form(l.n);
    Mat gi = inverse(gram(l, f));
    int r = l.rank();
    Vec bt(r);
    for (int j = 0; j < r; ++j) bt[j] = dot(l.basis[j], v);
    Vec c = mat_vec(gi, bt);
    if (!is_integral(c)) fail(ErrorCode::NotLatticePoint, "coordinates are not integral");
    IVec ci(r);
    for (int j = 0; j < r; ++j) ci[j] = c[j].get_num();
    if (l.point(ci) != v) fail(ErrorCode::NotLatticePoint, "vector outside the lattice span");
    return ci;
}

bool is_primitive(const Vec& v, const Lattice& l) {
    if (is_zero(v)) fail(ErrorCode::ZeroVector, "zero vector");
    IVec c = coordinates(l, v);
    return gcd_all(c) == 1;
}

Lattice hyperplane_section(const Lattice& l, const Vec& z, const Mat& f) {
    if (is_zero(z)) fail(ErrorCode::ZeroVector, "zero normal");
    int r = l.rank();
    // dual coordinates of z are <b_i, z>_F
    IVec a(r);
    for (int i = 0; i < r; ++i) {
        Q t = form_dot(f, l.basis[i], z);
        if (t.get_den() != 1) fail(ErrorCode::NotLatticePoint, "normal is not a dual lattice vector");
        a[i] = t.get_num();
    }
    Lattice du = dual(l, f);
    if (du.point(a) != z) fail(ErrorCode::NotLatticePoint, "normal outside the lattice span");
    if (gcd_all(a) != 1) fail(ErrorCode::NotPrimitive, "normal is not primitive in the dual");
    IMat ker = integer_kernel(IMat{a}, r);
    Lattice s;
    s.n = l.n;
    for (const auto& k : ker) s.basis.push_back(l.point(k));
    return s;
}

Lattice hyperplane_section(const Lattice& l, const Vec& z) {
    return hyperplane_section(l, z, euclidean_form(l.n));
}

Mat canonical_basis(const Lattice& l) {
    int r = l.rank(), n = l.n;
    Z den = 1;
    for (const auto& c : l.basis) den = lcm(den, lcm_denominators(c));
    // M is n x r integer
    IMat m(n, IVec(r));
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < n; ++i) {
            Q t = l.basis[j][i] * den;
            m[i][j] = t.get_num();
        }
    auto colop = [&](int c, int j, const Z& x, const Z& y, const Z& u, const Z& v) {
        for (auto& row : m) {
            Z nc = x * row[c] + y * row[j];
            Z nj = u * row[c] + v * row[j];
            row[c] = nc;
            row[j] = nj;
        }
    };
    int col = 0;
    for (int i = 0; i < n && col < r; ++i) {
        for (int j = col + 1; j < r; ++j) {
            if (m[i][j] == 0) continue;
            Z a = m[i][col], b = m[i][j], g, x, y;
            ext_gcd(a, b, g, x, y);
            colop(col, j, x, y, -b / g, a / g);
        }
        if (m[i][col] == 0) continue;
        if (m[i][col] < 0)
            for (auto& row : m) row[col] = -row[col];
        Z p = m[i][col];
        for (int j = 0; j < col; ++j) {
            Z q;
            mpz_fdiv_q(q.get_mpz_t(), m[i][j].get_mpz_t(), p.get_mpz_t());
            if (q != 0)
                for (auto& row : m) row[j] -= q * row[col];
        }
        ++col;
    }
    Mat out(r, Vec(n));
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < n; ++i) out[j][i] = Q(m[i][j], den);
    for (auto& c : out)
        for (auto& x : c) x.canonicalize();
    return out;
}

Lattice transform(const Lattice& l, const IMat& u) {
    Lattice t;
    t.n = l.n;
    int r = l.rank();
    for (int j = 0; j < r; ++j) {
        IVec c(r);
        for (int i = 0; i < r; ++i) c[i] = u[i][j];
        t.basis.push_back(l.point(c));
    }
    return t;
}

bool LinearFlat::contains(const Vec& x) const {
    Vec rest = x;
    for (size_t i = 0; i < rows.size(); ++i) {
        Q c = rest[pivots[i]];
        if (c == 0) continue;
        for (int j = 0; j < ambient; ++j)
            if (rows[i][j] != 0) rest[j] -= c * rows[i][j];
    }
    return is_zero(rest);
}

std::string LinearFlat::key() const {
    std::string s = std::to_string(dim) + ":";
    for (const auto& r : rows) {
        for (const auto& x : r) s += to_string(x) + ",";
        s += ";";
    }
    return s;
}

bool AffineFlat::contains(const Vec& x) const { return dir.contains(sub(x, base)); }

std::string AffineFlat::key() const {
    std::string s = dir.key() + "@";
    for (const auto& x : base) s += to_string(x) + ",";
    return s;
}

LinearFlat canonical_linear_flat(const std::vector<Vec>& gens, int ambient) {
    LinearFlat f;
    f.ambient = ambient;
    Mat m;
    for (const auto& g : gens)
        if (!is_zero(g)) m.push_back(g);
    Echelon e = rref(m);
    f.rows = std::move(e.rows);
    f.pivots = std::move(e.pivots);
    f.dim = static_cast<int>(f.rows.size());
    return f;
}

static Vec project_origin(const Vec& p, const LinearFlat& dir) {
    // p minus its orthogonal projection onto span(dir.rows)
    if (dir.dim == 0) return p;
    Mat g(dir.dim, Vec(dir.dim));
    for (int i = 0; i < dir.dim; ++i)
        for (int j = 0; j < dir.dim; ++j) g[i][j] = dot(dir.rows[i], dir.rows[j]);
    Vec rhs(dir.dim);
    for (int i = 0; i < dir.dim; ++i) rhs[i] = dot(dir.rows[i], p);
    Vec c = mat_vec(inverse(g), rhs);
    Vec out = p;
    for (int i = 0; i < dir.dim; ++i)
        for (size_t j = 0; j < p.size(); ++j) out[j] -= c[i] * dir.rows[i][j];
    return out;
}

AffineFlat canonical_affine_flat(const Vec& point, const std::vector<Vec>& gens, int ambient) {
    AffineFlat a;
    a.dir = canonical_linear_flat(gens, ambient);
    a.base = project_origin(point, a.dir);
    return a;
}

LinearFlat pad_flat(const LinearFlat& f, int k) {
    if (f.dim >= k) return f;
    std::vector<Vec> gens = f.rows;
    for (int j = 0; j < f.ambient && static_cast<int>(gens.size()) < k; ++j) {
        Vec e(f.ambient, Q(0));
        e[j] = 1;
        gens.push_back(e);
        if (rank(gens) < static_cast<int>(gens.size())) gens.pop_back();
    }
    return canonical_linear_flat(gens, f.ambient);
}

AffineFlat pad_flat(const AffineFlat& f, int k) {
    if (f.dir.dim >= k) return f;
    AffineFlat a;
    a.dir = pad_flat(f.dir, k);
    a.base = project_origin(f.base, a.dir);
    return a;
}

bool operator==(const LinearFlat& a, const LinearFlat& b) {
    return a.ambient == b.ambient && a.dim == b.dim && a.rows == b.rows;
}
bool operator<(const LinearFlat& a, const LinearFlat& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.rows < b.rows;
}
bool operator==(const AffineFlat& a, const AffineFlat& b) { return a.dir == b.dir && a.base == b.base; }
bool operator<(const AffineFlat& a, const AffineFlat& b) {
    if (!(a.dir == b.dir)) return a.dir < b.dir;
    return a.base < b.base;
}

double ball_volume(int m, double r) {
    const double pi = 3.14159265358979323846;
    double v;
    if (m % 2 == 0) {
        int h = m / 2;
        v = std::pow(pi, h) / std::tgamma(h + 1.0);
    } else {
        int h = (m - 1) / 2;
        v = 2.0 * std::tgamma(h + 1.0) * std::pow(4.0 * pi, h) / std::tgamma(m + 1.0);
    }
    return v * std::pow(r, m);
}

}  // namespace latcov
