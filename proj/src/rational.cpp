#include "latcov/rational.hpp"

#include <cctype>

#include "latcov/errors.hpp"

namespace latcov {

Q parse_rational(const std::string& s) {
    size_t i = 0;
    std::string num, den;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) num += s[i++];
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) num += s[i++];
    if (i == start) fail(ErrorCode::Parse, "bad rational '" + s + "'");
    if (i < s.size() && s[i] == '/') {
        ++i;
        size_t ds = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) den += s[i++];
        if (i == ds) fail(ErrorCode::Parse, "bad rational '" + s + "'");
    }
    if (i != s.size()) fail(ErrorCode::Parse, "bad rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    Q q;
    q.get_num() = Z(num, 10);
    q.get_den() = den.empty() ? Z(1) : Z(den, 10);
    if (q.get_den() == 0) fail(ErrorCode::Parse, "zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Q& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Z& z) { return z.get_str(); }

Q dot(const Vec& a, const Vec& b) {
    Q s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec scale(const Vec& a, const Q& s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

bool is_zero(const Vec& a) {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

bool is_integral(const Vec& a) {
    for (const auto& x : a)
        if (x.get_den() != 1) return false;
    return true;
}

Mat identity(int n) {
    Mat m(n, Vec(n, Q(0)));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

Mat transpose(const Mat& a) {
    if (a.empty()) return {};
    Mat t(a[0].size(), Vec(a.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    Mat c(n, Vec(m, Q(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

Vec mat_vec(const Mat& a, const Vec& v) {
    Vec r(a.size(), Q(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] = dot(a[i], v);
    return r;
}

Q determinant(Mat a) {
    size_t n = a.size();
    Q det = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            Q f = a[r][c] / a[c][c];
            for (size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

Mat inverse(const Mat& a) {
    size_t n = a.size();
    Mat m = a;
    Mat inv = identity(static_cast<int>(n));
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && m[p][c] == 0) ++p;
        if (p == n) fail(ErrorCode::Singular, "matrix is singular");
        std::swap(m[p], m[c]);
        std::swap(inv[p], inv[c]);
        Q piv = m[c][c];
        for (size_t j = 0; j < n; ++j) {
            m[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            Q f = m[r][c];
            for (size_t j = 0; j < n; ++j) {
                m[r][j] -= f * m[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

Echelon rref(const Mat& a) {
    Echelon e;
    if (a.empty()) return e;
    Mat m = a;
    size_t rows = m.size(), cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        Q piv = m[r][c];
        for (size_t j = c; j < cols; ++j) m[r][j] /= piv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Q f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        e.pivots.push_back(static_cast<int>(c));
        ++r;
    }
    m.resize(r);
    e.rows = std::move(m);
    return e;
}

int rank(const Mat& a) { return static_cast<int>(rref(a).pivots.size()); }

Mat rational_kernel(const Mat& a, int ncols) {
    Echelon e = rref(a);
    std::vector<char> is_piv(ncols, 0);
    for (int p : e.pivots) is_piv[p] = 1;
    Mat ker;
    for (int f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        Vec v(ncols, Q(0));
        v[f] = 1;
        for (size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rows[i][f];
        ker.push_back(std::move(v));
    }
    return ker;
}

Z gcd_all(const IVec& v) {
    Z g = 0;
    for (const auto& x : v) g = gcd(g, x);
    return g;
}

Z lcm_denominators(const Vec& v) {
    Z l = 1;
    for (const auto& x : v) l = lcm(l, x.get_den());
    return l;
}

IVec to_integer_primitive(const Vec& v) {
    Z l = lcm_denominators(v);
    IVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        Q t = v[i] * l;
        r[i] = t.get_num();
    }
    Z g = gcd_all(r);
    if (g != 0 && g != 1)
        for (auto& x : r) x /= g;
    return r;
}

Z floor_q(const Q& x) {
    Z r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Z ceil_q(const Q& x) {
    Z r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Z round_q(const Q& x) { return floor_q(x + Q(1, 2)); }

Z floor_sqrt(const Q& x) {
    // floor(sqrt(x)) == isqrt(floor(x)) for x >= 0
    Z f = floor_q(x);
    if (f < 0) return 0;
    Z r;
    mpz_sqrt(r.get_mpz_t(), f.get_mpz_t());
    return r;
}

Q pow_q(const Q& x, unsigned long e) {
    Q r;
    mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), e);
    r.canonicalize();
    return r;
}

Z pow_z(const Z& x, unsigned long e) {
    Z r;
    mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), e);
    return r;
}

void ext_gcd(const Z& a, const Z& b, Z& g, Z& x, Z& y) {
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

IMat integer_kernel(const IMat& a, int n) {
    IMat A = a;  // m x n
    IMat U(n, IVec(n, Z(0)));
    for (int i = 0; i < n; ++i) U[i][i] = 1;
    auto colop = [&](int c, int j, const Z& x, const Z& y, const Z& u, const Z& v) {
        // (col_c, col_j) <- (x col_c + y col_j, u col_c + v col_j)
        for (auto& row : A) {
            Z nc = x * row[c] + y * row[j];
            Z nj = u * row[c] + v * row[j];
            row[c] = nc;
            row[j] = nj;
        }
        for (auto& row : U) {
            Z nc = x * row[c] + y * row[j];
            Z nj = u * row[c] + v * row[j];
            row[c] = nc;
            row[j] = nj;
        }
    };
    int col = 0;
    for (size_t i = 0; i < A.size() && col < n; ++i) {
        for (int j = col + 1; j < n; ++j) {
            if (A[i][j] == 0) continue;
            Z aa = A[i][col], bb = A[i][j], g, x, y;
            ext_gcd(aa, bb, g, x, y);
            Z u = -bb / g, v = aa / g;
            colop(col, j, x, y, u, v);
        }
        if (A[i][col] != 0) ++col;
    }
    IMat ker;
    for (int j = col; j < n; ++j) {
        IVec v(n);
        for (int i = 0; i < n; ++i) v[i] = U[i][j];
        ker.push_back(std::move(v));
    }
    return ker;
}

IMat saturate(const std::vector<Vec>& gens, int r) {
    // rows y with <y, g> = 0 for all generators: kernel of the generator matrix
    Mat gm;
    for (const auto& g : gens) gm.push_back(g);
    Mat perp = gm.empty() ? identity(r) : rational_kernel(gm, r);
    IMat N;
    for (const auto& y : perp) N.push_back(to_integer_primitive(y));
    if (N.empty()) {
        IMat id(r, IVec(r, Z(0)));
        for (int i = 0; i < r; ++i) id[i][i] = 1;
        return id;
    }
    return integer_kernel(N, r);
}

Vec to_q(const IVec& v) {
    Vec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = Q(v[i]);
    return r;
}

Vec to_q(const std::vector<int64_t>& v) {
    Vec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = Q(static_cast<long>(v[i]));
    return r;
}

}  // namespace latcov
