#include "latcov/covering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "latcov/errors.hpp"
#include "latcov/parallel.hpp"
#include "latcov/simd.hpp"

namespace latcov {

namespace {

using Coeffs = std::vector<int64_t>;

PointSet points_in(const Lattice& l, const Mat& f, const Q& t = Q(1)) {
    if (l.rank() == 0) return PointSet{};
    return Enumerator(gram(l, f)).within(t);
}

int64_t to_i64(const Z& z) {
    if (!z.fits_slong_p()) fail(ErrorCode::TooLarge, "coefficient exceeds 64 bits");
    return z.get_si();
}

IMat imat_mul(const IMat& a, const IMat& b) {
    size_t m = a.size(), inner = b.size(), n = b.empty() ? 0 : b[0].size();
    IMat c(m, IVec(n, Z(0)));
    for (size_t i = 0; i < m; ++i)
        for (size_t t = 0; t < inner; ++t)
            if (a[i][t] != 0)
                for (size_t j = 0; j < n; ++j) c[i][j] += a[i][t] * b[t][j];
    return c;
}

IMat unimodular_inverse(const IMat& u) {
    int r = static_cast<int>(u.size());
    Mat q(r, Vec(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) q[i][j] = Q(u[i][j]);
    Mat inv = inverse(q);
    IMat out(r, IVec(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (inv[i][j].get_den() != 1) fail(ErrorCode::Verification, "basis change is not unimodular");
            out[i][j] = inv[i][j].get_num();
        }
    return out;
}

Lattice sublattice(const Lattice& l, const IMat& vecs) {
    std::vector<Vec> cols;
    for (const auto& v : vecs) cols.push_back(l.point(v));
    Lattice s;
    s.n = l.n;
    s.basis = std::move(cols);
    return s;
}

LinearFlat span_flat(const std::vector<Vec>& gens, int n, int k) {
    return pad_flat(canonical_linear_flat(gens, n), k);
}

void normalize_sign(Coeffs& v) {
    for (auto x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : v) y = -y;
        return;
    }
}

int64_t gcd_coeffs(const Coeffs& v) {
    int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
    return g;
}

Mat map_apply_rows(const Mat& t, const Mat& rows) {
    Mat out;
    for (const auto& r : rows) out.push_back(mat_vec(t, r));
    return out;
}

// flats spanned by the dropped vectors and one image point each
std::vector<LinearFlat> simple_flats(const Lattice& l, const Mat& f, int k, Projection* keep) {
    Projection p = project_along_minima(l, f, k - 1);
    std::vector<Vec> dropped = p.dropped();
    PointSet img = points_in(p.image, f, p.radius_sq);
    std::set<LinearFlat> out;
    for (size_t i = 0; i < img.size(); ++i) {
        Coeffs y = img.get(i);
        if (gcd_coeffs(y) != 1) continue;  // multiples give the same flat
        std::vector<Vec> g = dropped;
        g.push_back(p.image.point(y));
        out.insert(canonical_linear_flat(g, l.n));
    }
    // points projecting to 0 lie in span{b_1..b_{k-1}}
    ReducedBasis rb = reduce_basis(p.image, f);
    std::vector<Vec> g = dropped;
    g.push_back(rb.lattice.basis[0]);
    out.insert(canonical_linear_flat(g, l.n));
    if (keep) *keep = std::move(p);
    return {out.begin(), out.end()};
}

struct NodeOut {
    std::set<LinearFlat> flats;
    std::vector<DepthStats> stats;
    size_t pigeonhole = 0;
    // top box summary
    bool has_box = false;
    DualBox box;
    bool simple = false;

    DepthStats& at(int depth) {
        if (static_cast<int>(stats.size()) <= depth) stats.resize(depth + 1);
        return stats[depth];
    }
    void merge(NodeOut&& o) {
        flats.merge(o.flats);
        if (stats.size() < o.stats.size()) stats.resize(o.stats.size());
        for (size_t i = 0; i < o.stats.size(); ++i) {
            stats[i].nodes += o.stats[i].nodes;
            stats[i].empty += o.stats[i].empty;
            stats[i].span += o.stats[i].span;
            stats[i].simple += o.stats[i].simple;
            stats[i].dual_box += o.stats[i].dual_box;
            stats[i].hyperplanes += o.stats[i].hyperplanes;
        }
        pigeonhole += o.pigeonhole;
    }
};

int64_t floor_ratio(const Q& c, const RootQ& alpha_sq, const Q& mu_sq) {
    // largest a >= 0 with a mu <= c alpha
    auto ok = [&](int64_t a) {
        Q lhs = Q(static_cast<long>(a)) * Q(static_cast<long>(a)) * mu_sq / (c * c);
        return compare(RootQ{lhs, 1}, alpha_sq) <= 0;
    };
    double est = c.get_d() * std::sqrt(to_double(alpha_sq)) / std::sqrt(mu_sq.get_d());
    int64_t a = static_cast<int64_t>(std::floor(est));
    if (a < 0) a = 0;
    while (a > 0 && !ok(a)) --a;
    while (ok(a + 1)) ++a;
    return a;
}

// For every point x of l ∩ K: two elements of D+ with equal <x, y>, hence a
// nonzero z in D with <x, z> = 0 whose primitive part is among the normals.
size_t pigeonhole_certificate(const Lattice& l, const Mat& f, const DualBox& box, bool parallel) {
    PointSet pts = points_in(l, f);
    int r = l.rank(), q = box.q;
    // t_i(x) = <x, w_i>_F = v_i . c with v_i = B^T F w_i integral
    std::vector<Coeffs> v(q, Coeffs(r));
    for (int i = 0; i < q; ++i) {
        Vec fw = mat_vec(f, box.w[i]);
        for (int a = 0; a < r; ++a) {
            Q t = dot(l.basis[a], fw);
            if (t.get_den() != 1) fail(ErrorCode::Verification, "dual witness pairs non-integrally");
            v[i][a] = to_i64(t.get_num());
        }
    }
    size_t n = pts.size();
    // t values via the SIMD dot kernel when the inputs fit its exact range
    std::vector<int64_t> t(static_cast<size_t>(q) * n);
    bool small = true;
    for (auto x : pts.coords) small = small && std::llabs(x) < (1 << 27);
    for (const auto& vi : v)
        for (auto x : vi) small = small && std::llabs(x) < (1 << 27);
    if (small && n > 0) {
        std::vector<int32_t> soa(static_cast<size_t>(r) * n);
        for (size_t i = 0; i < n; ++i)
            for (int a = 0; a < r; ++a) soa[a * n + i] = static_cast<int32_t>(pts.at(i)[a]);
        for (int i = 0; i < q; ++i) {
            std::vector<int32_t> z(v[i].begin(), v[i].end());
            simd::dot_i32(soa.data(), n, r, n, z.data(), t.data() + i * n);
        }
    } else {
        for (int i = 0; i < q; ++i)
            for (size_t p = 0; p < n; ++p) {
                __int128 s = 0;
                for (int a = 0; a < r; ++a) s += static_cast<__int128>(v[i][a]) * pts.at(p)[a];
                t[i * n + p] = static_cast<int64_t>(s);
            }
    }
    std::vector<Coeffs> normals = box.normals;
    std::atomic<size_t> bad{0};
    auto check = [&](size_t p) {
        std::unordered_map<int64_t, Coeffs> seen;
        Coeffs a(q, 0);
        while (true) {
            int64_t val = 0;
            for (int i = 0; i < q; ++i) val += a[i] * t[i * n + p];
            auto it = seen.find(val);
            if (it != seen.end()) {
                Coeffs diff(q);
                for (int i = 0; i < q; ++i) diff[i] = a[i] - it->second[i];
                int64_t orth = 0;
                for (int i = 0; i < q; ++i) orth += diff[i] * t[i * n + p];
                int rd = box.dual.rank();
                Coeffs z(rd, 0);
                for (int i = 0; i < q; ++i)
                    for (int b = 0; b < rd; ++b) z[b] += diff[i] * box.w_coeffs[i][b];
                int64_t g = gcd_coeffs(z);
                if (orth != 0 || g == 0) {
                    ++bad;
                    return;
                }
                for (auto& x : z) x /= g;
                normalize_sign(z);
                if (!std::binary_search(normals.begin(), normals.end(), z)) ++bad;
                return;
            }
            seen.emplace(val, a);
            int i = 0;
            for (; i < q; ++i) {
                if (a[i] < box.a_max[i]) {
                    ++a[i];
                    break;
                }
                a[i] = 0;
            }
            if (i == q) {
                ++bad;  // D+ exhausted without a collision
                return;
            }
        }
    };
    if (parallel) {
        parallel_for(n, check);
    } else {
        for (size_t p = 0; p < n; ++p) check(p);
    }
    if (bad.load() != 0) fail(ErrorCode::Verification, "pigeonhole certificate failed");
    return n;
}

void cover_node(const Lattice& in, const Mat& f, int k, int depth, int max_depth, bool parallel, NodeOut& out) {
    if (depth > max_depth) fail(ErrorCode::RecursionGuard, "recursion deeper than the dimension");
    DepthStats& st = out.at(depth);
    ++st.nodes;
    Lattice l = in;
    if (l.rank() == 0) {
        ++st.empty;
        return;
    }
    MinimaProfile m = successive_minima(l, f);
    int rt = 0;
    while (rt < m.r && m.lambda_sq[rt] <= 1) ++rt;
    if (rt == 0) {
        ++st.empty;
        return;
    }
    if (rt < m.r) {
        // points of the ball lie in the span of the witnesses with lambda <= 1
        std::vector<Vec> gens;
        for (int i = 0; i < rt; ++i) gens.push_back(to_q(m.witness[i]));
        l = sublattice(l, saturate(gens, m.r));
        if (rt <= k) {
            ++out.at(depth).span;
            out.flats.insert(span_flat(l.basis, l.n, k));
            return;
        }
        m = successive_minima(l, f);
    } else if (m.r <= k) {
        ++st.span;
        out.flats.insert(span_flat(l.basis, l.n, k));
        return;
    }
    int r = m.r;
    AlphaBeta ab = alpha_beta(m, k);
    if (ab.q == r - k + 1) {
        ++out.at(depth).simple;
        if (depth == 0) out.simple = true;
        for (auto& fl : simple_flats(l, f, k, nullptr)) out.flats.insert(std::move(fl));
        return;
    }
    ++out.at(depth).dual_box;
    Lattice du = dual(l, f);
    MinimaProfile mu = successive_minima(du, f);
    Q c = 1;
    DualBox box;
    for (int tries = 0;; ++tries) {
        try {
            box = build_dual_box(du, mu, ab.alpha_sq, ab.q, c, f);
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BoxTooSmall || tries > 40) throw;
            c *= 2;
        }
    }
    out.pigeonhole += pigeonhole_certificate(l, f, box, parallel);
    out.at(depth).hyperplanes += box.normals.size();
    std::vector<NodeOut> parts(box.normals.size());
    auto work = [&](size_t i) {
        Lattice sec = hyperplane_section(l, du.point(box.normals[i]), f);
        NodeOut& o = parts[i];
        if (k == r - 1) {
            // a hyperplane holding no nonzero point of the ball covers nothing
            if (points_in(sec, f).size() > 1)
                o.flats.insert(span_flat(sec.basis, sec.n, k));
            else
                ++o.at(depth + 1).empty;
        } else {
            cover_node(sec, f, k, depth + 1, max_depth, false, o);
        }
    };
    if (parallel) {
        parallel_for(parts.size(), work);
    } else {
        for (size_t i = 0; i < parts.size(); ++i) work(i);
    }
    for (auto& p : parts) out.merge(std::move(p));
    if (depth == 0) {
        out.has_box = true;
        out.box = std::move(box);
    }
}

void fill_bounds(CoverResult& res, int skip) {
    const auto& m = res.minima;
    double prod = 1;
    for (int i = skip; i < m.r; ++i) prod *= std::sqrt(m.lambda_sq[i].get_d());
    res.minima_bound = 1.0 / prod;
    if (res.k >= 1 && res.k <= m.r - 1) {
        AlphaBeta ab = alpha_beta(m, res.k);
        res.alpha_pow = std::pow(ab.alpha, m.r - res.k);
        res.beta_pow = std::pow(ab.beta, m.r - res.k);
        res.ab = ab;
    }
}

void check_k(const Lattice& l, int k) {
    if (k < 1 || k > l.rank() - 1) fail(ErrorCode::ParamOutOfRange, "k must satisfy 1 <= k <= d-1");
}

// Lambda ∩ K = {0} is covered by any flat; otherwise lambda_r <= 1 is required.
bool trivial_or_check(const Lattice& l, const Mat& f, CoverResult& res) {
    PointSet pts = points_in(l, f);
    res.covered_points = pts.size();
    res.minima = successive_minima(l, f);
    if (pts.size() <= 1) return true;
    if (res.minima.lambda_sq.back() > 1) fail(ErrorCode::MinimaTooLarge, "lambda_d exceeds 1");
    return false;
}

void map_back_linear(CoverResult& res, const BallFrame& fr) {
    std::set<LinearFlat> s;
    for (const auto& fl : res.linear)
        s.insert(canonical_linear_flat(map_apply_rows(fr.from_frame, fl.rows), res.n));
    res.linear.assign(s.begin(), s.end());
    res.exact_ball_frame = fr.exact_ball;
}

}  // namespace

std::vector<Vec> Projection::dropped() const {
    std::vector<Vec> v;
    for (const auto& s : steps) v.push_back(s.dropped);
    return v;
}

Projection project_along_minima(const Lattice& l, const Body& body, int s) {
    return project_along_minima(l, body.form(l.n), s);
}

Projection project_along_minima(const Lattice& l, const Mat& f, int s) {
    int r = l.rank(), n = l.n;
    if (s < 0 || s > r - 1) fail(ErrorCode::ParamOutOfRange, "s must satisfy 0 <= s <= r-1");
    MinimaProfile m = successive_minima(l, f);
    if (m.lambda_sq.back() > 1) fail(ErrorCode::MinimaTooLarge, "lambda_d exceeds 1");
    Projection p;
    p.map = identity(n);
    p.coeff_map.assign(r, IVec(r, Z(0)));
    for (int i = 0; i < r; ++i) p.coeff_map[i][i] = 1;
    Lattice cur = l;
    for (int j = 0; j < s; ++j) {
        ReducedBasis rb = reduce_basis(cur, f);
        const Vec& b1 = rb.lattice.basis[0];
        Lattice du = dual(rb.lattice, f);
        Vec fb = mat_vec(f, du.basis[0]);  // <x, b_1*>_F = x . fb
        ProjectionStep st;
        st.dropped = b1;
        st.map = identity(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) st.map[a][b] -= b1[a] * fb[b];
        std::vector<Vec> rest(rb.lattice.basis.begin() + 1, rb.lattice.basis.end());
        st.target = canonical_linear_flat(rest, n);
        // coefficients in cur -> coefficients in the reduced basis -> drop b_1
        IMat inv = unimodular_inverse(rb.coeffs);
        IMat drop(inv.begin() + 1, inv.end());
        p.coeff_map = imat_mul(drop, p.coeff_map);
        p.map = mat_mul(st.map, p.map);
        p.steps.push_back(std::move(st));
        cur.basis = std::move(rest);
    }
    p.image = cur;
    // the ambient map agrees with the coefficient map on the input basis
    for (int i = 0; i < r; ++i) {
        IVec col(p.image.rank());
        for (int a = 0; a < p.image.rank(); ++a) col[a] = p.coeff_map[a][i];
        if (mat_vec(p.map, l.basis[i]) != p.image.point(col))
            fail(ErrorCode::Verification, "projection does not map the lattice onto its image");
    }
    PointSet pts = points_in(l, f);
    Enumerator ev(gram(p.image, f));
    int ri = p.image.rank();
    Coeffs y(ri);
    for (size_t i = 0; i < pts.size(); ++i) {
        const int64_t* c = pts.at(i);
        for (int a = 0; a < ri; ++a) {
            Z t = 0;
            for (int b = 0; b < r; ++b)
                if (c[b] != 0) t += p.coeff_map[a][b] * Z(static_cast<long>(c[b]));
            y[a] = to_i64(t);
        }
        Q v = ev.value(y);
        if (v > p.radius_sq) p.radius_sq = v;
    }
    p.points_checked = pts.size();
    p.nominal_radius_factor = pow_z(pow_z(Z(2), static_cast<unsigned long>(n * n)) + 1, s);
    MinimaProfile mi = successive_minima(p.image, f);
    for (int i = 0; i < ri; ++i) {
        Q b = mi.lambda_sq[i] / m.lambda_sq[i + s];
        if (i == 0 || b < p.band_lo) p.band_lo = b;
        if (i == 0 || b > p.band_hi) p.band_hi = b;
    }
    return p;
}

BallFrame transform_to_ball(const Lattice& l, const Body& body) {
    int n = l.n;
    BallFrame fr;
    if (body.is_ball()) {
        fr.to_frame = identity(n);
        for (int i = 0; i < n; ++i) fr.to_frame[i][i] = 1 / body.radius;
        fr.form = identity(n);
        fr.exact_ball = true;
    } else {
        const Mat& a = body.matrix;
        Mat lo = identity(n);
        Vec d(n);
        for (int j = 0; j < n; ++j) {
            Q s = a[j][j];
            for (int t = 0; t < j; ++t) s -= lo[j][t] * lo[j][t] * d[t];
            if (s <= 0) fail(ErrorCode::NotPositiveDefinite, "ellipsoid matrix is not positive definite");
            d[j] = s;
            for (int i = j + 1; i < n; ++i) {
                Q u = a[i][j];
                for (int t = 0; t < j; ++t) u -= lo[i][t] * lo[j][t] * d[t];
                lo[i][j] = u / s;
            }
        }
        bool squares = true;
        Vec root(n);
        for (int i = 0; i < n; ++i) {
            Z num = d[i].get_num(), den = d[i].get_den();
            if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) {
                squares = false;
                break;
            }
            Z rn, rd;
            mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
            mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
            root[i] = frac(rn, rd);
        }
        fr.to_frame = transpose(lo);
        if (squares) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) fr.to_frame[i][j] *= root[i];
            fr.form = identity(n);
            fr.exact_ball = true;
        } else {
            fr.form.assign(n, Vec(n, Q(0)));
            for (int i = 0; i < n; ++i) fr.form[i][i] = d[i];
        }
    }
    fr.from_frame = inverse(fr.to_frame);
    fr.lattice.n = n;
    for (const auto& b : l.basis) fr.lattice.basis.push_back(mat_vec(fr.to_frame, b));
    return fr;
}

DualBox build_dual_box(const Lattice& du, const MinimaProfile& mu, const RootQ& alpha_sq, int q, const Q& c,
                       const Mat& f) {
    if (q < 2 || q > mu.r) fail(ErrorCode::ParamOutOfRange, "q must satisfy 2 <= q <= r");
    if (c <= 0) fail(ErrorCode::ParamOutOfRange, "c must be positive");
    DualBox box;
    box.c = c;
    box.q = q;
    box.dual = du;
    Z dplus = 1, dsz = 1;
    for (int i = 0; i < q; ++i) {
        box.w.push_back(mu.witness_points[i]);
        box.w_coeffs.push_back(mu.witness[i]);
        box.mu_sq.push_back(mu.lambda_sq[i]);
        int64_t a = floor_ratio(c, alpha_sq, mu.lambda_sq[i]);
        box.a_max.push_back(a);
        dplus *= Z(static_cast<long>(a + 1));
        dsz *= Z(static_cast<long>(2 * a + 1));
    }
    box.d_plus_size = dplus;
    box.d_size = dsz;
    // |D+| - 1 > 2 q c alpha  <=>  ((|D+| - 1) / (2qc))^2 > alpha^2
    Q lhs = Q(dplus - 1) / (2 * Q(q) * c);
    if (dplus <= 1 || compare(RootQ{lhs * lhs, 1}, alpha_sq) <= 0)
        fail(ErrorCode::BoxTooSmall, "|D+| <= 2qc alpha + 1");
    if (dsz > Z(static_cast<unsigned long>(kMaxPoints))) fail(ErrorCode::TooManyPoints, "dual box too large");
    int rd = du.rank();
    std::vector<Coeffs> prim, norm;
    Coeffs a(q);
    for (int i = 0; i < q; ++i) a[i] = -box.a_max[i];
    while (true) {
        bool zero = std::all_of(a.begin(), a.end(), [](int64_t x) { return x == 0; });
        if (!zero) {
            Coeffs z(rd, 0);
            for (int i = 0; i < q; ++i)
                for (int b = 0; b < rd; ++b) z[b] += a[i] * box.w_coeffs[i][b];
            int64_t g = gcd_coeffs(z);
            Coeffs zp = z;
            normalize_sign(zp);
            if (g == 1) prim.push_back(zp);
            for (auto& x : zp) x /= g;
            norm.push_back(std::move(zp));
        }
        int i = 0;
        for (; i < q; ++i) {
            if (a[i] < box.a_max[i]) {
                ++a[i];
                break;
            }
            a[i] = -box.a_max[i];
        }
        if (i == q) break;
    }
    for (auto* v : {&prim, &norm}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    // ||z|| <= q c alpha for z in D'
    Enumerator ev(gram(du, f));
    Q qc2 = Q(q) * Q(q) * c * c;
    for (const auto& z : prim)
        if (compare(RootQ{ev.value(z) / qc2, 1}, alpha_sq) > 0)
            fail(ErrorCode::Verification, "dual box element longer than q c alpha");
    box.d_prime = std::move(prim);
    box.normals = std::move(norm);
    return box;
}

CoverResult cover_linear_simple(const Lattice& l, const Body& body, int k) {
    check_k(l, k);
    BallFrame fr = transform_to_ball(l, body);
    CoverResult res;
    res.n = l.n;
    res.k = k;
    res.path = "simple";
    if (trivial_or_check(fr.lattice, fr.form, res)) {
        res.path = "trivial";
        res.linear.push_back(pad_flat(LinearFlat{l.n, 0, {}, {}}, k));
    } else {
        Projection p;
        res.linear = simple_flats(fr.lattice, fr.form, k, &p);
        res.radius_sq = p.radius_sq;
        res.nominal_radius_factor = p.nominal_radius_factor;
    }
    fill_bounds(res, k - 1);
    map_back_linear(res, fr);
    return res;
}

CoverResult cover_linear(const Lattice& l, const Body& body, int k) {
    check_k(l, k);
    BallFrame fr = transform_to_ball(l, body);
    CoverResult res;
    res.n = l.n;
    res.k = k;
    if (trivial_or_check(fr.lattice, fr.form, res)) {
        res.path = "trivial";
        res.linear.push_back(pad_flat(LinearFlat{l.n, 0, {}, {}}, k));
    } else {
        NodeOut out;
        cover_node(fr.lattice, fr.form, k, 0, l.rank(), true, out);
        res.path = out.simple ? "simple" : "dual-box";
        res.linear.assign(out.flats.begin(), out.flats.end());
        if (res.linear.empty()) res.linear.push_back(pad_flat(LinearFlat{l.n, 0, {}, {}}, k));
        res.tree = std::move(out.stats);
        res.pigeonhole_points = out.pigeonhole;
        if (out.has_box) {
            res.box_c = out.box.c;
            res.box_q = out.box.q;
            res.box_d_plus = out.box.d_plus_size;
            res.box_d = out.box.d_size;
            res.box_d_prime = out.box.d_prime.size();
            res.box_normals = out.box.normals.size();
        }
    }
    fill_bounds(res, k - 1);
    map_back_linear(res, fr);
    return res;
}

CoverResult cover_affine(const Lattice& l, const Body& body, int k) {
    check_k(l, k);
    BallFrame fr = transform_to_ball(l, body);
    CoverResult res;
    res.affine = true;
    res.n = l.n;
    res.k = k;
    res.path = "affine";
    std::set<AffineFlat> s;
    if (trivial_or_check(fr.lattice, fr.form, res)) {
        res.path = "trivial";
        s.insert(pad_flat(canonical_affine_flat(Vec(l.n, Q(0)), {}, l.n), k));
    } else {
        Projection p = project_along_minima(fr.lattice, fr.form, k);
        res.radius_sq = p.radius_sq;
        res.nominal_radius_factor = p.nominal_radius_factor;
        std::vector<Vec> dir;
        for (const auto& v : p.dropped()) dir.push_back(mat_vec(fr.from_frame, v));
        PointSet img = points_in(p.image, fr.form, p.radius_sq);
        for (size_t i = 0; i < img.size(); ++i) {
            Vec z = mat_vec(fr.from_frame, p.image.point(img.get(i)));
            s.insert(canonical_affine_flat(z, dir, l.n));
        }
    }
    res.flats_affine.assign(s.begin(), s.end());
    res.exact_ball_frame = fr.exact_ball;
    fill_bounds(res, k);
    return res;
}

namespace {

struct SortedPoints {
    const PointSet& p;
    // index of c among the lexicographically sorted points, or npos
    size_t find(const int64_t* c) const {
        size_t lo = 0, hi = p.size();
        int r = p.r;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            const int64_t* m = p.at(mid);
            int cmp = 0;
            for (int a = 0; a < r && cmp == 0; ++a) cmp = (m[a] < c[a]) ? -1 : (m[a] > c[a] ? 1 : 0);
            if (cmp == 0) return mid;
            if (cmp < 0)
                lo = mid + 1;
            else
                hi = mid;
        }
        return static_cast<size_t>(-1);
    }
};

std::string vec_key(const Vec& v) {
    std::string s;
    for (const auto& x : v) s += to_string(x) + ",";
    return s;
}

}  // namespace

CoverCheck verify_cover(const CoverResult& cover, const Lattice& l, const Body& body) {
    Mat f = body.form(l.n);
    PointSet pts = points_in(l, f);
    int r = l.rank(), n = l.n;
    CoverCheck chk;
    chk.points = pts.size();
    std::vector<std::atomic<uint8_t>> hit(pts.size());
    for (auto& h : hit) h.store(0, std::memory_order_relaxed);
    SortedPoints sp{pts};
    Mat g = gram(l, f);
    if (!cover.affine) {
        chk.per_flat.assign(cover.linear.size(), 0);
        parallel_for(cover.linear.size(), [&](size_t fi) {
            const LinearFlat& fl = cover.linear[fi];
            // coefficient vectors c with B c in the flat
            Mat normals = rational_kernel(fl.rows, n);
            IMat cons;
            for (const auto& nu : normals) {
                Vec row(r);
                for (int j = 0; j < r; ++j) row[j] = dot(nu, l.basis[j]);
                if (!is_zero(row)) cons.push_back(to_integer_primitive(row));
            }
            IMat ker;
            if (cons.empty()) {
                ker.assign(r, IVec(r, Z(0)));
                for (int i = 0; i < r; ++i) ker[i][i] = 1;
            } else {
                ker = integer_kernel(cons, r);
            }
            int kr = static_cast<int>(ker.size());
            size_t count = 0;
            Coeffs c(r);
            if (kr == 0) {
                std::fill(c.begin(), c.end(), 0);
                size_t idx = sp.find(c.data());
                if (idx != static_cast<size_t>(-1)) hit[idx].store(1, std::memory_order_relaxed);
                chk.per_flat[fi] = 1;
                return;
            }
            Mat sg(kr, Vec(kr));
            for (int a = 0; a < kr; ++a)
                for (int b = 0; b < kr; ++b) {
                    Q s = 0;
                    for (int i = 0; i < r; ++i)
                        for (int j = 0; j < r; ++j)
                            if (ker[a][i] != 0 && ker[b][j] != 0) s += Q(ker[a][i]) * g[i][j] * Q(ker[b][j]);
                    sg[a][b] = s;
                }
            PointSet inside = Enumerator(sg).within(Q(1));
            for (size_t p = 0; p < inside.size(); ++p) {
                const int64_t* t = inside.at(p);
                for (int i = 0; i < r; ++i) {
                    Z s = 0;
                    for (int a = 0; a < kr; ++a)
                        if (t[a] != 0) s += ker[a][i] * Z(static_cast<long>(t[a]));
                    c[i] = to_i64(s);
                }
                size_t idx = sp.find(c.data());
                if (idx != static_cast<size_t>(-1)) {
                    hit[idx].store(1, std::memory_order_relaxed);
                    ++count;
                }
            }
            chk.per_flat[fi] = count;
        });
    } else {
        chk.per_flat.assign(cover.flats_affine.size(), 0);
        std::map<std::string, std::vector<size_t>> groups;
        for (size_t i = 0; i < cover.flats_affine.size(); ++i) groups[cover.flats_affine[i].dir.key()].push_back(i);
        std::vector<Vec> amb(pts.size());
        for (size_t p = 0; p < pts.size(); ++p) amb[p] = l.point(pts.get(p));
        for (const auto& [key, idxs] : groups) {
            Mat normals = rational_kernel(cover.flats_affine[idxs[0]].dir.rows, n);
            std::unordered_map<std::string, size_t> keyed;
            for (size_t i : idxs) {
                Vec v;
                for (const auto& nu : normals) v.push_back(dot(nu, cover.flats_affine[i].base));
                keyed.emplace(vec_key(v), i);
            }
            for (size_t p = 0; p < pts.size(); ++p) {
                Vec v;
                for (const auto& nu : normals) v.push_back(dot(nu, amb[p]));
                auto it = keyed.find(vec_key(v));
                if (it != keyed.end()) {
                    hit[p].store(1, std::memory_order_relaxed);
                    ++chk.per_flat[it->second];
                }
            }
        }
    }
    chk.ok = true;
    for (size_t p = 0; p < pts.size(); ++p)
        if (!hit[p].load(std::memory_order_relaxed)) {
            chk.ok = false;
            chk.uncovered = l.point(pts.get(p));
            break;
        }
    return chk;
}

}  // namespace latcov
