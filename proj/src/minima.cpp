#include "latcov/minima.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "latcov/errors.hpp"
#include "latcov/interval.hpp"
#include "latcov/span.hpp"

namespace latcov {

MinimaProfile successive_minima(const Lattice& l, const Body& k) {
    return successive_minima(l, k.form(l.n));
}

MinimaProfile successive_minima(const Lattice& l, const Mat& form) {
    MinimaProfile m;
    m.n = l.n;
    m.r = l.rank();
    if (m.r == 0) return m;
    Enumerator e(gram(l, form));
    Q t = e.shortest_reduced();
    for (;;) {
        m.bounds_tried.push_back(t);
        PointSet pts = e.within(t);
        m.points_enumerated += pts.size();
        std::vector<Q> val(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) val[i] = e.value(pts.at(i));
        std::vector<size_t> idx(pts.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return val[a] < val[b]; });
        SpanTester span(m.r);
        m.lambda_sq.clear();
        m.witness.clear();
        for (size_t i : idx) {
            if (val[i] == 0) continue;
            if (span.contains(pts.at(i))) continue;
            span.add(pts.at(i));
            m.lambda_sq.push_back(val[i]);
            m.witness.push_back(pts.get(i));
            if (static_cast<int>(m.witness.size()) == m.r) break;
        }
        if (static_cast<int>(m.witness.size()) == m.r) break;
        if (t >= e.longest_reduced())
            fail(ErrorCode::Verification, "reduced basis did not yield independent minima");
        t *= 2;
        if (t > e.longest_reduced()) t = e.longest_reduced();
    }
    for (const auto& w : m.witness) m.witness_points.push_back(l.point(w));
    return m;
}

bool certify_minima(const Lattice& l, const Mat& form, const MinimaProfile& m) {
    if (m.r == 0) return true;
    Enumerator e(gram(l, form));
    SpanTester all(m.r);
    for (int i = 0; i < m.r; ++i) {
        if (e.value(m.witness[i]) != m.lambda_sq[i]) return false;
        if (all.contains(m.witness[i].data())) return false;
        all.add(m.witness[i].data());
        if (i > 0 && m.lambda_sq[i] < m.lambda_sq[i - 1]) return false;
        PointSet pts = e.within(m.lambda_sq[i]);
        SpanTester below(m.r);
        int dim = 0;
        for (size_t p = 0; p < pts.size(); ++p) {
            if (e.value(pts.at(p)) >= m.lambda_sq[i]) continue;
            if (!below.contains(pts.at(p))) {
                below.add(pts.at(p));
                ++dim;
            }
        }
        if (dim >= i + 1) return false;
    }
    return true;
}

int compare(const RootQ& a, const RootQ& b) {
    Q lhs = pow_q(a.base, b.e), rhs = pow_q(b.base, a.e);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

double to_double(const RootQ& a) { return std::pow(a.base.get_d(), 1.0 / static_cast<double>(a.e)); }

Q tail_product_sq(const MinimaProfile& m, int j) {
    Q p = 1;
    for (int i = j - 1; i < m.r; ++i) p *= m.lambda_sq[i];
    return p;
}

AlphaBeta alpha_beta(const MinimaProfile& m, int k) {
    int r = m.r;
    if (k < 1 || k > r - 1) fail(ErrorCode::ParamOutOfRange, "k must be in [1, r-1]");
    AlphaBeta ab;
    ab.k = k;
    auto cand = [&](int j) { return RootQ{1 / tail_product_sq(m, j), static_cast<unsigned long>(r - j)}; };
    // smallest j on ties
    ab.j_star = 1;
    ab.alpha_sq = cand(1);
    for (int j = 2; j <= k; ++j) {
        RootQ c = cand(j);
        if (compare(c, ab.alpha_sq) < 0) {
            ab.alpha_sq = c;
            ab.j_star = j;
        }
    }
    // smallest q = r - j + 1 on ties: scan j downward
    int jq = k;
    RootQ best = cand(k);
    for (int j = k - 1; j >= 1; --j) {
        RootQ c = cand(j);
        if (compare(c, best) < 0) {
            best = c;
            jq = j;
        }
    }
    ab.q = r - jq + 1;
    ab.beta_j = 1;
    ab.beta_sq = cand(1);
    for (int j = 2; j <= r - 1; ++j) {
        RootQ c = cand(j);
        if (compare(c, ab.beta_sq) < 0) {
            ab.beta_sq = c;
            ab.beta_j = j;
        }
    }
    ab.alpha = std::sqrt(to_double(ab.alpha_sq));
    ab.beta = std::sqrt(to_double(ab.beta_sq));
    return ab;
}

bool check_product_inequalities(const MinimaProfile& m, const AlphaBeta& ab) {
    int r = m.r, q = ab.q, k = ab.k;
    if (q < r - k + 2) return true;
    auto prod = [&](int from, int to) {  // 1-based inclusive
        Q p = 1;
        for (int i = from; i <= to; ++i) p *= m.lambda_sq[i - 1];
        return p;
    };
    Q pa = prod(r - q + 1, r);  // alpha^{2(q-1)} = 1/pa
    for (int i = r - q + 1; i <= r; ++i) {
        // (1/lambda_i^2)^{q-1} <= 1/pa
        if (pow_q(1 / m.lambda_sq[i - 1], q - 1) > 1 / pa) return false;
    }
    for (int i = 3; i <= r - k + 2; ++i) {
        Q a = prod(r - i + 2, r), b = prod(r - q + 1, r - i + 1);
        if (pow_q(a, q - i + 1) > pow_q(b, i - 2)) return false;
    }
    return true;
}

namespace {

// vol(B^d)^2 = coef * pi^e
void ball_volume_sq(int d, Q& coef, unsigned long& e) {
    Z f = 1;
    if (d % 2 == 0) {
        for (int i = 2; i <= d / 2; ++i) f *= i;
        coef = Q(1) / Q(f * f);
        e = d;
    } else {
        int h = (d - 1) / 2;
        Z hf = 1, df = 1;
        for (int i = 2; i <= h; ++i) hf *= i;
        for (int i = 2; i <= d; ++i) df *= i;
        coef = Q(4 * hf * hf * pow_z(Z(4), d - 1)) / Q(df * df);
        e = d - 1;
    }
}

// sign of a * pi^e - b
int sign_pi_expr(const Q& a, unsigned long e, const Q& b) {
    if (e == 0) {
        Q v = a - b;
        return sgn(v);
    }
    return certified_sign([&](mpfr_prec_t p) {
        return Interval(a, p) * Interval::pi(p).pow(e) - Interval(b, p);
    });
}

}  // namespace

MinkowskiReport check_minkowski2(const Lattice& l, const Body& k) {
    return check_minkowski2(l, k, successive_minima(l, k));
}

MinkowskiReport check_minkowski2(const Lattice& l, const Body& k, const MinimaProfile& m) {
    MinkowskiReport rep;
    int d = m.r;
    Q detg = gram_determinant(l, k.form(l.n));
    Q prod = 1;
    for (const auto& x : m.lambda_sq) prod *= x;
    Q coef;
    unsigned long e;
    ball_volume_sq(d, coef, e);
    Q four_d = pow_q(Q(4), d);
    Z fact = 1;
    for (int i = 2; i <= d; ++i) fact *= i;
    // lower: vol^2 prod <= 4^d det G
    rep.lower_ok = sign_pi_expr(coef * prod, e, four_d * detg) <= 0;
    // upper: 4^d det G <= (d!)^2 vol^2 prod
    rep.upper_ok = sign_pi_expr(Q(fact * fact) * coef * prod, e, four_d * detg) >= 0;
    // decorations: sqrt(vol^2/detG) with 128-bit enclosures
    mpfr_prec_t p = 128;
    Interval ratio = (Interval(coef, p) * Interval::pi(p).pow(e) / Interval(detg, p)).sqrt();
    Interval two_d(pow_q(Q(2), d), p);
    Interval lo = ratio / two_d;
    Interval up = Interval(Q(fact), p) * ratio / two_d;
    rep.lower = lo.mid();
    rep.upper = up.mid();
    rep.middle = 1.0 / std::sqrt(prod.get_d());
    rep.lower_interval = lo.str(30);
    rep.upper_interval = up.str(30);
    return rep;
}

TransferenceReport check_transference(const Lattice& l, const Body& k) {
    if (!k.is_ball()) fail(ErrorCode::BodyNotBall, "transference bounds are stated for balls");
    TransferenceReport rep;
    Mat f = k.form(l.n);
    rep.primal = successive_minima(l, f);
    rep.dual = successive_minima(dual(l, f), f);
    int r = rep.primal.r;
    Q d2 = Q(r) * Q(r);
    rep.ok = true;
    for (int i = 0; i < r; ++i) {
        Q p = rep.primal.lambda_sq[i] * rep.dual.lambda_sq[r - 1 - i];
        rep.products_sq.push_back(p);
        if (p < 1 || p > d2) rep.ok = false;
    }
    return rep;
}

PointCountReport point_count_check(const Lattice& l, const Body& k) {
    return point_count_check(l, k, successive_minima(l, k));
}

PointCountReport point_count_check(const Lattice& l, const Body& k, const MinimaProfile& m) {
    PointCountReport rep;
    rep.count = enumerate_points(l, k).size();
    Z b = pow_z(Z(2), m.r - 1);
    for (const auto& x : m.lambda_sq) b *= floor_sqrt(Q(4) / x) + 1;  // floor(2/lambda + 1)
    rep.bound = b;
    rep.ok = Z(static_cast<unsigned long>(rep.count)) <= b;
    return rep;
}

ReducedBasis reduce_basis(const Lattice& l, const Body& k) { return reduce_basis(l, k.form(l.n)); }

namespace {

IVec solve_in_basis(const IMat& s, const IVec& v) {
    // coordinates of v in the independent integer columns s (exact)
    int i = static_cast<int>(s.size());
    int r = static_cast<int>(v.size());
    Mat g(i, Vec(i));
    Vec rhs(i);
    for (int a = 0; a < i; ++a) {
        for (int b = 0; b < i; ++b) {
            Z t = 0;
            for (int c = 0; c < r; ++c) t += s[a][c] * s[b][c];
            g[a][b] = Q(t);
        }
        Z t = 0;
        for (int c = 0; c < r; ++c) t += s[a][c] * v[c];
        rhs[a] = Q(t);
    }
    Vec x = mat_vec(inverse(g), rhs);
    IVec out(i);
    for (int a = 0; a < i; ++a) {
        if (x[a].get_den() != 1) fail(ErrorCode::Verification, "vector outside saturated span");
        out[a] = x[a].get_num();
    }
    return out;
}

Q qvalue(const Mat& g, const IVec& c) {
    Vec v = to_q(c);
    return form_dot(g, v, v);
}

}  // namespace

ReducedBasis reduce_basis(const Lattice& l, const Mat& form) {
    ReducedBasis rb;
    rb.minima = successive_minima(l, form);
    int r = rb.minima.r;
    Mat g = gram(l, form);
    std::vector<IVec> b;
    std::vector<IVec> w;
    for (const auto& x : rb.minima.witness) {
        IVec v(r);
        for (int i = 0; i < r; ++i) v[i] = Z(static_cast<long>(x[i]));
        w.push_back(v);
    }
    Q growth = 1;
    rb.bounds_ok = true;
    for (int i = 1; i <= r; ++i) {
        std::vector<Vec> gens;
        for (int j = 0; j < i; ++j) gens.push_back(to_q(w[j]));
        IMat s = saturate(gens, r);
        IVec b0(r, Z(0));
        if (i == 1) {
            b0 = s[0];
        } else {
            // b_1..b_{i-1} in S coordinates, then complete with u where y^T u = 1
            IMat mt;
            for (int j = 0; j < i - 1; ++j) mt.push_back(solve_in_basis(s, b[j]));
            IMat ker = integer_kernel(mt, i);
            if (ker.size() != 1) fail(ErrorCode::Verification, "basis completion failed");
            const IVec& y = ker[0];
            IVec u(i, Z(0));
            Z gg = 0;
            for (int c = 0; c < i; ++c) {
                Z ng, x, yy;
                ext_gcd(gg, y[c], ng, x, yy);
                for (auto& t : u) t *= x;
                u[c] += yy;
                gg = ng;
            }
            if (gg < 0) {
                for (auto& t : u) t = -t;
                gg = -gg;
            }
            if (gg != 1) fail(ErrorCode::Verification, "completion vector is not primitive");
            for (int c = 0; c < i; ++c)
                for (int a = 0; a < r; ++a) b0[a] += u[c] * s[c][a];
        }
        Q target = growth * rb.minima.lambda_sq[i - 1];
        IVec base = b0;
        int m = i - 1;
        if (m > 0) {
            Mat gb(m, Vec(m));
            Vec rhs(m);
            Vec b0q = to_q(b0);
            std::vector<Vec> bq;
            for (int j = 0; j < m; ++j) bq.push_back(to_q(b[j]));
            for (int j = 0; j < m; ++j) {
                for (int t = 0; t < m; ++t) gb[j][t] = form_dot(g, bq[j], bq[t]);
                rhs[j] = form_dot(g, bq[j], b0q);
            }
            Vec tau = mat_vec(inverse(gb), rhs);
            for (int j = 0; j < m; ++j) {
                Z q = round_q(tau[j]);
                for (int a = 0; a < r; ++a) base[a] -= q * b[j][a];
            }
        }
        IVec chosen;
        for (int radius : {2, 4}) {
            rb.search_radius = std::max(rb.search_radius, radius);
            // rank offsets in floating point, confirm the pick exactly
            std::vector<double> gd(r * r);
            for (int a = 0; a < r; ++a)
                for (int c = 0; c < r; ++c) gd[a * r + c] = g[a][c].get_d();
            auto fval = [&](const IVec& c) {
                double s2 = 0;
                for (int a = 0; a < r; ++a)
                    for (int cc = 0; cc < r; ++cc) s2 += gd[a * r + cc] * c[a].get_d() * c[cc].get_d();
                return s2;
            };
            std::vector<int> off(m, -radius);
            IVec best = base;
            double best_v = fval(base);
            if (m > 0) {
                for (;;) {
                    IVec cand = base;
                    for (int j = 0; j < m; ++j)
                        if (off[j] != 0)
                            for (int a = 0; a < r; ++a) cand[a] -= off[j] * b[j][a];
                    double v = fval(cand);
                    if (v < best_v) {
                        best_v = v;
                        best = cand;
                    }
                    int j = 0;
                    while (j < m && off[j] == radius) off[j++] = -radius;
                    if (j == m) break;
                    ++off[j];
                }
            }
            if (qvalue(g, best) <= target) {
                chosen = best;
                break;
            }
            if (qvalue(g, base) <= target) {
                chosen = base;
                break;
            }
        }
        if (chosen.empty()) fail(ErrorCode::Verification, "first-finiteness bound not met after widening");
        b.push_back(chosen);
        growth *= Q(9, 4);
    }
    rb.coeffs.assign(r, IVec(r));
    for (int i = 0; i < r; ++i)
        for (int a = 0; a < r; ++a) rb.coeffs[a][i] = b[i][a];
    Mat cm(r, Vec(r));
    for (int a = 0; a < r; ++a)
        for (int i = 0; i < r; ++i) cm[a][i] = Q(rb.coeffs[a][i]);
    if (r > 0 && abs(determinant(cm)) != 1) fail(ErrorCode::Verification, "reduced basis is not unimodular");
    rb.lattice = transform(l, rb.coeffs);
    Q gr = 1;
    for (int i = 0; i < r; ++i) {
        rb.value.push_back(qvalue(g, b[i]));
        if (rb.value[i] > gr * rb.minima.lambda_sq[i]) rb.bounds_ok = false;
        gr *= Q(9, 4);
    }
    return rb;
}

}  // namespace latcov
