#include "latcov/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latcov/errors.hpp"
#include "latcov/parallel.hpp"
#include "latcov/simd.hpp"

namespace latcov {

namespace {

void gso(const Mat& g, Mat& mu, Vec& bs) {
    int r = static_cast<int>(g.size());
    mu.assign(r, Vec(r, Q(0)));
    bs.assign(r, Q(0));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < i; ++j) {
            Q s = g[i][j];
            for (int l = 0; l < j; ++l) s -= mu[j][l] * mu[i][l] * bs[l];
            mu[i][j] = s / bs[j];
        }
        Q s = g[i][i];
        for (int l = 0; l < i; ++l) s -= mu[i][l] * mu[i][l] * bs[l];
        bs[i] = s;
        if (bs[i] <= 0) fail(ErrorCode::Singular, "Gram matrix is not positive definite");
    }
}

bool fits_i64(const Z& z) { return z.fits_slong_p(); }

}  // namespace

IMat lll_gram(const Mat& g0, Mat* reduced) {
    int r = static_cast<int>(g0.size());
    Mat g = g0;
    IMat u(r, IVec(r, Z(0)));
    for (int i = 0; i < r; ++i) u[i][i] = 1;
    Mat mu;
    Vec bs;
    const Q delta(3, 4);
    auto reduce = [&](int k, int j, const Z& q) {
        Q qq(q);
        // b_k <- b_k - q b_j
        for (int i = 0; i < r; ++i) u[i][k] -= q * u[i][j];
        Q gkk = g[k][k] - 2 * qq * g[k][j] + qq * qq * g[j][j];
        for (int i = 0; i < r; ++i) {
            if (i == k) continue;
            g[k][i] -= qq * g[j][i];
            g[i][k] = g[k][i];
        }
        g[k][k] = gkk;
    };
    int k = 1;
    gso(g, mu, bs);
    int guard = 0;
    while (k < r) {
        if (++guard > 100000) fail(ErrorCode::TooLarge, "lattice reduction did not converge");
        for (int j = k - 1; j >= 0; --j) {
            Z q = round_q(mu[k][j]);
            if (q != 0) {
                reduce(k, j, q);
                gso(g, mu, bs);
            }
        }
        if (bs[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bs[k - 1]) {
            ++k;
        } else {
            std::swap(g[k], g[k - 1]);
            for (auto& row : g) std::swap(row[k], row[k - 1]);
            for (auto& row : u) std::swap(row[k], row[k - 1]);
            gso(g, mu, bs);
            k = std::max(k - 1, 1);
        }
    }
    if (reduced) *reduced = g;
    return u;
}

Enumerator::Enumerator(const Mat& gram) : r_(static_cast<int>(gram.size())), gram_(gram) {
    den_ = 1;
    for (const auto& row : gram_) den_ = lcm(den_, lcm_denominators(row));
    num_.resize(r_ * r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) {
            Q t = gram_[i][j] * den_;
            num_[i * r_ + j] = t.get_num();
        }
    if (r_ == 0) return;
    Mat red;
    u_ = lll_gram(gram_, &red);
    red_num_.resize(r_ * r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) {
            Q t = red[i][j] * den_;
            red_num_[i * r_ + j] = t.get_num();
        }
    Mat mu;
    Vec bs;
    gso(red, mu, bs);
    mu_.assign(r_ * r_, 0.0);
    bstar_.resize(r_);
    for (int i = 0; i < r_; ++i) {
        bstar_[i] = bs[i].get_d();
        for (int j = 0; j < i; ++j) mu_[i * r_ + j] = mu[i][j].get_d();
    }
    min_diag_ = red[0][0];
    max_diag_ = red[0][0];
    for (int i = 1; i < r_; ++i) {
        if (red[i][i] < min_diag_) min_diag_ = red[i][i];
        if (red[i][i] > max_diag_) max_diag_ = red[i][i];
    }
}

Q Enumerator::value(const int64_t* c) const {
    Z s = 0;
    for (int a = 0; a < r_; ++a) {
        if (c[a] == 0) continue;
        Z t = 0;
        for (int b = 0; b < r_; ++b)
            if (c[b] != 0) t += num_[a * r_ + b] * Z(static_cast<long>(c[b]));
        s += t * Z(static_cast<long>(c[a]));
    }
    return frac(s, den_);
}

PointSet Enumerator::within(const Q& bound, size_t max_points) const {
    PointSet out;
    out.r = r_;
    if (r_ == 0 || bound < 0) return out;
    const int r = r_;
    const Z lim = floor_q(bound * den_);
    const double T = bound.get_d();
    const double tol = 1e-9 * (std::fabs(T) + 1.0) * r;

    // top-level coordinate c'_{r-1} ranges over the outermost interval
    double rad_top = std::sqrt(std::max(T, 0.0) / bstar_[r - 1]);
    long top = static_cast<long>(std::floor(rad_top + 1e-7 + 1e-9 * rad_top));
    std::vector<long> tasks;
    for (long x = -top; x <= top; ++x) tasks.push_back(x);

    // exact evaluation path for candidates in reduced coordinates
    double max_g = 0;
    bool small = true;
    for (const auto& z : red_num_) {
        if (!fits_i64(z)) small = false;
        max_g = std::max(max_g, std::fabs(z.get_d()));
    }
    std::vector<double> gd(r * r);
    for (int i = 0; i < r * r; ++i) gd[i] = red_num_[i].get_d();

    std::vector<std::vector<int64_t>> parts(tasks.size());
    std::vector<char> overflow(tasks.size(), 0);
    parallel_for(tasks.size(), [&](size_t t) {
        std::vector<int64_t> cand;
        std::vector<int64_t> c(r, 0);
        std::vector<double> partial(r + 1, 0.0);
        c[r - 1] = tasks[t];
        double y = static_cast<double>(c[r - 1]);
        partial[r - 1] = bstar_[r - 1] * y * y;
        if (partial[r - 1] > T + tol) return;
        size_t limit = 2 * max_points + 16;
        // iterative depth-first search over levels r-2 .. 0
        std::vector<long> lo(r), hi(r);
        std::vector<double> center(r);
        auto setup = [&](int i) {
            double cen = 0;
            for (int j = i + 1; j < r; ++j) cen -= mu_[j * r + i] * static_cast<double>(c[j]);
            center[i] = cen;
            double rem = T - partial[i + 1];
            if (rem < -tol) {
                lo[i] = 1;
                hi[i] = 0;
                return;
            }
            double rad = std::sqrt(std::max(rem, 0.0) / bstar_[i]);
            double pad = 1e-7 + 1e-9 * (rad + std::fabs(cen));
            lo[i] = static_cast<long>(std::ceil(cen - rad - pad));
            hi[i] = static_cast<long>(std::floor(cen + rad + pad));
        };
        if (r == 1) {
            cand.push_back(c[0]);
        } else {
            int i = r - 2;
            setup(i);
            c[i] = lo[i] - 1;
            while (i < r - 1) {
                if (++c[i] > hi[i]) {
                    ++i;
                    continue;
                }
                double yy = static_cast<double>(c[i]) - center[i];
                partial[i] = partial[i + 1] + bstar_[i] * yy * yy;
                if (partial[i] > T + tol) continue;
                if (i == 0) {
                    cand.insert(cand.end(), c.begin(), c.end());
                    if (cand.size() / r > limit) {
                        overflow[t] = 1;
                        return;
                    }
                } else {
                    --i;
                    setup(i);
                    c[i] = lo[i] - 1;
                }
            }
        }
        // exact filter
        size_t nc = cand.size() / r;
        std::vector<char> keep(nc, 0);
        double max_x = 0;
        for (auto v : cand) max_x = std::max(max_x, std::fabs(static_cast<double>(v)));
        if (small && simd::qform_exact_bound(r, max_g, max_x) && lim.fits_slong_p()) {
            std::vector<double> soa(static_cast<size_t>(r) * nc);
            for (size_t p = 0; p < nc; ++p)
                for (int j = 0; j < r; ++j) soa[j * nc + p] = static_cast<double>(cand[p * r + j]);
            std::vector<double> vals(nc);
            simd::qform_f64(soa.data(), nc, r, nc, gd.data(), vals.data());
            double limd = static_cast<double>(lim.get_si());
            for (size_t p = 0; p < nc; ++p) keep[p] = vals[p] <= limd;
        } else {
            for (size_t p = 0; p < nc; ++p) {
                Z s = 0;
                for (int a = 0; a < r; ++a) {
                    Z tt = 0;
                    for (int b = 0; b < r; ++b)
                        tt += red_num_[a * r + b] * Z(static_cast<long>(cand[p * r + b]));
                    s += tt * Z(static_cast<long>(cand[p * r + a]));
                }
                keep[p] = s <= lim;
            }
        }
        std::vector<int64_t> acc;
        for (size_t p = 0; p < nc; ++p) {
            if (!keep[p]) continue;
            // back to the original basis: c = U c'
            for (int a = 0; a < r; ++a) {
                Z s = 0;
                for (int b = 0; b < r; ++b) s += u_[a][b] * Z(static_cast<long>(cand[p * r + b]));
                if (!fits_i64(s)) {
                    overflow[t] = 2;
                    return;
                }
                acc.push_back(s.get_si());
            }
        }
        parts[t] = std::move(acc);
    });
    for (char o : overflow) {
        if (o == 1) fail(ErrorCode::TooManyPoints, "enumeration exceeds point guard");
        if (o == 2) fail(ErrorCode::TooLarge, "coefficients exceed 64-bit range");
    }
    size_t total = 0;
    for (const auto& p : parts) total += p.size() / r;
    if (total > max_points) fail(ErrorCode::TooManyPoints, "enumeration exceeds point guard");
    std::vector<int64_t> flat;
    flat.reserve(total * r);
    for (auto& p : parts) flat.insert(flat.end(), p.begin(), p.end());
    std::vector<size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return std::lexicographical_compare(flat.begin() + a * r, flat.begin() + (a + 1) * r,
                                            flat.begin() + b * r, flat.begin() + (b + 1) * r);
    });
    out.coords.reserve(total * r);
    for (size_t i : idx) out.push(flat.data() + i * r);
    return out;
}

PointSet enumerate_points(const Lattice& l, const Body& k, size_t max_points) {
    return enumerate_points_scaled(l, k, Q(1), max_points);
}

PointSet enumerate_points_scaled(const Lattice& l, const Body& k, const Q& t, size_t max_points) {
    if (l.rank() == 0) {
        PointSet p;
        return p;
    }
    Enumerator e(gram(l, k.form(l.n)));
    return e.within(t, max_points);
}

}  // namespace latcov
