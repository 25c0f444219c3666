#include "latcov/incidence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "latcov/enumerate.hpp"
#include "latcov/errors.hpp"
#include "latcov/evasive.hpp"
#include "latcov/parallel.hpp"
#include "latcov/rng.hpp"

namespace latcov {

namespace {

using Pts = std::vector<std::vector<int64_t>>;

int64_t dot64(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
    int64_t s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// primitive part with first nonzero entry positive
std::vector<int64_t> normalize_direction(std::vector<int64_t> v) {
    int64_t g = 0;
    for (int64_t x : v) g = std::gcd(g, x < 0 ? -x : x);
    if (g == 0) return v;
    for (auto& x : v) x /= g;
    for (int64_t x : v)
        if (x != 0) {
            if (x < 0)
                for (auto& y : v) y = -y;
            break;
        }
    return v;
}

// Z^d ∩ B^d(t) minus 0, one primitive representative per line.
Pts primitive_directions(int d, long t) {
    PointSet pts = enumerate_points(Lattice::integer_grid(d), Body::ball(Q(t)));
    std::set<std::vector<int64_t>> out;
    for (size_t i = 0; i < pts.size(); ++i) {
        std::vector<int64_t> v = pts.get(i);
        if (std::all_of(v.begin(), v.end(), [](int64_t x) { return x == 0; })) continue;
        std::vector<int64_t> n = normalize_direction(v);
        if (n == v) out.insert(n);
    }
    return Pts(out.begin(), out.end());
}

// Max number of N inside one (d-1)-dim linear subspace, d = 3: planes are
// spanned by pairs and keyed by their primitive cross product.
size_t max_in_hyperplane_3d(const Pts& N) {
    std::map<std::vector<int64_t>, std::set<size_t>> planes;
    for (size_t a = 0; a < N.size(); ++a)
        for (size_t b = a + 1; b < N.size(); ++b) {
            std::vector<int64_t> c{N[a][1] * N[b][2] - N[a][2] * N[b][1], N[a][2] * N[b][0] - N[a][0] * N[b][2],
                                   N[a][0] * N[b][1] - N[a][1] * N[b][0]};
            auto& s = planes[normalize_direction(c)];
            s.insert(a);
            s.insert(b);
        }
    size_t best = std::min<size_t>(N.size(), 1);
    for (const auto& [k, s] : planes) best = std::max(best, s.size());
    return best;
}

double log_z(const Z& x) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, x.get_mpz_t());
    return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

}  // namespace

bool Hyperplane::contains(const std::vector<int64_t>& x) const { return dot64(x, z) == c; }

std::pair<Q, Q> nondiagonal_exponents(int d, int k) {
    if (d < 2 || k < 0 || k > d - 2) fail(ErrorCode::ParamOutOfRange, "nondiagonal exponents need 0 <= k <= d-2");
    Q kk(k), dd(d);
    Q ne = 1 - (kk + 1) / ((kk + 2 - 1 / dd) * (dd - kk));
    Q me = 1 - (dd - 1) / (dd * kk + 2 * dd - 1);
    return {ne, me};
}

Q exponent_gap_formula(int d) {
    Q dd(d);
    if (d % 2 == 1) return 1 / ((dd + 2) * (dd + 3));
    return dd * dd / ((dd + 2) * (dd + 2) * (dd * dd + 2 * dd - 2));
}

ExponentRow incidence_exponents(int d) { return incidence_exponents(d, (d - 2) / 2); }

ExponentRow incidence_exponents(int d, int k) {
    if (d < 2) fail(ErrorCode::ParamOutOfRange, "exponents need d >= 2");
    ExponentRow row;
    row.d = d;
    Q dd(d);
    if (d == 2) row.exponent = Q(2, 3);
    else if (d == 3) row.exponent = Q(7, 10);
    else if (d % 2 == 1) row.exponent = 1 - (2 * dd + 3) / ((dd + 2) * (dd + 3));
    else row.exponent = 1 - (2 * dd * dd + dd - 2) / ((dd + 2) * (dd * dd + 2 * dd - 2));
    if (d == 3) row.previous = Q(7, 10);
    else if (d > 3 && d % 2 == 1) row.previous = 1 - 2 / (dd + 3);
    else if (d > 3) row.previous = 1 - 2 * (dd + 1) / ((dd + 2) * (dd + 2));
    if (d > 3) row.gap = row.exponent - *row.previous;
    row.upper = dd / (dd + 1);
    row.k = k;
    auto [ne, me] = nondiagonal_exponents(d, k);
    row.n_exponent = ne;
    row.m_exponent = me;
    return row;
}

IncidenceCount count_incidences(const Pts& P, const std::vector<Hyperplane>& H) {
    IncidenceCount out;
    out.per_hyperplane.assign(H.size(), 0);
    // group hyperplanes by normal
    std::map<std::vector<int64_t>, std::vector<size_t>> by_normal;
    for (size_t i = 0; i < H.size(); ++i) by_normal[H[i].z].push_back(i);
    if (static_cast<double>(P.size()) * static_cast<double>(by_normal.size()) > 1e9)
        fail(ErrorCode::TooLarge, "|P| x |normals| exceeds 10^9");
    std::vector<const std::pair<const std::vector<int64_t>, std::vector<size_t>>*> groups;
    for (const auto& g : by_normal) groups.push_back(&g);
    parallel_for(groups.size(), [&](size_t gi) {
        const auto& [z, idx] = *groups[gi];
        std::unordered_map<int64_t, size_t> hist;
        for (const auto& p : P) ++hist[dot64(p, z)];
        for (size_t i : idx) {
            auto it = hist.find(H[i].c);
            out.per_hyperplane[i] = it == hist.end() ? 0 : it->second;
        }
    });
    out.total = 0;
    for (size_t c : out.per_hyperplane) out.total += Z(static_cast<unsigned long>(c));
    return out;
}

Z krr_work(const IncidenceCount& c, int r1) {
    Z w = 0;
    for (size_t m : c.per_hyperplane) {
        Z b = 1;
        if (static_cast<int>(m) < r1) continue;
        for (int i = 0; i < r1; ++i) b = b * Z(static_cast<unsigned long>(m - i)) / Z(static_cast<unsigned long>(i + 1));
        w += b;
    }
    return w;
}

FreenessReport check_krr_free(const Pts& P, const std::vector<Hyperplane>& H, int r1, int r2, bool exhaustive,
                              uint64_t seed, size_t samples) {
    if (r1 < 1 || r2 < 1) fail(ErrorCode::ParamOutOfRange, "r1, r2 must be >= 1");
    FreenessReport rep;
    rep.mode = exhaustive ? "exhaustive" : "sampled";
    // incidence lists
    std::vector<std::vector<size_t>> inc(H.size());
    std::map<std::vector<int64_t>, std::vector<size_t>> by_normal;
    {
        for (size_t i = 0; i < H.size(); ++i) by_normal[H[i].z].push_back(i);
        std::vector<const std::pair<const std::vector<int64_t>, std::vector<size_t>>*> groups;
        for (const auto& g : by_normal) groups.push_back(&g);
        if (static_cast<double>(P.size()) * static_cast<double>(groups.size()) > 1e9)
            fail(ErrorCode::TooLarge, "|P| x |normals| exceeds 10^9");
        parallel_for(groups.size(), [&](size_t gi) {
            const auto& [z, idx] = *groups[gi];
            std::unordered_map<int64_t, std::vector<size_t>> at;
            for (size_t p = 0; p < P.size(); ++p) at[dot64(P[p], z)].push_back(p);
            for (size_t i : idx) {
                auto it = at.find(H[i].c);
                if (it != at.end()) inc[i] = it->second;
            }
        });
    }
    if (exhaustive) {
        Z work = 0;
        for (const auto& l : inc) {
            if (static_cast<int>(l.size()) < r1) continue;
            Z b = 1;
            for (int i = 0; i < r1; ++i) b = b * Z(static_cast<unsigned long>(l.size() - i)) / Z(static_cast<unsigned long>(i + 1));
            work += b;
        }
        if (work > Z(200'000'000UL)) fail(ErrorCode::TooLarge, "exhaustive freeness check exceeds 2*10^8 subsets");
        rep.work = work.get_ui();
        // every r1-subset of every incidence list, counted across hyperplanes;
        // packed exactly into 64 bits when possible
        int bits = 1;
        while ((size_t(1) << bits) <= P.size()) ++bits;
        bool packed = bits * r1 <= 64;
        std::unordered_map<uint64_t, uint32_t> cnt64;
        std::map<std::vector<size_t>, uint32_t> cnt_vec;
        std::optional<std::vector<size_t>> hit;
        for (size_t h = 0; h < inc.size() && !hit; ++h) {
            const auto& l = inc[h];
            if (static_cast<int>(l.size()) < r1) continue;
            std::vector<size_t> idx(r1);
            std::iota(idx.begin(), idx.end(), 0);
            for (;;) {
                uint32_t c;
                if (packed) {
                    uint64_t key = 0;
                    for (int i = 0; i < r1; ++i) key = (key << bits) | l[idx[i]];
                    c = ++cnt64[key];
                } else {
                    std::vector<size_t> key(r1);
                    for (int i = 0; i < r1; ++i) key[i] = l[idx[i]];
                    c = ++cnt_vec[key];
                }
                if (static_cast<int>(c) >= r2) {
                    std::vector<size_t> key(r1);
                    for (int i = 0; i < r1; ++i) key[i] = l[idx[i]];
                    hit = key;
                    break;
                }
                int i = r1;
                while (i > 0 && idx[i - 1] == l.size() - r1 + i - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (int j = i; j < r1; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
        if (hit) {
            KrrWitness w{*hit, {}};
            for (size_t h = 0; h < H.size(); ++h)
                if (std::all_of(hit->begin(), hit->end(), [&](size_t p) { return H[h].contains(P[p]); }))
                    w.hyperplanes.push_back(h);
            rep.witness = w;
        }
    } else {
        Rng rng = Rng(seed).split(0xf4ee);
        std::vector<size_t> big;
        for (size_t h = 0; h < inc.size(); ++h)
            if (static_cast<int>(inc[h].size()) >= r1) big.push_back(h);
        for (size_t s = 0; s < samples && !big.empty() && !rep.witness; ++s) {
            const auto& l = inc[big[rng.below(big.size())]];
            std::vector<size_t> pool = l;
            for (int i = 0; i < r1; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
            std::vector<size_t> key(pool.begin(), pool.begin() + r1);
            std::sort(key.begin(), key.end());
            // hyperplanes through all key points: per normal, equal values only
            std::vector<size_t> hs;
            for (const auto& [z, ids] : by_normal) {
                int64_t c0 = dot64(P[key[0]], z);
                bool same = true;
                for (size_t i = 1; i < key.size() && same; ++i) same = dot64(P[key[i]], z) == c0;
                if (!same) continue;
                for (size_t h : ids)
                    if (H[h].c == c0) hs.push_back(h);
            }
            std::sort(hs.begin(), hs.end());
            if (static_cast<int>(hs.size()) >= r2) rep.witness = KrrWitness{key, hs};
            ++rep.work;
        }
    }
    rep.free = !rep.witness.has_value();
    return rep;
}

IncidenceConfig build_incidence_config(int d, int k, long s, long t, const Q& eps, uint64_t seed,
                                       size_t exhaustive_limit) {
    if (d < 2 || k < 0 || k > d - 2) fail(ErrorCode::ParamOutOfRange, "incidence configs need 0 <= k <= d-2");
    if (eps <= 0 || eps >= 1) fail(ErrorCode::ParamOutOfRange, "epsilon must lie in (0,1)");
    if (s < 1 || t < 1) fail(ErrorCode::ParamOutOfRange, "s, t must be >= 1");
    IncidenceConfig cfg;
    cfg.d = d;
    cfg.k = k;
    cfg.s = s;
    cfg.t = t;
    cfg.epsilon = eps;
    cfg.delta = eps / 4;
    cfg.seed = seed;
    Rng base(seed);

    EvasiveSet pe = build_affine_evasive(d, k, s, cfg.delta, base.split(1).next());
    cfg.P = pe.points;
    // a 0-flat is one point, so the k = 0 cap is r1 = 2
    cfg.r1 = k == 0 ? 2 : pe.r;

    int lin = d - k - 1;
    if (lin == 1 || k == 0) {
        cfg.N = primitive_directions(d, t);
        cfg.normals_source = "directions";
        if (lin == 1) {
            cfg.r2 = 2;
        } else if (d == 3) {
            cfg.r2 = static_cast<int>(max_in_hyperplane_3d(cfg.N)) + 1;
            cfg.r2_measured = true;
        } else {
            fail(ErrorCode::ParamOutOfRange, "k = 0 with d >= 4 has no normal-set construction here");
        }
    } else {
        EvasiveSet ne;
        try {
            ne = build_linear_evasive(Lattice::integer_grid(d), Body::ball(Q(t)), lin, cfg.delta,
                                      base.split(2).next());
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoValidPrime) fail(ErrorCode::ScaleTooSmall, "no valid prime at this t");
            throw;
        }
        std::set<std::vector<int64_t>> dirs;
        for (const auto& v : ne.points) dirs.insert(normalize_direction(v));
        cfg.N.assign(dirs.begin(), dirs.end());
        cfg.normals_source = "linear-evasive";
        cfg.prime = ne.p;
        cfg.r2 = ne.r;
    }

    // hyperplanes through at least one point of P, per normal
    std::vector<std::vector<int64_t>> offsets(cfg.N.size());
    parallel_for(cfg.N.size(), [&](size_t i) {
        std::set<int64_t> cs;
        for (const auto& p : cfg.P) cs.insert(dot64(p, cfg.N[i]));
        offsets[i].assign(cs.begin(), cs.end());
    });
    cfg.hyperplane_bound_ok = true;
    for (size_t i = 0; i < cfg.N.size(); ++i) {
        Z zz = 0;
        for (int64_t x : cfg.N[i]) zz += Z(x) * Z(x);
        // |c| <= s |z| and 2 s |z| + 1 <= 3 s t
        for (int64_t c : offsets[i])
            if (Z(c) * Z(c) > Z(s) * Z(s) * zz) cfg.hyperplane_bound_ok = false;
        if (offsets[i].size() > static_cast<size_t>(3 * s * t)) cfg.hyperplane_bound_ok = false;
        for (int64_t c : offsets[i]) cfg.H.push_back(Hyperplane{cfg.N[i], c});
    }
    IncidenceCount cnt = count_incidences(cfg.P, cfg.H);
    cfg.incidences = cnt.total;
    cfg.histogram = cnt.per_hyperplane;

    // constants read back from the output sizes
    double dsk = k == 0 ? d : d - k - cfg.delta.get_d();
    double dtn = k == 0 ? static_cast<double>(d) / (d - 1)
                        : d * (k + 1 - cfg.delta.get_d()) / (d - 1);
    cfg.c1 = static_cast<double>(cfg.P.size()) / std::pow(static_cast<double>(s), dsk);
    cfg.c2 = static_cast<double>(cfg.N.size()) * (cfg.r2 - 1) / std::pow(static_cast<double>(t), dtn);
    cfg.n_target = static_cast<double>(cfg.P.size());
    cfg.m_target = 3.0 * s * t * static_cast<double>(cfg.N.size());

    Z work = krr_work(cnt, cfg.r1);
    bool exhaustive = work <= Z(static_cast<unsigned long>(exhaustive_limit));
    cfg.freeness = check_krr_free(cfg.P, cfg.H, cfg.r1, cfg.r2, exhaustive, base.split(3).next());
    return cfg;
}

SlopeFit fit_exponent(const std::vector<std::pair<Z, Z>>& series) {
    if (series.size() < 3) fail(ErrorCode::DegenerateSeries, "need at least 3 points");
    for (size_t i = 0; i < series.size(); ++i) {
        if (series[i].first <= 0 || series[i].second <= 0) fail(ErrorCode::DegenerateSeries, "values must be positive");
        if (i > 0 && series[i].first <= series[i - 1].first) fail(ErrorCode::DegenerateSeries, "x must increase strictly");
    }
    size_t n = series.size();
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
        x[i] = log_z(series[i].first);
        y[i] = log_z(series[i].second);
    }
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    SlopeFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double e = y[i] - f.intercept - f.slope * x[i];
        ss += e * e;
    }
    f.stderr_ = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0;
    return f;
}

}  // namespace latcov
