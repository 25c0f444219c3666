#include "latcov/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "latcov/enumerate.hpp"
#include "latcov/errors.hpp"

namespace latcov {

namespace {

constexpr size_t kMaxCoverPoints = 200;
constexpr size_t kMaxEvasivePoints = 40;
constexpr size_t kMaxCandidates = 5000;
constexpr size_t kMaxSubsets = 5'000'000;

using Bits = std::vector<uint64_t>;
using Pts = std::vector<std::vector<int64_t>>;

size_t words(size_t n) { return (n + 63) / 64; }
bool test(const Bits& b, size_t i) { return (b[i / 64] >> (i % 64)) & 1; }
void set(Bits& b, size_t i) { b[i / 64] |= uint64_t(1) << (i % 64); }
size_t popcount(const Bits& b) {
    size_t s = 0;
    for (uint64_t w : b) s += static_cast<size_t>(__builtin_popcountll(w));
    return s;
}
size_t and_count(const Bits& a, const Bits& b) {
    size_t s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += static_cast<size_t>(__builtin_popcountll(a[i] & b[i]));
    return s;
}
bool subset_of(const Bits& a, const Bits& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}
bool is_zero_pt(const std::vector<int64_t>& p) {
    return std::all_of(p.begin(), p.end(), [](int64_t x) { return x == 0; });
}

template <class Fn>
void for_each_subset(size_t n, size_t r, Fn&& fn) {
    if (r > n || r == 0) return;
    std::vector<size_t> idx(r);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        fn(idx);
        size_t i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

uint64_t binom(uint64_t n, uint64_t r) {
    if (r > n) return 0;
    long double v = 1;
    for (uint64_t i = 0; i < r; ++i) v = v * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    return v > 1e18L ? UINT64_MAX : static_cast<uint64_t>(v + 0.5L);
}

// Linear covers only see the line through each point.
Pts reduce_linear(const Pts& pts, bool* had_zero) {
    std::set<std::vector<int64_t>> out;
    *had_zero = false;
    for (auto p : pts) {
        if (is_zero_pt(p)) {
            *had_zero = true;
            continue;
        }
        int64_t g = 0;
        for (int64_t x : p) g = std::gcd(g, x < 0 ? -x : x);
        for (auto& x : p) x /= g;
        for (int64_t x : p)
            if (x != 0) {
                if (x < 0)
                    for (auto& y : p) y = -y;
                break;
            }
        out.insert(p);
    }
    return Pts(out.begin(), out.end());
}

Candidates build_candidates(const Pts& pts, int d, int k, FlatKind kind, bool zero_flat) {
    Candidates c;
    c.d = d;
    c.kind = kind;
    size_t n = pts.size(), w = words(n);
    std::vector<Vec> q;
    for (const auto& p : pts) q.push_back(to_q(p));
    std::vector<size_t> nonzero;
    for (size_t i = 0; i < n; ++i)
        if (kind == FlatKind::Affine || !is_zero_pt(pts[i])) nonzero.push_back(i);
    // whole space
    if (k >= d) {
        std::vector<Vec> gens;
        for (int j = 0; j < d; ++j) {
            Vec e(d, Q(0));
            e[j] = 1;
            gens.push_back(e);
        }
        if (kind == FlatKind::Linear) c.linear.push_back(canonical_linear_flat(gens, d));
        else c.affine.push_back(canonical_affine_flat(Vec(d, Q(0)), gens, d));
        c.bits.push_back(Bits(w, 0));
        for (size_t i = 0; i < n; ++i) set(c.bits.back(), i);
        return c;
    }
    size_t max_sub = kind == FlatKind::Linear ? static_cast<size_t>(k) : static_cast<size_t>(k + 1);
    uint64_t total = 0;
    for (size_t r = 1; r <= max_sub; ++r) total += binom(nonzero.size(), r);
    if (total > kMaxSubsets) fail(ErrorCode::TooManyFlats, "candidate generation exceeds 5*10^6 subsets");
    std::set<std::string> seen;
    auto add = [&](auto&& flat) {
        if (!seen.insert(flat.key()).second) return;
        if (seen.size() > kMaxCandidates) fail(ErrorCode::TooManyFlats, "more than 5000 candidate flats");
        Bits b(w, 0);
        for (size_t i = 0; i < n; ++i)
            if (flat.contains(q[i])) set(b, i);
        c.bits.push_back(std::move(b));
        if constexpr (std::is_same_v<std::decay_t<decltype(flat)>, LinearFlat>) c.linear.push_back(flat);
        else c.affine.push_back(flat);
    };
    bool zero_present = nonzero.size() < n;
    if (kind == FlatKind::Linear && zero_present && zero_flat) add(canonical_linear_flat({}, d));
    for (size_t r = 1; r <= max_sub; ++r)
        for_each_subset(nonzero.size(), r, [&](const std::vector<size_t>& s) {
            std::vector<Vec> gens;
            if (kind == FlatKind::Linear) {
                for (size_t i : s) gens.push_back(q[nonzero[i]]);
                add(canonical_linear_flat(gens, d));
            } else {
                for (size_t i = 1; i < s.size(); ++i) gens.push_back(sub(q[nonzero[s[i]]], q[nonzero[s[0]]]));
                add(canonical_affine_flat(q[nonzero[s[0]]], gens, d));
            }
        });
    return c;
}

struct CoverSearch {
    size_t n = 0;
    std::vector<Bits> cand;
    std::vector<std::vector<size_t>> by_point;  // candidates containing each point
    long best = 0;
    std::vector<size_t> best_sol, cur;
    uint64_t nodes = 0, budget = 0;
    bool exhausted = true;
    std::map<Bits, long> memo;

    long lower_bound(const Bits& u) const {
        size_t left = popcount(u);
        if (left == 0) return 0;
        size_t maxc = 0;
        for (const auto& c : cand) maxc = std::max(maxc, and_count(c, u));
        long lb1 = static_cast<long>((left + maxc - 1) / maxc);
        // points with pairwise disjoint candidate lists each need their own flat
        std::vector<char> used(cand.size(), 0);
        long lb2 = 0;
        for (size_t i = 0; i < n; ++i) {
            if (!test(u, i)) continue;
            bool free = true;
            for (size_t c : by_point[i])
                if (used[c]) {
                    free = false;
                    break;
                }
            if (!free) continue;
            ++lb2;
            for (size_t c : by_point[i]) used[c] = 1;
        }
        return std::max(lb1, lb2);
    }

    void run(const Bits& u, long depth) {
        if (nodes >= budget) {
            exhausted = false;
            return;
        }
        ++nodes;
        size_t left = popcount(u);
        if (left == 0) {
            if (depth < best) {
                best = depth;
                best_sol = cur;
            }
            return;
        }
        if (depth + lower_bound(u) >= best) return;
        auto it = memo.find(u);
        if (it != memo.end() && it->second <= depth) return;
        if (memo.size() < 1'000'000) memo[u] = depth;
        // uncovered point with the fewest options
        size_t pick = n, deg = SIZE_MAX;
        for (size_t i = 0; i < n; ++i)
            if (test(u, i) && by_point[i].size() < deg) {
                deg = by_point[i].size();
                pick = i;
            }
        std::vector<std::pair<size_t, size_t>> opts;
        for (size_t c : by_point[pick]) opts.push_back({and_count(cand[c], u), c});
        std::sort(opts.begin(), opts.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
        for (const auto& [gain, c] : opts) {
            Bits nu = u;
            for (size_t w = 0; w < nu.size(); ++w) nu[w] &= ~cand[c][w];
            cur.push_back(c);
            run(nu, depth + 1);
            cur.pop_back();
        }
    }
};

}  // namespace

CoverInstance CoverInstance::grid(int d, long n, int k, FlatKind kind) {
    CoverInstance inst;
    inst.k = k;
    inst.kind = kind;
    PointSet pts = enumerate_points(Lattice::integer_grid(d), Body::ball(Q(n)));
    for (size_t i = 0; i < pts.size(); ++i) inst.points.push_back(pts.get(i));
    return inst;
}

Candidates candidate_flats(const CoverInstance& inst) {
    if (inst.points.size() > kMaxCoverPoints) fail(ErrorCode::TooManyPoints, "more than 200 points");
    if (inst.points.empty()) fail(ErrorCode::ParamOutOfRange, "empty instance");
    int d = static_cast<int>(inst.points[0].size());
    if (inst.k < 0) fail(ErrorCode::ParamOutOfRange, "k must be >= 0");
    return build_candidates(inst.points, d, inst.k, inst.kind, false);
}

OracleResult min_cover_exact(const CoverInstance& inst, uint64_t node_budget) {
    if (inst.points.empty()) fail(ErrorCode::ParamOutOfRange, "empty instance");
    int d = static_cast<int>(inst.points[0].size());
    OracleResult res;
    Pts pts = inst.points;
    if (inst.kind == FlatKind::Linear && inst.k < d) {
        bool zero = false;
        pts = reduce_linear(inst.points, &zero);
        if (pts.empty()) {
            // only the origin
            res.optimum = 1;
            res.optimal = true;
            res.linear.push_back(pad_flat(canonical_linear_flat({}, d), inst.k));
            return res;
        }
        if (inst.k == 0) fail(ErrorCode::ParamOutOfRange, "a nonzero point lies on no linear 0-flat");
    }
    if (pts.size() > kMaxCoverPoints) fail(ErrorCode::TooManyPoints, "more than 200 points after reduction");
    Candidates c = build_candidates(pts, d, inst.k, inst.kind, false);
    res.points = pts.size();

    // drop candidates contained in another one
    std::vector<size_t> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return popcount(c.bits[a]) > popcount(c.bits[b]); });
    std::vector<size_t> keep;
    for (size_t a : order) {
        bool dom = false;
        for (size_t b : keep)
            if (subset_of(c.bits[a], c.bits[b])) {
                dom = true;
                break;
            }
        if (!dom) keep.push_back(a);
    }
    std::sort(keep.begin(), keep.end());
    res.candidates = keep.size();

    CoverSearch s;
    s.n = pts.size();
    for (size_t a : keep) s.cand.push_back(c.bits[a]);
    s.by_point.resize(s.n);
    for (size_t j = 0; j < s.cand.size(); ++j)
        for (size_t i = 0; i < s.n; ++i)
            if (test(s.cand[j], i)) s.by_point[i].push_back(j);
    Bits all(words(s.n), 0);
    for (size_t i = 0; i < s.n; ++i) set(all, i);

    // greedy incumbent
    {
        Bits u = all;
        std::vector<size_t> sol;
        while (popcount(u) > 0) {
            size_t bi = 0, bg = 0;
            for (size_t j = 0; j < s.cand.size(); ++j) {
                size_t g = and_count(s.cand[j], u);
                if (g > bg) {
                    bg = g;
                    bi = j;
                }
            }
            sol.push_back(bi);
            for (size_t w = 0; w < u.size(); ++w) u[w] &= ~s.cand[bi][w];
        }
        s.best = static_cast<long>(sol.size());
        s.best_sol = sol;
        res.greedy = s.best;
    }
    s.budget = node_budget;
    s.run(all, 0);
    res.optimum = s.best;
    res.optimal = s.exhausted;
    res.nodes = s.nodes;
    std::vector<size_t> sol = s.best_sol;
    std::sort(sol.begin(), sol.end());
    for (size_t j : sol) {
        size_t orig = keep[j];
        if (inst.kind == FlatKind::Linear) res.linear.push_back(pad_flat(c.linear[orig], std::min(inst.k, d)));
        else res.affine.push_back(pad_flat(c.affine[orig], std::min(inst.k, d)));
    }
    return res;
}

EvasiveOracle max_evasive_exact(const Pts& points, int k, int r, FlatKind kind, uint64_t node_budget) {
    if (points.size() > kMaxEvasivePoints) fail(ErrorCode::TooManyPoints, "more than 40 points");
    if (r < 1 || k < 0) fail(ErrorCode::ParamOutOfRange, "need r >= 1, k >= 0");
    EvasiveOracle res;
    res.optimal = true;
    if (points.empty()) return res;
    int d = static_cast<int>(points[0].size());
    // {0} caps the origin itself
    Candidates c = build_candidates(points, d, k, kind, true);
    res.constraints = c.size();
    size_t n = points.size();
    std::vector<std::vector<size_t>> flats_of(n);
    for (size_t j = 0; j < c.size(); ++j)
        for (size_t i = 0; i < n; ++i)
            if (test(c.bits[j], i)) flats_of[i].push_back(j);
    // most constrained points first
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return flats_of[a].size() > flats_of[b].size(); });
    std::vector<int> load(c.size(), 0);
    std::vector<size_t> cur;
    long best = -1;
    uint64_t nodes = 0;
    bool complete = true;
    auto rec = [&](auto&& self, size_t pos) -> void {
        if (nodes >= node_budget) {
            complete = false;
            return;
        }
        ++nodes;
        if (static_cast<long>(cur.size() + (n - pos)) <= best) return;
        if (pos == n) {
            best = static_cast<long>(cur.size());
            res.chosen = cur;
            return;
        }
        size_t p = order[pos];
        bool fits = true;
        for (size_t f : flats_of[p])
            if (load[f] + 1 > r - 1) {
                fits = false;
                break;
            }
        if (fits) {
            for (size_t f : flats_of[p]) ++load[f];
            cur.push_back(p);
            self(self, pos + 1);
            cur.pop_back();
            for (size_t f : flats_of[p]) --load[f];
        }
        self(self, pos + 1);
    };
    rec(rec, 0);
    std::sort(res.chosen.begin(), res.chosen.end());
    res.optimum = std::max(best, 0L);
    res.optimal = complete;
    res.nodes = nodes;
    return res;
}

}  // namespace latcov
