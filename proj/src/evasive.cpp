#include "latcov/evasive.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>

#include "latcov/errors.hpp"
#include "latcov/parallel.hpp"

namespace latcov {

namespace {

constexpr int64_t kMaxPrime = 10000;
constexpr uint64_t kFlatGuard = 100'000'000;
constexpr uint64_t kExhaustiveSubsets = 1'000'000;
constexpr uint64_t kSampledSubsets = 100'000;
constexpr uint64_t kAgreementSubsets = 1'000;
constexpr int64_t kRankPrime = 2305843009213693951LL;  // 2^61 - 1

int64_t mod(int64_t a, int64_t p) {
    int64_t r = a % p;
    return r < 0 ? r + p : r;
}

int64_t mulmod(int64_t a, int64_t b, int64_t p) {
    return static_cast<int64_t>(static_cast<__int128>(a) * b % p);
}

int64_t powmod(int64_t a, int64_t e, int64_t p) {
    int64_t r = 1 % p;
    a = mod(a, p);
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

int64_t invmod(int64_t a, int64_t p) { return powmod(a, p - 2, p); }

void check_eps(const Q& eps) {
    if (eps <= 0 || eps >= 1) fail(ErrorCode::ParamOutOfRange, "epsilon must lie in (0,1)");
    if (eps.get_den() > 12) fail(ErrorCode::ParamOutOfRange, "epsilon denominator must be <= 12");
}

unsigned long eps_num(const Q& eps) { return eps.get_num().get_ui(); }
unsigned long eps_den(const Q& eps) { return eps.get_den().get_ui(); }

// (c |X|)^b >= base^{e b - a} for eps = a/b: |X| >= base^{e - eps} / c.
bool size_floor_ok(size_t count, long c, const Z& base, long e, const Q& eps) {
    unsigned long a = eps_num(eps), b = eps_den(eps);
    long ex = e * static_cast<long>(b) - static_cast<long>(a);
    if (ex <= 0) return count * c >= 1;
    return pow_z(Z(static_cast<unsigned long>(count * c)), b) >= pow_z(base, ex);
}

// Smallest t with (2t)^b >= p^{e b - a}.
size_t ceil_half_power(int64_t p, long e, const Q& eps) {
    double est = std::pow(static_cast<double>(p), static_cast<double>(e) - eps.get_d()) / 2;
    size_t t = static_cast<size_t>(std::max(0.0, std::floor(est) - 2));
    while (!size_floor_ok(t, 2, Z(static_cast<long>(p)), e, eps)) ++t;
    while (t > 0 && size_floor_ok(t - 1, 2, Z(static_cast<long>(p)), e, eps)) --t;
    return t;
}

std::string floor_text(const char* base, long e, const Q& eps, int c) {
    return std::string(base) + "^(" + std::to_string(e) + "-" + to_string(eps) + ")/" + std::to_string(c);
}

// Calls fn on each r-subset of [0, n) in lexicographic order until fn returns false.
template <class Fn>
bool for_each_subset(size_t n, size_t r, Fn&& fn) {
    if (r > n) return true;
    std::vector<size_t> idx(r);
    for (size_t i = 0; i < r; ++i) idx[i] = i;
    for (;;) {
        if (!fn(idx)) return false;
        size_t i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
        if (i == 0) return true;
        ++idx[i - 1];
        for (size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

uint64_t binom_capped(uint64_t n, uint64_t r, uint64_t cap) {
    if (r > n) return 0;
    Z v = 1;
    for (uint64_t i = 0; i < r; ++i) {
        v = v * Z(static_cast<unsigned long>(n - i)) / Z(static_cast<unsigned long>(i + 1));
    }
    return v > Z(static_cast<unsigned long>(cap)) ? cap + 1 : v.get_ui();
}

// Distinct sorted r-subset drawn with a partial Fisher-Yates shuffle.
std::vector<size_t> sample_subset(Rng& rng, size_t n, size_t r) {
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    for (size_t i = 0; i < r; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    pool.resize(r);
    std::sort(pool.begin(), pool.end());
    return pool;
}

// Reduced row echelon subspaces of F_p^m of dimension b, grouped by pivot set.
struct PivotFamily {
    std::vector<int> pivots;
    std::vector<std::pair<int, int>> free;  // (row, column)
    uint64_t count = 1;
};

std::vector<PivotFamily> pivot_families(int m, int b, int64_t p) {
    std::vector<PivotFamily> out;
    for_each_subset(static_cast<size_t>(m), static_cast<size_t>(b), [&](const std::vector<size_t>& s) {
        PivotFamily f;
        for (size_t c : s) f.pivots.push_back(static_cast<int>(c));
        for (int i = 0; i < b; ++i)
            for (int c = f.pivots[i] + 1; c < m; ++c)
                if (std::find(f.pivots.begin(), f.pivots.end(), c) == f.pivots.end()) f.free.push_back({i, c});
        for (size_t i = 0; i < f.free.size(); ++i) f.count *= static_cast<uint64_t>(p);
        out.push_back(std::move(f));
        return true;
    });
    return out;
}

using Key = unsigned __int128;

}  // namespace

bool is_prime(int64_t p) {
    if (p < 2) return false;
    for (int64_t q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

PrimeField make_prime_field(int64_t p) {
    if (p > kMaxPrime) fail(ErrorCode::ParamOutOfRange, "prime exceeds the 10^4 guard");
    if (!is_prime(p)) fail(ErrorCode::ParamOutOfRange, std::to_string(p) + " is not prime");
    PrimeField f;
    f.p = p;
    f.trial_limit = static_cast<int64_t>(std::sqrt(static_cast<double>(p)));
    while ((f.trial_limit + 1) * (f.trial_limit + 1) <= p) ++f.trial_limit;
    while (f.trial_limit * f.trial_limit > p) --f.trial_limit;
    return f;
}

Z gaussian_binomial(int a, int b, int64_t p) {
    if (b < 0 || b > a || p < 2) fail(ErrorCode::ParamOutOfRange, "gaussian_binomial needs 0 <= b <= a, p >= 2");
    Z P(static_cast<long>(p)), num = 1, den = 1;
    for (int i = 0; i < b; ++i) {
        num *= pow_z(P, a) - pow_z(P, i);
        den *= pow_z(P, b) - pow_z(P, i);
    }
    return num / den;
}

bool bernoulli_root(Rng& rng, const Z& x, unsigned long c, unsigned long b) {
    Z n = pow_z(x, c);
    if (n == 1) return true;
    // U in [m, m+1) / 2^bits; accept iff U^b n < 1
    Z m = 0;
    unsigned long bits = 0;
    for (;;) {
        uint64_t w = rng.next();
        m <<= 64;
        m += Z(static_cast<unsigned long>(w >> 32)) << 32;
        m += Z(static_cast<unsigned long>(w & 0xffffffffULL));
        bits += 64;
        Z t = Z(1) << (bits * b);
        if (pow_z(m + 1, b) * n <= t) return true;
        if (pow_z(m, b) * n >= t) return false;
    }
}

int flat_evasive_r(int d, int k, const Q& eps) {
    return static_cast<int>(ceil_q(Q(k * (d - k + 1)) / eps).get_si());
}

int affine_evasive_r(int d, int k, const Q& eps) {
    return static_cast<int>(ceil_q(Q((k + 1) * (d - k + 1)) / eps).get_si()) + k + 1;
}

bool verify_flat_evasive(const std::vector<std::vector<int64_t>>& R, int k, int r, int64_t p,
                         size_t* flats_checked) {
    if (k < 1) fail(ErrorCode::ParamOutOfRange, "verify_flat_evasive needs k >= 1");
    if (R.empty()) {
        if (flats_checked) *flats_checked = 0;
        return true;
    }
    int m = static_cast<int>(R[0].size());
    int b = k - 1;
    if (b > m) fail(ErrorCode::ParamOutOfRange, "flat dimension exceeds the space");
    Z total = gaussian_binomial(m, b, p) * pow_z(Z(static_cast<long>(p)), m - b);
    if (total > Z(static_cast<unsigned long>(kFlatGuard)))
        fail(ErrorCode::TooManyFlats, to_string(total) + " flats exceed the 10^8 guard");
    if (flats_checked) *flats_checked = total.get_ui();
    if (r <= 1) return false;
    if (static_cast<int>(R.size()) < r) return true;

    std::vector<PivotFamily> fams = pivot_families(m, b, p);
    std::vector<uint64_t> start{0};
    for (const auto& f : fams) start.push_back(start.back() + f.count);
    uint64_t n_sub = start.back();
    const uint64_t block = 256;
    std::atomic<bool> ok{true};
    parallel_for((n_sub + block - 1) / block, [&](size_t blk) {
        std::vector<std::vector<int64_t>> rows(b, std::vector<int64_t>(m));
        std::vector<Key> keys(R.size());
        std::vector<int64_t> x(m);
        for (uint64_t s = blk * block; s < std::min(n_sub, (blk + 1) * block); ++s) {
            if (!ok.load(std::memory_order_relaxed)) return;
            size_t fi = std::upper_bound(start.begin(), start.end(), s) - start.begin() - 1;
            const PivotFamily& f = fams[fi];
            uint64_t code = s - start[fi];
            for (auto& row : rows) std::fill(row.begin(), row.end(), 0);
            for (int i = 0; i < b; ++i) rows[i][f.pivots[i]] = 1;
            for (const auto& [ri, c] : f.free) {
                rows[ri][c] = static_cast<int64_t>(code % static_cast<uint64_t>(p));
                code /= static_cast<uint64_t>(p);
            }
            // coset key: reduce each point to zero at the pivot columns
            for (size_t pi = 0; pi < R.size(); ++pi) {
                x = R[pi];
                for (int i = 0; i < b; ++i) {
                    int64_t a = x[f.pivots[i]];
                    if (a == 0) continue;
                    for (int c = 0; c < m; ++c) x[c] = mod(x[c] - mulmod(a, rows[i][c], p), p);
                }
                Key key = 0;
                for (int c = 0; c < m; ++c) key = key * static_cast<Key>(p) + static_cast<Key>(x[c]);
                keys[pi] = key;
            }
            std::sort(keys.begin(), keys.end());
            size_t run = 1;
            for (size_t i = 1; i < keys.size(); ++i) {
                run = keys[i] == keys[i - 1] ? run + 1 : 1;
                if (run >= static_cast<size_t>(r)) {
                    ok = false;
                    return;
                }
            }
        }
    });
    return ok.load();
}

int rank_mod_p(std::vector<std::vector<int64_t>> rows, int64_t p) {
    if (rows.empty()) return 0;
    int cols = static_cast<int>(rows[0].size());
    for (auto& row : rows)
        for (auto& x : row) x = mod(x, p);
    int rk = 0;
    for (int c = 0; c < cols && rk < static_cast<int>(rows.size()); ++c) {
        int piv = -1;
        for (int i = rk; i < static_cast<int>(rows.size()); ++i)
            if (rows[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[rk], rows[piv]);
        int64_t inv = invmod(rows[rk][c], p);
        for (auto& x : rows[rk]) x = mulmod(x, inv, p);
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            if (i == rk || rows[i][c] == 0) continue;
            int64_t a = rows[i][c];
            for (int j = 0; j < cols; ++j) rows[i][j] = mod(rows[i][j] - mulmod(a, rows[rk][j], p), p);
        }
        ++rk;
    }
    return rk;
}

int rank_rational(const std::vector<std::vector<int64_t>>& rows) {
    if (rows.empty()) return 0;
    int full = static_cast<int>(std::min(rows.size(), rows[0].size()));
    // rank mod a prime never exceeds the rank over Q
    if (rank_mod_p(rows, kRankPrime) == full) return full;
    Mat m;
    for (const auto& row : rows) m.push_back(to_q(row));
    return rank(m);
}

bool verify_flat_evasive_subsets(const std::vector<std::vector<int64_t>>& R, int k, int r,
                                 int64_t p) {
    if (r < 1) return false;
    return for_each_subset(R.size(), static_cast<size_t>(r), [&](const std::vector<size_t>& s) {
        std::vector<std::vector<int64_t>> diffs;
        for (size_t i = 1; i < s.size(); ++i) {
            std::vector<int64_t> v(R[s[0]].size());
            for (size_t c = 0; c < v.size(); ++c) v[c] = R[s[i]][c] - R[s[0]][c];
            diffs.push_back(v);
        }
        return rank_mod_p(diffs, p) >= k;
    });
}

EvasiveSet build_flat_evasive(int d, int k, const Q& eps, int64_t p, uint64_t seed, int max_retries) {
    if (d < 2 || k < 1 || k > d - 1) fail(ErrorCode::ParamOutOfRange, "flat-evasive sets need 1 <= k <= d-1");
    if (k >= 2 && k > d - 2) fail(ErrorCode::ParamOutOfRange, "flat-evasive sets need k <= d-2 for k >= 2");
    check_eps(eps);
    make_prime_field(p);
    int m = d - 1;
    Z space = pow_z(Z(static_cast<long>(p)), m);
    if (space > Z(static_cast<unsigned long>(kMaxPoints))) fail(ErrorCode::TooManyPoints, "F_p^{d-1} too large");
    size_t n_space = space.get_ui();

    EvasiveSet out;
    out.ambient = EvasiveAmbient::Fp;
    out.flat_kind = "affine " + std::to_string(k - 1) + "-flats of F_p^" + std::to_string(m);
    out.d = d;
    out.k = k;
    out.epsilon = eps;
    out.p = p;
    out.seed = seed;
    out.verification = "exhaustive";

    auto point_at = [&](size_t idx) {
        std::vector<int64_t> v(m);
        for (int c = m - 1; c >= 0; --c) {
            v[c] = static_cast<int64_t>(idx % static_cast<size_t>(p));
            idx /= static_cast<size_t>(p);
        }
        return v;
    };

    if (k == 1) {
        out.r = 2;
        for (size_t i = 0; i < n_space; ++i) out.points.push_back(point_at(i));
        out.attempts = 0;
        out.size_ok = true;
        out.size_floor = "p^(d-1)";
        out.proof_precondition = true;
        out.flats_checked = n_space;
        return out;
    }

    out.r = flat_evasive_r(d, k, eps);
    out.proof_precondition = pow_z(Z(static_cast<long>(p)), k - 1) > out.r;
    out.size_floor = floor_text("p", d - k, eps, 2);
    unsigned long a = eps_num(eps), b = eps_den(eps);
    unsigned long c = static_cast<unsigned long>(k - 1) * b + a;  // P = p^{-c/b}
    Rng base(seed);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Rng rng = base.split(static_cast<uint64_t>(attempt));
        std::vector<std::vector<int64_t>> R;
        for (size_t i = 0; i < n_space; ++i)
            if (bernoulli_root(rng, Z(static_cast<long>(p)), c, b)) R.push_back(point_at(i));
        out.attempts = attempt + 1;
        if (!size_floor_ok(R.size(), 2, Z(static_cast<long>(p)), d - k, eps)) continue;
        size_t flats = 0;
        if (!verify_flat_evasive(R, k, out.r, p, &flats)) continue;
        out.flats_checked = flats;
        out.points = std::move(R);
        out.size_ok = true;
        return out;
    }
    fail(ErrorCode::RetriesExhausted, "no flat-evasive sample after " + std::to_string(max_retries) + " attempts");
}

namespace {

// sign((1 - sqrt(L)) * base^{1/(2e)} - C) for 0 <= L < 1, C > 0, exactly:
// compare 2e-th powers and expand (1 - sqrt L)^{2e} = A + B sqrt L.
int sign_prime_bound(const Q& L, const RootQ& beta_sq, const Q& C) {
    unsigned long n = 2 * beta_sq.e;
    Q A = 0, B = 0;
    Z binom = 1;
    for (unsigned long i = 0; i <= n; ++i) {
        if (i > 0) binom = binom * Z(n - i + 1) / Z(i);
        Q term = Q(binom) * pow_q(L, i / 2);
        if (i % 2 == 0) A += term;
        else B -= term;
    }
    // base*(A + B sqrt L) - C^n = base*B*sqrt(L) - X
    Q X = pow_q(C, n) - beta_sq.base * A;
    Q Bs = beta_sq.base * B;
    int sb = sgn(Bs), sx = sgn(X);
    if (L == 0 || sb == 0) return -sx;
    if (sb > 0 && sx <= 0) return 1;
    if (sb < 0 && sx >= 0) return -1;
    Q diff = Bs * Bs * L - X * X;  // sign of (B sqrt L)^2 - X^2
    int s = sgn(diff);
    return sb > 0 ? s : -s;
}

}  // namespace

PrimeField largest_prime_below(const Q& bound) {
    Z top = ceil_q(bound) - 1;
    if (top > kMaxPrime) fail(ErrorCode::ParamOutOfRange, "prime bound exceeds the 10^4 guard");
    for (long p = top.get_si(); p >= 2; --p)
        if (is_prime(p)) return make_prime_field(p);
    fail(ErrorCode::NoValidPrime, "no prime below " + to_string(bound));
}

PrimeField largest_valid_prime(const MinimaProfile& m) {
    if (m.r < 2) fail(ErrorCode::ParamOutOfRange, "prime selection needs rank >= 2");
    const Q& L = m.lambda_sq.back();
    if (L >= 1) fail(ErrorCode::MinimaTooLarge, "lambda_d >= 1");
    AlphaBeta ab = alpha_beta(m, 1);
    long d2 = 8L * m.r * m.r;
    double est = (1 - std::sqrt(L.get_d())) * std::sqrt(to_double(ab.beta_sq)) / d2;
    long top = static_cast<long>(std::floor(est)) + 2;
    if (top > kMaxPrime + 2) fail(ErrorCode::ParamOutOfRange, "prime bound exceeds the 10^4 guard");
    for (long p = top; p >= 2; --p) {
        if (!is_prime(p)) continue;
        if (sign_prime_bound(L, ab.beta_sq, Q(d2 * p)) <= 0) continue;
        // Bertrand: p > bound / 2
        if (sign_prime_bound(L, ab.beta_sq, Q(2 * d2 * p)) >= 0)
            fail(ErrorCode::Verification, "selected prime violates p > bound/2");
        return make_prime_field(p);
    }
    fail(ErrorCode::NoValidPrime, "(1-lambda_d) beta / (8 d^2) <= 2");
}

Lift lift_to_body(const std::vector<int64_t>& v, int64_t p, const Lattice& l, const Body& k) {
    int d = l.rank();
    if (static_cast<int>(v.size()) != d) fail(ErrorCode::ParamOutOfRange, "lift vector has wrong length");
    if (p < 2) fail(ErrorCode::ParamOutOfRange, "lift needs p >= 2");
    Enumerator en(gram(l, k.form(l.n)));
    Lift out;
    std::vector<int64_t> w0(d), off(d), c(d);
    auto try_w = [&](int64_t j, const std::vector<int64_t>& w) {
        for (int i = 0; i < d; ++i) c[i] = j * v[i] + p * w[i];
        ++out.tries;
        return en.value(c) <= 1;
    };
    for (int64_t j = 1; j < p; ++j) {
        for (int i = 0; i < d; ++i) w0[i] = round_q(frac(Z(static_cast<long>(-j * v[i])), Z(static_cast<long>(p)))).get_si();
        // offsets in {-1,0,1}^d, zero offset first
        std::fill(off.begin(), off.end(), 0);
        bool first = true;
        for (;;) {
            std::vector<int64_t> w(d);
            for (int i = 0; i < d; ++i) w[i] = w0[i] + off[i];
            bool zero = std::all_of(off.begin(), off.end(), [](int64_t x) { return x == 0; });
            if ((first || !zero) && try_w(j, w)) {
                out.j = j;
                out.w = w;
                out.coeffs = c;
                out.point = l.point(c);
                return out;
            }
            if (first) {
                first = false;
                std::fill(off.begin(), off.end(), -1);
                continue;
            }
            int i = 0;
            while (i < d && off[i] == 1) off[i++] = -1;
            if (i == d) break;
            ++off[i];
        }
    }
    // exhaustive: every point of Lambda ∩ K, searched for c = j v (mod p)
    PointSet pts = en.within(Q(1));
    int lead = -1;
    for (int i = 0; i < d; ++i)
        if (mod(v[i], p) != 0) {
            lead = i;
            break;
        }
    for (size_t t = 0; t < pts.size(); ++t) {
        const int64_t* x = pts.at(t);
        int64_t j = lead < 0 ? 1 : mulmod(mod(x[lead], p), invmod(mod(v[lead], p), p), p);
        if (j == 0) continue;
        bool okc = true;
        for (int i = 0; i < d && okc; ++i) okc = mod(x[i] - j * v[i], p) == 0;
        if (!okc) continue;
        out.j = j;
        out.w.resize(d);
        for (int i = 0; i < d; ++i) out.w[i] = (x[i] - j * v[i]) / p;
        out.coeffs.assign(x, x + d);
        out.point = l.point(out.coeffs);
        out.fallback = true;
        out.tries += pts.size();
        return out;
    }
    fail(ErrorCode::LiftNotFound, "no j v + p w inside the body");
}

EvasiveSet build_linear_evasive(const Lattice& l, const Body& body, int k, const Q& eps, uint64_t seed) {
    int d = l.rank();
    if (k < 1 || k > d - 1) fail(ErrorCode::ParamOutOfRange, "linear evasive sets need 1 <= k <= d-1");
    if (k >= 2 && k > d - 2) fail(ErrorCode::ParamOutOfRange, "linear evasive sets need k <= d-2 for k >= 2");
    check_eps(eps);
    MinimaProfile m = successive_minima(l, body);
    if (m.lambda_sq.back() >= 1) fail(ErrorCode::MinimaTooLarge, "lambda_d >= 1");
    PrimeField pf = largest_valid_prime(m);
    int64_t p = pf.p;

    EvasiveSet fe = build_flat_evasive(d, k, eps, p, seed);
    EvasiveSet out;
    out.ambient = EvasiveAmbient::Lattice;
    out.flat_kind = "linear " + std::to_string(k) + "-flats of R^" + std::to_string(d);
    out.d = d;
    out.k = k;
    out.epsilon = eps;
    out.p = p;
    out.r = fe.r;
    out.seed = seed;
    out.attempts = fe.attempts;
    out.flats_checked = fe.flats_checked;
    out.proof_precondition = fe.proof_precondition;
    AlphaBeta ab = alpha_beta(m, 1);
    out.prime_bound = std::to_string((1 - std::sqrt(m.lambda_sq.back().get_d())) *
                                     std::sqrt(to_double(ab.beta_sq)) / (8.0 * d * d));

    size_t t = k == 1 ? fe.points.size() : ceil_half_power(p, d - k, eps);
    if (t > fe.points.size()) fail(ErrorCode::Verification, "flat-evasive set below t");
    out.size_floor = k == 1 ? "p^(d-1)" : "ceil(" + floor_text("p", d - k, eps, 2) + ")";

    std::vector<Lift> lifts(t);
    out.residues.resize(t);
    for (size_t i = 0; i < t; ++i) {
        out.residues[i] = fe.points[i];
        out.residues[i].push_back(1);
    }
    parallel_for(t, [&](size_t i) { lifts[i] = lift_to_body(out.residues[i], p, l, body); });
    out.congruences_ok = true;
    for (size_t i = 0; i < t; ++i) {
        for (int c = 0; c < d; ++c)
            if (mod(lifts[i].coeffs[c] - lifts[i].j * out.residues[i][c], p) != 0) out.congruences_ok = false;
        if (body.value(lifts[i].point) > 1) out.congruences_ok = false;
        out.points.push_back(lifts[i].coeffs);
        out.ambient_points.push_back(lifts[i].point);
    }
    out.lifts = std::move(lifts);
    std::set<std::vector<int64_t>> distinct(out.points.begin(), out.points.end());
    out.size_ok = distinct.size() == t;

    // every r-subset of S has rank >= k+1 over Q
    size_t n = out.points.size(), r = static_cast<size_t>(out.r);
    auto rank_ok = [&](const std::vector<size_t>& s) {
        std::vector<std::vector<int64_t>> rows;
        for (size_t i : s) rows.push_back(out.points[i]);
        return rank_rational(rows) >= k + 1;
    };
    std::atomic<size_t> bad{0};
    uint64_t combos = binom_capped(n, r, kExhaustiveSubsets);
    if (r > n) {
        out.verification = "exhaustive";
        out.subsets_checked = 0;
    } else if (combos <= kExhaustiveSubsets) {
        out.verification = "exhaustive";
        std::vector<std::vector<size_t>> all;
        for_each_subset(n, r, [&](const std::vector<size_t>& s) {
            all.push_back(s);
            return true;
        });
        parallel_for(all.size(), [&](size_t i) {
            if (!rank_ok(all[i])) ++bad;
        });
        out.subsets_checked = all.size();
    } else {
        out.verification = "sampled";
        Rng rng = Rng(seed).split(0x5ab1e);
        std::vector<std::vector<size_t>> all(kSampledSubsets);
        for (auto& s : all) s = sample_subset(rng, n, r);
        parallel_for(all.size(), [&](size_t i) {
            if (!rank_ok(all[i])) ++bad;
        });
        out.subsets_checked = all.size();
    }
    out.violations = bad.load();

    // F_p rank of the residues bounds the rational rank of the lifts from below
    if (r <= n) {
        Rng rng = Rng(seed).split(0xa9ee);
        for (uint64_t s = 0; s < kAgreementSubsets; ++s) {
            std::vector<size_t> idx = sample_subset(rng, n, r);
            std::vector<std::vector<int64_t>> fp, zz;
            for (size_t i : idx) {
                fp.push_back(out.residues[i]);
                zz.push_back(out.points[i]);
            }
            int rp = rank_mod_p(fp, p), rq = rank_rational(zz);
            if (rp > rq || (rp >= k + 1 && rq < k + 1)) ++out.violations;
            ++out.rank_agreement_checked;
        }
    }
    return out;
}

bool verify_affine_evasive(const std::vector<std::vector<int64_t>>& S, int k, int r, size_t* flats_checked) {
    if (flats_checked) *flats_checked = 0;
    if (S.empty()) return true;
    if (k == 0) return r >= 2;  // points are distinct, so a 0-flat holds one
    int d = static_cast<int>(S[0].size());
    std::vector<std::vector<int64_t>> diffs;
    for (size_t i = 1; i < S.size(); ++i) {
        std::vector<int64_t> v(d);
        for (int c = 0; c < d; ++c) v[c] = S[i][c] - S[0][c];
        diffs.push_back(v);
    }
    // a hull of dimension <= k lies in a single k-flat
    if (rank_rational(diffs) <= k) return static_cast<int>(S.size()) < r;
    if (static_cast<int>(S.size()) < r) return true;
    if (binom_capped(S.size(), static_cast<uint64_t>(k + 1), kFlatGuard) > kFlatGuard)
        fail(ErrorCode::TooManyFlats, "too many spanning subsets");
    // any k-flat meeting S in >= r points can be re-spanned by k+1 of them
    std::set<std::string> seen;
    std::vector<AffineFlat> flats;
    for_each_subset(S.size(), static_cast<size_t>(k + 1), [&](const std::vector<size_t>& s) {
        std::vector<Vec> gens;
        for (size_t i = 1; i < s.size(); ++i) {
            Vec g(d);
            for (int c = 0; c < d; ++c) g[c] = Q(S[s[i]][c] - S[s[0]][c]);
            gens.push_back(g);
        }
        if (rank(gens) < k) return true;
        AffineFlat f = canonical_affine_flat(to_q(S[s[0]]), gens, d);
        if (seen.insert(f.key()).second) flats.push_back(f);
        return true;
    });
    if (flats_checked) *flats_checked = flats.size();
    std::vector<Vec> qs;
    for (const auto& x : S) qs.push_back(to_q(x));
    std::atomic<bool> ok{true};
    parallel_for(flats.size(), [&](size_t i) {
        if (!ok.load(std::memory_order_relaxed)) return;
        int hits = 0;
        for (const auto& x : qs)
            if (flats[i].contains(x) && ++hits >= r) {
                ok = false;
                return;
            }
    });
    return ok.load();
}

EvasiveSet build_affine_evasive(int d, int k, long s, const Q& eps, uint64_t seed, int max_retries) {
    if (d < 1 || k < 0 || k >= d) fail(ErrorCode::ParamOutOfRange, "affine evasive sets need 0 <= k < d");
    if (s < 1) fail(ErrorCode::ParamOutOfRange, "scale must be >= 1");
    check_eps(eps);
    PointSet grid = enumerate_points(Lattice::integer_grid(d), Body::ball(Q(s)));
    EvasiveSet out;
    out.ambient = EvasiveAmbient::Grid;
    out.flat_kind = "affine " + std::to_string(k) + "-flats of Z^" + std::to_string(d);
    out.d = d;
    out.k = k;
    out.epsilon = eps;
    out.seed = seed;
    out.verification = "exhaustive";
    if (k == 0) {
        out.r = 1;  // vacuous cap, every grid point kept
        for (size_t i = 0; i < grid.size(); ++i) out.points.push_back(grid.get(i));
        out.size_ok = true;
        out.size_floor = "|Z^d ∩ B^d(s)|";
        return out;
    }
    out.r = affine_evasive_r(d, k, eps);
    out.our_r_formula = true;
    out.size_floor = floor_text("s", d - k, eps, 4);
    unsigned long a = eps_num(eps), b = eps_den(eps);
    unsigned long c = static_cast<unsigned long>(k) * b + a;
    Rng base(seed);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Rng rng = base.split(static_cast<uint64_t>(attempt));
        std::vector<std::vector<int64_t>> S;
        for (size_t i = 0; i < grid.size(); ++i)
            if (bernoulli_root(rng, Z(s), c, b)) S.push_back(grid.get(i));
        out.attempts = attempt + 1;
        if (!size_floor_ok(S.size(), 4, Z(s), d - k, eps)) continue;
        size_t flats = 0;
        if (!verify_affine_evasive(S, k, out.r, &flats)) continue;
        out.flats_checked = flats;
        out.points = std::move(S);
        out.size_ok = true;
        return out;
    }
    fail(ErrorCode::RetriesExhausted, "no affine-evasive sample after " + std::to_string(max_retries) + " attempts");
}

}  // namespace latcov
