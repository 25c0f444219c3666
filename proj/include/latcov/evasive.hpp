#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latcov/minima.hpp"
#include "latcov/rng.hpp"

namespace latcov {

// Prime checked by trial division up to floor(sqrt p).
struct PrimeField {
    int64_t p = 0;
    int64_t trial_limit = 0;  // certificate: no divisor in [2, trial_limit]
};
bool is_prime(int64_t p);
PrimeField make_prime_field(int64_t p);  // ParamOutOfRange unless prime, p <= 10^4

// Number of b-dimensional subspaces of F_p^a.
Z gaussian_binomial(int a, int b, int64_t p);

// Lazy exact Bernoulli draw: true with probability x^{-c/b}, x >= 1.
bool bernoulli_root(Rng& rng, const Z& x, unsigned long c, unsigned long b);

struct Lift {
    int64_t j = 0;
    std::vector<int64_t> w;      // basis coordinates
    std::vector<int64_t> coeffs; // j v + p w
    Vec point;                   // ambient
    bool fallback = false;       // exhaustive search needed
    size_t tries = 0;
};

enum class EvasiveAmbient { Fp, Grid, Lattice };

struct EvasiveSet {
    EvasiveAmbient ambient = EvasiveAmbient::Fp;
    // Fp: affine (k-1)-flats of F_p^{d-1}; Lattice: linear k-flats of R^d;
    // Grid: affine k-flats of Z^d.
    std::string flat_kind;
    int d = 0, k = 0;
    Q epsilon;
    int64_t p = 0;
    int r = 0;
    std::vector<std::vector<int64_t>> points;  // F_p residues, grid points, or basis coefficients
    std::vector<Vec> ambient_points;           // Lattice ambient only
    std::string verification;                  // exhaustive | sampled
    uint64_t seed = 0;
    int attempts = 0;
    size_t flats_checked = 0;
    size_t subsets_checked = 0;
    size_t violations = 0;
    std::string size_floor;  // human-readable
    bool size_ok = false;
    bool proof_precondition = false;  // p^{k-1} > r
    bool our_r_formula = false;       // grid sets use a locally chosen r
    // Lattice ambient
    std::vector<Lift> lifts;
    bool congruences_ok = false;
    size_t rank_agreement_checked = 0;
    std::string prime_bound;
    std::vector<std::vector<int64_t>> residues;  // u_i with the appended 1
};

// r = ceil(k (d-k+1) / eps)
int flat_evasive_r(int d, int k, const Q& eps);
// r = ceil((k+1)(d-k+1) / eps) + k + 1
int affine_evasive_r(int d, int k, const Q& eps);

EvasiveSet build_flat_evasive(int d, int k, const Q& eps, int64_t p, uint64_t seed,
                              int max_retries = 16);
// Every affine (k-1)-flat of F_p^m, m = length of the points, holds <= r-1
// points of R.  TooManyFlats beyond the enumeration guard.
bool verify_flat_evasive(const std::vector<std::vector<int64_t>>& R, int k, int r, int64_t p,
                         size_t* flats_checked = nullptr);
// Second checker: no r-subset lies in an affine (k-1)-flat, i.e. every
// r-subset has affine rank >= k.
bool verify_flat_evasive_subsets(const std::vector<std::vector<int64_t>>& R, int k, int r,
                                 int64_t p);
// Ranks over F_p / over Q of integer vectors.
int rank_mod_p(std::vector<std::vector<int64_t>> rows, int64_t p);
int rank_rational(const std::vector<std::vector<int64_t>>& rows);

// Largest prime p with 1 < p < (1 - lambda_d) beta / (8 d^2).
PrimeField largest_valid_prime(const MinimaProfile& m);
// Largest prime strictly below a rational bound.
PrimeField largest_prime_below(const Q& bound);

Lift lift_to_body(const std::vector<int64_t>& v, int64_t p, const Lattice& l, const Body& k);

EvasiveSet build_linear_evasive(const Lattice& l, const Body& k, int kk, const Q& eps,
                                uint64_t seed);
EvasiveSet build_affine_evasive(int d, int k, long s, const Q& eps, uint64_t seed,
                                int max_retries = 16);
// No affine k-flat spanned by points of S contains >= r of them.
bool verify_affine_evasive(const std::vector<std::vector<int64_t>>& S, int k, int r,
                           size_t* flats_checked = nullptr);

}  // namespace latcov
