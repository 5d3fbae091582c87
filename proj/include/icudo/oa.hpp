#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "icudo/errors.hpp"
#include "icudo/rng.hpp"

namespace icudo {

bool is_prime(std::uint64_t n);

// Arithmetic modulo a prime p. Backs the Bush/Rao-Hamming constructions.
class PrimeField {
  public:
    explicit PrimeField(int p);

    int modulus() const { return p_; }
    int add(int a, int b) const { return (a + b) % p_; }
    int sub(int a, int b) const { return (a - b + p_) % p_; }
    int mul(int a, int b) const { return static_cast<int>((static_cast<std::int64_t>(a) * b) % p_); }
    int neg(int a) const { return (p_ - a) % p_; }
    int inv(int a) const;  // a != 0
    int pow(int a, int e) const;

  private:
    int p_;
};

// An OA(m, d, L, t): m x d array over levels {1..L} such that in every
// m x t subarray each ordered t-tuple appears exactly lambda = m / L^t times.
struct OrthogonalArray {
    int runs = 0;      // m
    int factors = 0;   // d
    int levels = 0;    // L
    int strength = 0;  // t
    int index = 1;     // lambda
    std::vector<int> entries;  // row-major, m*d, values in 1..L

    int at(int row, int col) const { return entries[static_cast<std::size_t>(row) * factors + col]; }
    int& at(int row, int col) { return entries[static_cast<std::size_t>(row) * factors + col]; }
};

// Full factorial: OA(L^d, d, L, d) with lambda = 1, rows in lexicographic
// order (last column varies fastest).
OrthogonalArray full_factorial_oa(int levels, int factors);

// Bush construction over GF(q), q prime: OA(q^t, d, q, t) with lambda = 1.
// Rows are the polynomials of degree < t; column j <= q evaluates the
// polynomial at the j-th field element, column q+1 (when d = q+1) holds the
// leading coefficient. Requires t <= q and d <= q+1.
OrthogonalArray bush_oa(int q, int factors, int strength);

// True iff every t-column projection carries each ordered t-tuple exactly
// m/L^t times (and L^t divides m).
bool verify_strength(const OrthogonalArray& a, int strength);

// True iff no two rows agree on all columns of any (t+1)-column subarray.
// Requires d >= t+1.
bool verify_coincidence_free(const OrthogonalArray& a);

// Entrywise relabeling: perms[j] is a permutation of {1..L} applied to
// column j. Strength and lambda are preserved.
OrthogonalArray apply_level_permutations(const OrthogonalArray& a,
                                         const std::vector<std::vector<int>>& perms);

// Independent uniform random level permutation per column.
OrthogonalArray permute_levels(const OrthogonalArray& a, Rng rng);

// The constructible lambda=1 array of strength t whose run count L^t is
// nearest to m_target. Any L works for t = d (full factorial); t < d needs a
// prime L with d <= L+1 and t <= L. The search window is +-50% around
// round(m_target^(1/t)); ties break toward the smaller run count.
OrthogonalArray feasible_design(long long m_target, int factors, int strength);

// Text format: header "m d L t lambda", then m rows of d integers in 1..L.
void write_oa_text(const OrthogonalArray& a, std::ostream& os);
OrthogonalArray read_oa_text(std::istream& is);
OrthogonalArray read_oa_file(const std::string& path);
void write_oa_file(const OrthogonalArray& a, const std::string& path);

}  // namespace icudo
