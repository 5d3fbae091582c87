#include "icudo/oa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace icudo {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t f : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL}) {
        if (n == f) return true;
        if (n % f == 0) return false;
    }
    for (std::uint64_t f = 29; f * f <= n; f += 6) {
        if (n % f == 0 || n % (f + 2) == 0) return false;
    }
    return true;
}

PrimeField::PrimeField(int p) : p_(p) {
    if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
        throw InfeasibleError("PrimeField: modulus " + std::to_string(p) + " is not prime");
}

int PrimeField::pow(int a, int e) const {
    std::int64_t base = a % p_;
    std::int64_t acc = 1;
    while (e > 0) {
        if (e & 1) acc = (acc * base) % p_;
        base = (base * base) % p_;
        e >>= 1;
    }
    return static_cast<int>(acc);
}

int PrimeField::inv(int a) const {
    if (a % p_ == 0) throw std::domain_error("PrimeField: inverse of zero");
    return pow(a, p_ - 2);
}

namespace {

long long checked_pow(int base, int exp, const char* what) {
    long long v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > (1LL << 56) / base)
            throw CapacityError(std::string(what) + ": " + std::to_string(base) + "^" +
                                std::to_string(exp) + " exceeds the supported run count");
        v *= base;
    }
    return v;
}

}  // namespace

OrthogonalArray full_factorial_oa(int levels, int factors) {
    if (levels < 2) throw InfeasibleError("full_factorial_oa: levels must be >= 2");
    if (factors < 1) throw InfeasibleError("full_factorial_oa: factors must be >= 1");
    const long long m = checked_pow(levels, factors, "full_factorial_oa");
    OrthogonalArray a;
    a.runs = static_cast<int>(m);
    a.factors = factors;
    a.levels = levels;
    a.strength = factors;
    a.index = 1;
    a.entries.resize(static_cast<std::size_t>(m) * factors);
    std::vector<int> digits(factors, 0);
    for (long long r = 0; r < m; ++r) {
        for (int c = 0; c < factors; ++c) a.entries[static_cast<std::size_t>(r) * factors + c] = digits[c] + 1;
        for (int c = factors - 1; c >= 0; --c) {  // last column fastest
            if (++digits[c] < levels) break;
            digits[c] = 0;
        }
    }
    return a;
}

OrthogonalArray bush_oa(int q, int factors, int strength) {
    if (!is_prime(static_cast<std::uint64_t>(q)))
        throw InfeasibleError("bush_oa: level count " + std::to_string(q) +
                              " is not prime (prime levels only in this version)");
    if (strength < 1 || strength > q)
        throw InfeasibleError("bush_oa: requires 1 <= t <= q, got t=" + std::to_string(strength) +
                              ", q=" + std::to_string(q));
    if (factors < 1 || factors > q + 1)
        throw InfeasibleError("bush_oa: requires d <= q+1, got d=" + std::to_string(factors) +
                              ", q=" + std::to_string(q));
    PrimeField gf(q);
    const long long m = checked_pow(q, strength, "bush_oa");
    OrthogonalArray a;
    a.runs = static_cast<int>(m);
    a.factors = factors;
    a.levels = q;
    a.strength = strength;
    a.index = 1;
    a.entries.resize(static_cast<std::size_t>(m) * factors);
    std::vector<int> coeff(strength, 0);  // coeff[k] multiplies x^k
    for (long long r = 0; r < m; ++r) {
        long long rem = r;
        for (int k = 0; k < strength; ++k) {
            coeff[k] = static_cast<int>(rem % q);
            rem /= q;
        }
        for (int c = 0; c < factors; ++c) {
            int value;
            if (c < q) {
                // Horner evaluation at field element c.
                int acc = 0;
                for (int k = strength - 1; k >= 0; --k) acc = gf.add(gf.mul(acc, c), coeff[k]);
                value = acc;
            } else {
                value = coeff[strength - 1];  // leading coefficient column
            }
            a.entries[static_cast<std::size_t>(r) * factors + c] = value + 1;
        }
    }
    return a;
}

bool verify_strength(const OrthogonalArray& a, int strength) {
    const int d = a.factors, L = a.levels, m = a.runs;
    if (strength < 1 || strength > d) return false;
    long long cells = 1;
    for (int i = 0; i < strength; ++i) {
        cells *= L;
        if (cells > m) return false;  // lambda would be fractional
    }
    if (m % cells != 0) return false;
    const std::uint32_t lambda = static_cast<std::uint32_t>(m / cells);

    std::vector<int> cols(strength);
    for (int i = 0; i < strength; ++i) cols[i] = i;
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(cells));
    while (true) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int r = 0; r < m; ++r) {
            std::size_t code = 0;
            for (int i = 0; i < strength; ++i) {
                const int v = a.at(r, cols[i]);
                if (v < 1 || v > L) return false;
                code = code * L + static_cast<std::size_t>(v - 1);
            }
            ++counts[code];
        }
        for (std::uint32_t c : counts)
            if (c != lambda) return false;
        // next t-combination of columns
        int i = strength - 1;
        while (i >= 0 && cols[i] == d - strength + i) --i;
        if (i < 0) break;
        ++cols[i];
        for (int j = i + 1; j < strength; ++j) cols[j] = cols[j - 1] + 1;
    }
    return true;
}

bool verify_coincidence_free(const OrthogonalArray& a) {
    const int d = a.factors, t = a.strength, m = a.runs;
    if (d <= t)
        throw InfeasibleError("verify_coincidence_free: needs d >= t+1 (d=" + std::to_string(d) +
                              ", t=" + std::to_string(t) + ")");
    const int w = t + 1;
    std::vector<int> cols(w);
    for (int i = 0; i < w; ++i) cols[i] = i;
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(m));
    while (true) {
        for (int r = 0; r < m; ++r) {
            std::uint64_t code = 0;
            for (int i = 0; i < w; ++i)
                code = code * static_cast<std::uint64_t>(a.levels) +
                       static_cast<std::uint64_t>(a.at(r, cols[i]) - 1);
            keys[static_cast<std::size_t>(r)] = code;
        }
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) return false;
        int i = w - 1;
        while (i >= 0 && cols[i] == d - w + i) --i;
        if (i < 0) break;
        ++cols[i];
        for (int j = i + 1; j < w; ++j) cols[j] = cols[j - 1] + 1;
    }
    return true;
}

OrthogonalArray apply_level_permutations(const OrthogonalArray& a,
                                         const std::vector<std::vector<int>>& perms) {
    if (static_cast<int>(perms.size()) != a.factors)
        throw DataError("apply_level_permutations: need one permutation per column");
    OrthogonalArray out = a;
    for (int c = 0; c < a.factors; ++c) {
        const auto& p = perms[static_cast<std::size_t>(c)];
        if (static_cast<int>(p.size()) != a.levels)
            throw DataError("apply_level_permutations: permutation size mismatch in column " +
                            std::to_string(c + 1));
        for (int r = 0; r < a.runs; ++r) out.at(r, c) = p[static_cast<std::size_t>(a.at(r, c) - 1)];
    }
    return out;
}

OrthogonalArray permute_levels(const OrthogonalArray& a, Rng rng) {
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(a.factors));
    for (int c = 0; c < a.factors; ++c) {
        std::vector<int> p(static_cast<std::size_t>(a.levels));
        for (int l = 0; l < a.levels; ++l) p[static_cast<std::size_t>(l)] = l + 1;
        Rng col = rng.child(static_cast<std::uint64_t>(c));
        col.shuffle(p);
        perms[static_cast<std::size_t>(c)] = std::move(p);
    }
    return apply_level_permutations(a, perms);
}

OrthogonalArray feasible_design(long long m_target, int factors, int strength) {
    if (strength < 1 || strength > factors)
        throw InfeasibleError("feasible_design: need 1 <= t <= d");
    const long long floor_need = std::max<long long>(factors, 1LL << strength);
    if (m_target < floor_need)
        throw InfeasibleError("feasible_design: m_target " + std::to_string(m_target) +
                              " below minimum " + std::to_string(floor_need));
    const double ideal = std::pow(static_cast<double>(m_target), 1.0 / strength);
    int lo = std::max(2, static_cast<int>(std::ceil(0.5 * ideal)));
    int hi = std::max(lo, static_cast<int>(std::floor(1.5 * ideal)));

    auto admissible = [&](int L) {
        if (strength == factors) return true;  // full factorial, no field needed
        return is_prime(static_cast<std::uint64_t>(L)) && factors <= L + 1 && strength <= L;
    };

    int best_L = -1;
    long long best_m = 0;
    for (int L = lo; L <= hi; ++L) {
        if (!admissible(L)) continue;
        long long m;
        try {
            m = checked_pow(L, strength, "feasible_design");
        } catch (const CapacityError&) {
            break;
        }
        if (best_L < 0 || std::llabs(m - m_target) < std::llabs(best_m - m_target) ||
            (std::llabs(m - m_target) == std::llabs(best_m - m_target) && m < best_m)) {
            best_L = L;
            best_m = m;
        }
    }
    if (best_L < 0) {
        // report the nearest admissible candidates outside the window
        std::string cands;
        int below = lo - 1, above = hi + 1;
        while (below >= 2 && !admissible(below)) --below;
        while (above < 2 * hi + 64 && !admissible(above)) ++above;
        if (below >= 2) cands += " L=" + std::to_string(below);
        if (admissible(above)) cands += " L=" + std::to_string(above);
        throw InfeasibleError("feasible_design: no admissible level count in [" + std::to_string(lo) +
                              "," + std::to_string(hi) + "] for d=" + std::to_string(factors) +
                              ", t=" + std::to_string(strength) + "; nearest candidates:" +
                              (cands.empty() ? " none" : cands));
    }
    return strength == factors ? full_factorial_oa(best_L, factors)
                               : bush_oa(best_L, factors, strength);
}

void write_oa_text(const OrthogonalArray& a, std::ostream& os) {
    os << a.runs << ' ' << a.factors << ' ' << a.levels << ' ' << a.strength << ' ' << a.index
       << '\n';
    for (int r = 0; r < a.runs; ++r) {
        for (int c = 0; c < a.factors; ++c) {
            if (c) os << ' ';
            os << a.at(r, c);
        }
        os << '\n';
    }
}

OrthogonalArray read_oa_text(std::istream& is) {
    OrthogonalArray a;
    if (!(is >> a.runs >> a.factors >> a.levels >> a.strength >> a.index))
        throw DataError("OA text: malformed header, expected 'm d L t lambda'");
    if (a.runs <= 0 || a.factors <= 0 || a.levels < 2 || a.strength < 1 || a.strength > a.factors ||
        a.index <= 0)
        throw DataError("OA text: header values out of range");
    a.entries.resize(static_cast<std::size_t>(a.runs) * a.factors);
    for (int r = 0; r < a.runs; ++r) {
        for (int c = 0; c < a.factors; ++c) {
            int v;
            if (!(is >> v))
                throw DataError("OA text: truncated at row " + std::to_string(r + 1) + ", column " +
                                std::to_string(c + 1));
            if (v < 1 || v > a.levels)
                throw DataError("OA text: level " + std::to_string(v) + " out of range 1.." +
                                std::to_string(a.levels) + " at row " + std::to_string(r + 1));
            a.at(r, c) = v;
        }
    }
    int extra;
    if (is >> extra) throw DataError("OA text: trailing data after " + std::to_string(a.runs) + " rows");
    return a;
}

OrthogonalArray read_oa_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open OA file: " + path);
    return read_oa_text(f);
}

void write_oa_file(const OrthogonalArray& a, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open OA file for writing: " + path);
    write_oa_text(a, f);
}

}  // namespace icudo
