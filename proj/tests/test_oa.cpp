#include "doctest.h"

#include <sstream>
#include <vector>

#include "icudo/oa.hpp"

using namespace icudo;

namespace {

// The 9x4 strength-2 array over 3 levels used as the worked example
// (entered as a fixture from its transposed display).
OrthogonalArray fixture_oa9432() {
    OrthogonalArray a;
    a.runs = 9;
    a.factors = 4;
    a.levels = 3;
    a.strength = 2;
    a.index = 1;
    const int rows[9][4] = {{1, 1, 1, 1}, {1, 2, 2, 2}, {1, 3, 3, 3}, {2, 1, 2, 3}, {2, 2, 3, 1},
                            {2, 3, 1, 2}, {3, 1, 3, 2}, {3, 2, 1, 3}, {3, 3, 2, 1}};
    for (auto& row : rows)
        for (int v : row) a.entries.push_back(v);
    return a;
}

}  // namespace

TEST_CASE("prime field axioms") {
    CHECK_THROWS_AS(PrimeField(4), InfeasibleError);
    CHECK_THROWS_AS(PrimeField(1), InfeasibleError);
    for (int p : {2, 3, 5, 7, 11, 13}) {
        PrimeField f(p);
        for (int a = 1; a < p; ++a) CHECK(f.mul(a, f.inv(a)) == 1);
        for (int a = 0; a < p; ++a) {
            CHECK(f.add(a, f.neg(a)) == 0);
            for (int b = 0; b < p; ++b) {
                CHECK(f.add(a, b) == (a + b) % p);
                CHECK(f.mul(a, b) == (a * b) % p);
            }
        }
    }
}

TEST_CASE("full factorial enumerates all tuples") {
    const auto a = full_factorial_oa(2, 2);
    CHECK(a.runs == 4);
    CHECK(a.strength == 2);
    const std::vector<int> want = {1, 1, 1, 2, 2, 1, 2, 2};
    CHECK(a.entries == want);

    const auto b = full_factorial_oa(3, 3);
    CHECK(b.runs == 27);
    CHECK(verify_strength(b, 3));

    const auto c = full_factorial_oa(10, 2);
    CHECK(c.runs == 100);
    CHECK(verify_strength(c, 2));

    CHECK_THROWS_AS(full_factorial_oa(10, 30), CapacityError);
}

TEST_CASE("bush construction produces verified arrays") {
    const auto a = bush_oa(3, 4, 2);
    CHECK(a.runs == 9);
    CHECK(a.levels == 3);
    CHECK(verify_strength(a, 2));
    CHECK(verify_coincidence_free(a));

    const auto b = bush_oa(2, 3, 2);
    CHECK(b.runs == 4);
    CHECK(verify_strength(b, 2));
    CHECK(verify_coincidence_free(b));

    const auto c = bush_oa(3, 4, 3);
    CHECK(c.runs == 27);
    CHECK(verify_strength(c, 3));
    CHECK(verify_coincidence_free(c));

    CHECK_THROWS_AS(bush_oa(4, 3, 2), InfeasibleError);   // not prime
    CHECK_THROWS_AS(bush_oa(3, 6, 2), InfeasibleError);   // d > q+1
    CHECK_THROWS_AS(bush_oa(3, 4, 4), InfeasibleError);   // t > q
}

TEST_CASE("bush row count is exactly q^t") {
    for (int q : {2, 3, 5, 7}) {
        for (int t = 1; t <= std::min(3, q); ++t) {
            const auto a = bush_oa(q, std::min(q + 1, 4), t);
            long long want = 1;
            for (int i = 0; i < t; ++i) want *= q;
            CHECK(a.runs == want);
        }
    }
}

TEST_CASE("strength verification on the worked 9x4 example") {
    auto a = fixture_oa9432();
    CHECK(verify_strength(a, 2));
    CHECK(verify_coincidence_free(a));

    auto broken = a;
    broken.at(0, 0) = 2;  // breaks the tuple counts
    CHECK_FALSE(verify_strength(broken, 2));

    CHECK(verify_strength(full_factorial_oa(2, 3), 3));
}

TEST_CASE("coincidence detection") {
    auto a = fixture_oa9432();
    // duplicate a row
    for (int c = 0; c < 4; ++c) a.at(1, c) = a.at(0, c);
    CHECK_FALSE(verify_coincidence_free(a));

    auto ff = full_factorial_oa(2, 3);
    ff.strength = 2;  // reported strength below the true one
    CHECK(verify_coincidence_free(ff));

    auto narrow = full_factorial_oa(2, 2);
    CHECK_THROWS_AS(verify_coincidence_free(narrow), InfeasibleError);  // d <= t
}

TEST_CASE("level permutations preserve structure") {
    const auto a = fixture_oa9432();

    std::vector<std::vector<int>> identity(4, {1, 2, 3});
    CHECK(apply_level_permutations(a, identity).entries == a.entries);

    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const auto p = permute_levels(a, Rng(seed));
        CHECK(verify_strength(p, 2));
        CHECK(p.index == a.index);
        const auto pp = permute_levels(p, Rng(seed + 7));
        CHECK(verify_strength(pp, 2));
        CHECK(pp.index == a.index);
    }
    // deterministic given seed
    CHECK(permute_levels(a, Rng(5)).entries == permute_levels(a, Rng(5)).entries);
}

TEST_CASE("permuted first row is uniform over the 3^4 tuples") {
    const auto a = fixture_oa9432();
    const int trials = 10000;
    std::vector<int> counts(81, 0);
    for (int s = 0; s < trials; ++s) {
        const auto p = permute_levels(a, Rng(1000 + s));
        int code = 0;
        for (int c = 0; c < 4; ++c) code = code * 3 + (p.at(0, c) - 1);
        ++counts[code];
    }
    const double expect = trials / 81.0;
    double chi2 = 0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    // 80 degrees of freedom; 130 is far beyond any plausible fluctuation
    CHECK(chi2 < 130.0);
}

TEST_CASE("feasible_design snaps to the nearest constructible array") {
    const auto a = feasible_design(9, 4, 2);
    CHECK(a.runs == 9);
    CHECK(a.levels == 3);
    CHECK(verify_strength(a, 2));

    const auto b = feasible_design(50, 3, 2);
    CHECK(b.levels == 7);
    CHECK(b.runs == 49);
    CHECK(verify_strength(b, 2));

    const auto c = feasible_design(1000000, 2, 2);
    CHECK(c.levels == 1000);
    CHECK(c.runs == 1000000);

    CHECK_THROWS_AS(feasible_design(3, 4, 2), InfeasibleError);  // below floor
}

TEST_CASE("oa text round trip is bit exact") {
    const auto a = bush_oa(5, 4, 2);
    std::ostringstream os;
    write_oa_text(a, os);
    std::istringstream is(os.str());
    const auto b = read_oa_text(is);
    CHECK(b.runs == a.runs);
    CHECK(b.factors == a.factors);
    CHECK(b.levels == a.levels);
    CHECK(b.strength == a.strength);
    CHECK(b.index == a.index);
    CHECK(b.entries == a.entries);

    std::ostringstream os2;
    write_oa_text(b, os2);
    CHECK(os2.str() == os.str());
}

TEST_CASE("oa text parser rejects malformed input") {
    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return read_oa_text(is);
    };
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse("4 2 2 2 1\n1 1\n1 2\n2 1\n"), DataError);          // truncated
    CHECK_THROWS_AS(parse("4 2 2 2 1\n1 1\n1 2\n2 1\n2 3\n"), DataError);     // out of range
    CHECK_THROWS_AS(parse("4 2 2 2 1\n1 1\n1 2\n2 1\n2 2\n1 1\n"), DataError);  // trailing
    CHECK_THROWS_AS(parse("4 2 2 5 1\n1 1\n1 2\n2 1\n2 2\n"), DataError);     // t > d
}
