#include "doctest.h"

#include <sstream>

#include "icudo/dataset.hpp"

using namespace icudo;

TEST_CASE("csv parser infers dimension and sample count") {
    std::istringstream one("x\n1.5\n2\n-3e2\n");
    const auto d1 = read_dataset_csv(one);
    CHECK(d1.dim == 1);
    CHECK(d1.num_samples() == 1);
    CHECK(d1.count(0) == 3);
    CHECK(d1.value(0, 2) == -300.0);

    std::istringstream two("sample_id,x1,x2\n1,0.5,1\n2,0.25,2\n1,0.75,3\n");
    const auto d2 = read_dataset_csv(two);
    CHECK(d2.dim == 2);
    CHECK(d2.num_samples() == 2);
    CHECK(d2.count(0) == 2);
    CHECK(d2.count(1) == 1);
    CHECK(d2.point(0, 1)[1] == 3.0);
}

TEST_CASE("csv parser reports line numbers on errors") {
    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return read_dataset_csv(is);
    };
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_WITH_AS(parse("x\n1\nfoo\n"), doctest::Contains("line 3"), DataError);
    CHECK_THROWS_WITH_AS(parse("x,y\n1\n"), doctest::Contains("line 2"), DataError);
    CHECK_THROWS_AS(parse("sample_id,x\n3,1\n"), DataError);  // gap in ids
    CHECK_THROWS_AS(parse("sample_id,x\n0,1\n"), DataError);
}

TEST_CASE("csv write/read round trip") {
    DataSet d;
    d.dim = 2;
    d.samples = {{1, 2, 3, 4}, {5, 6}};
    std::ostringstream os;
    write_dataset_csv(d, os);
    std::istringstream is(os.str());
    const auto back = read_dataset_csv(is);
    CHECK(back.dim == 2);
    CHECK(back.num_samples() == 2);
    CHECK(back.samples[0] == d.samples[0]);
    CHECK(back.samples[1] == d.samples[1]);
}
