#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rnl/rng.hpp"

using namespace rnl;

TEST_SUITE("rng") {

TEST_CASE("same seed reproduces the stream") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 16; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("substreams with different counters decouple") {
    Rng a = substream(7, 1, 2, 3);
    Rng b = substream(7, 1, 2, 4);
    int agree = 0;
    for (int i = 0; i < 32; ++i)
        if (a.uniform() == b.uniform()) ++agree;
    CHECK(agree < 4);
}

TEST_CASE("uniform(a,b) stays inside and centers") {
    Rng rng(5);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.uniform(-2.0, 3.0);
        REQUIRE(v >= -2.0);
        REQUIRE(v < 3.0);
        sum += v;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("normal has the right first two moments") {
    Rng rng(9);
    const int n = 40000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        s1 += v;
        s2 += v * v;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bounded draws stay below the bound") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) CHECK(rng.bounded(17) < 17);
}

TEST_CASE("shuffle permutes") {
    Rng rng(12);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    rng.shuffle(w);
    CHECK(w != v); // astronomically unlikely to be identity
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}

} // TEST_SUITE
