#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "unicone/rng.hpp"

using namespace unicone;

TEST_CASE("identical (seed, stream) pairs give bit-identical output") {
    CounterRng a(Seed{42, 7});
    CounterRng b(Seed{42, 7});
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams differ") {
    CounterRng a(Seed{42, 7});
    CounterRng b(Seed{42, 8});
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    REQUIRE(same == 0);
}

TEST_CASE("uniforms live in [0,1) and have a sane mean") {
    CounterRng rng(Seed{1, 0});
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("gaussian moments") {
    CounterRng rng(Seed{2, 0});
    double sum = 0.0, sq = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sq += g * g;
    }
    REQUIRE(std::abs(sum / n) < 0.02);
    REQUIRE(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("streams are uncorrelated at sample size 1e4") {
    CounterRng a(Seed{99, 0});
    CounterRng b(Seed{99, 1});
    const int n = 10000;
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i) {
        const double x = a.next_uniform();
        const double y = b.next_uniform();
        sa += x;
        sb += y;
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double va = saa / n - (sa / n) * (sa / n);
    const double vb = sbb / n - (sb / n) * (sb / n);
    REQUIRE(std::abs(cov / std::sqrt(va * vb)) <= 0.05);
}

TEST_CASE("derived streams depend on both indices") {
    const Seed base{5, 5};
    REQUIRE(derive_stream(base, 1, 2).stream != derive_stream(base, 2, 1).stream);
    REQUIRE(derive_stream(base, 1, 2).stream != derive_stream(base, 1, 3).stream);
    REQUIRE(derive_stream(base, 1, 2).master == base.master);
}

TEST_CASE("sample_without_replacement returns k distinct sorted indices") {
    CounterRng rng(Seed{3, 0});
    for (int rep = 0; rep < 50; ++rep) {
        auto s = rng.sample_without_replacement(10, 4);
        REQUIRE(s.size() == 4);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) REQUIRE(s[i] < s[i + 1]);
        for (std::size_t v : s) REQUIRE(v < 10);
    }
    SECTION("k = n returns everything") {
        auto s = rng.sample_without_replacement(5, 5);
        for (std::size_t i = 0; i < 5; ++i) REQUIRE(s[i] == i);
    }
}

TEST_CASE("next_index bounds") {
    CounterRng rng(Seed{4, 0});
    for (int i = 0; i < 1000; ++i) REQUIRE(rng.next_index(7) < 7);
    CHECK_THROWS_AS(rng.next_index(0), ContractViolation);
}
