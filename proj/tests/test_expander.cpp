#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "unicone/ensembles.hpp"
#include "unicone/expander.hpp"
#include "unicone/vector_uniqueness.hpp"

using namespace unicone;

namespace {

DenseMatrix routing_example() {
    DenseMatrix a(3, 5);
    a.data() = {1, 1, 1, 0, 0,
                1, 0, 0, 1, 0,
                0, 0, 1, 1, 1};
    return a;
}

/// Independent subset enumerator used as the oracle for verify_expansion:
/// neighborhoods via std::set instead of bitmasks.
bool oracle_expands(const DenseMatrix& a, double alpha, double delta) {
    const std::size_t n = a.cols();
    const auto max_size = static_cast<std::size_t>(alpha * static_cast<double>(n) + 1e-12);
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (a(i, j) == 1.0) nbrs[j].push_back(i);

    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        if (size > max_size) continue;
        std::set<std::size_t> gamma;
        std::size_t edges = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (std::size_t{1} << j)) {
                gamma.insert(nbrs[j].begin(), nbrs[j].end());
                edges += nbrs[j].size();
            }
        if (static_cast<double>(gamma.size()) + 1e-9 < delta * static_cast<double>(edges))
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("degree_profile") {
    SECTION("the worked routing example") {
        const auto p = degree_profile(routing_example());
        CHECK(p.d_min == 1);
        CHECK(p.d_max == 2);
        CHECK_THAT(p.rho, Catch::Matchers::WithinAbs(0.5, 1e-15));
    }
    SECTION("all-ones 3x5") {
        const auto p = degree_profile(DenseMatrix(3, 5, 1.0));
        CHECK(p.d_min == 3);
        CHECK(p.d_max == 3);
        CHECK_THAT(p.rho, Catch::Matchers::WithinAbs(1.0, 1e-15));
    }
    SECTION("identity") {
        const auto p = degree_profile(DenseMatrix::identity(4));
        CHECK(p.d_min == 1);
        CHECK(p.d_max == 1);
        CHECK_THAT(p.rho, Catch::Matchers::WithinAbs(1.0, 1e-15));
    }
    SECTION("zero column is degenerate") {
        DenseMatrix a(2, 2);
        a(0, 0) = 1.0;
        CHECK_THROWS_AS(degree_profile(a), ContractViolation);
    }
    SECTION("non-binary entries rejected") {
        DenseMatrix a(1, 1);
        a(0, 0) = 0.5;
        CHECK_THROWS_AS(degree_profile(a), ContractViolation);
    }
}

TEST_CASE("verify_expansion") {
    SECTION("perfect matching certifies at delta = 1") {
        const auto r = verify_expansion(DenseMatrix::identity(6), 1.0, 1.0);
        REQUIRE(r.certified);
        REQUIRE(!r.violation_found);
    }
    SECTION("two left nodes sharing one right node fail at delta = 1") {
        DenseMatrix a(1, 2, 1.0); // both left nodes -> the single right node
        const auto r = verify_expansion(a, 1.0, 1.0);
        REQUIRE(!r.certified);
        REQUIRE(r.violation_found);
        REQUIRE(r.violating_set.size() == 2);
    }
    SECTION("matches the independent enumeration oracle") {
        for (int rep = 0; rep < 30; ++rep) {
            const DenseMatrix a = random_bipartite(8, 6, 2, Seed{400, (std::uint64_t)rep});
            for (double alpha : {0.25, 0.5}) {
                for (double delta : {0.5, 0.75, 0.9}) {
                    const auto r = verify_expansion(a, alpha, delta);
                    REQUIRE(r.certified == oracle_expands(a, alpha, delta));
                }
            }
        }
    }
    SECTION("sampled mode never certifies") {
        const auto r = verify_expansion(DenseMatrix::identity(6), 1.0, 1.0,
                                        ExpansionMode::Sampled, 200, Seed{401, 0});
        REQUIRE(!r.certified);
        REQUIRE(!r.violation_found);
        REQUIRE(r.subsets_checked == 200);
    }
    SECTION("sampled mode can refute") {
        DenseMatrix a(1, 2, 1.0);
        const auto r =
            verify_expansion(a, 1.0, 1.0, ExpansionMode::Sampled, 500, Seed{402, 0});
        REQUIRE(r.violation_found);
    }
    SECTION("monotone: certifying (alpha, delta) certifies smaller pairs") {
        for (int rep = 0; rep < 10; ++rep) {
            const DenseMatrix a = random_bipartite(9, 7, 3, Seed{403, (std::uint64_t)rep});
            const bool big = verify_expansion(a, 0.4, 0.8).certified;
            if (big) {
                REQUIRE(verify_expansion(a, 0.4, 0.6).certified);
                REQUIRE(verify_expansion(a, 0.2, 0.8).certified);
            }
        }
    }
}

TEST_CASE("uniqueness_threshold") {
    SECTION("threshold formula at rho = 1") {
        const auto r = uniqueness_threshold(0.1, 0.9, 1.0, 100);
        REQUIRE(r.condition_met);
        REQUIRE(r.k == 5); // floor(10 / 1.9)
    }
    SECTION("condition not met is a value, not an error") {
        REQUIRE(!uniqueness_threshold(0.5, 0.5, 1.0, 100).condition_met);
        REQUIRE(!uniqueness_threshold(0.2, 0.7, 0.5, 50).condition_met);
    }
    SECTION("strictly above the golden ratio is required") {
        REQUIRE(!uniqueness_threshold(0.5, kExpanderGoldenThreshold, 1.0, 100).condition_met);
        REQUIRE(uniqueness_threshold(0.5, kExpanderGoldenThreshold + 1e-6, 1.0, 100).condition_met);
    }
}

TEST_CASE("regular-degree threshold never falls below the halved baseline") {
    // for delta in the admissible range, alpha/(1+delta) >= alpha/2
    for (double delta = 0.62; delta <= 1.0; delta += 0.01) {
        for (double alpha : {0.1, 0.3, 0.7, 1.0}) {
            const auto r = uniqueness_threshold(alpha, delta, 1.0, 1000);
            REQUIRE(r.condition_met);
            const auto baseline = static_cast<std::size_t>(alpha * 1000.0 / 2.0);
            REQUIRE(r.k + 1 >= baseline / 1); // floor slack of at most one
            REQUIRE(static_cast<double>(r.k) >= alpha * 1000.0 / 2.0 - 1.0);
        }
    }
}

TEST_CASE("end-to-end soundness at desk scale") {
    // certified expansion + threshold k implies every k-sparse nonnegative x0
    // is the unique nonnegative solution (checked exhaustively over supports)
    int verified = 0;
    for (std::uint64_t rep = 0; verified < 5 && rep < 200; ++rep) {
        const std::size_t n = 10, m = 8, d = 4;
        const DenseMatrix a = random_bipartite(n, m, d, Seed{404, rep});
        const double alpha = 0.2; // subsets of size <= 2
        double delta = best_certifiable_delta(a, alpha);
        if (delta > 1.0) delta = 1.0;
        const auto thr = uniqueness_threshold(alpha, delta, 1.0, n);
        if (!thr.condition_met || thr.k < 1) continue;
        REQUIRE(verify_expansion(a, alpha, delta).certified);

        CounterRng rng(Seed{404, 1000 + rep});
        bool all_single = true;
        for_each_subset(n, thr.k, [&](const std::vector<std::size_t>& support) {
            Vec x0(n, 0.0);
            for (std::size_t j : support) x0[j] = 0.2 + rng.next_uniform();
            if (exact_singleton(a, x0).kind != SingletonKind::CertifiedSingleton) {
                all_single = false;
                return false;
            }
            return true;
        });
        REQUIRE(all_single);
        ++verified;
    }
    REQUIRE(verified == 5);
}

TEST_CASE("report assembly") {
    const auto rep = make_expander_report(routing_example(), 0.4, 0.5);
    CHECK(rep.d_min == 1);
    CHECK(rep.d_max == 2);
    CHECK_THAT(rep.rho, Catch::Matchers::WithinAbs(0.5, 1e-15));
    // delta * rho = 0.25 below the golden threshold: no sparsity claim
    CHECK(!rep.threshold_met);
}
