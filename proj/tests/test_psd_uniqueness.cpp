#include <catch2/catch_amalgamated.hpp>

#include "unicone/ensembles.hpp"
#include "unicone/psd_uniqueness.hpp"

using namespace unicone;

namespace {

SymMatrix random_psd_rank(std::size_t n, std::size_t rank, CounterRng& rng) {
    DenseMatrix b(n, rank);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < rank; ++j) b(i, j) = rng.next_gaussian();
    DenseMatrix full = b * b.transpose();
    return SymMatrix::from_full(full);
}

SymMatrix unit(std::size_t n, std::size_t i, std::size_t j) {
    SymMatrix s(n);
    s.set(i, j, 1.0);
    return s;
}

} // namespace

TEST_CASE("apply_operator") {
    const SymOperator op = gaussian_sym_operator(4, 3, Seed{500, 0});
    SECTION("zero matrix maps to zero") {
        const Vec b = apply_operator(op, SymMatrix(4));
        for (double v : b) CHECK(v == 0.0);
    }
    SECTION("identity coefficient measures the trace") {
        const SymOperator tr(3, {SymMatrix::identity(3)});
        CounterRng rng(Seed{500, 1});
        const SymMatrix x = random_psd_rank(3, 2, rng);
        CHECK_THAT(apply_operator(tr, x)[0], Catch::Matchers::WithinAbs(x.trace(), 1e-12));
    }
    SECTION("matches the naive double-sum oracle") {
        CounterRng rng(Seed{500, 2});
        const SymMatrix x = random_psd_rank(4, 3, rng);
        const Vec b = apply_operator(op, x);
        for (std::size_t i = 0; i < op.size(); ++i) {
            double s = 0.0;
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t c = 0; c < 4; ++c) s += x(r, c) * op.coeff(i)(r, c);
            REQUIRE_THAT(b[i], Catch::Matchers::WithinAbs(s, 1e-12));
        }
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(apply_operator(op, SymMatrix(3)), ContractViolation);
    }
}

TEST_CASE("operator_null_basis") {
    SECTION("no measurements: the whole space") {
        const SymOperator op(3, {});
        CHECK(operator_null_basis(op).cols() == svec_length(3));
    }
    SECTION("full generic measurement: trivial null space") {
        const SymOperator op = gaussian_sym_operator(3, svec_length(3), Seed{501, 0});
        CHECK(operator_null_basis(op).cols() == 0);
    }
    SECTION("rank-nullity and residuals for a Gaussian operator") {
        const SymOperator op = gaussian_sym_operator(6, 10, Seed{502, 0});
        const DenseMatrix basis = operator_null_basis(op);
        REQUIRE(basis.cols() == svec_length(6) - 10); // 21 - 10 = 11
        for (std::size_t j = 0; j < basis.cols(); ++j) {
            const SymMatrix y = smat(SvecCoords{6, basis.column(j)});
            REQUIRE(norm2(apply_operator(op, y)) <= 1e-7);
        }
    }
}

TEST_CASE("probe_singleton_psd") {
    SECTION("trace pinned to zero forces the zero matrix") {
        const SymOperator op(3, {SymMatrix::identity(3)});
        const auto v = probe_singleton_psd(op, SymMatrix(3), 5, Seed{503, 0});
        REQUIRE(v.kind == PsdSingletonKind::ProbableSingleton);
        REQUIRE(v.probes_used == 5);
        REQUIRE(v.inconclusive_probes == 0);
    }
    SECTION("measuring only X11 leaves X22 free: refuted") {
        const SymOperator op(2, {unit(2, 0, 0)});
        const auto v = probe_singleton_psd(op, unit(2, 0, 0), 5, Seed{504, 0});
        REQUIRE(v.kind == PsdSingletonKind::Refuted);
        // witness stays feasible and distinct
        REQUIRE((v.witness - unit(2, 0, 0)).frobenius_norm() >= 1e-5);
        REQUIRE_THAT(v.witness(0, 0), Catch::Matchers::WithinAbs(1.0, 1e-4));
        REQUIRE(sym_eigs(v.witness).eigenvalues.front() >= -1e-6);
    }
    SECTION("agrees with the exact decision on Gaussian operators") {
        for (std::uint64_t rep = 0; rep < 6; ++rep) {
            const SymOperator op = gaussian_sym_operator(4, 8, Seed{505, rep});
            CounterRng rng(Seed{505, 100 + rep});
            const SymMatrix x0 = random_psd_rank(4, 1, rng);
            const SdpContext ctx(op);
            const auto probed = probe_singleton_psd(ctx, x0, 5, Seed{505, 200 + rep});
            const auto exact = exact_singleton_psd(ctx, x0);
            REQUIRE(probed.kind != PsdSingletonKind::Inconclusive);
            REQUIRE(exact.kind != PsdSingletonKind::Inconclusive);
            REQUIRE((probed.kind == PsdSingletonKind::Refuted) ==
                    (exact.kind == PsdSingletonKind::Refuted));
        }
    }
}

TEST_CASE("exact_singleton_psd") {
    SECTION("full measurement certifies any feasible point") {
        const SymOperator op = gaussian_sym_operator(3, svec_length(3), Seed{506, 0});
        CounterRng rng(Seed{506, 1});
        const auto v = exact_singleton_psd(op, random_psd_rank(3, 2, rng));
        REQUIRE(v.kind == PsdSingletonKind::CertifiedSingleton);
    }
    SECTION("measuring only X11 is refuted in the X22 direction") {
        const SymOperator op(2, {unit(2, 0, 0)});
        const auto v = exact_singleton_psd(op, unit(2, 0, 0));
        REQUIRE(v.kind == PsdSingletonKind::Refuted);
        REQUIRE(v.witness.dim() == 2);
        REQUIRE((v.witness - unit(2, 0, 0)).frobenius_norm() >= 1e-5);
    }
    SECTION("cross-validation against probes at the zero matrix") {
        for (std::uint64_t rep = 0; rep < 8; ++rep) {
            const SymOperator op = gaussian_sym_operator(4, 8, Seed{507, rep});
            const SdpContext ctx(op);
            const auto probed = probe_singleton_psd(ctx, SymMatrix(4), 5, Seed{507, 100 + rep});
            const auto exact = exact_singleton_psd(ctx, SymMatrix(4));
            REQUIRE((probed.kind == PsdSingletonKind::Refuted) ==
                    (exact.kind == PsdSingletonKind::Refuted));
        }
    }
}

TEST_CASE("eig_condition_sample") {
    SECTION("full measurement is vacuous") {
        const SymOperator op = gaussian_sym_operator(3, svec_length(3), Seed{508, 0});
        const auto rep = eig_condition_sample(op, 1, 50, Seed{508, 1});
        REQUIRE(rep.vacuous);
        REQUIRE(!rep.refuting_matrix.has_value());
    }
    SECTION("no measurements at r = 0 is refuted quickly") {
        const SymOperator op(2, {});
        const auto rep = eig_condition_sample(op, 0, 200, Seed{509, 0});
        REQUIRE(!rep.vacuous);
        REQUIRE(rep.min_negative_count == 0);
        REQUIRE(rep.refuting_matrix.has_value());
        // the refuter is unit-norm and PSD up to tolerance
        CHECK_THAT(rep.refuting_matrix->frobenius_norm(), Catch::Matchers::WithinAbs(1.0, 1e-9));
        CHECK(sym_eigs(*rep.refuting_matrix).eigenvalues.front() >= -1e-8);
    }
    SECTION("refuters live in the null space") {
        const SymOperator op = gaussian_sym_operator(5, 6, Seed{510, 0});
        const auto rep = eig_condition_sample(op, 4, 100, Seed{510, 1});
        REQUIRE(rep.samples == 100);
        if (rep.refuting_matrix) {
            REQUIRE(norm2(apply_operator(op, *rep.refuting_matrix)) <= 1e-6);
        }
        REQUIRE((rep.refuting_matrix.has_value()) == (rep.min_negative_count <= 4));
    }
}

TEST_CASE("construct_second_solution") {
    SECTION("worked diagonal example") {
        const auto out = construct_second_solution(SymMatrix::diag({-1.0, 2.0}), 1);
        CHECK_THAT(out.x(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-10));
        CHECK_THAT(out.x(1, 1), Catch::Matchers::WithinAbs(0.0, 1e-10));
        CHECK_THAT(out.x_plus_y(0, 0), Catch::Matchers::WithinAbs(1.0, 1e-10));
        CHECK_THAT(out.x_plus_y(1, 1), Catch::Matchers::WithinAbs(2.0, 1e-10));
    }
    SECTION("PSD input with r = 0 passes through") {
        CounterRng rng(Seed{511, 0});
        const SymMatrix y = random_psd_rank(3, 2, rng);
        const auto out = construct_second_solution(y, 0);
        CHECK(out.x.frobenius_norm() <= 1e-10);
        CHECK((out.x_plus_y - y).frobenius_norm() <= 1e-10);
    }
    SECTION("random input with two negative eigenvalues at r = 2") {
        CounterRng rng(Seed{512, 0});
        for (int rep = 0; rep < 20; ++rep) {
            SymMatrix y(8);
            for (std::size_t i = 0; i < 8; ++i)
                for (std::size_t j = i; j < 8; ++j) y.set(i, j, rng.next_gaussian());
            const auto negs = count_negative_eigenvalues(sym_eigs(y).eigenvalues,
                                                         1e-8 * y.frobenius_norm());
            if (negs > 2) continue;
            const auto out = construct_second_solution(y, 2);
            REQUIRE(sym_eigs(out.x).eigenvalues.front() >= -1e-8);
            REQUIRE(sym_eigs(out.x_plus_y).eigenvalues.front() >= -1e-8);
            // rank of X at most the negative count
            const Vec lx = sym_eigs(out.x).eigenvalues;
            std::size_t rank = 0;
            for (double l : lx)
                if (l > 1e-8 * (1.0 + out.x.frobenius_norm())) ++rank;
            REQUIRE(rank <= 2);
        }
    }
    SECTION("too many negative eigenvalues is a contract violation") {
        CHECK_THROWS_AS(construct_second_solution(SymMatrix::diag({-1.0, -2.0, 1.0}), 1),
                        ContractViolation);
        CHECK_THROWS_AS(construct_second_solution(SymMatrix(2), 1), ContractViolation);
    }
    SECTION("second solution refutes singleton for operators annihilating Y") {
        // build an operator whose null space contains Y, then check both
        // constructed points are feasible and the exact decision refutes
        const std::size_t n = 3;
        CounterRng rng(Seed{513, 0});
        SymMatrix y(n);
        y.set(0, 0, -0.8);
        y.set(1, 1, 0.7);
        y.set(2, 2, 0.4);
        y.set(0, 1, 0.2);

        // operator rows orthogonal (in the measurement sense) to Y
        std::vector<SymMatrix> coeffs;
        while (coeffs.size() < 3) {
            SymMatrix c = gaussian_sym_matrix(n, rng);
            const double proj = c.inner(y) / y.inner(y);
            c = c - proj * y;
            coeffs.push_back(c);
        }
        const SymOperator op(n, coeffs);
        REQUIRE(norm2(apply_operator(op, y)) <= 1e-9);

        const auto out = construct_second_solution(y, 1);
        const Vec bx = apply_operator(op, out.x);
        const Vec bxy = apply_operator(op, out.x_plus_y);
        for (std::size_t i = 0; i < bx.size(); ++i)
            REQUIRE_THAT(bxy[i], Catch::Matchers::WithinAbs(bx[i], 1e-8));

        const auto verdict = exact_singleton_psd(op, out.x);
        REQUIRE(verdict.kind == PsdSingletonKind::Refuted);
    }
}

TEST_CASE("eigenvalue interlacing under a low-rank update") {
    CounterRng rng(Seed{514, 0});
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 3 + rng.next_index(10); // 3..12
        const std::size_t r = 1 + rng.next_index(std::min<std::size_t>(n - 1, 3));
        SymMatrix a(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) a.set(i, j, rng.next_gaussian());
        const SymMatrix b = random_psd_rank(n, r, rng); // rank <= r
        const Vec la = sym_eigs(a).eigenvalues;
        const Vec lab = sym_eigs(a + (-1.0) * b).eigenvalues; // subtract: B rank <= r
        // lambda_k(A - B) <= lambda_{k+r}(A) for a PSD B of rank <= r
        for (std::size_t k = 0; k + r < n; ++k)
            REQUIRE(lab[k] <= la[k + r] + 1e-9);
    }
}

TEST_CASE("semicircle quantile") {
    SECTION("symmetry and support bounds") {
        CHECK(semicircle_alpha(0.0) == 0.5);
        CHECK(semicircle_alpha(-2.0) == 0.0);
        CHECK(semicircle_alpha(2.0) == 1.0);
        CHECK(semicircle_alpha(-std::sqrt(2.0)) == 0.0);
        CHECK(semicircle_alpha(std::sqrt(2.0)) == 1.0);
    }
    SECTION("closed-form antiderivative oracle at c = -1") {
        // (x sqrt(2-x^2)/2 + arcsin(x/sqrt(2))) / pi evaluated from -sqrt(2)
        const auto oracle = [](double c) {
            return (c * std::sqrt(2.0 - c * c) / 2.0 + std::asin(c / std::sqrt(2.0))) /
                       std::numbers::pi +
                   0.5;
        };
        CHECK_THAT(semicircle_alpha(-1.0), Catch::Matchers::WithinAbs(0.09085, 1e-4));
        for (double c : {-1.3, -1.0, -0.5, -0.1, 0.3, 0.9, 1.2})
            CHECK_THAT(semicircle_alpha(c), Catch::Matchers::WithinAbs(oracle(c), 1e-10));
    }
    SECTION("inverse round trip") {
        for (double alpha : {0.05, 0.25, 0.5, 0.75, 0.95}) {
            const double c = semicircle_c(alpha);
            CHECK_THAT(semicircle_alpha(c), Catch::Matchers::WithinAbs(alpha, 1e-8));
        }
        CHECK_THAT(semicircle_c(0.0), Catch::Matchers::WithinAbs(-std::sqrt(2.0), 1e-12));
        CHECK_THAT(semicircle_c(1.0), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
        CHECK_THROWS_AS(semicircle_c(1.5), ContractViolation);
    }
}

TEST_CASE("scaled ensemble spectra approach the semicircle") {
    // single matrix from the symmetric ensemble, scaled by 1/sqrt(n)
    const std::size_t n = 150;
    CounterRng rng(Seed{515, 0});
    const SymMatrix g = (1.0 / std::sqrt(static_cast<double>(n))) * gaussian_sym_matrix(n, rng);
    const Vec lambda = sym_eigs(g).eigenvalues;
    for (double c : {-1.0, -0.5, 0.0, 0.5}) {
        double frac = 0.0;
        for (double l : lambda)
            if (l <= c) frac += 1.0;
        frac /= static_cast<double>(n);
        REQUIRE(std::abs(frac - semicircle_alpha(c)) <= 0.08);
    }
}
