#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "unicone/experiments.hpp"

using namespace unicone;

namespace {

ExperimentConfig small_vector_cfg() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::VectorPhase;
    cfg.n = 30;
    cfg.m = 12;
    cfg.density = 0.3;
    cfg.ones_row = true;
    cfg.grid = GridSpec{1, 4, 1};
    cfg.trials = 12;
    cfg.probes = 3;
    cfg.seed = Seed{42, 0};
    cfg.threads = 2;
    return cfg;
}

} // namespace

TEST_CASE("grid parsing") {
    const GridSpec g = GridSpec::parse("2:20:2");
    CHECK(g.lo == 2);
    CHECK(g.hi == 20);
    CHECK(g.step == 2);
    CHECK(g.values().size() == 10);
    CHECK(GridSpec::parse("5").values() == std::vector<long>{5});
    CHECK(GridSpec::parse("1:3").values() == std::vector<long>{1, 2, 3});
    CHECK_THROWS_AS(GridSpec::parse("3:1"), ContractViolation);
    CHECK_THROWS_AS(GridSpec::parse("abc"), ContractViolation);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_vector_cfg();
    cfg.density = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = small_vector_cfg();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = small_vector_cfg();
    cfg.grid = GridSpec{1, 40, 1}; // exceeds n = 30
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = small_vector_cfg();
    cfg.profile = "overnight";
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}

TEST_CASE("vector phase: shape, aggregation, determinism") {
    const ExperimentConfig cfg = small_vector_cfg();
    const ExperimentResult first = run_vector_phase(cfg);

    SECTION("one row per grid point, header embeds the config") {
        REQUIRE(first.rows.size() == 4);
        CHECK(first.csv.find("# kind=vector-phase") != std::string::npos);
        CHECK(first.csv.find("# seed=42") != std::string::npos);
        CHECK(first.csv.find("k,trials,singleton_fraction") != std::string::npos);
    }
    SECTION("fraction times trials is an integer, fractions in range") {
        for (const PhaseRow& r : first.rows) {
            REQUIRE(r.trials == cfg.trials);
            const double count = r.singleton_fraction * static_cast<double>(r.trials);
            REQUIRE_THAT(count, Catch::Matchers::WithinAbs(std::round(count), 1e-9));
            REQUIRE(r.singleton_fraction >= 0.0);
            REQUIRE(r.singleton_fraction <= 1.0);
            REQUIRE(r.l1_success_fraction >= 0.0);
            REQUIRE(r.l1_success_fraction <= 1.0);
        }
    }
    SECTION("identical config and seed give identical bytes") {
        const ExperimentResult again = run_vector_phase(cfg);
        REQUIRE(again.csv == first.csv);
    }
    SECTION("single-threaded run gives the same bytes") {
        ExperimentConfig serial = cfg;
        serial.threads = 1;
        REQUIRE(run_vector_phase(serial).csv == first.csv);
    }
}

TEST_CASE("matrix phase at toy scale") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::MatrixPhase;
    cfg.n = 6;
    cfg.m = 14;
    cfg.grid = GridSpec{0, 2, 1};
    cfg.trials = 6;
    cfg.probes = 3;
    cfg.seed = Seed{7, 0};
    cfg.threads = 2;
    const ExperimentResult res = run_matrix_phase(cfg);
    REQUIRE(res.rows.size() == 3);
    // the zero matrix is measured exactly; rank 0 must be singleton when the
    // operator's null cone is trivial enough to certify anything at all
    CHECK(res.rows[0].grid_value == 0);
    for (const PhaseRow& r : res.rows) {
        REQUIRE(r.trials == 6);
        REQUIRE(r.singleton_fraction >= 0.0);
        REQUIRE(r.singleton_fraction <= 1.0);
    }
    CHECK(res.csv.find("rank,trials,singleton_fraction") != std::string::npos);
}

TEST_CASE("wendel monte carlo") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::WendelMc;
    cfg.m = 1;
    cfg.n = 2;
    cfg.trials = 4000;
    cfg.seed = Seed{9, 0};
    cfg.threads = 2;
    const WendelResult res = run_wendel_mc(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK_THAT(res.rows[0].formula, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK(std::abs(res.rows[0].z_score) <= 3.0);

    SECTION("measure-zero case comes out exactly zero") {
        ExperimentConfig zero = cfg;
        zero.m = 2;
        zero.n = 2;
        zero.trials = 500;
        const WendelResult rz = run_wendel_mc(zero);
        CHECK(rz.rows[0].formula == 0.0);
        CHECK(rz.rows[0].empirical == 0.0);
        CHECK(rz.rows[0].z_score == 0.0);
    }
}

TEST_CASE("nullspace support statistics") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::NullspaceSupport;
    cfg.n = 30;
    cfg.m = 15;
    cfg.density = 0.5;
    cfg.ones_row = true;
    cfg.trials = 3;  // matrix draws
    cfg.probes = 50; // samples per draw
    cfg.seed = Seed{21, 0};
    cfg.threads = 2;
    const NullspaceResult res = run_nullspace_support(cfg);
    REQUIRE(res.rows.size() == 3);
    for (const NullspaceRow& r : res.rows) {
        REQUIRE(r.samples == 50);
        REQUIRE(r.min_positive >= 1);
        REQUIRE(r.min_negative >= 1);
    }

    SECTION("square generic matrices are vacuous") {
        ExperimentConfig vac = cfg;
        vac.n = 10;
        vac.m = 14; // more rows than columns: full column rank almost surely
        vac.ones_row = false;
        vac.trials = 1;
        const NullspaceResult rv = run_nullspace_support(vac);
        REQUIRE(rv.rows[0].samples == 0);
        REQUIRE(rv.rows[0].min_positive == -1);
    }
    SECTION("determinism") {
        REQUIRE(run_nullspace_support(cfg).csv == res.csv);
    }
}

TEST_CASE("emit_plot") {
    ExperimentConfig cfg = small_vector_cfg();
    cfg.out_path = "test_plot_input.csv";
    run_vector_phase(cfg);

    SECTION("vector CSV gives a two-curve script") {
        emit_plot(cfg.out_path, "test_plot.gp");
        std::ifstream is("test_plot.gp");
        std::string script((std::istreambuf_iterator<char>(is)),
                           std::istreambuf_iterator<char>());
        CHECK(script.find("singleton fraction") != std::string::npos);
        CHECK(script.find("L1 success fraction") != std::string::npos);
        std::remove("test_plot.gp");
    }
    SECTION("missing file and empty data are errors") {
        CHECK_THROWS_AS(emit_plot("does_not_exist.csv", "x.gp"), ContractViolation);
        std::ofstream empty("test_empty.csv");
        empty << "# kind=vector-phase\nk,trials\n";
        empty.close();
        CHECK_THROWS_AS(emit_plot("test_empty.csv", "x.gp"), ContractViolation);
        std::remove("test_empty.csv");
    }
    std::remove(cfg.out_path.c_str());
}
