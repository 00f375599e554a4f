// Command-line front end: phase-transition sweeps, Monte Carlo validations,
// plot-script emission, and file-based certification of single instances.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "unicone/expander.hpp"
#include "unicone/experiments.hpp"
#include "unicone/record.hpp"
#include "unicone/vector_uniqueness.hpp"

using namespace unicone;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSolverBudget = 2;

struct CommonFlags {
    ExperimentConfig cfg;
    std::string grid_text;

    void attach(CLI::App* cmd, ExperimentKind kind) {
        cfg.kind = kind;
        cmd->add_option("--n", cfg.n, "problem dimension n");
        cmd->add_option("--m", cfg.m, "rows / measurements m");
        cmd->add_option("--density", cfg.density, "Bernoulli density p");
        cmd->add_flag("--ones-row", cfg.ones_row, "append an all-ones measurement row");
        cmd->add_option("--trials", cfg.trials, "trials per grid point");
        cmd->add_option("--probes", cfg.probes, "probe objectives per trial");
        cmd->add_option("--grid", grid_text, "sweep grid lo:hi[:step]");
        cmd->add_option("--seed", cfg.seed.master, "master seed");
        cmd->add_option("--stream", cfg.seed.stream, "stream id");
        cmd->add_option("--out", cfg.out_path, "output CSV path");
        cmd->add_flag("--exact", cfg.exact, "use the exact oracle instead of probes");
        cmd->add_option("--profile", cfg.profile, "desk|paper parameter profile")
            ->check(CLI::IsMember({"desk", "paper"}));
        cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
        cmd->set_config("--config", "", "flat key=value config file (flags override)");
    }

    /// Profile defaults fill any option the user left untouched.
    void finalize(CLI::App* cmd) {
        const bool paper = cfg.profile == "paper";
        auto defaulted = [&](const char* name) { return cmd->count(name) == 0; };
        switch (cfg.kind) {
        case ExperimentKind::VectorPhase:
            if (defaulted("--n")) cfg.n = 200;
            if (defaulted("--m")) cfg.m = paper ? 50 : 50;
            if (defaulted("--density")) cfg.density = 0.2;
            if (defaulted("--trials")) cfg.trials = 200;
            if (defaulted("--grid")) grid_text = paper ? "1:60:1" : "2:20:2";
            break;
        case ExperimentKind::MatrixPhase:
            if (defaulted("--n")) cfg.n = paper ? 40 : 16;
            if (defaulted("--m")) cfg.m = paper ? 500 : 83;
            if (defaulted("--trials")) cfg.trials = paper ? 200 : 50;
            if (defaulted("--grid")) grid_text = paper ? "0:16:1" : "0:6:1";
            break;
        case ExperimentKind::WendelMc:
            if (defaulted("--n")) cfg.n = 10;
            if (defaulted("--m")) cfg.m = 4;
            if (defaulted("--trials")) cfg.trials = 10000;
            if (defaulted("--grid")) grid_text = "1:1";
            break;
        case ExperimentKind::NullspaceSupport:
            if (defaulted("--n")) cfg.n = 100;
            if (defaulted("--m")) cfg.m = 50;
            if (defaulted("--density")) cfg.density = 0.5;
            if (defaulted("--trials")) cfg.trials = 5;
            if (defaulted("--probes")) cfg.probes = 1000;
            if (defaulted("--grid")) grid_text = "1:1";
            break;
        }
        if (!grid_text.empty()) cfg.grid = GridSpec::parse(grid_text);
    }
};

int solver_budget_exit(std::size_t failures, std::size_t total) {
    const std::size_t budget = std::max<std::size_t>(1, total / 100);
    if (failures > budget) {
        std::cerr << "solver failures (" << failures << ") exceeded the budget (" << budget
                  << ")\n";
        return kExitSolverBudget;
    }
    return kExitOk;
}

Record verdict_record(const SingletonVerdict& v) {
    Record r;
    switch (v.kind) {
    case SingletonKind::CertifiedSingleton: r.add("kind", "certified-singleton"); break;
    case SingletonKind::ProbableSingleton: r.add("kind", "probable-singleton"); break;
    case SingletonKind::Refuted: r.add("kind", "refuted"); break;
    }
    r.add("probes_used", v.probes_used);
    r.add("gap", v.gap);
    if (!v.witness.empty()) {
        std::string w;
        for (std::size_t i = 0; i < v.witness.size(); ++i) {
            if (i) w += ' ';
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v.witness[i]);
            w += buf;
        }
        r.add("witness", w);
    }
    return r;
}

Record mplus_record(const MPlusCertificate& cert) {
    Record r;
    r.add("member", cert.member);
    auto join = [](const Vec& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ' ';
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v[i]);
            s += buf;
        }
        return s;
    };
    if (cert.member)
        r.add("h", join(cert.h));
    else
        r.add("lambda", join(cert.lambda));
    return r;
}

Record expander_record(const ExpanderReport& rep) {
    Record r;
    r.add("d_min", rep.d_min);
    r.add("d_max", rep.d_max);
    r.add("rho", rep.rho);
    r.add("alpha", rep.alpha);
    r.add("delta", rep.delta);
    r.add("mode", rep.sampled ? "sampled" : "exhaustive");
    r.add("certified", rep.certified);
    r.add("violation_found", rep.violation_found);
    if (rep.violation_found) {
        std::string s;
        for (std::size_t i = 0; i < rep.violating_set.size(); ++i) {
            if (i) s += ' ';
            s += std::to_string(rep.violating_set[i]);
        }
        r.add("violating_set", s);
    }
    r.add("subsets_checked", rep.subsets_checked);
    r.add("threshold_met", rep.threshold_met);
    if (rep.threshold_met) r.add("threshold_k", rep.threshold_k);
    return r;
}

void write_record(const Record& rec, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << rec;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw ContractViolation("cannot open for writing: " + out_path);
    os << rec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certify and map unique nonnegative / PSD solutions of "
                 "underdetermined linear systems"};
    app.require_subcommand(1);

    CommonFlags vec_flags, mat_flags, wendel_flags, nullspace_flags;
    auto* vec_cmd = app.add_subcommand("vector-phase", "sparsity sweep on a 0-1 matrix");
    vec_flags.attach(vec_cmd, ExperimentKind::VectorPhase);
    auto* mat_cmd = app.add_subcommand("matrix-phase", "rank sweep on a Gaussian operator");
    mat_flags.attach(mat_cmd, ExperimentKind::MatrixPhase);
    auto* wendel_cmd = app.add_subcommand("wendel-mc", "Monte Carlo hull-probability check");
    wendel_flags.attach(wendel_cmd, ExperimentKind::WendelMc);
    auto* null_cmd =
        app.add_subcommand("nullspace-support", "support statistics of Bernoulli null spaces");
    nullspace_flags.attach(null_cmd, ExperimentKind::NullspaceSupport);

    std::string plot_csv, plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "emit a gnuplot script for a CSV");
    plot_cmd->add_option("csv", plot_csv, "CSV produced by an experiment run")->required();
    plot_cmd->add_option("--out", plot_out, "script path (default: CSV path + .gp)");

    std::string mplus_matrix, mplus_out;
    auto* mplus_cmd =
        app.add_subcommand("certify-mplus", "row-span-meets-positive-orthant certificate");
    mplus_cmd->add_option("matrix", mplus_matrix, "matrix file (text format)")->required();
    mplus_cmd->add_option("--out", mplus_out, "record output path (default stdout)");

    std::string single_matrix, single_x0, single_support, single_out;
    std::size_t single_probes = 5;
    std::uint64_t single_seed = 0;
    bool single_exact = false;
    auto* single_cmd = app.add_subcommand("certify-singleton",
                                          "is {x : Ax = Ax0, x >= 0} a singleton?");
    single_cmd->add_option("matrix", single_matrix, "matrix file (text format)")->required();
    single_cmd->add_option("--x0", single_x0, "x0 as a 1-row matrix file");
    single_cmd->add_option("--support", single_support,
                           "comma-separated support of a unit-valued x0");
    single_cmd->add_option("--probes", single_probes, "probe objectives");
    single_cmd->add_option("--seed", single_seed, "probe seed");
    single_cmd->add_flag("--exact", single_exact, "run the exact 2n-solve oracle");
    single_cmd->add_option("--out", single_out, "record output path (default stdout)");

    std::string exp_matrix, exp_out;
    double exp_alpha = 0.25, exp_delta = 0.0;
    std::size_t exp_samples = 0;
    std::uint64_t exp_seed = 0;
    auto* exp_cmd = app.add_subcommand("expander-cert", "(alpha, delta) expansion certificate");
    exp_cmd->add_option("matrix", exp_matrix, "0-1 adjacency matrix file")->required();
    exp_cmd->add_option("--alpha", exp_alpha, "left-set fraction alpha in (0,1]");
    exp_cmd->add_option("--delta", exp_delta,
                        "expansion delta in (0,1]; 0 picks the best certifiable value");
    exp_cmd->add_option("--samples", exp_samples, "sampled mode with this many subsets");
    exp_cmd->add_option("--seed", exp_seed, "sampling seed");
    exp_cmd->add_option("--out", exp_out, "record output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*vec_cmd) {
            vec_flags.finalize(vec_cmd);
            const ExperimentResult res = run_vector_phase(vec_flags.cfg);
            if (vec_flags.cfg.out_path.empty()) std::cout << res.csv;
            return solver_budget_exit(res.solver_failures,
                                      vec_flags.cfg.trials * res.rows.size());
        }
        if (*mat_cmd) {
            mat_flags.finalize(mat_cmd);
            const ExperimentResult res = run_matrix_phase(mat_flags.cfg);
            if (mat_flags.cfg.out_path.empty()) std::cout << res.csv;
            return solver_budget_exit(res.solver_failures,
                                      mat_flags.cfg.trials * res.rows.size());
        }
        if (*wendel_cmd) {
            wendel_flags.finalize(wendel_cmd);
            const WendelResult res = run_wendel_mc(wendel_flags.cfg);
            if (wendel_flags.cfg.out_path.empty()) std::cout << res.csv;
            return solver_budget_exit(res.solver_failures, wendel_flags.cfg.trials);
        }
        if (*null_cmd) {
            nullspace_flags.finalize(null_cmd);
            const NullspaceResult res = run_nullspace_support(nullspace_flags.cfg);
            if (nullspace_flags.cfg.out_path.empty()) std::cout << res.csv;
            return kExitOk;
        }
        if (*plot_cmd) {
            emit_plot(plot_csv, plot_out.empty() ? plot_csv + ".gp" : plot_out);
            return kExitOk;
        }
        if (*mplus_cmd) {
            const DenseMatrix a = read_matrix_file(mplus_matrix);
            write_record(mplus_record(mplus_membership(a)), mplus_out);
            return kExitOk;
        }
        if (*single_cmd) {
            const DenseMatrix a = read_matrix_file(single_matrix);
            Vec x0(a.cols(), 0.0);
            if (!single_x0.empty()) {
                const DenseMatrix row = read_matrix_file(single_x0);
                if (row.rows() != 1 || row.cols() != a.cols())
                    throw ContractViolation("--x0 must be a 1-row matrix matching A's columns");
                x0 = row.data();
            } else if (!single_support.empty()) {
                std::stringstream ss(single_support);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    x0.at(static_cast<std::size_t>(std::stoul(tok))) = 1.0;
            }
            const SingletonVerdict v =
                single_exact ? exact_singleton(a, x0)
                             : probe_singleton(a, x0, single_probes, Seed{single_seed, 0});
            write_record(verdict_record(v), single_out);
            return kExitOk;
        }
        if (*exp_cmd) {
            const DenseMatrix a = read_matrix_file(exp_matrix);
            double delta = exp_delta;
            if (delta <= 0.0) delta = std::min(1.0, best_certifiable_delta(a, exp_alpha));
            const ExpansionMode mode =
                exp_samples > 0 ? ExpansionMode::Sampled : ExpansionMode::Exhaustive;
            const ExpanderReport rep = make_expander_report(a, exp_alpha, delta, mode,
                                                            exp_samples, Seed{exp_seed, 0});
            write_record(expander_record(rep), exp_out);
            return kExitOk;
        }
    } catch (const ContractViolation& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const GuardExceeded& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitSolverBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitOk;
}
