#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "unicone/dense_matrix.hpp"
#include "unicone/ensembles.hpp"
#include "unicone/errors.hpp"
#include "unicone/parallel.hpp"
#include "unicone/psd_uniqueness.hpp"
#include "unicone/rng.hpp"
#include "unicone/sdp.hpp"
#include "unicone/vector_uniqueness.hpp"

namespace unicone {

enum class ExperimentKind { VectorPhase, MatrixPhase, WendelMc, NullspaceSupport };

inline const char* kind_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::VectorPhase: return "vector-phase";
    case ExperimentKind::MatrixPhase: return "matrix-phase";
    case ExperimentKind::WendelMc: return "wendel-mc";
    case ExperimentKind::NullspaceSupport: return "nullspace-support";
    }
    return "?";
}

/// Sweep grid "lo:hi[:step]".
struct GridSpec {
    long lo = 1;
    long hi = 1;
    long step = 1;

    static GridSpec parse(const std::string& text) {
        GridSpec g;
        char extra = 0;
        const int fields =
            std::sscanf(text.c_str(), "%ld:%ld:%ld%c", &g.lo, &g.hi, &g.step, &extra);
        if (fields == 3) return g.validated();
        g.step = 1;
        if (std::sscanf(text.c_str(), "%ld:%ld%c", &g.lo, &g.hi, &extra) == 2)
            return g.validated();
        if (std::sscanf(text.c_str(), "%ld%c", &g.lo, &extra) == 1) {
            g.hi = g.lo;
            return g.validated();
        }
        throw ContractViolation("grid: expected lo:hi[:step], got '" + text + "'");
    }

    GridSpec validated() const {
        if (step < 1 || hi < lo) throw ContractViolation("grid: need lo <= hi and step >= 1");
        return *this;
    }

    std::vector<long> values() const {
        std::vector<long> v;
        for (long x = lo; x <= hi; x += step) v.push_back(x);
        return v;
    }

    std::string to_string() const {
        return std::to_string(lo) + ":" + std::to_string(hi) + ":" + std::to_string(step);
    }
};

/// Declarative description of one sweep run.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::VectorPhase;
    std::size_t n = 200;
    std::size_t m = 50;
    double density = 0.2;
    bool ones_row = false;
    GridSpec grid{};
    std::size_t trials = 200;
    std::size_t probes = 5;
    Seed seed{};
    std::string out_path;
    bool exact = false;
    std::string profile = "desk";
    unsigned threads = 0; // 0: hardware concurrency

    void validate() const {
        if (n == 0) throw ContractViolation("config: n must be positive");
        if (trials < 1) throw ContractViolation("config: trials must be >= 1");
        if (grid.values().empty()) throw ContractViolation("config: grid is empty");
        if (kind == ExperimentKind::VectorPhase || kind == ExperimentKind::NullspaceSupport) {
            if (!(density > 0.0 && density < 1.0))
                throw ContractViolation("config: density must lie in (0,1)");
        }
        if (kind == ExperimentKind::VectorPhase || kind == ExperimentKind::MatrixPhase) {
            if (probes < 1) throw ContractViolation("config: probes must be >= 1");
            const long top = grid.values().back();
            if (kind == ExperimentKind::VectorPhase && top > static_cast<long>(n))
                throw ContractViolation("config: sparsity grid exceeds n");
            if (kind == ExperimentKind::MatrixPhase && top > static_cast<long>(n))
                throw ContractViolation("config: rank grid exceeds n");
        }
        if (kind == ExperimentKind::WendelMc && m < 1)
            throw ContractViolation("config: wendel-mc needs m >= 1");
        if (profile != "desk" && profile != "paper")
            throw ContractViolation("config: profile must be desk or paper");
    }
};

struct PhaseRow {
    long grid_value = 0;
    std::size_t trials = 0;
    double singleton_fraction = 0.0;
    double l1_success_fraction = 0.0; // vector case only
    double mean_probe_gap = 0.0;
    std::size_t inconclusive = 0; // matrix case only
};

struct ExperimentResult {
    std::vector<PhaseRow> rows;
    std::size_t solver_failures = 0;
    std::string csv; // the exact bytes written to out_path (when set)
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void csv_header(std::ostream& os, const ExperimentConfig& cfg) {
    os << "# kind=" << kind_name(cfg.kind) << '\n';
    os << "# n=" << cfg.n << '\n';
    os << "# m=" << cfg.m << '\n';
    os << "# density=" << fmt_double(cfg.density) << '\n';
    os << "# ones_row=" << (cfg.ones_row ? "true" : "false") << '\n';
    os << "# grid=" << cfg.grid.to_string() << '\n';
    os << "# trials=" << cfg.trials << '\n';
    os << "# probes=" << cfg.probes << '\n';
    os << "# seed=" << cfg.seed.master << '\n';
    os << "# stream=" << cfg.seed.stream << '\n';
    os << "# exact=" << (cfg.exact ? "true" : "false") << '\n';
    os << "# profile=" << cfg.profile << '\n';
}

inline void write_csv_file(const ExperimentConfig& cfg, const std::string& body,
                           ExperimentResult& result) {
    result.csv = body;
    if (cfg.out_path.empty()) return;
    std::ofstream os(cfg.out_path, std::ios::binary);
    if (!os) throw ContractViolation("cannot open for writing: " + cfg.out_path);
    os << body;
}

} // namespace detail

/// Sparsity sweep over a fixed 0-1 matrix: per sparsity k, random supports
/// with uniform(0,1) entries; the singleton probe and L1 recovery run per
/// trial. One matrix per run, drawn from the run's seed.
inline ExperimentResult run_vector_phase(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::VectorPhase)
        throw ContractViolation("run_vector_phase: wrong experiment kind");

    const DenseMatrix a =
        bernoulli01(cfg.m, cfg.n, cfg.density, cfg.ones_row, derive_stream(cfg.seed, 1));

    ExperimentResult result;
    std::atomic<std::size_t> failures{0};
    const std::vector<long> ks = cfg.grid.values();

    struct Trial {
        bool singleton = false;
        bool l1_ok = false;
        double gap = 0.0;
        bool gap_finite = false;
    };

    for (std::size_t gi = 0; gi < ks.size(); ++gi) {
        const auto k = static_cast<std::size_t>(ks[gi]);
        std::vector<Trial> trials(cfg.trials);

        parallel_for(
            cfg.trials,
            [&](std::size_t t) {
                Trial& out = trials[t];
                try {
                    CounterRng rng(derive_stream(cfg.seed, 100 + gi, t));
                    Vec x0(cfg.n, 0.0);
                    for (std::size_t j : rng.sample_without_replacement(cfg.n, k))
                        x0[j] = rng.next_uniform();

                    if (cfg.exact) {
                        const SingletonVerdict v = exact_singleton(a, x0);
                        out.singleton = v.kind == SingletonKind::CertifiedSingleton;
                        if (std::isfinite(v.gap)) {
                            out.gap = v.gap;
                            out.gap_finite = true;
                        }
                    } else {
                        const SingletonVerdict v = probe_singleton(
                            a, x0, cfg.probes, derive_stream(cfg.seed, 500 + gi, t));
                        out.singleton = v.kind != SingletonKind::Refuted;
                        if (std::isfinite(v.gap)) {
                            out.gap = v.gap;
                            out.gap_finite = true;
                        }
                    }

                    const L1Result l1 = l1_recover(a, a.apply(x0));
                    out.l1_ok = l1.status == LpStatus::Optimal &&
                                norm_inf(sub(l1.x, x0)) <= 1e-5;
                } catch (const NumericalError&) {
                    failures.fetch_add(1);
                }
            },
            cfg.threads);

        PhaseRow row;
        row.grid_value = ks[gi];
        row.trials = cfg.trials;
        double gaps = 0.0;
        std::size_t gap_count = 0;
        for (const Trial& t : trials) {
            row.singleton_fraction += t.singleton ? 1.0 : 0.0;
            row.l1_success_fraction += t.l1_ok ? 1.0 : 0.0;
            if (t.gap_finite) {
                gaps += t.gap;
                ++gap_count;
            }
        }
        row.singleton_fraction /= static_cast<double>(cfg.trials);
        row.l1_success_fraction /= static_cast<double>(cfg.trials);
        row.mean_probe_gap = gap_count ? gaps / static_cast<double>(gap_count) : 0.0;
        result.rows.push_back(row);
    }

    std::ostringstream os;
    detail::csv_header(os, cfg);
    os << "k,trials,singleton_fraction,l1_success_fraction,mean_probe_gap\n";
    for (const PhaseRow& r : result.rows)
        os << r.grid_value << ',' << r.trials << ',' << detail::fmt_double(r.singleton_fraction)
           << ',' << detail::fmt_double(r.l1_success_fraction) << ','
           << detail::fmt_double(r.mean_probe_gap) << '\n';

    result.solver_failures = failures.load();
    detail::write_csv_file(cfg, os.str(), result);
    return result;
}

/// Rank sweep over a fixed Gaussian symmetric operator: per rank r, random
/// factors B give X0 = B B^T; the PSD singleton probe runs per trial.
inline ExperimentResult run_matrix_phase(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::MatrixPhase)
        throw ContractViolation("run_matrix_phase: wrong experiment kind");

    const SymOperator op = gaussian_sym_operator(cfg.n, cfg.m, derive_stream(cfg.seed, 1));
    const SdpContext ctx(op); // shared read-only across trials

    ExperimentResult result;
    std::atomic<std::size_t> failures{0};
    const std::vector<long> ranks = cfg.grid.values();

    struct Trial {
        bool singleton = false;
        bool inconclusive = false;
        double gap = 0.0;
        bool gap_finite = false;
    };

    for (std::size_t gi = 0; gi < ranks.size(); ++gi) {
        const auto rank = static_cast<std::size_t>(ranks[gi]);
        std::vector<Trial> trials(cfg.trials);

        parallel_for(
            cfg.trials,
            [&](std::size_t t) {
                Trial& out = trials[t];
                try {
                    CounterRng rng(derive_stream(cfg.seed, 100 + gi, t));
                    SymMatrix x0(cfg.n);
                    if (rank > 0) {
                        DenseMatrix b(cfg.n, rank);
                        for (std::size_t i = 0; i < cfg.n; ++i)
                            for (std::size_t j = 0; j < rank; ++j) b(i, j) = rng.next_gaussian();
                        DenseMatrix full = b * b.transpose();
                        x0 = SymMatrix::from_full(full);
                    }

                    const bool use_exact = cfg.exact && svec_length(cfg.n) <= 36;
                    const PsdSingletonVerdict v =
                        use_exact
                            ? exact_singleton_psd(ctx, x0)
                            : probe_singleton_psd(ctx, x0, cfg.probes,
                                                  derive_stream(cfg.seed, 500 + gi, t));
                    out.singleton = v.kind == PsdSingletonKind::ProbableSingleton ||
                                    v.kind == PsdSingletonKind::CertifiedSingleton;
                    out.inconclusive = v.kind == PsdSingletonKind::Inconclusive;
                    if (std::isfinite(v.gap)) {
                        out.gap = v.gap;
                        out.gap_finite = true;
                    }
                } catch (const NumericalError&) {
                    failures.fetch_add(1);
                }
            },
            cfg.threads);

        PhaseRow row;
        row.grid_value = ranks[gi];
        row.trials = cfg.trials;
        double gaps = 0.0;
        std::size_t gap_count = 0;
        for (const Trial& t : trials) {
            row.singleton_fraction += t.singleton ? 1.0 : 0.0;
            if (t.inconclusive) ++row.inconclusive;
            if (t.gap_finite) {
                gaps += t.gap;
                ++gap_count;
            }
        }
        row.singleton_fraction /= static_cast<double>(cfg.trials);
        row.mean_probe_gap = gap_count ? gaps / static_cast<double>(gap_count) : 0.0;
        result.rows.push_back(row);
    }

    std::ostringstream os;
    detail::csv_header(os, cfg);
    os << "rank,trials,singleton_fraction,mean_probe_gap,inconclusive\n";
    for (const PhaseRow& r : result.rows)
        os << r.grid_value << ',' << r.trials << ',' << detail::fmt_double(r.singleton_fraction)
           << ',' << detail::fmt_double(r.mean_probe_gap) << ',' << r.inconclusive << '\n';

    result.solver_failures = failures.load();
    detail::write_csv_file(cfg, os.str(), result);
    return result;
}

struct WendelRow {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t trials = 0;
    double empirical = 0.0;
    double formula = 0.0;
    double z_score = 0.0;
};

struct WendelResult {
    std::vector<WendelRow> rows;
    std::size_t solver_failures = 0;
    std::string csv;
};

/// Monte Carlo validation of the closed-form hull probability: draw Gaussian
/// matrices and test 0 in conv(columns) via the membership certificate.
inline WendelResult run_wendel_mc(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::WendelMc)
        throw ContractViolation("run_wendel_mc: wrong experiment kind");

    std::atomic<std::size_t> hits{0};
    std::atomic<std::size_t> failures{0};
    parallel_for(
        cfg.trials,
        [&](std::size_t t) {
            try {
                const DenseMatrix a = gaussian_matrix(cfg.m, cfg.n, derive_stream(cfg.seed, 7, t));
                if (!mplus_membership(a).member) hits.fetch_add(1); // 0 in the hull
            } catch (const NumericalError&) {
                failures.fetch_add(1);
            }
        },
        cfg.threads);

    WendelRow row;
    row.m = cfg.m;
    row.n = cfg.n;
    row.trials = cfg.trials;
    row.empirical = static_cast<double>(hits.load()) / static_cast<double>(cfg.trials);
    row.formula = wendel_probability(cfg.m, cfg.n);
    const double sigma =
        std::sqrt(row.formula * (1.0 - row.formula) / static_cast<double>(cfg.trials));
    if (sigma > 0.0)
        row.z_score = (row.empirical - row.formula) / sigma;
    else
        row.z_score = row.empirical == row.formula ? 0.0 : 1e9;

    WendelResult result;
    result.rows.push_back(row);
    result.solver_failures = failures.load();

    std::ostringstream os;
    detail::csv_header(os, cfg);
    os << "m,n,trials,empirical,formula,z\n";
    os << row.m << ',' << row.n << ',' << row.trials << ',' << detail::fmt_double(row.empirical)
       << ',' << detail::fmt_double(row.formula) << ',' << detail::fmt_double(row.z_score)
       << '\n';
    result.csv = os.str();
    if (!cfg.out_path.empty()) {
        std::ofstream file(cfg.out_path, std::ios::binary);
        if (!file) throw ContractViolation("cannot open for writing: " + cfg.out_path);
        file << result.csv;
    }
    return result;
}

struct NullspaceRow {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t samples = 0; // zero flags a vacuous draw
    long min_positive = -1;
    long min_negative = -1;
};

struct NullspaceResult {
    std::vector<NullspaceRow> rows;
    std::string csv;
};

/// Per Bernoulli draw: sample unit null vectors and record the smallest
/// positive and negative support sizes seen (entries counted above
/// 1e-9 * ||w||_inf). Trivial null spaces are flagged vacuous.
inline NullspaceResult run_nullspace_support(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::NullspaceSupport)
        throw ContractViolation("run_nullspace_support: wrong experiment kind");

    NullspaceResult result;
    result.rows.resize(cfg.trials);

    parallel_for(
        cfg.trials,
        [&](std::size_t draw) {
            NullspaceRow& row = result.rows[draw];
            const DenseMatrix a =
                bernoulli01(cfg.m, cfg.n, cfg.density, cfg.ones_row, derive_stream(cfg.seed, 11, draw));
            row.n = cfg.n;
            row.m = a.rows();
            const NullSampler sampler(a);
            if (sampler.dimension() == 0) {
                std::fprintf(stderr, "nullspace-support: draw %zu has a trivial null space\n",
                             draw);
                return;
            }
            CounterRng rng(derive_stream(cfg.seed, 13, draw));
            long min_pos = std::numeric_limits<long>::max();
            long min_neg = std::numeric_limits<long>::max();
            for (std::size_t s = 0; s < cfg.probes; ++s) {
                const Vec w = sampler.sample(rng);
                const double thr = 1e-9 * norm_inf(w);
                long pos = 0, neg = 0;
                for (double v : w) {
                    if (v > thr) ++pos;
                    if (v < -thr) ++neg;
                }
                min_pos = std::min(min_pos, pos);
                min_neg = std::min(min_neg, neg);
            }
            row.samples = cfg.probes;
            row.min_positive = min_pos;
            row.min_negative = min_neg;
        },
        cfg.threads);

    std::ostringstream os;
    detail::csv_header(os, cfg);
    os << "n,m,samples,min_positive_support,min_negative_support\n";
    for (const NullspaceRow& r : result.rows)
        os << r.n << ',' << r.m << ',' << r.samples << ',' << r.min_positive << ','
           << r.min_negative << '\n';
    result.csv = os.str();
    if (!cfg.out_path.empty()) {
        std::ofstream file(cfg.out_path, std::ios::binary);
        if (!file) throw ContractViolation("cannot open for writing: " + cfg.out_path);
        file << result.csv;
    }
    return result;
}

// ---------------------------------------------------------------------------
// plot-script emission

/// Reads back a CSV produced by this module and writes a self-contained
/// gnuplot script for it. The experiment kind is taken from the CSV header.
inline void emit_plot(const std::string& csv_path, const std::string& script_path) {
    std::ifstream is(csv_path);
    if (!is) throw ContractViolation("emit_plot: cannot open " + csv_path);

    std::string kind;
    std::string line;
    std::size_t line_no = 0;
    std::size_t data_rows = 0;
    bool seen_columns = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.rfind("# kind=", 0) == 0) {
            kind = line.substr(7);
        } else if (!line.empty() && line[0] == '#') {
            continue;
        } else if (!line.empty() && !seen_columns) {
            seen_columns = true;
        } else if (!line.empty()) {
            ++data_rows;
        }
    }
    if (kind.empty())
        throw ContractViolation("emit_plot: missing '# kind=' header in " + csv_path);
    if (!seen_columns || data_rows == 0)
        throw ContractViolation("emit_plot: no data rows in " + csv_path + " (line " +
                                std::to_string(line_no) + ")");

    std::ofstream os(script_path);
    if (!os) throw ContractViolation("emit_plot: cannot open " + script_path);

    os << "# gnuplot script generated from " << csv_path << "\n";
    os << "set datafile separator ','\n";
    os << "set datafile commentschars '#'\n";
    os << "set key bottom left\n";
    os << "set yrange [-0.05:1.05]\n";
    if (kind == "vector-phase") {
        os << "set xlabel 'sparsity k'\n";
        os << "set ylabel 'fraction'\n";
        os << "plot '" << csv_path << "' every ::1 using 1:3 with linespoints"
           << " title 'singleton fraction', \\\n     '" << csv_path
           << "' every ::1 using 1:4 with linespoints title 'L1 success fraction'\n";
    } else if (kind == "matrix-phase") {
        os << "set xlabel 'rank'\n";
        os << "set ylabel 'fraction'\n";
        os << "set style fill solid 0.25\n";
        os << "plot '" << csv_path << "' every ::1 using 1:($5/$2) with boxes"
           << " title 'inconclusive fraction', \\\n     '" << csv_path
           << "' every ::1 using 1:3 with linespoints title 'singleton fraction'\n";
    } else if (kind == "wendel-mc") {
        os << "set xlabel 'instance'\n";
        os << "set ylabel 'probability'\n";
        os << "plot '" << csv_path << "' every ::1 using 0:4 with points pt 7"
           << " title 'empirical', \\\n     '" << csv_path
           << "' every ::1 using 0:5 with points pt 4 title 'formula'\n";
    } else if (kind == "nullspace-support") {
        os << "unset yrange\n";
        os << "set xlabel 'draw'\n";
        os << "set ylabel 'support size'\n";
        os << "plot '" << csv_path << "' every ::1 using 0:4 with linespoints"
           << " title 'min positive support', \\\n     '" << csv_path
           << "' every ::1 using 0:5 with linespoints title 'min negative support'\n";
    } else {
        throw ContractViolation("emit_plot: unknown experiment kind '" + kind + "'");
    }
}

} // namespace unicone
