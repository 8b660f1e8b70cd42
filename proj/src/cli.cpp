#include "acd/cli.hpp"

#include "acd/error.hpp"
#include "acd/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>

namespace acd {

namespace {

// Bad flag values; reported like CLI11 usage errors.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <class F>
auto as_usage(const std::string& flag, F&& parse)
{
    try {
        return parse();
    } catch (const std::invalid_argument& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

void print_vector_summary(std::ostream& out, const char* name, const Vector& v)
{
    out << name << " =";
    const Eigen::Index shown = std::min<Eigen::Index>(v.size(), 10);
    for (Eigen::Index i = 0; i < shown; ++i) {
        out << ' ' << v[i];
    }
    if (shown < v.size()) {
        out << " ...";
    }
    out << "  (min " << v.minCoeff() << ", max " << v.maxCoeff() << ")\n";
}

void print_matrix(std::ostream& out, const Matrix& a)
{
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        out << "  ";
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out << std::setw(10) << a(i, j);
        }
        out << '\n';
    }
}

struct SolveArgs {
    ProblemSpec problem;
    std::string type = "synthetic:3";
    std::optional<std::uint64_t> problem_seed;
    std::string dims;
    std::optional<double> lambda;
    std::string method = "acd";
    std::string sampling = "indep-acd";
    double tau = 1.0;
    std::string eso = "auto";
    double budget_epochs = 100.0;
    double eps = 0.0;
    double checkpoint_epochs = 1.0;
    std::uint64_t seed = Rng::default_seed;
    std::string out;
    bool timing = false;
};

int do_solve(const SolveArgs& a, std::ostream& out)
{
    ProblemSpec spec = a.problem;
    spec.type = a.type;
    spec.seed = a.problem_seed.value_or(a.seed);
    if (!a.dims.empty()) {
        spec.dims = as_usage("--dims", [&] { return parse_dims(a.dims); });
    }
    if (a.lambda) {
        spec.lambda = *a.lambda;
        spec.lambda_mode = "explicit";
    }
    const Method method = as_usage("--method", [&] { return parse_method(a.method); });
    const Variant variant = as_usage("--sampling", [&] { return parse_variant(a.sampling); });
    const EsoChoice eso = as_usage("--eso", [&] { return parse_eso_choice(a.eso); });

    const ProblemPtr problem = build_problem(spec);
    if (!(a.tau >= 1.0 && a.tau <= static_cast<double>(problem->n()))) {
        throw UsageError("--tau must lie in [1, n] with n = " + std::to_string(problem->n()));
    }
    const RunSetup setup = prepare_run(problem->smoothness(), method, variant, a.tau, eso);
    SolverOptions options;
    options.budget_epochs = a.budget_epochs;
    options.eps = a.eps;
    options.checkpoint_epochs = a.checkpoint_epochs;
    options.record_time = a.timing;
    const SolverTrace trace = execute_run(problem, setup, options, a.seed);

    if (!a.out.empty()) {
        emit_csv(trace, a.out);
        std::ofstream meta(a.out + ".meta", std::ios::binary);
        if (!meta) {
            throw std::runtime_error("cannot write '" + a.out + ".meta'");
        }
        write_meta(meta, trace.meta, trace.status);
    }

    const TraceMeta& m = trace.meta;
    const Checkpoint& last = trace.checkpoints.back();
    out << std::setprecision(6);
    out << "problem " << m.problem << " (n = " << m.n << (m.estimated ? ", estimated smoothness" : "") << ")\n";
    out << "method " << m.method << ", sampling " << m.sampling << ", tau " << m.tau << ", E|S| " << m.expected_size
        << (m.experimental ? ", projected (experimental)" : "") << '\n';
    out << "eso " << m.eso_mode << ", c " << m.c << ", v in [" << m.v_min << ", " << m.v_max << "]\n";
    if (m.theta) {
        out << "theta " << *m.theta << ", sigma_w " << *m.sigma_w << '\n';
    }
    out << "iterations " << last.iter << ", epochs " << last.epochs << ", f " << std::setprecision(12) << last.f;
    if (last.gap) {
        out << ", gap " << std::setprecision(6) << *last.gap;
    }
    out << '\n';
    if (!a.out.empty()) {
        out << "trace written to " << a.out << '\n';
    }
    return exit_ok;
}

struct BenchArgs {
    std::string config;
    std::optional<int> workers;
    std::string out_dir;
};

int do_bench(const BenchArgs& a, std::ostream& out, std::ostream& err)
{
    ExperimentConfig cfg = parse_config_file(a.config);
    if (a.workers) {
        if (*a.workers < 1) {
            throw UsageError("--workers must be at least 1");
        }
        cfg.workers = *a.workers;
    }
    const auto runs = run_grid(cfg);
    const auto rows = speedup_table(runs, cfg.target_gap);
    write_grid(a.out_dir, runs, rows);

    std::size_t aborted = 0;
    for (const auto& run : runs) {
        if (run.trace.status != "ok") {
            ++aborted;
            err << "run " << trace_file_name(run.cell) << ": " << run.trace.status << '\n';
        }
    }
    out << runs.size() << " runs (" << aborted << " aborted) written to " << a.out_dir << '\n';
    out << "epochs to gap " << cfg.target_gap << " (median over seeds):\n";
    out << std::left << std::setw(8) << "label" << std::setw(16) << "sampling" << std::setw(8) << "tau"
        << std::setw(10) << "reached" << std::setw(14) << "epochs" << "speedup\n";
    for (const auto& row : rows) {
        out << std::setw(8) << method_label(row.method, row.variant) << std::setw(16) << to_string(row.variant)
            << std::setw(8) << row.tau << std::setw(10)
            << (std::to_string(row.reached) + "/" + std::to_string(row.seeds)) << std::setw(14);
        if (row.median_epochs) {
            out << *row.median_epochs;
        } else {
            out << unreached_sentinel;
        }
        if (row.speedup) {
            out << *row.speedup;
        } else {
            out << (row.median_epochs ? "NA" : unreached_sentinel);
        }
        out << '\n';
    }
    return exit_ok;
}

struct EsoArgs {
    std::string matrix;
    std::string variant;
    double tau = 1.0;
    std::optional<double> sigma;
    std::string mode = "accelerated";
};

int do_eso(const EsoArgs& a, std::ostream& out)
{
    const Variant variant = as_usage("--variant", [&] { return parse_variant(a.variant); });
    const EsoChoice mode = as_usage("--mode", [&] { return parse_eso_choice(a.mode); });
    const SmoothnessMatrix m(read_matrix_file(a.matrix));
    if (!(a.tau >= 1.0 && a.tau <= static_cast<double>(m.n()))) {
        throw UsageError("--tau must lie in [1, n] with n = " + std::to_string(m.n()));
    }
    const double sigma = a.sigma ? *a.sigma : lambda_min(m.sym());
    if (!(sigma > 0.0)) {
        throw UsageError("--sigma must be positive (lambda_min(M) = " + std::to_string(sigma) + ")");
    }
    if (mode == EsoChoice::TauNice && variant != Variant::TauNice) {
        throw UsageError("--mode tau-nice needs --variant tau-nice");
    }
    const RunSetup setup = prepare_run(m, Method::Acd, variant, a.tau, mode);
    const SamplingLaw& law = setup.law;
    const EsoParams& eso = setup.eso;
    const double sigma_w = sigma_weighted(sigma, law, eso.v);
    const double gap = verify_eso(law, m, eso.v);

    out << std::setprecision(10);
    out << "variant " << to_string(variant) << ", tau " << a.tau << ", E|S| " << law.expected_size()
        << (law.clipped() ? " (clipped)" : "") << '\n';
    if (law.delta()) {
        out << "delta = " << *law.delta() << '\n';
    }
    out << "eso mode " << to_string(eso.mode) << '\n';
    out << "c = " << eso.c << '\n';
    out << "accelerated constant max v/p^2 = " << accelerated_constant(law, eso.v) << '\n';
    print_vector_summary(out, "p", law.p());
    print_vector_summary(out, "v", eso.v);
    out << "sigma = " << sigma << '\n';
    out << "sigma_w = " << sigma_w << '\n';
    if (sigma_w > 0.0 && sigma_w <= 1.0) {
        const StepParams step = step_params(sigma_w);
        out << "theta = " << step.theta << '\n';
        out << "iteration bound = " << 1.619 / std::sqrt(sigma_w) << " * log(1/eps)\n";
    } else {
        out << "theta undefined (sigma_w outside (0, 1])\n";
    }
    out << "lower bound sum sqrt(M_ii) / (tau sqrt(sigma)) = " << rate_lower_bound(m, a.tau, sigma) << '\n';
    out << "psd gap lambda_min(Diag(p o v) - P o M) = " << gap
        << (eso_certified(gap, law, eso.v) ? " (certified)" : " (NOT certified)") << '\n';
    return exit_ok;
}

struct SamplingArgs {
    std::string variant;
    std::optional<long long> n;
    double tau = 1.0;
    std::string matrix;
    long long draws = 200000;
    std::uint64_t seed = Rng::default_seed;
};

int do_sampling_check(const SamplingArgs& a, std::ostream& out)
{
    const Variant variant = as_usage("--variant", [&] { return parse_variant(a.variant); });
    std::optional<SmoothnessMatrix> m;
    if (!a.matrix.empty()) {
        m.emplace(read_matrix_file(a.matrix));
        if (a.n && *a.n != m->n()) {
            throw UsageError("--n disagrees with the matrix dimension " + std::to_string(m->n()));
        }
    } else if (!a.n) {
        throw UsageError("sampling-check needs --n or --matrix");
    } else if (*a.n < 1) {
        throw UsageError("--n must be positive");
    } else {
        m.emplace(SymMatrix::identity(*a.n));
    }
    if (a.draws < 1) {
        throw UsageError("--draws must be positive");
    }
    if (!(a.tau >= 1.0 && a.tau <= static_cast<double>(m->n()))) {
        throw UsageError("--tau must lie in [1, n] with n = " + std::to_string(m->n()));
    }
    const SamplingLaw law = as_usage("--tau", [&] { return build_law(variant, *m, a.tau); });
    const Matrix analytic = probability_matrix(law).matrix();
    Rng rng(a.seed);
    const Matrix empirical = empirical_probability_matrix(law, rng, a.draws).matrix();

    const auto draws = static_cast<double>(a.draws);
    double max_abs = 0.0;
    double max_se = 0.0;
    for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
        for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
            const double p = analytic(i, j);
            const double d = std::abs(empirical(i, j) - p);
            max_abs = std::max(max_abs, d);
            const double se = std::sqrt(p * (1.0 - p) / draws);
            if (se > 0.0) {
                max_se = std::max(max_se, d / se);
            }
        }
    }

    out << std::setprecision(6);
    out << "variant " << to_string(variant) << ", n " << law.n() << ", tau " << law.tau() << ", E|S| "
        << law.expected_size() << ", draws " << a.draws << ", seed " << a.seed << '\n';
    if (law.n() <= 12) {
        out << "analytic P:\n";
        print_matrix(out, analytic);
        out << "empirical P:\n";
        print_matrix(out, empirical);
    }
    out << "max |empirical - analytic| = " << max_abs << '\n';
    out << "max deviation in binomial standard errors = " << max_se << '\n';
    return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Minibatch accelerated coordinate descent toolkit", "acd"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Run CD or ACD on one problem and write a convergence trace");
    s->add_option("--problem", solve.type, "quadratic | synthetic:<1-5> | logistic | svm-dual")
        ->capture_default_str();
    s->add_option("--n", solve.problem.n, "Dimension of synthetic and toy problems")->capture_default_str();
    s->add_option("--problem-seed", solve.problem_seed, "Seed for problem data (default: --seed)");
    s->add_option("--matrix", solve.problem.matrix, "Matrix file for --problem quadratic");
    s->add_option("--data", solve.problem.data, "LibSVM dataset for logistic / svm-dual");
    s->add_option("--dims", solve.dims, "Dataset shape override 'm,n'");
    s->add_option("--m", solve.problem.m, "Toy examples (logistic) or features (svm-dual)");
    s->add_option("--lambda-mode", solve.problem.lambda_mode, "default | mean-diag | max-diag-over-10 | explicit");
    s->add_option("--lambda", solve.lambda, "Explicit regularization");
    s->add_flag("--rescale", solve.problem.rescale, "Rescale data rows and columns by uniform factors");
    s->add_option("--smoothness", solve.problem.smoothness, "exact | diag:<factor> | diag-sqrt-n")
        ->capture_default_str();
    s->add_option("--sigma-mode", solve.problem.sigma_mode, "auto | exact | min-diag")->capture_default_str();
    s->add_option("--method", solve.method, "cd | acd")->capture_default_str();
    s->add_option("--sampling", solve.sampling,
                  "tau-nice | indep-uniform | indep-sqrt | indep-acd | indep-cd | serial | full")
        ->capture_default_str();
    s->add_option("--tau", solve.tau, "(Expected) minibatch size")->capture_default_str();
    s->add_option("--eso", solve.eso, "auto | accelerated | plain | closed | tau-nice")->capture_default_str();
    s->add_option("--budget-epochs", solve.budget_epochs, "Work budget in epochs")->capture_default_str();
    s->add_option("--eps", solve.eps, "Stop once the gap is at most eps (0: off)")->capture_default_str();
    s->add_option("--checkpoint-epochs", solve.checkpoint_epochs, "Checkpoint cadence")->capture_default_str();
    s->add_option("--seed", solve.seed, "Seed for sampling (and problem data)")->capture_default_str();
    s->add_option("--out", solve.out, "Trace CSV path; metadata goes to <out>.meta");
    s->add_flag("--timing", solve.timing, "Record wall-clock times (breaks byte-identical output)");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run an experiment grid from a config file");
    b->add_option("--config", bench.config, "Experiment config file")->required();
    b->add_option("--workers", bench.workers, "Concurrent runs (overrides the config)");
    b->add_option("--out-dir", bench.out_dir, "Output directory")->required();

    EsoArgs eso;
    auto* e = app.add_subcommand("eso", "Compute ESO parameters and rate constants for a matrix");
    e->add_option("--matrix", eso.matrix, "Smoothness matrix file")->required();
    e->add_option("--variant", eso.variant, "Sampling variant")->required();
    e->add_option("--tau", eso.tau, "(Expected) minibatch size")->capture_default_str();
    e->add_option("--sigma", eso.sigma, "Strong convexity (default: lambda_min(M))");
    e->add_option("--mode", eso.mode, "accelerated | plain | closed | tau-nice")->capture_default_str();

    SamplingArgs samp;
    auto* c = app.add_subcommand("sampling-check", "Compare analytic and empirical probability matrices");
    c->add_option("--variant", samp.variant, "Sampling variant")->required();
    c->add_option("--n", samp.n, "Dimension (identity M unless --matrix is given)");
    c->add_option("--tau", samp.tau, "(Expected) minibatch size")->capture_default_str();
    c->add_option("--matrix", samp.matrix, "Smoothness matrix file");
    c->add_option("--draws", samp.draws, "Number of draws")->capture_default_str();
    c->add_option("--seed", samp.seed, "Seed")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (s->parsed()) {
            return do_solve(solve, out);
        }
        if (b->parsed()) {
            return do_bench(bench, out, err);
        }
        if (e->parsed()) {
            return do_eso(eso, out);
        }
        return do_sampling_check(samp, out);
    } catch (const UsageError& ex) {
        err << "error: " << ex.what() << "\nRun with --help for usage.\n";
        return exit_usage;
    } catch (const ConfigError& ex) {
        err << "configuration error: " << ex.what() << '\n';
        return exit_usage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return exit_runtime;
    }
}

} // namespace acd
