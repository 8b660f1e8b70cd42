#pragma once

#include "acd/dataio.hpp"
#include "acd/eso.hpp"
#include "acd/problems.hpp"
#include "acd/sampling.hpp"
#include "acd/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace acd {

/*
    Problem description shared by config files and the solve subcommand.

    type is one of quadratic (M read from `matrix`), synthetic:<1-5>,
    logistic or svm-dual. The data-driven problems read `data` (LibSVM)
    or, when it is empty, draw a Gaussian toy set of m examples with n
    features (logistic) or n examples with m features (svm-dual).
*/
struct ProblemSpec {
    std::string type = "synthetic:3";
    Eigen::Index n = 100;
    std::uint64_t seed = Rng::default_seed;
    std::string matrix;
    std::string data;
    std::optional<Dims> dims;
    Eigen::Index m = 0; // 0: 2n toy examples (logistic) or n features (svm-dual)
    std::string lambda_mode = "default"; // default | mean-diag | max-diag-over-10 | explicit
    double lambda = 0.0;
    bool rescale = false;
    std::string smoothness = "exact"; // exact | diag:<factor> | diag-sqrt-n
    std::string sigma_mode = "auto";  // auto | exact | min-diag
};

// Applies one key of the problem block; false when the key is not a problem key.
bool set_problem_key(ProblemSpec& spec, const std::string& key, const std::string& value);

ProblemPtr build_problem(const ProblemSpec& spec);

enum class Method { Cd, Acd };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

// ESO choice per run: auto picks plain for CD and accelerated for ACD.
enum class EsoChoice { Auto, Accelerated, Plain, Closed, TauNice };

std::string_view to_string(EsoChoice e);
EsoChoice parse_eso_choice(std::string_view name);

// Law and ESO parameters of one (method, sampling, tau) configuration.
struct RunSetup {
    Method method = Method::Acd;
    SamplingLaw law;
    EsoParams eso;
};

RunSetup prepare_run(const SmoothnessMatrix& m, Method method, Variant variant, double tau, EsoChoice eso);

// Runs one seed; projected problems use the projected accelerated variant.
SolverTrace execute_run(const ProblemPtr& problem, const RunSetup& setup, const SolverOptions& options,
                        std::uint64_t seed);

// Experiment-legend label, e.g. AN for ACD with the solved independent law.
std::string method_label(Method method, Variant variant);

struct ExperimentConfig {
    ProblemSpec problem;
    std::vector<Method> methods{Method::Acd};
    std::vector<Variant> samplings{Variant::IndepAcdSolved};
    std::vector<double> taus{1.0};
    std::vector<std::uint64_t> seeds{Rng::default_seed};
    double budget_epochs = 100.0;
    double eps = 0.0;
    double checkpoint_epochs = 1.0;
    EsoChoice eso = EsoChoice::Auto;
    double target_gap = 1e-8;
    int workers = 1;
    bool timing = false;
};

/*
    Flat "key = value" text, one key per line, '#' starts a comment. Lists
    are comma separated; seeds also accept "a..b" ranges. See README for
    the key reference.
*/
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct GridCell {
    Method method = Method::Acd;
    Variant variant = Variant::IndepAcdSolved;
    double tau = 1.0;
    std::uint64_t seed = 0;
};

struct GridRun {
    GridCell cell;
    SolverTrace trace;
};

// One run per (method, sampling, tau, seed) in that nesting order.
std::vector<GridRun> run_grid(const ExperimentConfig& config);
std::vector<GridRun> run_grid(const ExperimentConfig& config, const ProblemPtr& problem);

struct SpeedupRow {
    Method method = Method::Acd;
    Variant variant = Variant::IndepAcdSolved;
    double tau = 1.0;
    int seeds = 0;
    int reached = 0;
    // Medians over seeds, a seed that never reaches the target counting as
    // infinite; empty when the median itself is unreached.
    std::optional<double> median_epochs;
    std::optional<double> median_iterations;
    // median iterations at tau = 1 over median iterations at tau.
    std::optional<double> speedup;
};

std::vector<SpeedupRow> speedup_table(const std::vector<GridRun>& runs, double target_gap);

// Written to CSV for an unreached median.
inline constexpr const char* unreached_sentinel = "unreached";

inline constexpr const char* trace_header = "iter,epochs,coord_evals,f,gap,potential,wall_ms";

void write_trace_csv(std::ostream& out, const SolverTrace& trace);
void emit_csv(const SolverTrace& trace, const std::string& path);
std::vector<Checkpoint> parse_trace_csv(std::istream& in);

// Resolved run parameters as "key,value" lines.
void write_meta(std::ostream& out, const TraceMeta& meta, const std::string& status);

std::string trace_file_name(const GridCell& cell);
void write_speedup_csv(std::ostream& out, const std::vector<SpeedupRow>& rows);

// Per-run CSVs, index.csv (metadata of every run) and speedup.csv.
void write_grid(const std::string& out_dir, const std::vector<GridRun>& runs, const std::vector<SpeedupRow>& rows);

} // namespace acd
