#pragma once

#include "acd/eso.hpp"
#include "acd/problems.hpp"
#include "acd/rng.hpp"
#include "acd/sampling.hpp"

#include <optional>
#include <string>
#include <vector>

namespace acd {

struct Checkpoint {
    long iter = 0;
    double epochs = 0.0;
    long coord_evals = 0;
    double f = 0.0;
    std::optional<double> gap;
    std::optional<double> potential;
    std::optional<double> wall_ms;
};

// Resolved parameters of a run, echoed next to the checkpoints.
struct TraceMeta {
    std::string problem;
    Eigen::Index n = 0;
    std::string method;
    std::string sampling;
    double tau = 0.0;
    double expected_size = 0.0;
    std::string eso_mode;
    double c = 0.0;
    double p_min = 0.0;
    double p_max = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
    std::optional<double> delta;
    std::optional<double> theta;
    std::optional<double> sigma_w;
    std::uint64_t seed = 0;
    bool estimated = false;
    bool experimental = false;
};

struct SolverTrace {
    std::vector<Checkpoint> checkpoints;
    TraceMeta meta;
    // "ok", or "aborted: <reason>" when the grid recorded a failed run.
    std::string status = "ok";
};

struct SolverOptions {
    // Work budget in epochs (n coordinate-gradient evaluations each).
    double budget_epochs = 100.0;
    // Hard cap on iterations; 0 means none.
    long max_iterations = 0;
    // Stop at the first checkpoint with gap <= eps (needs f*); 0 disables.
    double eps = 0.0;
    double checkpoint_epochs = 1.0;
    // When positive, checkpoint every this many iterations instead.
    long checkpoint_iters = 0;
    bool record_time = false;
    // Reject an ESO that fails verify_eso on a problem with exact smoothness.
    bool verify_eso = true;
    std::optional<Vector> x0;
};

struct SolverState {
    Vector x;
    Vector y;
    Vector z;
    long k = 0;
    long coord_evals = 0;
};

// P^k = (f(y^k) - f*) / theta^2 + ||z^k - x*||_w^2 / (2 (1 - theta))
struct PotentialRecord {
    double pk = 0.0;
    double fgap = 0.0;
    double znorm = 0.0;
};

PotentialRecord potential(const SolverState& state, const ProblemOracle& problem, const StepParams& step);
PotentialRecord potential_from_parts(double fgap, double znorm, double theta);

/*
    Minibatch coordinate descent:
        x_i <- x_i - grad_i f(x) / v_i   for i in S,
    with every partial derivative taken at the pre-update point.
*/
class CdSolver {
public:
    CdSolver(ProblemPtr problem, SamplingLaw law, EsoParams eso, Rng& rng, std::optional<Vector> x0 = {},
             bool project = false);

    void step();
    const SolverState& state() const noexcept { return state_; }
    const std::vector<int>& last_sample() const noexcept { return sample_; }

private:
    ProblemPtr problem_;
    SamplingLaw law_;
    EsoParams eso_;
    Rng* rng_;
    Sampler sampler_;
    bool project_;
    SolverState state_;
    std::vector<int> sample_;
    std::vector<double> grads_;
};

/*
    Accelerated coordinate descent with arbitrary sampling:
        x <- (1 - theta) y + theta z
        y <- x - sum_{i in S} grad_i f(x) / v_i e_i
        z <- (z + eta sigma_w x - sum_{i in S} (eta p_i / v_i) grad_i f(x) e_i) / (1 + eta sigma_w)
    Each sampled partial derivative is evaluated once and used in both
    updates. With a projection, y and z are projected after every step.
*/
class AcdSolver {
public:
    AcdSolver(ProblemPtr problem, SamplingLaw law, EsoParams eso, double sigma, Rng& rng,
              std::optional<Vector> x0 = {}, bool project = false);

    void step();
    const SolverState& state() const noexcept { return state_; }
    const StepParams& step_params() const noexcept { return step_; }
    const std::vector<int>& last_sample() const noexcept { return sample_; }

private:
    ProblemPtr problem_;
    SamplingLaw law_;
    EsoParams eso_;
    StepParams step_;
    Rng* rng_;
    Sampler sampler_;
    bool project_;
    SolverState state_;
    Vector z_coef_;
    std::vector<int> sample_;
    std::vector<double> grads_;
};

// y = x - sum_{i in S} grad_i f(x) / v_i e_i  (one CD step from x).
Vector coordinate_step(const ProblemOracle& problem, const Vector& v, const Vector& x, const std::vector<int>& s);

SolverTrace cd_run(ProblemPtr problem, const SamplingLaw& law, const EsoParams& eso, const SolverOptions& options,
                   Rng& rng);
SolverTrace acd_run(ProblemPtr problem, const SamplingLaw& law, const EsoParams& eso, double sigma,
                    const SolverOptions& options, Rng& rng);
// acd_run with the problem's projection applied to y and z; flagged experimental.
SolverTrace prox_acd_run(ProblemPtr problem, const SamplingLaw& law, const EsoParams& eso, double sigma,
                         const SolverOptions& options, Rng& rng);

// First checkpoint with gap <= target, if any.
std::optional<Checkpoint> first_reaching(const SolverTrace& trace, double target_gap);

} // namespace acd
