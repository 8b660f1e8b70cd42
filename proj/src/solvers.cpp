#include "acd/solvers.hpp"

#include "acd/error.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace acd {

namespace {

Vector initial_point(const ProblemOracle& problem, const std::optional<Vector>& x0)
{
    if (!x0) {
        return Vector::Zero(problem.n());
    }
    if (x0->size() != problem.n()) {
        throw InputError("initial point has the wrong dimension");
    }
    return *x0;
}

void check_dims(const ProblemOracle& problem, const SamplingLaw& law, const EsoParams& eso)
{
    if (law.n() != problem.n() || eso.v.size() != problem.n()) {
        throw InputError("problem, sampling and ESO dimensions differ");
    }
    if (!(eso.v.array() > 0.0).all()) {
        throw ConfigError("ESO parameters must be positive");
    }
}

void check_grads(const std::vector<double>& g, long k)
{
    for (double gi : g) {
        if (!std::isfinite(gi)) {
            std::ostringstream msg;
            msg << "non-finite partial derivative at iteration " << k;
            throw NumericalError(msg.str());
        }
    }
}

TraceMeta base_meta(const ProblemOracle& problem, const SamplingLaw& law, const EsoParams& eso, const Rng& rng)
{
    TraceMeta meta;
    meta.problem = problem.name();
    meta.n = problem.n();
    meta.sampling = std::string(to_string(law.variant()));
    meta.tau = law.tau();
    meta.expected_size = law.expected_size();
    meta.eso_mode = std::string(to_string(eso.mode));
    meta.c = eso.c;
    meta.p_min = law.p().minCoeff();
    meta.p_max = law.p().maxCoeff();
    meta.v_min = eso.v.minCoeff();
    meta.v_max = eso.v.maxCoeff();
    meta.delta = law.delta();
    meta.seed = rng.seed();
    meta.estimated = problem.smoothness().is_estimate();
    return meta;
}

void require_certified(const ProblemOracle& problem, const SamplingLaw& law, const EsoParams& eso,
                       const SolverOptions& options)
{
    if (!options.verify_eso || problem.smoothness().is_estimate()) {
        return;
    }
    const double gap = verify_eso(law, problem.smoothness(), eso.v);
    if (!eso_certified(gap, law, eso.v)) {
        std::ostringstream msg;
        msg << "ESO parameters fail the certificate: lambda_min(Diag(p o v) - P o M) = " << gap;
        throw ConfigError(msg.str());
    }
}

/*
    Shared driver: checkpoints at iteration 0, then on the configured
    cadence, stops on budget, iteration cap, or gap <= eps.
*/
template <class Solver, class Record>
void drive(Solver& solver, const ProblemOracle& problem, const SolverOptions& options, Record record,
           SolverTrace& trace)
{
    const auto n = static_cast<double>(problem.n());
    const auto start = std::chrono::steady_clock::now();
    const auto budget_evals = options.budget_epochs * n;
    double next_epoch = options.checkpoint_epochs;

    const auto checkpoint = [&] {
        Checkpoint cp = record(solver.state());
        cp.iter = solver.state().k;
        cp.coord_evals = solver.state().coord_evals;
        cp.epochs = static_cast<double>(cp.coord_evals) / n;
        if (options.record_time) {
            cp.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
        if (!std::isfinite(cp.f)) {
            std::ostringstream msg;
            msg << "objective became non-finite at iteration " << cp.iter;
            throw NumericalError(msg.str());
        }
        trace.checkpoints.push_back(cp);
        return cp.gap && options.eps > 0.0 && *cp.gap <= options.eps;
    };

    if (checkpoint()) {
        return;
    }
    while (true) {
        const auto& st = solver.state();
        if (static_cast<double>(st.coord_evals) >= budget_evals ||
            (options.max_iterations > 0 && st.k >= options.max_iterations)) {
            if (trace.checkpoints.back().iter != st.k) {
                checkpoint();
            }
            return;
        }
        solver.step();
        bool due;
        if (options.checkpoint_iters > 0) {
            due = solver.state().k % options.checkpoint_iters == 0;
        } else {
            due = static_cast<double>(solver.state().coord_evals) >= next_epoch * n;
            while (static_cast<double>(solver.state().coord_evals) >= next_epoch * n) {
                next_epoch += options.checkpoint_epochs;
            }
        }
        if (due && checkpoint()) {
            return;
        }
    }
}

} // namespace

PotentialRecord potential_from_parts(double fgap, double znorm, double theta)
{
    PotentialRecord rec;
    rec.fgap = fgap;
    rec.znorm = znorm;
    rec.pk = fgap / (theta * theta) + znorm / (2.0 * (1.0 - theta));
    return rec;
}

PotentialRecord potential(const SolverState& state, const ProblemOracle& problem, const StepParams& step)
{
    if (!problem.fstar() || !problem.xstar()) {
        throw ConfigError("potential needs the optimal solution of the problem");
    }
    const double fgap = problem.value(state.y) - *problem.fstar();
    const Vector dz = state.z - *problem.xstar();
    const double znorm = step.w.dot(dz.cwiseAbs2());
    return potential_from_parts(fgap, znorm, step.theta);
}

CdSolver::CdSolver(ProblemPtr problem, SamplingLaw law, EsoParams eso, Rng& rng, std::optional<Vector> x0,
                   bool project)
    : problem_(std::move(problem)), law_(std::move(law)), eso_(std::move(eso)), rng_(&rng), sampler_(law_),
      project_(project)
{
    check_dims(*problem_, law_, eso_);
    state_.x = initial_point(*problem_, x0);
    if (project_) {
        problem_->project(state_.x);
    }
}

void CdSolver::step()
{
    sampler_.draw(*rng_, sample_);
    grads_.resize(sample_.size());
    problem_->partial_grads(state_.x, sample_, grads_);
    check_grads(grads_, state_.k);
    for (std::size_t k = 0; k < sample_.size(); ++k) {
        const int i = sample_[k];
        state_.x[i] -= grads_[k] / eso_.v[i];
    }
    if (project_) {
        problem_->project(state_.x);
    }
    state_.coord_evals += static_cast<long>(sample_.size());
    ++state_.k;
}

AcdSolver::AcdSolver(ProblemPtr problem, SamplingLaw law, EsoParams eso, double sigma, Rng& rng,
                     std::optional<Vector> x0, bool project)
    : problem_(std::move(problem)), law_(std::move(law)), eso_(std::move(eso)), rng_(&rng), sampler_(law_),
      project_(project)
{
    check_dims(*problem_, law_, eso_);
    step_ = acd::step_params(sigma_weighted(sigma, law_, eso_.v), law_, eso_.v);
    // eta / (p_i w_i) with w_i = v_i / p_i^2 simplifies to eta p_i / v_i.
    z_coef_ = step_.eta * law_.p().cwiseQuotient(eso_.v);
    state_.x = initial_point(*problem_, x0);
    if (project_) {
        problem_->project(state_.x);
    }
    state_.y = state_.x;
    state_.z = state_.x;
}

void AcdSolver::step()
{
    const double theta = step_.theta;
    const double mix = step_.eta * step_.sigma_w;
    const double scale = 1.0 / (1.0 + mix);

    state_.x = (1.0 - theta) * state_.y + theta * state_.z;
    sampler_.draw(*rng_, sample_);
    grads_.resize(sample_.size());
    problem_->partial_grads(state_.x, sample_, grads_);
    check_grads(grads_, state_.k);

    state_.y = state_.x;
    state_.z = scale * (state_.z + mix * state_.x);
    for (std::size_t k = 0; k < sample_.size(); ++k) {
        const int i = sample_[k];
        state_.y[i] -= grads_[k] / eso_.v[i];
        state_.z[i] -= scale * z_coef_[i] * grads_[k];
    }
    if (project_) {
        problem_->project(state_.y);
        problem_->project(state_.z);
    }
    state_.coord_evals += static_cast<long>(sample_.size());
    ++state_.k;
}

Vector coordinate_step(const ProblemOracle& problem, const Vector& v, const Vector& x, const std::vector<int>& s)
{
    std::vector<double> g(s.size());
    problem.partial_grads(x, s, g);
    Vector y = x;
    for (std::size_t k = 0; k < s.size(); ++k) {
        y[s[k]] -= g[k] / v[s[k]];
    }
    return y;
}

SolverTrace cd_run(ProblemPtr problem, const SamplingLaw& law, const EsoParams& eso, const SolverOptions& options,
                   Rng& rng)
{
    check_dims(*problem, law, eso);
    require_certified(*problem, law, eso, options);
    SolverTrace trace;
    trace.meta = base_meta(*problem, law, eso, rng);
    trace.meta.method = "cd";

    CdSolver solver(problem, law, eso, rng, options.x0, problem->has_projection());
    const auto& fstar = problem->fstar();
    drive(
        solver, *problem, options,
        [&](const SolverState& st) {
            Checkpoint cp;
            cp.f = problem->value(st.x);
            if (fstar) {
                cp.gap = cp.f - *fstar;
            }
            return cp;
        },
        trace);
    return trace;
}

namespace {

SolverTrace accelerated_run(ProblemPtr problem, const SamplingLaw& law, const EsoParams& eso, double sigma,
                            const SolverOptions& options, Rng& rng, bool project)
{
    check_dims(*problem, law, eso);
    require_certified(*problem, law, eso, options);
    SolverTrace trace;
    trace.meta = base_meta(*problem, law, eso, rng);
    trace.meta.method = "acd";
    trace.meta.experimental = project;

    AcdSolver solver(problem, law, eso, sigma, rng, options.x0, project);
    trace.meta.theta = solver.step_params().theta;
    trace.meta.sigma_w = solver.step_params().sigma_w;
    const auto& fstar = problem->fstar();
    const bool track_potential = fstar && problem->xstar();
    drive(
        solver, *problem, options,
        [&](const SolverState& st) {
            Checkpoint cp;
            cp.f = problem->value(st.y);
            if (fstar) {
                cp.gap = cp.f - *fstar;
            }
            if (track_potential) {
                cp.potential = potential(st, *problem, solver.step_params()).pk;
            }
            return cp;
        },
        trace);
    return trace;
}

} // namespace

SolverTrace acd_run(ProblemPtr problem, const SamplingLaw& law, const EsoParams& eso, double sigma,
                    const SolverOptions& options, Rng& rng)
{
    return accelerated_run(std::move(problem), law, eso, sigma, options, rng, false);
}

SolverTrace prox_acd_run(ProblemPtr problem, const SamplingLaw& law, const EsoParams& eso, double sigma,
                         const SolverOptions& options, Rng& rng)
{
    const bool project = problem->has_projection();
    return accelerated_run(std::move(problem), law, eso, sigma, options, rng, project);
}

std::optional<Checkpoint> first_reaching(const SolverTrace& trace, double target_gap)
{
    for (const auto& cp : trace.checkpoints) {
        if (cp.gap && *cp.gap <= target_gap) {
            return cp;
        }
    }
    return std::nullopt;
}

} // namespace acd
