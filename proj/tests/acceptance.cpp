// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances, seeds and sizes are pinned here.

#include "acd/cli.hpp"
#include "acd/eso.hpp"
#include "acd/harness.hpp"
#include "acd/problems.hpp"
#include "acd/sampling.hpp"
#include "acd/solvers.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace acd;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t seed = 42;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Accumulates the first few failure reasons and a summary.
class Tally {
public:
    void check(bool ok, const std::string& what)
    {
        ++checks_;
        if (!ok) {
            if (failures_ < 3) {
                reasons_ << (failures_ ? "; " : "") << what;
            }
            ++failures_;
        }
    }

    Outcome outcome(const std::string& summary) const
    {
        std::ostringstream s;
        s << checks_ - failures_ << "/" << checks_ << " checks";
        if (!summary.empty()) {
            s << ", " << summary;
        }
        if (failures_) {
            s << "; failed: " << reasons_.str();
        }
        return Outcome{failures_ == 0, s.str()};
    }

private:
    int checks_ = 0;
    int failures_ = 0;
    std::ostringstream reasons_;
};

std::string fmt(double x, int precision = 4)
{
    std::ostringstream s;
    s << std::setprecision(precision) << x;
    return s.str();
}

// Random SPD matrix with strongly uneven diagonal.
SmoothnessMatrix random_matrix(Eigen::Index n, Rng& rng)
{
    const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(2 * n));
    Matrix a = test::random_spd(n, rng, rows, 0.01 + rng.uniform());
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s[i] = std::exp(rng.normal());
    }
    a = s.asDiagonal() * a * s.asDiagonal();
    return SmoothnessMatrix(SymMatrix(a));
}

Eigen::Index uniform_int(Rng& rng, Eigen::Index lo, Eigen::Index hi)
{
    return lo + std::min(hi - lo, static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(hi - lo + 1)));
}

std::vector<SmoothnessMatrix> random_grid(int count, Rng& rng)
{
    std::vector<SmoothnessMatrix> out;
    for (int k = 0; k < count; ++k) {
        out.push_back(random_matrix(uniform_int(rng, 3, 30), rng));
    }
    return out;
}

ProblemPtr random_quadratic(Eigen::Index n, Rng& rng)
{
    const SmoothnessMatrix m{SymMatrix(test::random_spd(n, rng, 0, 0.5))};
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        b[i] = rng.normal();
    }
    return quadratic_problem(m, b);
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

double std_error(const std::vector<double>& v)
{
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - mu) * (x - mu);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

bool certified(const SamplingLaw& law, const SmoothnessMatrix& m, const Vector& v)
{
    return verify_eso(law, m, v) >= -1e-9 * law.p().cwiseProduct(v).maxCoeff();
}

Outcome eso_certification()
{
    Rng rng(seed);
    Tally t;
    int runs = 0;
    for (const auto& m : random_grid(50, rng)) {
        const Eigen::Index n = m.n();
        const Eigen::Index tau = uniform_int(rng, 1, n);
        for (Variant v : {Variant::TauNice, Variant::IndepUniform, Variant::IndepSqrtImportance,
                          Variant::IndepAcdSolved, Variant::IndepCdSolved, Variant::Serial, Variant::Full}) {
            const SamplingLaw law = build_law(v, m, v == Variant::Serial ? 1.0 : static_cast<double>(tau));
            std::vector<std::pair<std::string, Vector>> params{{"accelerated", c_accelerated(law, m).v},
                                                               {"plain", c_plain(law, m).v}};
            if (v == Variant::TauNice) {
                params.emplace_back("tau-nice", eso_tau_nice(m, tau).v);
            }
            if (v == Variant::TauNice || v == Variant::IndepUniform || v == Variant::IndepCdSolved) {
                params.emplace_back("closed", eso_closed_form(law, m).v);
            }
            for (const auto& [name, vec] : params) {
                t.check(certified(law, m, vec), std::string(to_string(v)) + "/" + name + " n=" + std::to_string(n));
                ++runs;
            }
        }
    }
    return t.outcome(std::to_string(runs) + " (matrix, sampling, v) triples");
}

Outcome probability_matrices()
{
    Rng rng(seed);
    Tally t;
    constexpr long long draws = 200000;
    double worst_se = 0.0;
    for (Eigen::Index n : {4, 8}) {
        const SmoothnessMatrix m = random_matrix(n, rng);
        const Eigen::Index tau = n == 4 ? 2 : 3;
        for (int k = 1; k <= static_cast<int>(n); ++k) {
            const Matrix exact = test::enumerate_tau_nice(static_cast<int>(n), k);
            const Matrix analytic = probability_matrix(SamplingLaw::tau_nice(n, k)).matrix();
            t.check((exact - analytic).cwiseAbs().maxCoeff() <= 1e-12, "tau-nice enumeration");
        }
        for (Variant v : {Variant::TauNice, Variant::IndepUniform, Variant::IndepSqrtImportance,
                          Variant::IndepAcdSolved, Variant::IndepCdSolved, Variant::Serial, Variant::Full}) {
            const SamplingLaw law = build_law(v, m, v == Variant::Serial ? 1.0 : static_cast<double>(tau));
            const Matrix analytic = probability_matrix(law).matrix();
            if (is_independent(v)) {
                t.check((test::enumerate_independent(law.p()) - analytic).cwiseAbs().maxCoeff() <= 1e-12,
                        "independent enumeration");
            }
            const Matrix emp = empirical_probability_matrix(law, rng, draws).matrix();
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j <= i; ++j) {
                    const double p = analytic(i, j);
                    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
                    const double dev = std::abs(emp(i, j) - p);
                    if (se == 0.0) {
                        t.check(dev == 0.0, std::string(to_string(v)) + " deterministic entry");
                        continue;
                    }
                    worst_se = std::max(worst_se, dev / se);
                    t.check(dev <= 3.0 * se, std::string(to_string(v)) + " n=" + std::to_string(n) + " entry (" +
                                                 std::to_string(i) + "," + std::to_string(j) + ") " +
                                                 fmt(dev / se, 3) + " se");
                }
            }
        }
    }
    return t.outcome("largest deviation " + fmt(worst_se, 3) + " se");
}

Outcome closed_forms()
{
    Rng rng(seed + 1);
    Tally t;
    double worst = 0.0;
    for (const auto& m : random_grid(50, rng)) {
        const Eigen::Index n = m.n();
        for (Eigen::Index tau : {Eigen::Index{1}, Eigen::Index{2}, n / 2, n - 1}) {
            if (tau < 1) {
                continue;
            }
            const auto td = static_cast<double>(tau);
            const auto rel = [&](double a, double b) {
                const double r = std::abs(a - b) / std::max(std::abs(a), std::abs(b));
                worst = std::max(worst, r);
                return r <= 1e-9;
            };
            t.check(rel(c_plain(SamplingLaw::tau_nice(n, tau), m).c, closed_form_c(m, td, ClosedForm::C1)),
                    "C1 n=" + std::to_string(n));
            t.check(rel(c_plain(build_law(Variant::IndepUniform, m, td), m).c, closed_form_c(m, td, ClosedForm::C2)),
                    "C2 n=" + std::to_string(n));
            const SamplingLaw s3 = build_law(Variant::IndepCdSolved, m, td);
            t.check(rel(c_plain(s3, m).c, m.lambda_max() + *s3.delta()), "C3 n=" + std::to_string(n));
            t.check(rel(closed_form_c(m, td, ClosedForm::C3), m.lambda_max() + *s3.delta()), "C3 form");
            t.check(*s3.delta() <= m.trace() / td * (1.0 + 1e-12), "delta <= Trace(M)/tau");
        }
    }
    return t.outcome("worst relative mismatch " + fmt(worst, 3));
}

Outcome inequality_suites()
{
    Rng rng(seed + 2);
    Tally t;
    const double slack = 1.0 + 1e-9;
    for (const auto& m : random_grid(50, rng)) {
        const auto n = static_cast<double>(m.n());
        for (Eigen::Index tau_i : {Eigen::Index{2}, m.n() / 2, m.n() - 1}) {
            if (tau_i < 2 || tau_i >= m.n()) {
                continue;
            }
            const auto tau = static_cast<double>(tau_i);
            const double c1 = closed_form_c(m, tau, ClosedForm::C1);
            const double c2 = closed_form_c(m, tau, ClosedForm::C2);
            const double c3 = closed_form_c(m, tau, ClosedForm::C3);
            const double mid = (n - 1.0) * tau / (n * (tau - 1.0));
            t.check(c3 <= (2.0 * n - tau) / (n - tau) * c2 * slack, "CD c3 vs c2");
            t.check(c2 <= mid * c1 * slack, "CD c2 vs c1");
            t.check(mid * c1 <= 2.0 * c1 * slack, "CD factor <= 2");

            const SamplingLaw nice = SamplingLaw::tau_nice(m.n(), tau_i);
            const double c1a = c_accelerated(nice, m).c;
            const double c3a = c_accelerated(build_law(Variant::IndepAcdSolved, m, tau), m).c;
            t.check(c3a <= 2.0 * (2.0 * n - tau) * (n * tau + n - tau) / ((n - tau) * (n - tau)) * c1a * slack,
                    "ACD c3 vs c1");

            const double beta = (tau - 1.0) / (n - 1.0);
            t.check(c1a <= n * n / (tau * tau) * ((1.0 - beta) * m.diag().maxCoeff() + beta * m.lambda_max()) * slack,
                    "tau-nice accelerated bound");

            const double sigma = 0.5;
            for (Variant v : {Variant::TauNice, Variant::IndepUniform, Variant::IndepSqrtImportance,
                              Variant::IndepAcdSolved, Variant::IndepCdSolved}) {
                const SamplingLaw law = build_law(v, m, tau);
                const double c = c_accelerated(law, m).c;
                const double sum = m.diag().cwiseQuotient(law.p().cwiseAbs2()).sum();
                t.check(sum / n <= c * slack && c <= sum * slack, std::string(to_string(v)) + " sandwich");
                const double lower = rate_lower_bound(m, law.expected_size(), sigma);
                for (const EsoParams& e : {c_accelerated(law, m), c_plain(law, m)}) {
                    const double rate = std::sqrt(e.v.cwiseQuotient(law.p().cwiseAbs2()).maxCoeff() / sigma);
                    t.check(rate * slack >= lower, std::string(to_string(v)) + " rate lower bound");
                }
            }
        }
    }
    return t.outcome("");
}

Outcome example_separation()
{
    Tally t;
    const Eigen::Index n = 200;
    const Eigen::Index tau = 10;
    Vector d = Vector::Ones(n);
    d[0] = static_cast<double>(n);
    const SmoothnessMatrix m{SymMatrix::diagonal(d)};

    const double c1 = c_plain(SamplingLaw::tau_nice(n, tau), m).c;
    const double c1_form = closed_form_c(m, tau, ClosedForm::C1);
    t.check(std::abs(c1 - 4000.0) <= 1e-12 * 4000.0 && std::abs(c1_form - 4000.0) <= 1e-12 * 4000.0,
            "c1 = " + fmt(c1, 17));
    const double c3 = c_plain(build_law(Variant::IndepCdSolved, m, tau), m).c;
    t.check(c3 <= 239.9, "c3 = " + fmt(c3, 10));

    Rng rng(seed);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        b[i] = rng.normal();
    }
    const ProblemPtr q = quadratic_problem(m, b);
    SolverOptions opts;
    opts.budget_epochs = 1e5;
    opts.eps = 1e-8;
    opts.checkpoint_epochs = 0.1;
    std::map<Variant, std::vector<double>> epochs;
    for (Variant v : {Variant::TauNice, Variant::IndepCdSolved}) {
        const RunSetup setup = prepare_run(m, Method::Cd, v, tau, EsoChoice::Plain);
        for (std::uint64_t s = 1; s <= 10; ++s) {
            const SolverTrace tr = execute_run(q, setup, opts, s);
            const auto hit = first_reaching(tr, 1e-8);
            epochs[v].push_back(hit ? hit->epochs : std::numeric_limits<double>::infinity());
        }
    }
    const double s1 = median(epochs[Variant::TauNice]);
    const double s3 = median(epochs[Variant::IndepCdSolved]);
    t.check(s1 >= 5.0 * s3, "epochs S1 " + fmt(s1) + " vs S3 " + fmt(s3));
    return t.outcome("c1 " + fmt(c1, 10) + ", c3 " + fmt(c3, 6) + ", median epochs S1 " + fmt(s1) + " / S3 " +
                     fmt(s3) + " = " + fmt(s1 / s3, 3) + "x");
}

Outcome rate_envelope()
{
    Tally t;
    const ProblemPtr q = synthetic_generator(3, 100, seed);
    std::ostringstream summary;
    for (double tau : {1.0, 8.0}) {
        const SamplingLaw law = build_law(Variant::IndepAcdSolved, q->smoothness(), tau);
        const EsoParams eso = c_accelerated(law, q->smoothness());
        const StepParams sp = step_params(sigma_weighted(q->sigma(), law, eso.v), law, eso.v);

        SolverOptions popts;
        popts.budget_epochs = 1e12;
        popts.max_iterations = 1000;
        popts.checkpoint_iters = 100;
        std::map<long, std::vector<double>> ratio;
        for (std::uint64_t s = 1; s <= 20; ++s) {
            Rng rng(s);
            const SolverTrace tr = acd_run(q, law, eso, q->sigma(), popts, rng);
            const double p0 = *tr.checkpoints.front().potential;
            for (const auto& cp : tr.checkpoints) {
                ratio[cp.iter].push_back(*cp.potential / p0);
            }
        }
        for (long k : {100L, 500L, 1000L}) {
            const double env = 2.0 * std::pow(1.0 - sp.theta, static_cast<double>(k));
            t.check(mean(ratio[k]) <= env, "tau " + fmt(tau) + " k " + std::to_string(k) + ": mean P/P0 " +
                                               fmt(mean(ratio[k])) + " > " + fmt(env));
        }

        const double gap0 = q->value(Vector::Zero(100)) - *q->fstar();
        const double eps = 1e-6 * gap0;
        const double bound = 1.619 / std::sqrt(sp.sigma_w) * std::log(1.0 / 1e-6);
        SolverOptions gopts;
        gopts.budget_epochs = 1e12;
        gopts.max_iterations = static_cast<long>(std::ceil(3.0 * bound)) + 1;
        gopts.checkpoint_iters = 1;
        gopts.eps = eps;
        double worst = 0.0;
        for (std::uint64_t s = 1; s <= 20; ++s) {
            Rng rng(s);
            const SolverTrace tr = acd_run(q, law, eso, q->sigma(), gopts, rng);
            const auto hit = first_reaching(tr, eps);
            const double k = hit ? static_cast<double>(hit->iter) : std::numeric_limits<double>::infinity();
            worst = std::max(worst, k / bound);
            t.check(k <= 3.0 * bound, "tau " + fmt(tau) + " seed " + std::to_string(s) + " reached at " + fmt(k));
        }
        summary << "tau " << tau << ": bound " << fmt(bound, 5) << " iters, worst seed " << fmt(worst, 3)
                << "x bound; ";
    }
    return t.outcome(summary.str());
}

Vector reference_gd(const Matrix& m, const Vector& b, double l, int iters)
{
    Vector x = Vector::Zero(b.size());
    for (int k = 0; k < iters; ++k) {
        x -= (m * x - b) / l;
    }
    return x;
}

Vector reference_agd(const Matrix& m, const Vector& b, double l, double sigma, int iters)
{
    const double s = sigma / l;
    const double theta = (std::sqrt(s * s + 4.0 * s) - s) / 2.0;
    const double eta = 1.0 / theta;
    Vector y = Vector::Zero(b.size());
    Vector z = y;
    for (int k = 0; k < iters; ++k) {
        const Vector x = (1.0 - theta) * y + theta * z;
        const Vector g = m * x - b;
        y = x - g / l;
        z = (z + eta * s * x - (eta / l) * g) / (1.0 + eta * s);
    }
    return y;
}

Outcome reductions()
{
    Rng rng(seed);
    Tally t;
    double worst = 0.0;
    for (Eigen::Index n : {5, 12, 30}) {
        const ProblemPtr q = random_quadratic(n, rng);
        const Matrix& m = q->smoothness().matrix();
        const Vector b = m * *q->xstar();
        const double l = q->smoothness().lambda_max();
        const SamplingLaw full = SamplingLaw::full(n);
        Rng r1(seed);
        CdSolver cd(q, full, c_plain(full, q->smoothness()), r1);
        Rng r2(seed);
        AcdSolver acd(q, full, c_accelerated(full, q->smoothness()), q->sigma(), r2);
        for (int k = 0; k < 100; ++k) {
            cd.step();
            acd.step();
        }
        const double e_cd = (cd.state().x - reference_gd(m, b, l, 100)).cwiseAbs().maxCoeff();
        const double e_acd = (acd.state().y - reference_agd(m, b, l, q->sigma(), 100)).cwiseAbs().maxCoeff();
        worst = std::max({worst, e_cd, e_acd});
        t.check(e_cd <= 1e-10, "CD vs GD n=" + std::to_string(n));
        t.check(e_acd <= 1e-10, "ACD vs AGD n=" + std::to_string(n));
    }
    return t.outcome("max deviation " + fmt(worst, 3));
}

Outcome importance_recovery()
{
    Rng rng(seed + 3);
    Tally t;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const SmoothnessMatrix m = random_matrix(uniform_int(rng, 3, 30), rng);
        const double target = std::pow(m.diag().cwiseSqrt().sum(), 2);
        const SamplingLaw law = build_law(Variant::Serial, m, 1.0);
        const double c = c_accelerated(law, m).c;
        const double direct = accelerated_constant(law, m.diag());
        const double r = std::max(std::abs(c - target), std::abs(direct - target)) / target;
        worst = std::max(worst, r);
        t.check(r <= 1e-9, "n=" + std::to_string(m.n()) + " rel " + fmt(r, 3));
    }
    return t.outcome("worst relative error " + fmt(worst, 3));
}

Outcome expected_descent()
{
    Rng rng(seed + 4);
    Tally t;
    const std::vector<Variant> variants{Variant::TauNice, Variant::IndepUniform, Variant::IndepSqrtImportance,
                                        Variant::IndepAcdSolved, Variant::IndepCdSolved};
    double min_z = std::numeric_limits<double>::infinity();
    for (int qi = 0; qi < 5; ++qi) {
        const ProblemPtr q = random_quadratic(10, rng);
        const Variant v = variants[static_cast<std::size_t>(qi)];
        const SamplingLaw law = build_law(v, q->smoothness(), 3.0);
        const EsoParams eso = c_accelerated(law, q->smoothness());
        for (int pt = 0; pt < 5; ++pt) {
            Vector x(10);
            for (Eigen::Index i = 0; i < 10; ++i) {
                x[i] = rng.normal();
            }
            const Vector g = q->grad(x);
            const double bound = 0.5 * g.cwiseAbs2().cwiseProduct(law.p()).cwiseQuotient(eso.v).sum();
            const double fx = q->value(x);
            std::vector<double> dec;
            for (int d = 0; d < 10000; ++d) {
                dec.push_back(fx - q->value(coordinate_step(*q, eso.v, x, draw(law, rng))));
            }
            const double se = std_error(dec);
            min_z = std::min(min_z, (mean(dec) - bound) / se);
            t.check(mean(dec) >= bound - 3.0 * se, std::string(to_string(v)) + " point " + std::to_string(pt));
        }
    }
    return t.outcome("smallest margin " + fmt(min_z, 3) + " se");
}

// Median epochs to the target per (method, sampling) label.
std::map<std::string, double> grid_medians(const ProblemPtr& problem, double tau)
{
    std::map<std::string, double> out;
    ExperimentConfig cfg;
    cfg.taus = {tau};
    cfg.seeds.clear();
    for (std::uint64_t s = 1; s <= 10; ++s) {
        cfg.seeds.push_back(s);
    }
    cfg.budget_epochs = 30000;
    cfg.eps = 1e-8;
    cfg.checkpoint_epochs = 0.1;
    cfg.target_gap = 1e-8;
    for (Method method : {Method::Cd, Method::Acd}) {
        cfg.methods = {method};
        cfg.samplings = {Variant::TauNice, method == Method::Cd ? Variant::IndepCdSolved : Variant::IndepAcdSolved};
        for (const auto& row : speedup_table(run_grid(cfg, problem), cfg.target_gap)) {
            const std::string key = std::string(to_string(method)) + (row.variant == Variant::TauNice ? "-S1" : "-S3");
            out[key] = row.median_epochs ? *row.median_epochs : std::numeric_limits<double>::infinity();
        }
    }
    return out;
}

Outcome benchmark_ordering()
{
    Tally t;
    std::ostringstream summary;
    std::vector<std::pair<std::string, ProblemPtr>> problems;
    for (int type = 1; type <= 5; ++type) {
        problems.emplace_back("type " + std::to_string(type), synthetic_generator(type, 300, seed));
    }
    ProblemSpec logistic;
    logistic.type = "logistic";
    logistic.n = 300;
    logistic.rescale = true;
    logistic.seed = seed;
    problems.emplace_back("logistic", build_problem(logistic));

    for (std::size_t k = 0; k < problems.size(); ++k) {
        const auto& [name, problem] = problems[k];
        const auto med = grid_medians(problem, 10.0);
        for (const char* s : {"-S1", "-S3"}) {
            const double a = med.at(std::string("acd") + s);
            const double c = med.at(std::string("cd") + s);
            t.check(a <= c, name + " ACD" + s + " " + fmt(a) + " > CD" + s + " " + fmt(c));
        }
        const double s1 = med.at("acd-S1");
        const double s3 = med.at("acd-S3");
        if (k < 3) {
            t.check(s3 <= 1.05 * s1, name + " ACD-S3/ACD-S1 = " + fmt(s3 / s1, 4));
        }
        if (k == 3) {
            t.check(s1 >= 3.0 * s3, name + " ACD-S1/ACD-S3 = " + fmt(s1 / s3, 4));
        }
        summary << name << " [CD " << fmt(med.at("cd-S1")) << "/" << fmt(med.at("cd-S3")) << ", ACD " << fmt(s1)
                << "/" << fmt(s3) << "] ";
    }
    return t.outcome("median epochs S1/S3 " + summary.str());
}

Outcome gradient_checks()
{
    Rng rng(seed);
    Tally t;
    const ToyData toy = toy_classification_data(40, 12, rng);
    const ProblemPtr lg = logistic_problem(toy.a, toy.labels, logistic_lambda_mean_diag(toy.a));
    const ToyData dual = toy_classification_data(12, 20, rng);
    const Matrix a = dual.a.transpose();
    const ProblemPtr svm = svm_dual_problem(a, dual.labels, svm_lambda_max_diag_over_10(a, dual.labels));
    double worst = 0.0;
    for (const auto& p : {lg, svm}) {
        for (int k = 0; k < 20; ++k) {
            Vector x(p->n());
            for (Eigen::Index i = 0; i < p->n(); ++i) {
                x[i] = rng.normal();
            }
            if (p->has_projection()) {
                x = x.cwiseAbs();
            }
            const Vector g = p->grad(x);
            const Vector fd = test::fd_grad([&](const Vector& z) { return p->value(z); }, x);
            const double rel = (g - fd).norm() / g.norm();
            worst = std::max(worst, rel);
            t.check(rel <= 1e-5, p->name() + " point " + std::to_string(k) + " rel " + fmt(rel, 3));
        }
    }
    return t.outcome("worst relative error " + fmt(worst, 3));
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome determinism()
{
    Tally t;
    const fs::path dir = fs::temp_directory_path() / "acd_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream sink;
    const auto cli = [&](std::vector<std::string> args) { return run_cli(args, sink, sink); };

    const std::vector<std::vector<std::string>> solves{
        {"solve", "--problem", "synthetic:1", "--n", "40", "--method", "acd", "--tau", "4", "--budget-epochs", "20"},
        {"solve", "--problem", "logistic", "--n", "20", "--method", "cd", "--sampling", "tau-nice", "--tau", "3",
         "--budget-epochs", "20"},
        {"solve", "--problem", "svm-dual", "--n", "20", "--method", "acd", "--tau", "2", "--budget-epochs", "20"},
    };
    int idx = 0;
    for (auto args : solves) {
        const fs::path a = dir / ("a" + std::to_string(idx) + ".csv");
        const fs::path b = dir / ("b" + std::to_string(idx) + ".csv");
        ++idx;
        auto first = args;
        first.insert(first.end(), {"--seed", "7", "--out", a.string()});
        auto second = args;
        second.insert(second.end(), {"--seed", "7", "--out", b.string()});
        t.check(cli(first) == exit_ok && cli(second) == exit_ok, "solve exit code");
        t.check(!slurp(a).empty() && slurp(a) == slurp(b), "solve CSV differs");
        t.check(slurp(a.string() + ".meta") == slurp(b.string() + ".meta"), "solve metadata differs");
    }

    const fs::path cfg = dir / "grid.cfg";
    std::ofstream(cfg) << "problem = synthetic:2\nn = 30\nmethods = cd, acd\nsamplings = tau-nice, indep-acd\n"
                          "taus = 1, 4\nseeds = 1..3\nbudget-epochs = 15\ntarget-gap = 1e-4\n";
    const fs::path g1 = dir / "grid1";
    const fs::path g2 = dir / "grid2";
    t.check(cli({"bench", "--config", cfg.string(), "--out-dir", g1.string()}) == exit_ok, "bench exit code");
    t.check(cli({"bench", "--config", cfg.string(), "--out-dir", g2.string(), "--workers", "4"}) == exit_ok,
            "bench exit code");
    int files = 0;
    for (const auto& entry : fs::directory_iterator(g1)) {
        ++files;
        t.check(slurp(entry.path()) == slurp(g2 / entry.path().filename()),
                "bench file " + entry.path().filename().string() + " differs");
    }
    fs::remove_all(dir);
    return t.outcome(std::to_string(solves.size()) + " solve traces and " + std::to_string(files) + " bench files");
}

struct Criterion {
    int id;
    const char* name;
    double limit_s; // 0: no runtime limit
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "ESO certification", 30, eso_certification},
        {2, "probability-matrix oracle", 60, probability_matrices},
        {3, "closed-form cross-checks", 0, closed_forms},
        {4, "inequality suites", 0, inequality_suites},
        {5, "spike-matrix separation", 120, example_separation},
        {6, "ACD rate envelope", 120, rate_envelope},
        {7, "full-sampling reductions", 0, reductions},
        {8, "tau = 1 importance recovery", 0, importance_recovery},
        {9, "expected descent Monte Carlo", 0, expected_descent},
        {10, "qualitative benchmark ordering", 600, benchmark_ordering},
        {11, "gradient checks", 0, gradient_checks},
        {12, "determinism", 0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = Outcome{false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs >= c.limit_s) {
            o.pass = false;
            o.detail += "; runtime over " + fmt(c.limit_s) + " s";
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << c.id << "] " << c.name << ": " << o.detail
                  << " (" << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}
