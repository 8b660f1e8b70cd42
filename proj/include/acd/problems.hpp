#pragma once

#include "acd/linalg.hpp"
#include "acd/rng.hpp"
#include "acd/smoothness.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>

namespace acd {

/*
    Objective oracle for min_x f(x) with f sigma-convex and M-smooth.

    Immutable after construction; all evaluation methods are const and
    re-entrant. Problems with a projection (constraint set) apply it after
    each solver step; the smooth part is what value/grad describe.
*/
class ProblemOracle {
public:
    virtual ~ProblemOracle() = default;

    Eigen::Index n() const noexcept { return smoothness_.n(); }
    const SmoothnessMatrix& smoothness() const noexcept { return smoothness_; }
    double sigma() const noexcept { return sigma_; }
    const std::optional<double>& fstar() const noexcept { return fstar_; }
    const std::optional<Vector>& xstar() const noexcept { return xstar_; }
    const std::string& name() const noexcept { return name_; }

    virtual double value(const Vector& x) const = 0;
    virtual double grad_coord(Eigen::Index i, const Vector& x) const = 0;
    virtual Vector grad(const Vector& x) const;
    // out[k] = d f / d x_{idx[k]} at x.
    virtual void partial_grads(const Vector& x, std::span<const int> idx, std::span<double> out) const;

    virtual bool has_projection() const noexcept { return false; }
    virtual void project(Vector& /*x*/) const {}

protected:
    ProblemOracle(std::string name, SmoothnessMatrix m, double sigma)
        : name_(std::move(name)), smoothness_(std::move(m)), sigma_(sigma) {}

    void set_solution(Vector xstar, double fstar)
    {
        xstar_ = std::move(xstar);
        fstar_ = fstar;
    }

private:
    std::string name_;
    SmoothnessMatrix smoothness_;
    double sigma_;
    std::optional<double> fstar_;
    std::optional<Vector> xstar_;
};

using ProblemPtr = std::shared_ptr<const ProblemOracle>;

// f(x) = 1/2 x^T M x - b^T x with sigma = lambda_min(M) and x* from M x* = b.
ProblemPtr quadratic_problem(const SmoothnessMatrix& m, const Vector& b);

/*
    Synthetic quadratics, M by type (b ~ N(0, I) in all cases):
      1: A^T A + I,   A is (n/2) x n standard normal
      2: A^T A + I,   A is 2n x n standard normal
      3: Diag(1, ..., n)
      4: A + I,       A_nn = n, leading (n-1) x (n-1) block all ones, zeros elsewhere
      5: A^T D A + I, A is (n/2) x n standard normal, D = Diag(1, ..., n/2) / sqrt(n)
*/
ProblemPtr synthetic_generator(int type, Eigen::Index n, std::uint64_t seed);
SymMatrix synthetic_matrix(int type, Eigen::Index n, Rng& rng);

/*
    f(x) = (1/m) sum_i log(1 + exp(-b_i a_i^T x)) + (lambda/2) ||x||^2 with
    M = A^T A / (4m) + lambda I and sigma = lambda. The reference optimum is
    computed on construction.
*/
ProblemPtr logistic_problem(const Matrix& a, const Vector& labels, double lambda);

/*
    Dual of the squared-hinge SVM on the nonnegative orthant:
      f(x) = 1/(lambda n^2) ||A~ x||^2 - (1/n) sum x_i + 1/(4n) ||x||^2,
    A~ = A Diag(b) (A is m x n, one column per example). M = 2/(lambda n^2) A~^T A~ + I/(2n),
    sigma = 1/(2n), projection max(0, .).
*/
ProblemPtr svm_dual_problem(const Matrix& a, const Vector& labels, double lambda);

// Diag(factor * exact_diag), flagged as an estimate.
SmoothnessMatrix estimate_smoothness_diag(const Vector& exact_diag, double factor);

// Same objective with replaced smoothness matrix and sigma (for estimated-parameter runs).
ProblemPtr with_estimates(ProblemPtr base, SmoothnessMatrix m, double sigma);

// A'_ij = r_i c_j A_ij with r, c uniform on [0, 1); rows drawn first.
Matrix rescale_corrupt(const Matrix& a, Rng& rng);

// lambda = mean diagonal of A^T A / (4m).
double logistic_lambda_mean_diag(const Matrix& a);

// Positive lambda with lambda = max_i M_ii(lambda) / 10 for the SVM dual smoothness matrix.
double svm_lambda_max_diag_over_10(const Matrix& a, const Vector& labels);

struct ReferenceResult {
    Vector x;
    double f = 0.0;
    // Certified (unconstrained) or gradient-mapping based bound on f(x) - f*.
    double gap_bound = 0.0;
    long iterations = 0;
};

// Deterministic accelerated full-gradient method (projected when the problem has a projection).
ReferenceResult reference_solve(const ProblemOracle& problem, double target_gap = 1e-13,
                                long max_iterations = 2000000);

// Gaussian toy data: rows a_i ~ N(0, I), labels sign(a_i^T u + 0.1 noise) for a random u.
struct ToyData {
    Matrix a;
    Vector labels;
};
ToyData toy_classification_data(Eigen::Index m, Eigen::Index n, Rng& rng);

} // namespace acd
