#include "acd/problems.hpp"

#include "acd/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace acd {

Vector ProblemOracle::grad(const Vector& x) const
{
    Vector g(n());
    for (Eigen::Index i = 0; i < n(); ++i) {
        g[i] = grad_coord(i, x);
    }
    return g;
}

void ProblemOracle::partial_grads(const Vector& x, std::span<const int> idx, std::span<double> out) const
{
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out[k] = grad_coord(idx[k], x);
    }
}

namespace {

// log(1 + exp(t)) without overflow.
double log1pexp(double t)
{
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t)
{
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

void check_labels(const Vector& labels)
{
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1.0 && labels[i] != -1.0) {
            throw InputError("labels must be -1 or +1");
        }
    }
}

class QuadraticProblem final : public ProblemOracle {
public:
    QuadraticProblem(std::string name, const SmoothnessMatrix& m, Vector b)
        : ProblemOracle(std::move(name), m, std::max(0.0, lambda_min(m.sym()))), b_(std::move(b))
    {
        const Matrix& a = smoothness().matrix();
        Vector xstar;
        if (sigma() > 0.0) {
            xstar = a.ldlt().solve(b_);
        } else {
            xstar = a.completeOrthogonalDecomposition().solve(b_);
        }
        const double fstar = -0.5 * b_.dot(xstar);
        set_solution(std::move(xstar), fstar);
    }

    double value(const Vector& x) const override
    {
        return 0.5 * x.dot(smoothness().matrix() * x) - b_.dot(x);
    }

    double grad_coord(Eigen::Index i, const Vector& x) const override
    {
        return smoothness().matrix().col(i).dot(x) - b_[i];
    }

    Vector grad(const Vector& x) const override { return smoothness().matrix() * x - b_; }

private:
    Vector b_;
};

class LogisticProblem final : public ProblemOracle {
public:
    LogisticProblem(const Matrix& a, Vector labels, double lambda)
        : ProblemOracle("logistic", make_smoothness(a, lambda), lambda), a_(a), b_(std::move(labels)), lambda_(lambda)
    {
        ReferenceResult ref = reference_solve(*this);
        set_solution(std::move(ref.x), ref.f);
    }

    static SmoothnessMatrix make_smoothness(const Matrix& a, double lambda)
    {
        const auto m = static_cast<double>(a.rows());
        Matrix mm = a.transpose() * a / (4.0 * m);
        mm.diagonal().array() += lambda;
        return SmoothnessMatrix(SymMatrix(std::move(mm)));
    }

    double value(const Vector& x) const override
    {
        const Vector margins = b_.cwiseProduct(a_ * x);
        double s = 0.0;
        for (Eigen::Index i = 0; i < margins.size(); ++i) {
            s += log1pexp(-margins[i]);
        }
        return s / static_cast<double>(a_.rows()) + 0.5 * lambda_ * x.squaredNorm();
    }

    double grad_coord(Eigen::Index j, const Vector& x) const override
    {
        const Vector weights = loss_weights(x);
        return a_.col(j).dot(weights) + lambda_ * x[j];
    }

    Vector grad(const Vector& x) const override
    {
        return a_.transpose() * loss_weights(x) + lambda_ * x;
    }

    void partial_grads(const Vector& x, std::span<const int> idx, std::span<double> out) const override
    {
        if (idx.empty()) {
            return;
        }
        const Vector weights = loss_weights(x);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            out[k] = a_.col(idx[k]).dot(weights) + lambda_ * x[idx[k]];
        }
    }

private:
    // d/dt_i of (1/m) sum log(1 + exp(-b_i t_i)) at t = A x.
    Vector loss_weights(const Vector& x) const
    {
        const Vector margins = b_.cwiseProduct(a_ * x);
        const auto m = static_cast<double>(a_.rows());
        Vector w(margins.size());
        for (Eigen::Index i = 0; i < margins.size(); ++i) {
            w[i] = -b_[i] * sigmoid(-margins[i]) / m;
        }
        return w;
    }

    Matrix a_;
    Vector b_;
    double lambda_;
};

class SvmDualProblem final : public ProblemOracle {
public:
    SvmDualProblem(const Matrix& a, const Vector& labels, double lambda)
        : ProblemOracle("svm-dual", make_smoothness(a * labels.asDiagonal(), lambda),
                        0.5 / static_cast<double>(a.cols())),
          at_(a * labels.asDiagonal()), gram_(at_.transpose() * at_), lambda_(lambda)
    {
        ReferenceResult ref = reference_solve(*this);
        set_solution(std::move(ref.x), ref.f);
    }

    static SmoothnessMatrix make_smoothness(const Matrix& at, double lambda)
    {
        const auto n = static_cast<double>(at.cols());
        Matrix mm = 2.0 / (lambda * n * n) * (at.transpose() * at);
        mm.diagonal().array() += 0.5 / n;
        return SmoothnessMatrix(SymMatrix(std::move(mm)));
    }

    double value(const Vector& x) const override
    {
        const auto n = static_cast<double>(x.size());
        return (at_ * x).squaredNorm() / (lambda_ * n * n) - x.sum() / n + x.squaredNorm() / (4.0 * n);
    }

    double grad_coord(Eigen::Index i, const Vector& x) const override
    {
        const auto n = static_cast<double>(x.size());
        return 2.0 / (lambda_ * n * n) * gram_.col(i).dot(x) - 1.0 / n + x[i] / (2.0 * n);
    }

    Vector grad(const Vector& x) const override
    {
        const auto n = static_cast<double>(x.size());
        return (2.0 / (lambda_ * n * n)) * (gram_ * x) + x / (2.0 * n) - Vector::Constant(x.size(), 1.0 / n);
    }

    bool has_projection() const noexcept override { return true; }
    void project(Vector& x) const override { x = x.cwiseMax(0.0); }

private:
    Matrix at_;
    Matrix gram_;
    double lambda_;
};

class EstimatedProblem final : public ProblemOracle {
public:
    EstimatedProblem(ProblemPtr base, SmoothnessMatrix m, double sigma)
        : ProblemOracle(base->name(), std::move(m), sigma), base_(std::move(base))
    {
        if (base_->xstar() && base_->fstar()) {
            set_solution(*base_->xstar(), *base_->fstar());
        }
    }

    double value(const Vector& x) const override { return base_->value(x); }
    double grad_coord(Eigen::Index i, const Vector& x) const override { return base_->grad_coord(i, x); }
    Vector grad(const Vector& x) const override { return base_->grad(x); }
    void partial_grads(const Vector& x, std::span<const int> idx, std::span<double> out) const override
    {
        base_->partial_grads(x, idx, out);
    }
    bool has_projection() const noexcept override { return base_->has_projection(); }
    void project(Vector& x) const override { base_->project(x); }

private:
    ProblemPtr base_;
};

} // namespace

ProblemPtr quadratic_problem(const SmoothnessMatrix& m, const Vector& b)
{
    if (b.size() != m.n()) {
        throw InputError("quadratic: b and M dimensions differ");
    }
    if (!(m.diag().array() > 0.0).all()) {
        throw InputError("quadratic: M needs a positive diagonal");
    }
    return std::make_shared<QuadraticProblem>("quadratic", m, b);
}

SymMatrix synthetic_matrix(int type, Eigen::Index n, Rng& rng)
{
    if (n < 1) {
        throw InputError("synthetic problem needs n >= 1");
    }
    const auto gaussian = [&rng](Eigen::Index rows, Eigen::Index cols) {
        Matrix a(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                a(i, j) = rng.normal();
            }
        }
        return a;
    };
    const auto require_even = [n, type] {
        if (n % 2 != 0) {
            throw InputError("synthetic type " + std::to_string(type) + " needs an even n");
        }
    };
    Matrix m;
    switch (type) {
    case 1: {
        require_even();
        const Matrix a = gaussian(n / 2, n);
        m = a.transpose() * a;
        m.diagonal().array() += 1.0;
        break;
    }
    case 2: {
        const Matrix a = gaussian(2 * n, n);
        m = a.transpose() * a;
        m.diagonal().array() += 1.0;
        break;
    }
    case 3:
        m = Vector::LinSpaced(n, 1.0, static_cast<double>(n)).asDiagonal();
        break;
    case 4:
        m = Matrix::Zero(n, n);
        m.topLeftCorner(n - 1, n - 1).setOnes();
        m(n - 1, n - 1) = static_cast<double>(n);
        m.diagonal().array() += 1.0;
        break;
    case 5: {
        require_even();
        const Matrix a = gaussian(n / 2, n);
        const Vector d = Vector::LinSpaced(n / 2, 1.0, static_cast<double>(n / 2)) / std::sqrt(static_cast<double>(n));
        m = a.transpose() * d.asDiagonal() * a;
        m.diagonal().array() += 1.0;
        break;
    }
    default:
        throw InputError("synthetic problem type must be 1..5, got " + std::to_string(type));
    }
    return SymMatrix(std::move(m));
}

ProblemPtr synthetic_generator(int type, Eigen::Index n, std::uint64_t seed)
{
    Rng rng(seed);
    SmoothnessMatrix m(synthetic_matrix(type, n, rng));
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        b[i] = rng.normal();
    }
    return std::make_shared<QuadraticProblem>("synthetic:" + std::to_string(type), m, std::move(b));
}

ProblemPtr logistic_problem(const Matrix& a, const Vector& labels, double lambda)
{
    if (a.rows() == 0 || a.cols() == 0) {
        throw InputError("logistic: empty data matrix");
    }
    if (labels.size() != a.rows()) {
        throw InputError("logistic: need one label per data row");
    }
    if (!(lambda > 0.0)) {
        throw InputError("logistic: lambda must be positive");
    }
    check_labels(labels);
    return std::make_shared<LogisticProblem>(a, labels, lambda);
}

ProblemPtr svm_dual_problem(const Matrix& a, const Vector& labels, double lambda)
{
    if (a.rows() == 0 || a.cols() == 0) {
        throw InputError("svm-dual: empty data matrix");
    }
    if (labels.size() != a.cols()) {
        throw InputError("svm-dual: need one label per data column");
    }
    if (!(lambda > 0.0)) {
        throw InputError("svm-dual: lambda must be positive");
    }
    check_labels(labels);
    return std::make_shared<SvmDualProblem>(a, labels, lambda);
}

SmoothnessMatrix estimate_smoothness_diag(const Vector& exact_diag, double factor)
{
    if (!(factor > 0.0)) {
        throw InputError("smoothness estimate factor must be positive");
    }
    return SmoothnessMatrix(SymMatrix::diagonal(factor * exact_diag), true);
}

ProblemPtr with_estimates(ProblemPtr base, SmoothnessMatrix m, double sigma)
{
    if (m.n() != base->n()) {
        throw InputError("estimated smoothness matrix has the wrong dimension");
    }
    return std::make_shared<EstimatedProblem>(std::move(base), std::move(m), sigma);
}

Matrix rescale_corrupt(const Matrix& a, Rng& rng)
{
    Vector r(a.rows());
    Vector c(a.cols());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        r[i] = rng.uniform();
    }
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        c[j] = rng.uniform();
    }
    return r.asDiagonal() * a * c.asDiagonal();
}

double logistic_lambda_mean_diag(const Matrix& a)
{
    return a.colwise().squaredNorm().mean() / (4.0 * static_cast<double>(a.rows()));
}

double svm_lambda_max_diag_over_10(const Matrix& a, const Vector& labels)
{
    // M_ii = 2 g / (lambda n^2) + 1/(2n) with g = max_i ||A~_i||^2; solving
    // 10 lambda = M_ii(lambda) gives 10 lambda^2 - lambda/(2n) - 2g/n^2 = 0.
    const auto n = static_cast<double>(a.cols());
    const double g = (a * labels.asDiagonal()).colwise().squaredNorm().maxCoeff();
    const double qb = -0.5 / n;
    const double qc = -2.0 * g / (n * n);
    return (-qb + std::sqrt(qb * qb - 40.0 * qc)) / 20.0;
}

ReferenceResult reference_solve(const ProblemOracle& problem, double target_gap, long max_iterations)
{
    const Eigen::Index n = problem.n();
    const double L = problem.smoothness().lambda_max();
    const double mu = problem.sigma();
    if (!(mu > 0.0)) {
        throw ConfigError("reference solve needs sigma > 0");
    }
    const double q = std::sqrt(mu / L);
    const double momentum = (1.0 - q) / (1.0 + q);
    const bool projected = problem.has_projection();

    Vector x = Vector::Zero(n);
    Vector y_prev = x;
    ReferenceResult out;
    for (long k = 1; k <= max_iterations; ++k) {
        const Vector g = problem.grad(x);
        Vector y = x - g / L;
        double bound;
        if (projected) {
            problem.project(y);
            // Gradient mapping G = L (x - y).
            bound = (L * (x - y)).squaredNorm() / (2.0 * mu);
        } else {
            bound = g.squaredNorm() / (2.0 * mu);
        }
        if (!y.allFinite()) {
            throw NumericalError("reference solve diverged");
        }
        out.iterations = k;
        if (bound <= target_gap) {
            out.x = projected ? y : x;
            out.f = problem.value(out.x);
            out.gap_bound = bound;
            return out;
        }
        x = y + momentum * (y - y_prev);
        if (projected) {
            problem.project(x);
        }
        y_prev = std::move(y);
    }
    std::ostringstream msg;
    msg << "reference solve did not reach gap " << target_gap << " in " << max_iterations << " iterations";
    throw NumericalError(msg.str());
}

ToyData toy_classification_data(Eigen::Index m, Eigen::Index n, Rng& rng)
{
    ToyData data;
    data.a.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            data.a(i, j) = rng.normal();
        }
    }
    Vector u(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        u[j] = rng.normal();
    }
    data.labels.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double score = data.a.row(i).dot(u) + 0.1 * rng.normal();
        data.labels[i] = score >= 0.0 ? 1.0 : -1.0;
    }
    return data;
}

} // namespace acd
