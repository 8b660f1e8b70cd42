#include "acd/linalg.hpp"

#include "acd/error.hpp"
#include "acd/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace acd {

namespace {

void require_finite(const Matrix& a)
{
    if (!a.allFinite()) {
        throw InputError("matrix has non-finite entries");
    }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what)
{
    if (a != b) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw InputError(msg.str());
    }
}

// Deterministic start vector with no structure that could be orthogonal to the target.
Vector start_vector(Eigen::Index n)
{
    Rng rng(0x5eed);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = 1.0 + 0.5 * rng.uniform();
    }
    return x.normalized();
}

double dense_extreme(const Matrix& a, bool largest)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver failed to converge");
    }
    const Vector& ev = solver.eigenvalues();
    return largest ? ev[ev.size() - 1] : ev[0];
}

} // namespace

SymMatrix::SymMatrix(Matrix a) : a_(std::move(a))
{
    if (a_.rows() < 1 || a_.rows() != a_.cols()) {
        throw InputError("symmetric matrix must be square with n >= 1");
    }
    require_finite(a_);
    const double scale = a_.cwiseAbs().maxCoeff();
    const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
    if (asym > symmetry_tol * scale) {
        std::ostringstream msg;
        msg << "matrix is not symmetric (max |A - A^T| = " << asym << ")";
        throw InputError(msg.str());
    }
    a_ = (0.5 * (a_ + a_.transpose())).eval();
}

SymMatrix SymMatrix::identity(Eigen::Index n)
{
    return SymMatrix(Matrix::Identity(n, n));
}

SymMatrix SymMatrix::ones(Eigen::Index n)
{
    return SymMatrix(Matrix::Ones(n, n));
}

SymMatrix SymMatrix::diagonal(const Vector& d)
{
    return SymMatrix(Matrix(d.asDiagonal()));
}

DiagWeights::DiagWeights(Vector values) : d_(std::move(values))
{
    if (d_.size() < 1) {
        throw InputError("diagonal weights must be nonempty");
    }
    for (Eigen::Index i = 0; i < d_.size(); ++i) {
        if (!(d_[i] > 0.0) || !std::isfinite(d_[i])) {
            throw InputError("diagonal weights must be finite and positive");
        }
    }
}

DiagWeights DiagWeights::constant(Eigen::Index n, double value)
{
    return DiagWeights(Vector::Constant(n, value));
}

EigenEstimate power_lambda_max(const SymMatrix& a, double tol)
{
    if (!(tol > 0.0 && tol < 1.0)) {
        throw InputError("eigenvalue tolerance must lie in (0, 1)");
    }
    const Matrix& m = a.matrix();
    require_finite(m);
    const Eigen::Index n = a.n();

    // Gershgorin shift makes A + sI positive semidefinite so the dominant
    // eigenvalue of the shifted matrix is the largest one of A.
    double lower = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double radius = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
        lower = std::min(lower, m(i, i) - radius);
    }
    const double shift = std::max(0.0, -lower);

    EigenEstimate est;
    est.dense = false;
    Vector x = start_vector(n);
    Vector y(n);
    const int max_iters = static_cast<int>(10 * n);
    const double target = std::sqrt(tol);
    double mu = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        y.noalias() = m * x;
        mu = x.dot(y);
        const double scale = std::max(std::abs(mu), std::numeric_limits<double>::min());
        est.residual = (y - mu * x).norm() / scale;
        est.iterations = it;
        if (est.residual <= target) {
            break;
        }
        y += shift * x;
        const double norm = y.norm();
        if (norm == 0.0) {
            break;
        }
        x = y / norm;
    }
    est.value = mu;
    return est;
}

EigenEstimate lambda_max_estimate(const SymMatrix& a, const EigenOptions& opts)
{
    if (!(opts.tol > 0.0 && opts.tol < 1.0)) {
        throw InputError("eigenvalue tolerance must lie in (0, 1)");
    }
    require_finite(a.matrix());
    if (a.n() <= opts.dense_limit) {
        return EigenEstimate{dense_extreme(a.matrix(), true), 0.0, 0, true};
    }
    return power_lambda_max(a, opts.tol);
}

EigenEstimate lambda_min_estimate(const SymMatrix& a, const EigenOptions& opts)
{
    if (!(opts.tol > 0.0 && opts.tol < 1.0)) {
        throw InputError("eigenvalue tolerance must lie in (0, 1)");
    }
    require_finite(a.matrix());
    if (a.n() <= opts.dense_limit) {
        return EigenEstimate{dense_extreme(a.matrix(), false), 0.0, 0, true};
    }
    // lambda_min(A) = lambda_max(A) - lambda_max(lambda_max(A) I - A)
    const EigenEstimate top = power_lambda_max(a, opts.tol);
    Matrix flipped = -a.matrix();
    flipped.diagonal().array() += top.value;
    EigenEstimate est = power_lambda_max(SymMatrix(std::move(flipped)), opts.tol);
    est.value = top.value - est.value;
    est.iterations += top.iterations;
    est.residual = std::max(est.residual, top.residual);
    return est;
}

double lambda_max(const SymMatrix& a, double tol)
{
    return lambda_max_estimate(a, EigenOptions{tol}).value;
}

double lambda_min(const SymMatrix& a, double tol)
{
    return lambda_min_estimate(a, EigenOptions{tol}).value;
}

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b)
{
    require_same_dim(a.n(), b.n(), "hadamard");
    return SymMatrix(a.matrix().cwiseProduct(b.matrix()), SymMatrix::Trusted{});
}

Matrix diag_scale_general(const DiagWeights& d1, const Matrix& a, const DiagWeights& d2)
{
    require_same_dim(d1.n(), a.rows(), "diag_scale");
    require_same_dim(d2.n(), a.cols(), "diag_scale");
    return d1.values().asDiagonal() * a * d2.values().asDiagonal();
}

SymMatrix diag_scale(const DiagWeights& d1, const SymMatrix& a, const DiagWeights& d2)
{
    Matrix scaled = diag_scale_general(d1, a.matrix(), d2);
    if (d1.values() == d2.values()) {
        return SymMatrix(std::move(scaled), SymMatrix::Trusted{});
    }
    return SymMatrix(std::move(scaled));
}

SymMatrix read_matrix(std::istream& in)
{
    in.imbue(std::locale::classic());
    long long n = 0;
    if (!(in >> n) || n < 1) {
        throw InputError("matrix file: first token must be a positive dimension");
    }
    Matrix a(n, n);
    for (long long i = 0; i < n; ++i) {
        for (long long j = 0; j < n; ++j) {
            if (!(in >> a(i, j))) {
                std::ostringstream msg;
                msg << "matrix file: missing or malformed entry (" << i << ", " << j << ")";
                throw InputError(msg.str());
            }
        }
    }
    std::string extra;
    if (in >> extra) {
        throw InputError("matrix file: trailing data after " + std::to_string(n * n) + " entries");
    }
    return SymMatrix(std::move(a));
}

SymMatrix read_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open matrix file '" + path + "'");
    }
    try {
        return read_matrix(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_matrix(std::ostream& out, const SymMatrix& a)
{
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf << std::setprecision(17) << a.n() << '\n';
    for (Eigen::Index i = 0; i < a.n(); ++i) {
        for (Eigen::Index j = 0; j < a.n(); ++j) {
            buf << (j ? " " : "") << a(i, j);
        }
        buf << '\n';
    }
    out << buf.str();
}

} // namespace acd
