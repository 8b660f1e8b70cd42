#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>

namespace acd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class DiagWeights;

/*
    Dense symmetric matrix.

    The constructor accepts any square matrix whose asymmetry is at most
    1e-12 relative to its largest entry, stores the symmetrized (A + A^T)/2,
    and rejects everything else. Non-finite entries are rejected as well.
*/
class SymMatrix {
public:
    static constexpr double symmetry_tol = 1e-12;

    explicit SymMatrix(Matrix a);

    static SymMatrix identity(Eigen::Index n);
    static SymMatrix ones(Eigen::Index n);
    static SymMatrix diagonal(const Vector& d);

    Eigen::Index n() const noexcept { return a_.rows(); }
    const Matrix& matrix() const noexcept { return a_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }
    Vector diag() const { return a_.diagonal(); }

private:
    struct Trusted {};
    SymMatrix(Matrix a, Trusted) : a_(std::move(a)) {}
    friend SymMatrix hadamard(const SymMatrix&, const SymMatrix&);
    friend SymMatrix diag_scale(const DiagWeights&, const SymMatrix&, const DiagWeights&);

    Matrix a_;
};

// Strictly positive diagonal weights D = Diag(values).
class DiagWeights {
public:
    explicit DiagWeights(Vector values);

    static DiagWeights constant(Eigen::Index n, double value);

    Eigen::Index n() const noexcept { return d_.size(); }
    const Vector& values() const noexcept { return d_; }

private:
    Vector d_;
};

struct EigenOptions {
    double tol = 1e-10;
    // Matrices of at most this dimension go through the dense solver.
    Eigen::Index dense_limit = 512;
};

struct EigenEstimate {
    double value = 0.0;
    // ||A x - value x|| / max(|value|, tiny) for the returned Ritz pair; zero for dense solves.
    double residual = 0.0;
    int iterations = 0;
    bool dense = true;
};

EigenEstimate lambda_max_estimate(const SymMatrix& a, const EigenOptions& opts = {});
EigenEstimate lambda_min_estimate(const SymMatrix& a, const EigenOptions& opts = {});

double lambda_max(const SymMatrix& a, double tol = 1e-10);
double lambda_min(const SymMatrix& a, double tol = 1e-10);

// Largest eigenvalue by shifted power iteration regardless of size (capped at 10 n iterations).
EigenEstimate power_lambda_max(const SymMatrix& a, double tol);

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b);

// D1 A D2. Throws InputError if the product is not symmetric (possible only when D1 != D2).
SymMatrix diag_scale(const DiagWeights& d1, const SymMatrix& a, const DiagWeights& d2);
Matrix diag_scale_general(const DiagWeights& d1, const Matrix& a, const DiagWeights& d2);

// Matrix text format: first line n, then n rows of n whitespace-separated decimals.
SymMatrix read_matrix(std::istream& in);
SymMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const SymMatrix& a);

} // namespace acd
