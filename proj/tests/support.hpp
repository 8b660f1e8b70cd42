#pragma once

// Test-only oracles. Nothing here calls into the library's eigen or
// probability code, so results can be compared against it.

#include "acd/linalg.hpp"
#include "acd/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace acd::test {

inline double eig_max(const Matrix& a)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

inline double eig_min(const Matrix& a)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// B^T B + shift I with B standard normal, rows x n.
inline Matrix random_spd(Eigen::Index n, Rng& rng, Eigen::Index rows = 0, double shift = 0.1)
{
    if (rows == 0) {
        rows = n;
    }
    Matrix b(rows, n);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            b(i, j) = rng.normal();
        }
    }
    Matrix m = b.transpose() * b;
    m.diagonal().array() += shift;
    return m;
}

// Visits every subset of {0..n-1} of size k (as a membership mask).
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<bool>&)>& visit)
{
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    std::fill(mask.begin(), mask.begin() + k, true);
    // Trues first is the largest arrangement, so prev_permutation walks them all.
    do {
        visit(mask);
    } while (std::prev_permutation(mask.begin(), mask.end()));
}

// P of the tau-nice law by brute-force enumeration.
inline Matrix enumerate_tau_nice(int n, int tau)
{
    Matrix p = Matrix::Zero(n, n);
    double count = 0.0;
    for_each_subset(n, tau, [&](const std::vector<bool>& s) {
        count += 1.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (s[static_cast<std::size_t>(i)] && s[static_cast<std::size_t>(j)]) {
                    p(i, j) += 1.0;
                }
            }
        }
    });
    return p / count;
}

// P of an independent law by brute-force enumeration of all 2^n subsets.
inline Matrix enumerate_independent(const Vector& prob)
{
    const int n = static_cast<int>(prob.size());
    Matrix p = Matrix::Zero(n, n);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            w *= (mask >> i & 1u) ? prob[i] : 1.0 - prob[i];
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if ((mask >> i & 1u) && (mask >> j & 1u)) {
                    p(i, j) += w;
                }
            }
        }
    }
    return p;
}

// lambda_max(D^-1/2 P D^-1/2 o D^-1 M D^-1) with D = Diag(p), by explicit loops.
inline double c_acc_oracle(const Matrix& p, const Matrix& m)
{
    const Eigen::Index n = m.rows();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double pi = p(i, i);
            const double pj = p(j, j);
            k(i, j) = p(i, j) / std::sqrt(pi * pj) * m(i, j) / (pi * pj);
        }
    }
    return eig_max(k);
}

// lambda_max(D^-1 P D^-1 o M).
inline double c_plain_oracle(const Matrix& p, const Matrix& m)
{
    const Eigen::Index n = m.rows();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            k(i, j) = p(i, j) / (p(i, i) * p(j, j)) * m(i, j);
        }
    }
    return eig_max(k);
}

inline bool rel_close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Central finite-difference gradient with h = 1e-6 (1 + |x_i|).
template <class F>
Vector fd_grad(F&& f, const Vector& x)
{
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        Vector xp = x;
        Vector xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

} // namespace acd::test
