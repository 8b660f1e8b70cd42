#pragma once

#include "acd/linalg.hpp"

namespace acd {

/*
    Smoothness matrix M of an M-smooth objective:
        f(x + h) <= f(x) + <grad f(x), h> + 1/2 h^T M h.

    Estimated matrices (e.g. a multiple of the diagonal) carry no such
    certificate and are flagged so rate assertions can skip them.
*/
class SmoothnessMatrix {
public:
    explicit SmoothnessMatrix(SymMatrix m, bool estimated = false);

    Eigen::Index n() const noexcept { return m_.n(); }
    const SymMatrix& sym() const noexcept { return m_; }
    const Matrix& matrix() const noexcept { return m_.matrix(); }
    const Vector& diag() const noexcept { return diag_; }
    // L = lambda_max(M)
    double lambda_max() const noexcept { return lmax_; }
    double trace() const { return diag_.sum(); }
    bool is_estimate() const noexcept { return estimated_; }

private:
    SymMatrix m_;
    Vector diag_;
    double lmax_;
    bool estimated_;
};

} // namespace acd
