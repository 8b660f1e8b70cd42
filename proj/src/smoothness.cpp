#include "acd/smoothness.hpp"

namespace acd {

SmoothnessMatrix::SmoothnessMatrix(SymMatrix m, bool estimated)
    : m_(std::move(m)), diag_(m_.diag()), lmax_(acd::lambda_max(m_)), estimated_(estimated)
{
}

} // namespace acd
