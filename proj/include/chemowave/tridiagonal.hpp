#pragma once

#include <vector>

namespace chemowave {

/// Solves a tridiagonal system in place by the Thomas algorithm.
/// lower[0] and upper[n-1] are ignored; rhs is overwritten by the solution.
/// Throws std::runtime_error on a zero pivot.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs);

}  // namespace chemowave
