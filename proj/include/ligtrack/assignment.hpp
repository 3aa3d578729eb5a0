#pragma once

#include <vector>

namespace ligtrack {

/// Minimum-cost assignment on an n x m cost matrix (row-major), n <= m.
/// Returns the assigned column per row. Hungarian algorithm with row/column
/// potentials, O(n^2 m).
std::vector<int> min_cost_assignment(const std::vector<double>& cost, int rows, int cols);

} // namespace ligtrack
