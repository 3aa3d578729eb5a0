#include "ligtrack/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace ligtrack {

// Potentials formulation: maintains dual values u (rows) and v (columns)
// and grows an alternating tree per row, augmenting along the cheapest
// path. Indices are 1-based internally; column 0 is the virtual root.
std::vector<int> min_cost_assignment(const std::vector<double>& cost, int rows, int cols) {
    if (rows < 0 || cols < 0 || rows > cols)
        throw std::invalid_argument("assignment needs 0 <= rows <= cols");
    if (cost.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("cost matrix size mismatch");
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(static_cast<std::size_t>(rows) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(cols) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(cols) + 1, 0); // column -> row
    std::vector<int> way(static_cast<std::size_t>(cols) + 1, 0);

    for (int i = 1; i <= rows; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(cols) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(cols) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            int i0 = match[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= cols; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                double cur = cost[static_cast<std::size_t>(i0 - 1) * cols + (j - 1)] -
                             u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
    for (int j = 1; j <= cols; ++j)
        if (match[static_cast<std::size_t>(j)] > 0)
            row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
    return row_to_col;
}

} // namespace ligtrack
