#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ccrm {

/// Exact minimum-cost assignment on a square cost matrix in O(n^3)
/// (shortest augmenting paths with potentials). Returns the minimal total
/// cost and, for each row, its assigned column.
std::pair<double, std::vector<int>> solve_assignment(
    const Eigen::MatrixXd& cost);

}  // namespace ccrm
