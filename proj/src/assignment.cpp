#include "ccrm/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace ccrm {

std::pair<double, std::vector<int>> solve_assignment(
    const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) {
    throw std::invalid_argument("solve_assignment: cost matrix must be square");
  }
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {0.0, {}};
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-indexed potentials; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_of_row(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    col_of_row[p[j] - 1] = j - 1;
    total += cost(p[j] - 1, j - 1);
  }
  return {total, col_of_row};
}

}  // namespace ccrm
