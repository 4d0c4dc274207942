#include "tvdiar/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvdiar::eval {

// Jonker-Volgenant style shortest augmenting paths with potentials.
// Columns are padded with zero-weight slots so surplus rows stay unassigned.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights) {
    const int n = static_cast<int>(weights.rows());
    const int c = static_cast<int>(weights.cols());
    if (n == 0) return {};
    if (!weights.allFinite())
        throw std::invalid_argument("max_weight_assignment: weights must be finite");

    const int m = c + n;
    auto cost = [&](int i, int j) { return j < c ? -weights(i, j) : 0.0; };
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
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
            for (int j = 0; j <= m; ++j) {
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
        } while (j0);
    }

    std::vector<int> out(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] > 0 && j - 1 < c) out[p[j] - 1] = j - 1;
    return out;
}

}  // namespace tvdiar::eval
