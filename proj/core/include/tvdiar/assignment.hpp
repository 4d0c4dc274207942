#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tvdiar::eval {

// Optimal one-to-one assignment maximizing total weight. Every row is
// assigned at most one column and vice versa; rows left over when
// rows > cols get -1. Weights must be finite.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

}  // namespace tvdiar::eval
