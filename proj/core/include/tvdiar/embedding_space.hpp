#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace tvdiar::emb {

struct LabeledEmbedding {
    std::string speaker;
    Eigen::VectorXd vector;
};

struct WithinClassCovariance {
    Eigen::MatrixXd w;
    double epsilon = 0.0;  // ridge added to w before inversion

    int dim() const { return static_cast<int>(w.rows()); }
    static WithinClassCovariance identity(int dim);
};

// Pooled within-speaker covariance of the training set, normalized by the
// total number of vectors. epsilon defaults to 1e-6 * trace(w) / dim.
// Throws std::invalid_argument on an empty set or mixed dimensions.
WithinClassCovariance compute_within_class_cov(const std::vector<LabeledEmbedding>& training);

// sqrt((a-b)^T (w + eps I)^-1 (a-b)). Throws std::invalid_argument when the
// regularized matrix is not positive definite.
double mahalanobis(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const WithinClassCovariance& wcc);

// Linear map (w + eps I)^(-1/2) so that Euclidean distances of mapped vectors
// equal the Mahalanobis distance above.
class Whitener {
  public:
    explicit Whitener(const WithinClassCovariance& wcc);
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    const Eigen::MatrixXd& matrix() const { return map_; }

  private:
    Eigen::MatrixXd map_;
};

// v / |v|; throws std::invalid_argument on the zero vector
Eigen::VectorXd normalized(const Eigen::VectorXd& v);

}  // namespace tvdiar::emb
