#include "tvdiar/embedding_space.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tvdiar::emb {

WithinClassCovariance WithinClassCovariance::identity(int dim) {
    if (dim < 1) throw std::invalid_argument("identity covariance: dim must be positive");
    WithinClassCovariance wcc;
    wcc.w = Eigen::MatrixXd::Identity(dim, dim);
    wcc.epsilon = 0.0;
    return wcc;
}

WithinClassCovariance compute_within_class_cov(const std::vector<LabeledEmbedding>& training) {
    if (training.empty())
        throw std::invalid_argument("compute_within_class_cov: empty training set");
    const int d = static_cast<int>(training.front().vector.size());
    if (d < 1) throw std::invalid_argument("compute_within_class_cov: zero-dimensional vectors");

    struct Acc {
        long n = 0;
        Eigen::VectorXd sum;
    };
    std::map<std::string, Acc> by_speaker;
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
    for (const auto& e : training) {
        if (e.vector.size() != d)
            throw std::invalid_argument("compute_within_class_cov: mixed dimensions");
        auto& acc = by_speaker[e.speaker];
        if (acc.n == 0) acc.sum = Eigen::VectorXd::Zero(d);
        acc.sum += e.vector;
        ++acc.n;
        second += e.vector * e.vector.transpose();
    }
    for (const auto& [spk, acc] : by_speaker) {
        const Eigen::VectorXd mean = acc.sum / static_cast<double>(acc.n);
        second -= static_cast<double>(acc.n) * mean * mean.transpose();
    }

    WithinClassCovariance wcc;
    wcc.w = second / static_cast<double>(training.size());
    wcc.w = 0.5 * (wcc.w + wcc.w.transpose().eval());
    wcc.epsilon = 1e-6 * wcc.w.trace() / d;
    return wcc;
}

namespace {

Eigen::MatrixXd regularized(const WithinClassCovariance& wcc) {
    if (wcc.w.rows() != wcc.w.cols() || wcc.w.rows() < 1)
        throw std::invalid_argument("within-class covariance must be square");
    return wcc.w + wcc.epsilon * Eigen::MatrixXd::Identity(wcc.w.rows(), wcc.w.cols());
}

}  // namespace

double mahalanobis(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const WithinClassCovariance& wcc) {
    if (a.size() != b.size() || a.size() != wcc.w.rows())
        throw std::invalid_argument("mahalanobis: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(regularized(wcc));
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(
            "mahalanobis: covariance not positive definite (epsilon too small)");
    const Eigen::VectorXd diff = a - b;
    const double q = diff.dot(llt.solve(diff));
    return std::sqrt(std::max(q, 0.0));
}

Whitener::Whitener(const WithinClassCovariance& wcc) {
    const Eigen::MatrixXd m = regularized(wcc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw std::invalid_argument("whitener: eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double floor = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) <= floor)
            throw std::invalid_argument(
                "whitener: covariance not positive definite (epsilon too small)");
    map_ = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

Eigen::VectorXd Whitener::apply(const Eigen::VectorXd& v) const {
    if (v.size() != map_.rows()) throw std::invalid_argument("whitener: dimension mismatch");
    return map_ * v;
}

Eigen::VectorXd normalized(const Eigen::VectorXd& v) {
    const double n = v.norm();
    if (n <= 0.0) throw std::invalid_argument("normalized: zero vector");
    return v / n;
}

}  // namespace tvdiar::emb
