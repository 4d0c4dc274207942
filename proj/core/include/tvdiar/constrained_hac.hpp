#pragma once

#include <Eigen/Dense>
#include <set>
#include <utility>
#include <vector>

namespace tvdiar::hac {

struct Instance {
    int id = 0;  // unique within a clustering problem
    Eigen::VectorXd vector;
    double mass = 1.0;
};

// unordered cannot-link pairs over instance ids
class ConstraintSet {
  public:
    void add(int a, int b);  // throws std::invalid_argument when a == b
    bool forbids(int a, int b) const;
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const std::set<std::pair<int, int>>& pairs() const { return pairs_; }

  private:
    std::set<std::pair<int, int>> pairs_;  // normalized first < second
};

struct ForestNode {
    int node_id = 0;
    int left = -1;   // child node ids, -1 for leaves
    int right = -1;
    double height = 0.0;  // Ward cost of the merge, 0 for leaves
    double mass = 0.0;
    Eigen::VectorXd center;
    std::vector<int> members;  // instance ids, ascending

    bool is_leaf() const { return left < 0; }
};

// Nodes 0..n-1 are the input instances in order; merge nodes follow in the
// order they were created, heights nondecreasing within a tree.
struct DendrogramForest {
    std::vector<ForestNode> nodes;
    std::vector<int> roots;  // ascending node ids
    int leaf_count = 0;
};

// Flat clustering over instance positions (input order).
struct Partition {
    std::vector<int> cluster_of;
    int cluster_count = 0;
};

// Ward cost of merging two clusters: mass_a * mass_b / (mass_a + mass_b)
// times the squared distance between centers. Infinite when the constraint
// set forbids any cross pair of members.
double ward_delta(const ForestNode& a, const ForestNode& b, const ConstraintSet& constraints);

// Bottom-up Ward clustering under cannot-link constraints. Merges the
// cheapest admissible pair until every remaining pair is forbidden (or one
// cluster is left); ties break toward the pair with the smallest node ids.
// Merged clusters inherit the constraints of both parts. Instance ids must
// be unique and dimensions equal; throws std::invalid_argument otherwise.
DendrogramForest agglomerate(const std::vector<Instance>& instances,
                             const ConstraintSet& constraints);

// Mean silhouette width of a flat partition given pairwise distances.
// Singleton clusters score 0 for their members; a single-cluster partition
// scores 0. Throws std::invalid_argument on fewer than two instances.
double silhouette_score(const Partition& partition, const Eigen::MatrixXd& distances);

// Selects a cut per tree by maximizing the silhouette over that tree's
// instances across every prefix of its merges, ties toward fewer clusters.
// Cluster ids are globally unique and contiguous across trees.
Partition cut_forest(const DendrogramForest& forest, const Eigen::MatrixXd& distances);

// Euclidean distance matrix of the instance vectors, in input order.
Eigen::MatrixXd pairwise_distances(const std::vector<Instance>& instances);

}  // namespace tvdiar::hac
