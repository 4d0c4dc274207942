#include "tvdiar/constrained_hac.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace tvdiar::hac {

void ConstraintSet::add(int a, int b) {
    if (a == b) throw std::invalid_argument("constraint set: self pair");
    pairs_.emplace(std::min(a, b), std::max(a, b));
}

bool ConstraintSet::forbids(int a, int b) const {
    return pairs_.count({std::min(a, b), std::max(a, b)}) > 0;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ward_cost(double mass_a, double mass_b, const Eigen::VectorXd& ca,
                 const Eigen::VectorXd& cb) {
    return mass_a * mass_b / (mass_a + mass_b) * (ca - cb).squaredNorm();
}

// fixed-width bitset over instance positions
struct Bits {
    std::vector<std::uint64_t> w;
    explicit Bits(std::size_t n = 0) : w((n + 63) / 64, 0) {}
    void set(std::size_t i) { w[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void merge(const Bits& o) {
        for (std::size_t k = 0; k < w.size(); ++k) w[k] |= o.w[k];
    }
    bool intersects(const Bits& o) const {
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] & o.w[k]) return true;
        return false;
    }
};

}  // namespace

double ward_delta(const ForestNode& a, const ForestNode& b, const ConstraintSet& constraints) {
    if (a.center.size() != b.center.size())
        throw std::invalid_argument("ward_delta: dimension mismatch");
    if (!constraints.empty())
        for (int x : a.members)
            for (int y : b.members)
                if (constraints.forbids(x, y)) return kInf;
    return ward_cost(a.mass, b.mass, a.center, b.center);
}

DendrogramForest agglomerate(const std::vector<Instance>& instances,
                             const ConstraintSet& constraints) {
    const int n = static_cast<int>(instances.size());
    if (n == 0) throw std::invalid_argument("agglomerate: no instances");
    const int d = static_cast<int>(instances[0].vector.size());

    std::unordered_map<int, int> pos_of_id;
    pos_of_id.reserve(instances.size());
    for (int i = 0; i < n; ++i) {
        if (instances[i].vector.size() != d)
            throw std::invalid_argument("agglomerate: mixed dimensions");
        if (instances[i].mass <= 0.0)
            throw std::invalid_argument("agglomerate: non-positive mass");
        if (!pos_of_id.emplace(instances[i].id, i).second)
            throw std::invalid_argument("agglomerate: duplicate instance id " +
                                        std::to_string(instances[i].id));
    }

    DendrogramForest forest;
    forest.leaf_count = n;
    forest.nodes.reserve(2 * n - 1);

    const int cap = 2 * n - 1;
    std::vector<Bits> member_bits(cap, Bits(n));
    std::vector<Bits> conflict_bits(cap, Bits(n));

    for (int i = 0; i < n; ++i) {
        ForestNode leaf;
        leaf.node_id = i;
        leaf.mass = instances[i].mass;
        leaf.center = instances[i].vector;
        leaf.members = {instances[i].id};
        forest.nodes.push_back(std::move(leaf));
        member_bits[i].set(i);
    }
    for (const auto& [a, b] : constraints.pairs()) {
        auto ia = pos_of_id.find(a);
        auto ib = pos_of_id.find(b);
        if (ia == pos_of_id.end() || ib == pos_of_id.end()) continue;
        conflict_bits[ia->second].set(ib->second);
        conflict_bits[ib->second].set(ia->second);
    }

    // cached finite Ward costs between node ids; admissibility is re-checked
    // against the conflict bitsets at scan time
    std::vector<std::vector<double>> cost(cap);
    for (auto& row : cost) row.assign(cap, 0.0);
    std::vector<int> active;
    for (int i = 0; i < n; ++i) active.push_back(i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            cost[i][j] = ward_cost(forest.nodes[i].mass, forest.nodes[j].mass,
                                   forest.nodes[i].center, forest.nodes[j].center);

    while (active.size() > 1) {
        double best = kInf;
        int bu = -1, bv = -1;
        for (std::size_t x = 0; x < active.size(); ++x) {
            const int u = active[x];
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const int v = active[y];
                if (conflict_bits[u].intersects(member_bits[v])) continue;
                if (cost[u][v] < best) {
                    best = cost[u][v];
                    bu = u;
                    bv = v;
                }
            }
        }
        if (bu < 0) break;  // every remaining pair is forbidden

        const int k = static_cast<int>(forest.nodes.size());
        ForestNode node;
        node.node_id = k;
        node.left = bu;
        node.right = bv;
        node.height = best;
        node.mass = forest.nodes[bu].mass + forest.nodes[bv].mass;
        node.center = (forest.nodes[bu].mass * forest.nodes[bu].center +
                       forest.nodes[bv].mass * forest.nodes[bv].center) /
                      node.mass;
        std::merge(forest.nodes[bu].members.begin(), forest.nodes[bu].members.end(),
                   forest.nodes[bv].members.begin(), forest.nodes[bv].members.end(),
                   std::back_inserter(node.members));
        member_bits[k] = member_bits[bu];
        member_bits[k].merge(member_bits[bv]);
        conflict_bits[k] = conflict_bits[bu];
        conflict_bits[k].merge(conflict_bits[bv]);
        forest.nodes.push_back(std::move(node));

        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](int a) { return a == bu || a == bv; }),
                     active.end());
        for (int a : active)
            cost[std::min(a, k)][std::max(a, k)] =
                ward_cost(forest.nodes[a].mass, forest.nodes[k].mass, forest.nodes[a].center,
                          forest.nodes[k].center);
        active.push_back(k);
    }

    forest.roots = active;
    std::sort(forest.roots.begin(), forest.roots.end());
    return forest;
}

double silhouette_score(const Partition& partition, const Eigen::MatrixXd& distances) {
    const int n = static_cast<int>(partition.cluster_of.size());
    if (n < 2) throw std::invalid_argument("silhouette_score: need at least two instances");
    if (distances.rows() != n || distances.cols() != n)
        throw std::invalid_argument("silhouette_score: distance matrix size mismatch");

    int k = 0;
    for (int c : partition.cluster_of) k = std::max(k, c + 1);
    if (k <= 1) return 0.0;

    std::vector<int> size(k, 0);
    for (int c : partition.cluster_of) {
        if (c < 0) throw std::invalid_argument("silhouette_score: negative cluster id");
        ++size[c];
    }

    double total = 0.0;
    std::vector<double> mean_to(k);
    for (int i = 0; i < n; ++i) {
        const int ci = partition.cluster_of[i];
        if (size[ci] == 1) continue;  // singleton contributes 0
        std::fill(mean_to.begin(), mean_to.end(), 0.0);
        for (int j = 0; j < n; ++j)
            if (j != i) mean_to[partition.cluster_of[j]] += distances(i, j);
        const double a = mean_to[ci] / (size[ci] - 1);
        double b = kInf;
        for (int c = 0; c < k; ++c) {
            if (c == ci || size[c] == 0) continue;
            b = std::min(b, mean_to[c] / size[c]);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / n;
}

namespace {

void collect_leaves(const DendrogramForest& forest, int node, std::vector<int>& out) {
    const ForestNode& nd = forest.nodes[node];
    if (nd.is_leaf()) {
        out.push_back(node);
        return;
    }
    collect_leaves(forest, nd.left, out);
    collect_leaves(forest, nd.right, out);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Partition cut_forest(const DendrogramForest& forest, const Eigen::MatrixXd& distances) {
    const int n = forest.leaf_count;
    if (n == 0) throw std::invalid_argument("cut_forest: empty forest");
    if (distances.rows() != n || distances.cols() != n)
        throw std::invalid_argument("cut_forest: distance matrix size mismatch");

    Partition out;
    out.cluster_of.assign(n, -1);
    int next_cluster = 0;

    for (int root : forest.roots) {
        std::vector<int> leaves;
        collect_leaves(forest, root, leaves);
        std::sort(leaves.begin(), leaves.end());
        const int m = static_cast<int>(leaves.size());

        if (m == 1) {
            out.cluster_of[leaves[0]] = next_cluster++;
            continue;
        }

        std::vector<int> local(forest.nodes.size(), -1);
        for (int li = 0; li < m; ++li) local[leaves[li]] = li;
        Eigen::MatrixXd sub(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) sub(a, b) = distances(leaves[a], leaves[b]);

        // merges under this root, in creation order
        std::vector<int> merges;
        {
            std::vector<int> stack = {root};
            while (!stack.empty()) {
                const int id = stack.back();
                stack.pop_back();
                const ForestNode& nd = forest.nodes[id];
                if (nd.is_leaf()) continue;
                merges.push_back(id);
                stack.push_back(nd.left);
                stack.push_back(nd.right);
            }
            std::sort(merges.begin(), merges.end());
        }

        // a representative leaf per node, for replaying merges in a union-find
        std::vector<int> rep(forest.nodes.size(), -1);
        for (int leaf : leaves) rep[leaf] = leaf;
        for (int id : merges) {
            const ForestNode& nd = forest.nodes[id];
            rep[id] = rep[nd.left];
        }

        UnionFind uf(m);
        auto snapshot = [&]() {
            Partition p;
            p.cluster_of.assign(m, -1);
            std::vector<int> label(m, -1);
            int c = 0;
            for (int li = 0; li < m; ++li) {
                const int r = uf.find(li);
                if (label[r] < 0) label[r] = c++;
                p.cluster_of[li] = label[r];
            }
            p.cluster_count = c;
            return p;
        };

        Partition best_part = snapshot();
        double best_score = silhouette_score(best_part, sub);
        for (std::size_t step = 0; step < merges.size(); ++step) {
            const ForestNode& nd = forest.nodes[merges[step]];
            uf.unite(local[rep[nd.left]], local[rep[nd.right]]);
            Partition p = snapshot();
            const double score = p.cluster_count == 1 ? 0.0 : silhouette_score(p, sub);
            if (score >= best_score) {  // ties prefer fewer clusters
                best_score = score;
                best_part = std::move(p);
            }
        }

        for (int li = 0; li < m; ++li)
            out.cluster_of[leaves[li]] = next_cluster + best_part.cluster_of[li];
        next_cluster += best_part.cluster_count;
    }

    out.cluster_count = next_cluster;
    return out;
}

Eigen::MatrixXd pairwise_distances(const std::vector<Instance>& instances) {
    const int n = static_cast<int>(instances.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            d(i, j) = d(j, i) = (instances[i].vector - instances[j].vector).norm();
    return d;
}

}  // namespace tvdiar::hac
