#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <regex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace oracles {

using namespace tvdiar;

namespace {

// compiled once per label pair; the alphabet is at most 'a'..'z'
const std::regex& cached_regex(char ca, char cb, int kind) {
    static std::map<std::tuple<char, char, int>, std::regex> cache;
    auto it = cache.find({ca, cb, kind});
    if (it == cache.end()) {
        std::string pat;
        switch (kind) {
            case 0: pat = std::string(1, ca) + "(" + cb + ca + ")+"; break;
            case 1: pat = std::string(1, cb) + "(" + ca + cb + ")+"; break;
            default: pat = std::string(1, ca) + cb + "|" + cb + ca; break;
        }
        it = cache.emplace(std::make_tuple(ca, cb, kind), std::regex(pat)).first;
    }
    return it->second;
}

}  // namespace

std::set<std::pair<int, int>> regex_pattern_pairs(const std::vector<int>& labels, bool extended) {
    std::string s;
    std::set<int> alphabet;
    for (int l : labels) {
        if (l < 0 || l >= 26) throw std::invalid_argument("regex oracle: label out of range");
        s.push_back(static_cast<char>('a' + l));
        alphabet.insert(l);
    }
    std::set<std::pair<int, int>> out;
    for (int a : alphabet) {
        for (int b : alphabet) {
            if (a >= b) continue;
            const char ca = static_cast<char>('a' + a);
            const char cb = static_cast<char>('a' + b);
            bool hit = std::regex_search(s, cached_regex(ca, cb, 0)) ||
                       std::regex_search(s, cached_regex(ca, cb, 1));
            if (!hit && extended) hit = std::regex_search(s, cached_regex(ca, cb, 2));
            if (hit) out.emplace(a, b);
        }
    }
    return out;
}

std::vector<patterns::AlternationRun> exhaustive_runs(const std::vector<int>& labels,
                                                      int min_len) {
    const int n = static_cast<int>(labels.size());
    std::set<std::tuple<int, int, int, int>> seen;
    std::vector<patterns::AlternationRun> out;
    auto alternating = [&](int i, int j) {
        for (int p = i; p < j; ++p)
            if (labels[p] == labels[p + 1]) return false;
        std::set<int> vals(labels.begin() + i, labels.begin() + j + 1);
        return vals.size() == 2;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + min_len - 1; j < n; ++j) {
            if (!alternating(i, j)) continue;
            // maximal: neither endpoint can extend while staying alternating
            const bool left_ok = (i == 0) || labels[i - 1] == labels[i] ||
                                 (labels[i - 1] != labels[i + 1]);
            const bool right_ok = (j == n - 1) || labels[j + 1] == labels[j] ||
                                  (labels[j + 1] != labels[j - 1]);
            if (!left_ok || !right_ok) continue;
            const int a = std::min(labels[i], labels[i + 1]);
            const int b = std::max(labels[i], labels[i + 1]);
            if (seen.emplace(i, j, a, b).second) {
                patterns::AlternationRun run;
                run.label_a = a;
                run.label_b = b;
                run.start_pos = i;
                run.end_pos = j;
                out.push_back(run);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return std::tie(x.start_pos, x.label_a, x.label_b) <
               std::tie(y.start_pos, y.label_a, y.label_b);
    });
    return out;
}

std::vector<OracleMerge> oracle_agglomerate(const std::vector<hac::Instance>& instances,
                                            const hac::ConstraintSet& constraints) {
    const int n = static_cast<int>(instances.size());
    struct Cluster {
        int node_id;
        std::vector<int> leaves;  // positions into instances
    };
    std::vector<Cluster> active;
    for (int i = 0; i < n; ++i) active.push_back({i, {i}});

    auto center_and_mass = [&](const Cluster& c) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(instances[0].vector.size());
        double mass = 0.0;
        for (int leaf : c.leaves) {
            sum += instances[leaf].mass * instances[leaf].vector;
            mass += instances[leaf].mass;
        }
        return std::make_pair(Eigen::VectorXd(sum / mass), mass);
    };
    auto blocked = [&](const Cluster& x, const Cluster& y) {
        for (int a : x.leaves)
            for (int b : y.leaves)
                if (constraints.forbids(instances[a].id, instances[b].id)) return true;
        return false;
    };

    std::vector<OracleMerge> out;
    int next_id = n;
    while (active.size() > 1) {
        std::vector<std::pair<Eigen::VectorXd, double>> cm;
        cm.reserve(active.size());
        for (const auto& c : active) cm.push_back(center_and_mass(c));
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (std::size_t i = 0; i < active.size(); ++i) {
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                if (blocked(active[i], active[j])) continue;
                const auto& [cu, mu] = cm[i];
                const auto& [cv, mv] = cm[j];
                const double cost = mu * mv / (mu + mv) * (cu - cv).squaredNorm();
                if (cost < best) {
                    best = cost;
                    bi = static_cast<int>(active[i].node_id < active[j].node_id ? i : j);
                    bj = static_cast<int>(active[i].node_id < active[j].node_id ? j : i);
                } else if (cost == best && bi >= 0) {
                    const int cu_min = std::min(active[i].node_id, active[j].node_id);
                    const int cb_min = active[bi].node_id;
                    const int cu_max = std::max(active[i].node_id, active[j].node_id);
                    const int cb_max = active[bj].node_id;
                    if (std::make_pair(cu_min, cu_max) < std::make_pair(cb_min, cb_max)) {
                        bi = static_cast<int>(active[i].node_id < active[j].node_id ? i : j);
                        bj = static_cast<int>(active[i].node_id < active[j].node_id ? j : i);
                    }
                }
            }
        }
        if (bi < 0) break;
        OracleMerge m;
        m.left = active[bi].node_id;
        m.right = active[bj].node_id;
        m.height = best;
        out.push_back(m);
        Cluster merged;
        merged.node_id = next_id++;
        merged.leaves = active[bi].leaves;
        merged.leaves.insert(merged.leaves.end(), active[bj].leaves.begin(),
                             active[bj].leaves.end());
        std::sort(merged.leaves.begin(), merged.leaves.end());
        active.erase(active.begin() + bj);
        active.erase(active.begin() + bi);
        active.push_back(merged);
    }
    return out;
}

namespace {

int oracle_hsv_bin(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                   const shots::ShotConfig& cfg) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max(r, std::max(g, b));
    const double mn = std::min(r, std::min(g, b));
    const double delta = mx - mn;
    const double v = mx;
    const double s = mx > 0.0 ? delta / mx : 0.0;
    double h = 0.0;
    if (delta > 0.0) {
        if (mx == r)
            h = ((g - b) / delta) * 60.0;
        else if (mx == g)
            h = ((b - r) / delta + 2.0) * 60.0;
        else
            h = ((r - g) / delta + 4.0) * 60.0;
        if (h < 0.0) h += 360.0;
        if (h >= 360.0) h -= 360.0;
    }
    auto bin_of = [](double value, double span, int nbins) {
        int k = static_cast<int>(std::floor(value / span * nbins));
        if (k < 0) k = 0;
        if (k >= nbins) k = nbins - 1;
        return k;
    };
    const int hb = bin_of(h, 360.0, cfg.bins_h);
    const int sb = bin_of(s, 1.0, cfg.bins_s);
    const int vb = bin_of(v, 1.0, cfg.bins_v);
    return (hb * cfg.bins_s + sb) * cfg.bins_v + vb;
}

}  // namespace

shots::BlockHistogram oracle_histogram(const shots::Image& img, const shots::ShotConfig& cfg) {
    shots::BlockHistogram out;
    out.rows = cfg.grid_rows;
    out.cols = cfg.grid_cols;
    out.bins_per_block = cfg.bins_h * cfg.bins_s * cfg.bins_v;
    out.blocks.assign(static_cast<std::size_t>(out.rows) * out.cols,
                      std::vector<double>(out.bins_per_block, 0.0));
    std::vector<long> counts(out.blocks.size(), 0);

    const int bh = img.height / cfg.grid_rows;
    const int bw = img.width / cfg.grid_cols;
    for (int y = 0; y < img.height; ++y) {
        const int br = std::min(y / bh, cfg.grid_rows - 1);
        for (int x = 0; x < img.width; ++x) {
            const int bc = std::min(x / bw, cfg.grid_cols - 1);
            const std::size_t block = static_cast<std::size_t>(br) * cfg.grid_cols + bc;
            const std::uint8_t* px = img.rgb.data() + (static_cast<std::size_t>(y) * img.width + x) * 3;
            out.blocks[block][oracle_hsv_bin(px[0], px[1], px[2], cfg)] += 1.0;
            ++counts[block];
        }
    }
    for (std::size_t i = 0; i < out.blocks.size(); ++i)
        for (double& m : out.blocks[i]) m /= static_cast<double>(counts[i]);
    return out;
}

Eigen::MatrixXd oracle_within_class_cov(const std::vector<emb::LabeledEmbedding>& training) {
    const auto d = training.front().vector.size();
    std::map<std::string, std::pair<Eigen::VectorXd, long>> sums;
    for (const auto& t : training) {
        auto it = sums.find(t.speaker);
        if (it == sums.end())
            sums.emplace(t.speaker, std::make_pair(t.vector, 1L));
        else {
            it->second.first += t.vector;
            it->second.second += 1;
        }
    }
    std::map<std::string, Eigen::VectorXd> means;
    for (const auto& [spk, acc] : sums) means.emplace(spk, acc.first / double(acc.second));

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
    for (const auto& t : training) {
        const Eigen::VectorXd r = t.vector - means.at(t.speaker);
        w += r * r.transpose();
    }
    return w / double(training.size());
}

namespace {

double best_assignment_from(const Eigen::MatrixXd& w, int row, unsigned used) {
    if (row == w.rows()) return 0.0;
    double best = best_assignment_from(w, row + 1, used);  // leave row unassigned
    for (int c = 0; c < w.cols(); ++c) {
        if (used & (1u << c)) continue;
        best = std::max(best, w(row, c) + best_assignment_from(w, row + 1, used | (1u << c)));
    }
    return best;
}

}  // namespace

double brute_force_assignment_value(const Eigen::MatrixXd& weights) {
    if (weights.rows() > 8 || weights.cols() > 20)
        throw std::invalid_argument("brute force assignment: matrix too large");
    return best_assignment_from(weights, 0, 0u);
}

std::vector<hac::Instance> random_instances(std::mt19937_64& rng, int n, int d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<hac::Instance> out(n);
    for (int i = 0; i < n; ++i) {
        out[i].id = i;
        out[i].mass = 1.0;
        out[i].vector = Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return gauss(rng); });
    }
    return out;
}

hac::ConstraintSet random_constraints(std::mt19937_64& rng, int n, double density) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    hac::ConstraintSet out;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (coin(rng) < density) out.add(a, b);
    return out;
}

std::vector<hac::Instance> planted_clusters(std::mt19937_64& rng, int k, int per_cluster, int d,
                                            double separation, std::vector<int>* truth) {
    if (k > d) throw std::invalid_argument("planted clusters: k must not exceed dim");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<hac::Instance> out;
    if (truth) truth->clear();
    const double radius = separation / std::sqrt(2.0);
    int id = 0;
    for (int c = 0; c < k; ++c) {
        Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
        center[c] = radius;
        for (int j = 0; j < per_cluster; ++j) {
            hac::Instance inst;
            inst.id = id++;
            inst.mass = 1.0;
            inst.vector =
                center + Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return gauss(rng); });
            out.push_back(std::move(inst));
            if (truth) truth->push_back(c);
        }
    }
    return out;
}

shots::Image random_image(std::mt19937_64& rng, int width, int height) {
    std::uniform_int_distribution<int> byte(0, 255);
    shots::Image img;
    img.width = width;
    img.height = height;
    img.rgb.resize(static_cast<std::size_t>(width) * height * 3);
    for (auto& b : img.rgb) b = static_cast<std::uint8_t>(byte(rng));
    return img;
}

shots::Image solid_image(int width, int height, unsigned char r, unsigned char g,
                         unsigned char b) {
    shots::Image img;
    img.width = width;
    img.height = height;
    img.rgb.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
        img.rgb[i] = r;
        img.rgb[i + 1] = g;
        img.rgb[i + 2] = b;
    }
    return img;
}

}  // namespace oracles
