#include "tvdiar/shot_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace tvdiar::shots {

void ShotConfig::validate() const {
    if (grid_rows < 1 || grid_cols < 1)
        throw std::invalid_argument("shot config: grid must be at least 1x1");
    if (bins_h < 1 || bins_s < 1 || bins_v < 1)
        throw std::invalid_argument("shot config: histogram bins must be positive");
    if (lookback_shots < 0)
        throw std::invalid_argument("shot config: lookback must be >= 0");
}

namespace {

struct Hsv {
    double h;  // degrees, [0, 360)
    double s;  // [0, 1]
    double v;  // [0, 1]
};

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;

    Hsv out{0.0, 0.0, mx};
    if (mx > 0.0) out.s = delta / mx;
    if (delta > 0.0) {
        double h;
        if (mx == r)
            h = std::fmod((g - b) / delta, 6.0);
        else if (mx == g)
            h = (b - r) / delta + 2.0;
        else
            h = (r - g) / delta + 4.0;
        h *= 60.0;
        if (h < 0.0) h += 360.0;
        if (h >= 360.0) h -= 360.0;
        out.h = h;
    }
    return out;
}

int hsv_bin(const Hsv& c, const ShotConfig& cfg) {
    auto clamp_bin = [](int bin, int n) { return std::min(std::max(bin, 0), n - 1); };
    const int hb = clamp_bin(static_cast<int>(c.h / 360.0 * cfg.bins_h), cfg.bins_h);
    const int sb = clamp_bin(static_cast<int>(c.s * cfg.bins_s), cfg.bins_s);
    const int vb = clamp_bin(static_cast<int>(c.v * cfg.bins_v), cfg.bins_v);
    return (hb * cfg.bins_s + sb) * cfg.bins_v + vb;
}

}  // namespace

BlockHistogram compute_block_histograms(const Image& img, const ShotConfig& cfg) {
    cfg.validate();
    if (img.empty()) throw std::invalid_argument("compute_block_histograms: empty image");
    if (img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3)
        throw std::invalid_argument("compute_block_histograms: raster size mismatch");
    if (img.height < cfg.grid_rows || img.width < cfg.grid_cols)
        throw std::invalid_argument("compute_block_histograms: image smaller than block grid");

    BlockHistogram out;
    out.rows = cfg.grid_rows;
    out.cols = cfg.grid_cols;
    out.bins_per_block = cfg.bins_h * cfg.bins_s * cfg.bins_v;
    out.blocks.assign(static_cast<std::size_t>(out.rows) * out.cols,
                      std::vector<double>(out.bins_per_block, 0.0));

    const int bh = img.height / cfg.grid_rows;
    const int bw = img.width / cfg.grid_cols;
    for (int br = 0; br < cfg.grid_rows; ++br) {
        const int y0 = br * bh;
        const int y1 = (br == cfg.grid_rows - 1) ? img.height : y0 + bh;
        for (int bc = 0; bc < cfg.grid_cols; ++bc) {
            const int x0 = bc * bw;
            const int x1 = (bc == cfg.grid_cols - 1) ? img.width : x0 + bw;
            auto& hist = out.blocks[static_cast<std::size_t>(br) * cfg.grid_cols + bc];
            long count = 0;
            for (int y = y0; y < y1; ++y) {
                const std::uint8_t* px = img.rgb.data() + (static_cast<std::size_t>(y) * img.width + x0) * 3;
                for (int x = x0; x < x1; ++x, px += 3) {
                    hist[hsv_bin(rgb_to_hsv(px[0], px[1], px[2]), cfg)] += 1.0;
                    ++count;
                }
            }
            for (double& m : hist) m /= static_cast<double>(count);
        }
    }
    return out;
}

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const bool cx = sxx <= 0.0, cy = syy <= 0.0;
    if (cx && cy) {
        return std::abs(mx - my) <= 1e-12 ? 1.0 : 0.0;
    }
    if (cx || cy) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double frame_similarity(const BlockHistogram& a, const BlockHistogram& b) {
    if (a.rows != b.rows || a.cols != b.cols || a.bins_per_block != b.bins_per_block)
        throw std::invalid_argument("frame_similarity: block layouts differ");
    if (a.blocks.empty()) throw std::invalid_argument("frame_similarity: no blocks");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) sum += pearson(a.blocks[i], b.blocks[i]);
    return sum / static_cast<double>(a.blocks.size());
}

std::vector<Shot> detect_cuts(const std::vector<FrameDescriptor>& frames,
                              const ShotConfig& cfg) {
    cfg.validate();
    if (frames.empty()) throw std::invalid_argument("detect_cuts: no frames");
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i].timestamp < frames[i - 1].timestamp)
            throw std::invalid_argument("detect_cuts: timestamps not ascending");

    // end time of the stream, extrapolated from the last inter-frame gap
    const std::size_t n = frames.size();
    const double tail = (n >= 2) ? frames[n - 1].timestamp - frames[n - 2].timestamp : 1.0;

    std::vector<Shot> out;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const bool cut = (i == n) ||
                         frame_similarity(frames[i - 1].histogram, frames[i].histogram) <
                             cfg.cut_threshold;
        if (!cut) continue;
        Shot s;
        s.id = static_cast<int>(out.size());
        s.start_frame = frames[start].frame_index;
        s.end_frame = frames[i - 1].frame_index;
        s.start_time = frames[start].timestamp;
        s.end_time = (i < n) ? frames[i].timestamp : frames[n - 1].timestamp + tail;
        out.push_back(std::move(s));
        start = i;
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

ShotLabeling detect_similar_shots(const std::vector<FrameDescriptor>& frames,
                                  const std::vector<Shot>& shot_list,
                                  const ShotConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(shot_list.size());
    std::unordered_map<long, std::size_t> pos;
    pos.reserve(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) pos[frames[f].frame_index] = f;
    auto frame_pos = [&](long idx) {
        auto it = pos.find(idx);
        if (it == pos.end())
            throw std::invalid_argument("detect_similar_shots: shot frame not in sequence");
        return it->second;
    };
    std::vector<std::size_t> first_of(n), last_of(n);
    for (int s = 0; s < n; ++s) {
        first_of[s] = frame_pos(shot_list[s].start_frame);
        last_of[s] = frame_pos(shot_list[s].end_frame);
    }

    UnionFind uf(n);
    for (int i = 1; i < n; ++i) {
        const int lo = cfg.lookback_shots > 0 ? std::max(0, i - cfg.lookback_shots) : 0;
        for (int j = lo; j < i; ++j) {
            const double sim = frame_similarity(frames[first_of[i]].histogram,
                                                frames[last_of[j]].histogram);
            if (sim >= cfg.similarity_threshold) uf.unite(i, j);
        }
    }

    ShotLabeling out;
    out.labels.assign(n, -1);
    std::vector<int> label_of_root(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (label_of_root[r] < 0) label_of_root[r] = next++;
        out.labels[i] = label_of_root[r];
    }
    out.similar.assign(n, {});
    std::vector<std::vector<int>> members(next);
    for (int i = 0; i < n; ++i) members[out.labels[i]].push_back(i);
    for (int i = 0; i < n; ++i) out.similar[i] = members[out.labels[i]];
    return out;
}

std::vector<long> cut_frames(const std::vector<Shot>& shot_list) {
    std::vector<long> out;
    for (std::size_t i = 1; i < shot_list.size(); ++i) out.push_back(shot_list[i].start_frame);
    return out;
}

}  // namespace tvdiar::shots
