#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tvdiar::shots {

// 8-bit RGB raster, row major, 3 bytes per pixel.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    bool empty() const { return width <= 0 || height <= 0 || rgb.empty(); }
};

// Normalized HSV histograms, one per block of a rows x cols grid laid over
// the image. Blocks tile the image; the last row/column of blocks absorbs
// any remainder pixels.
struct BlockHistogram {
    int rows = 0;
    int cols = 0;
    int bins_per_block = 0;
    // blocks.size() == rows * cols, each of size bins_per_block, each sums to 1.
    std::vector<std::vector<double>> blocks;
};

struct FrameDescriptor {
    long frame_index = 0;
    double timestamp = 0.0;
    BlockHistogram histogram;
};

struct Shot {
    int id = 0;
    long start_frame = 0;
    long end_frame = 0;   // inclusive
    double start_time = 0.0;
    double end_time = 0.0;
};

// label per shot plus, for each shot, the sorted list of shots sharing its label
struct ShotLabeling {
    std::vector<int> labels;
    std::vector<std::vector<int>> similar;
};

struct ShotConfig {
    double cut_threshold = 0.5;        // tau1, new shot when correlation < tau1
    double similarity_threshold = 0.9; // tau2, same label when correlation >= tau2
    int grid_rows = 5;
    int grid_cols = 6;
    int bins_h = 8;
    int bins_s = 4;
    int bins_v = 4;
    int lookback_shots = 0;            // 0 compares against all earlier shots

    void validate() const;  // throws std::invalid_argument
};

// Per-block HSV histogram of an image. Throws std::invalid_argument on an
// empty image or an image smaller than the grid.
BlockHistogram compute_block_histograms(const Image& img, const ShotConfig& cfg);

// Mean over blocks of the Pearson correlation between matching block
// histograms. A pair of constant blocks contributes 1.0 when equal, 0.0
// otherwise; one constant block against a varying one contributes 0.0.
// Throws std::invalid_argument on mismatched layouts.
double frame_similarity(const BlockHistogram& a, const BlockHistogram& b);

// Splits a frame sequence into shots. A cut is declared between consecutive
// frames whose similarity falls strictly below cfg.cut_threshold. Frames must
// be in ascending timestamp order; throws std::invalid_argument when empty.
std::vector<Shot> detect_cuts(const std::vector<FrameDescriptor>& frames,
                              const ShotConfig& cfg);

// Labels shots by visual similarity: the first frame of each shot is compared
// against the last frame of earlier shots (all of them, or only the most
// recent cfg.lookback_shots when positive). Similarity >= cfg.similarity_threshold
// links the two shots; labels are the transitive closure of those links,
// numbered by first appearance.
ShotLabeling detect_similar_shots(const std::vector<FrameDescriptor>& frames,
                                  const std::vector<Shot>& shot_list,
                                  const ShotConfig& cfg);

// frame index of every shot boundary (start frame of each shot after the first)
std::vector<long> cut_frames(const std::vector<Shot>& shot_list);

}  // namespace tvdiar::shots
