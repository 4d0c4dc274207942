#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tvdiar/constrained_hac.hpp"
#include "tvdiar/diarization.hpp"
#include "tvdiar/embedding_space.hpp"
#include "tvdiar/pipeline.hpp"
#include "tvdiar/shot_analysis.hpp"
#include "tvdiar/speech.hpp"
#include "tvdiar/synthetic.hpp"

namespace tvdiar::io {

// binary PPM (P6), 8-bit channels
shots::Image read_ppm(const std::filesystem::path& file);
void write_ppm(const std::filesystem::path& file, const shots::Image& img);

// Frames named <index>.ppm inside dir, timestamps index/fps, histograms per cfg.
std::vector<shots::FrameDescriptor> load_frame_dir(const std::filesystem::path& dir,
                                                   const shots::ShotConfig& cfg, double fps);

// Per-frame block histograms as sparse CSV records
// frame_index,timestamp,block_index,bin_index,mass with a layout header line.
void write_histograms(const std::filesystem::path& file,
                      const std::vector<shots::FrameDescriptor>& frames);
std::vector<shots::FrameDescriptor> read_histograms(const std::filesystem::path& file);

// shot_id,start_frame,end_frame,start_time,end_time,label
void write_shots(const std::filesystem::path& file, const std::vector<shots::Shot>& shot_list,
                 const shots::ShotLabeling& labeling);
std::pair<std::vector<shots::Shot>, shots::ShotLabeling> read_shots(
    const std::filesystem::path& file);

// segment_id,start,end,speaker,text (speaker and text may be empty);
// .srt files go through parse_subtitles instead
std::vector<SpeechSegment> read_segments(const std::filesystem::path& file);
void write_segments(const std::filesystem::path& file,
                    const std::vector<SpeechSegment>& segments);

// segment_id,v1,...,vd
std::vector<std::pair<std::string, Eigen::VectorXd>> read_embeddings(
    const std::filesystem::path& file);
void write_embeddings(const std::filesystem::path& file,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& embeddings);

// segment_id,speaker,v1,...,vd
std::vector<emb::LabeledEmbedding> read_training(const std::filesystem::path& file);
void write_training(const std::filesystem::path& file,
                    const std::vector<emb::LabeledEmbedding>& training);

// SPEAKER <rec> 1 <onset> <dur> <NA> <NA> <label> <NA>
void write_rttm(const std::filesystem::path& file, const Diarization& dz,
                const std::vector<SpeechSegment>& segments, const std::string& recording);
// reads labels back onto the segments whose span contains the line's midpoint
Diarization read_rttm(const std::filesystem::path& file,
                      const std::vector<SpeechSegment>& segments);

void write_patterns(const std::filesystem::path& file, const patterns::PatternSet& ps);
patterns::PatternSet read_patterns(const std::filesystem::path& file);
void write_forest(const std::filesystem::path& file, const hac::DendrogramForest& forest);

synth::SyntheticEpisodeConfig read_synth_config(const std::filesystem::path& file);

// patterns.json, local_speakers.csv, constraints.csv, forest.json,
// diarization.rttm and manifest.json under dir
void write_pipeline_artifacts(const std::filesystem::path& dir,
                              const pipeline::PipelineResult& result,
                              const std::vector<SpeechSegment>& segments,
                              const pipeline::PipelineConfig& config);

}  // namespace tvdiar::io
