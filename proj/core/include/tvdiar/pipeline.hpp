#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvdiar/constrained_hac.hpp"
#include "tvdiar/diarization.hpp"
#include "tvdiar/embedding_space.hpp"
#include "tvdiar/pattern_miner.hpp"
#include "tvdiar/shot_analysis.hpp"
#include "tvdiar/speech.hpp"

namespace tvdiar::pipeline {

enum class Mode { naive, local_only, two_step, constrained_two_step };

Mode parse_mode(const std::string& name);  // naive | local | 2s | cst2s
std::string mode_name(Mode mode);

struct PipelineConfig {
    Mode mode = Mode::constrained_two_step;
    bool extended = false;  // include isolated two-shot alternations
    bool merge = true;      // merge patterns sharing a shot label
    bool normalize = false; // unit-normalize embeddings at ingestion
};

// one local cluster of one dialogue pattern, input to the global step
struct LocalSpeaker {
    int id = 0;  // unique across dialogues
    int pattern_id = 0;
    int local_cluster = 0;
    std::vector<std::string> segment_ids;
    Eigen::VectorXd representative;
};

struct LocalResult {
    int pattern_id = 0;
    std::vector<std::string> utterance_ids;  // order the partition refers to
    hac::Partition partition;
};

struct GlobalResult {
    hac::DendrogramForest forest;
    hac::Partition partition;  // over local speaker ids in order
};

struct PipelineInputs {
    std::vector<shots::Shot> shot_list;
    shots::ShotLabeling labeling;
    std::vector<SpeechSegment> segments;
    std::unordered_map<std::string, Eigen::VectorXd> embeddings;
    std::optional<emb::WithinClassCovariance> wcc;  // absent: identity metric
};

struct PipelineResult {
    patterns::PatternSet pattern_set;  // utterances assigned
    patterns::CoverageStats coverage;
    std::vector<LocalResult> locals;
    std::vector<LocalSpeaker> local_speakers;
    hac::ConstraintSet constraints;
    std::optional<GlobalResult> global_step;
    Diarization diarization;  // labels exactly the pattern-covered segments
    std::string w_source;     // "training" or "identity"
    double epsilon = 0.0;
};

// Unconstrained Ward clustering of one dialogue's utterances in whitened
// space, cut by silhouette. The partition indexes utterance_ids in order.
// Throws std::invalid_argument naming any utterance without an embedding.
hac::Partition local_diarize(const std::vector<std::string>& utterance_ids,
                             const std::unordered_map<std::string, Eigen::VectorXd>& embeddings,
                             const emb::WithinClassCovariance& wcc);

// Shot-label baseline: each of the pattern's segments takes the label of the
// shot at its midpoint; a midpoint outside the pattern's occurrences is
// clamped to the nearest occurrence first.
std::unordered_map<std::string, int> naive_assign(const patterns::DialoguePattern& pattern,
                                                  const std::vector<shots::Shot>& shot_list,
                                                  const shots::ShotLabeling& labeling,
                                                  const std::vector<SpeechSegment>& segments);

// One instance per local cluster; representative = mean of the member
// embeddings, unit-renormalized when normalize is set.
std::vector<LocalSpeaker> build_global_instances(
    const std::vector<LocalResult>& locals,
    const std::unordered_map<std::string, Eigen::VectorXd>& embeddings, bool normalize);

// cannot-link between every two local speakers of the same dialogue pattern
hac::ConstraintSet derive_constraints(const std::vector<LocalSpeaker>& speakers);

// Ward clustering of whitened representatives, constrained or not, cut per
// tree by silhouette.
GlobalResult global_diarize(const std::vector<LocalSpeaker>& speakers,
                            const hac::ConstraintSet& constraints, bool constrained,
                            const emb::WithinClassCovariance& wcc);

// Full run: patterns -> utterance assignment -> per-mode labeling.
// Stage failures are rethrown with the stage name prefixed.
PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config);

}  // namespace tvdiar::pipeline
