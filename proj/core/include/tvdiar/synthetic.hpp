#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tvdiar/diarization.hpp"
#include "tvdiar/embedding_space.hpp"
#include "tvdiar/shot_analysis.hpp"
#include "tvdiar/speech.hpp"

namespace tvdiar::synth {

struct SyntheticEpisodeConfig {
    int num_speakers = 6;
    int num_dialogues = 8;
    int speakers_per_dialogue = 2;
    int segments_per_speaker = 5;   // per dialogue
    int embedding_dim = 60;
    double separation = 10.0;       // center spacing over within-speaker std
    double coverage = 0.6;          // planted share of speech inside dialogues
    std::uint64_t seed = 0;
    bool synchronized_turns = false;  // one segment per shot, turns follow shot labels
    double shot_seconds = 2.0;
    double fps = 25.0;
    int train_segments_per_speaker = 10;  // 0 disables the training set

    void validate() const;  // throws std::invalid_argument on infeasible configs
};

struct PlantedDialogue {
    int label_a = 0;
    int label_b = 0;
    int start_shot = 0;
    int end_shot = 0;
    std::vector<std::string> segment_ids;
    std::vector<int> speakers;  // distinct planted speakers of this dialogue
};

struct SyntheticEpisode {
    std::vector<shots::Shot> shot_list;
    shots::ShotLabeling labeling;
    std::vector<SpeechSegment> segments;  // reference_speaker filled in
    std::vector<std::pair<std::string, Eigen::VectorXd>> embeddings;  // segment order
    std::vector<emb::LabeledEmbedding> training;
    Diarization reference;
    std::vector<PlantedDialogue> dialogues;

    // planted dialogue index of a segment, -1 for speech outside dialogues
    int dialogue_of(const std::string& segment_id) const;
};

// Plants alternating two-label shot runs (one per dialogue) separated by
// filler shots with unique labels, places speech segments inside the runs,
// and pads out-of-dialogue speech so in-run speech is the configured share
// of the total. Speakers are isotropic unit-variance Gaussians with centers
// separation apart. Deterministic for a fixed config.
SyntheticEpisode generate_synthetic_episode(const SyntheticEpisodeConfig& config);

}  // namespace tvdiar::synth
