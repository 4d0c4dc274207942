#pragma once

#include <set>
#include <string>
#include <vector>

#include "tvdiar/shot_analysis.hpp"
#include "tvdiar/speech.hpp"

namespace tvdiar::patterns {

// shot labels in temporal order plus the time span of each shot
struct ShotSequence {
    std::vector<int> labels;
    std::vector<double> start_times;
    std::vector<double> end_times;

    std::size_t size() const { return labels.size(); }
};

// maximal run of two strictly alternating labels, positions inclusive
struct AlternationRun {
    int label_a = 0;  // label_a < label_b
    int label_b = 0;
    int start_pos = 0;
    int end_pos = 0;

    int length() const { return end_pos - start_pos + 1; }
};

struct Occurrence {
    int start_pos = 0;
    int end_pos = 0;
    double start_time = 0.0;
    double end_time = 0.0;
};

struct DialoguePattern {
    int id = 0;
    std::set<int> labels;
    std::vector<Occurrence> occurrences;    // ascending start_pos
    std::vector<std::string> segment_ids;   // filled by assign_utterances
    bool from_extension = false;            // no run of length >= 3 contributed
    bool merged = false;
};

struct PatternSet {
    std::vector<DialoguePattern> patterns;
    bool extended = false;
};

struct CoverageStats {
    double total_speech = 0.0;
    double covered_speech = 0.0;
    double coverage = 0.0;
    int pattern_count = 0;
    double mean_speech_per_pattern = 0.0;
    double mean_speakers_per_pattern = 0.0;  // 0 when reference speakers absent
};

ShotSequence build_shot_sequence(const std::vector<shots::Shot>& shot_list,
                                 const shots::ShotLabeling& labeling);

// All maximal alternating runs of length >= min_len, in ascending start
// position. Adjacent runs over different label pairs may share one boundary
// position. min_len must be >= 2.
std::vector<AlternationRun> scan_alternations(const std::vector<int>& labels, int min_len);

// One pattern per label pair that alternates somewhere in the sequence.
// Base patterns need a run of length >= 3; with extended set, isolated
// two-shot alternations also count. Patterns are ordered by first occurrence.
PatternSet extract_patterns(const ShotSequence& seq, bool extended);

// Merges patterns sharing a shot label (transitively) into one pattern whose
// occurrence list is the union of its parts.
PatternSet merge_patterns(const PatternSet& ps);

// Attaches each segment whose midpoint falls inside an occurrence to that
// occurrence's pattern. When several occurrences contain the midpoint the
// earliest-starting one wins; remaining segments stay unassigned.
void assign_utterances(PatternSet& ps, const std::vector<SpeechSegment>& segments);

// Requires assign_utterances to have run on ps.
CoverageStats coverage_stats(const PatternSet& ps, const std::vector<SpeechSegment>& segments);

}  // namespace tvdiar::patterns
