#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tvdiar/diarization.hpp"
#include "tvdiar/shot_analysis.hpp"
#include "tvdiar/speech.hpp"

namespace tvdiar::eval {

struct DerReport {
    double scored_seconds = 0.0;
    double confusion_seconds = 0.0;
    double der = 0.0;
    std::map<std::string, std::string> mapping;  // hypothesis label -> reference label
    int ref_speakers = 0;
    int hyp_speakers = 0;
};

struct F1Report {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int matched = 0;
    int ref_count = 0;
    int hyp_count = 0;
};

// Diarization error rate over the segments the hypothesis labels. Hypothesis
// labels are mapped one-to-one onto reference labels so that the matched
// speech duration is maximal; the rate is the misattributed share of the
// scored duration. Every hypothesized segment must carry a reference label
// and the scored duration must be positive, otherwise std::invalid_argument.
DerReport der(const Diarization& reference, const Diarization& hypothesis,
              const std::vector<SpeechSegment>& segments);

// Duration-weighted mean of per-dialogue error rates, given (rate, seconds)
// pairs. Throws std::invalid_argument when the total duration is zero.
double single_show_der(const std::vector<std::pair<double, double>>& per_dialogue);

// Cut detection score. Hypothesized boundaries match the nearest unmatched
// reference boundary within the frame tolerance, each side used at most once.
// Two empty lists score 1.0; one empty list scores 0.0.
F1Report f1_cuts(const std::vector<long>& reference, const std::vector<long>& hypothesis,
                 long tolerance);

// Shot similarity score over a shared shot inventory: a shot counts for
// recall (resp. precision) when its reference (resp. hypothesis) similarity
// list is nonempty, and counts as correct when the two lists intersect.
// Throws std::invalid_argument when no shot has a nonempty list on either side.
F1Report f1_similarity(const shots::ShotLabeling& reference, const shots::ShotLabeling& hypothesis);

// Labels of hypothesis shots carried over to the reference shot inventory;
// each reference shot takes the label of the hypothesis shot with the
// largest frame overlap (ties toward the earlier hypothesis shot).
shots::ShotLabeling align_labels(const std::vector<shots::Shot>& reference_shots,
                                 const std::vector<shots::Shot>& hypothesis_shots,
                                 const shots::ShotLabeling& hypothesis_labeling);

struct SpeakerCountRow {
    std::string system;
    int hypothesized = 0;
    int reference = 0;  // distinct reference speakers over the covered segments
};

std::vector<SpeakerCountRow> speaker_count_report(const std::vector<Diarization>& systems,
                                                  const std::vector<SpeechSegment>& segments);

}  // namespace tvdiar::eval
