#include "tvdiar/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "tvdiar/assignment.hpp"

namespace tvdiar::eval {

DerReport der(const Diarization& reference, const Diarization& hypothesis,
              const std::vector<SpeechSegment>& segments) {
    std::unordered_map<std::string, const SpeechSegment*> by_id;
    for (const auto& s : segments) by_id[s.id] = &s;

    // scored region: the segments the hypothesis labels
    std::vector<std::string> ref_labels, hyp_labels;
    std::unordered_map<std::string, int> ref_idx, hyp_idx;
    struct Scored {
        double dur;
        int r, h;
    };
    std::vector<Scored> scored;
    double total = 0.0;
    for (const auto& [seg_id, hyp_label] : hypothesis.label_of) {
        auto seg = by_id.find(seg_id);
        if (seg == by_id.end())
            throw std::invalid_argument("der: hypothesis labels unknown segment '" + seg_id + "'");
        auto ref = reference.label_of.find(seg_id);
        if (ref == reference.label_of.end())
            throw std::invalid_argument("der: segment '" + seg_id + "' has no reference label");
        auto [ri, rnew] = ref_idx.emplace(ref->second, static_cast<int>(ref_labels.size()));
        if (rnew) ref_labels.push_back(ref->second);
        auto [hi, hnew] = hyp_idx.emplace(hyp_label, static_cast<int>(hyp_labels.size()));
        if (hnew) hyp_labels.push_back(hyp_label);
        scored.push_back({seg->second->duration(), ri->second, hi->second});
        total += seg->second->duration();
    }
    if (scored.empty() || total <= 0.0)
        throw std::invalid_argument("der: empty scored region");

    Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(static_cast<int>(hyp_labels.size()),
                                                    static_cast<int>(ref_labels.size()));
    for (const auto& s : scored) overlap(s.h, s.r) += s.dur;

    const std::vector<int> match = max_weight_assignment(overlap);

    DerReport rep;
    rep.scored_seconds = total;
    rep.ref_speakers = static_cast<int>(ref_labels.size());
    rep.hyp_speakers = static_cast<int>(hyp_labels.size());
    double matched = 0.0;
    for (std::size_t h = 0; h < match.size(); ++h) {
        if (match[h] < 0) continue;
        matched += overlap(static_cast<int>(h), match[h]);
        rep.mapping[hyp_labels[h]] = ref_labels[match[h]];
    }
    rep.confusion_seconds = total - matched;
    rep.der = rep.confusion_seconds / total;
    return rep;
}

double single_show_der(const std::vector<std::pair<double, double>>& per_dialogue) {
    double num = 0.0, den = 0.0;
    for (const auto& [rate, seconds] : per_dialogue) {
        if (seconds < 0.0) throw std::invalid_argument("single_show_der: negative duration");
        num += rate * seconds;
        den += seconds;
    }
    if (den <= 0.0) throw std::invalid_argument("single_show_der: zero total duration");
    return num / den;
}

F1Report f1_cuts(const std::vector<long>& reference, const std::vector<long>& hypothesis,
                 long tolerance) {
    if (tolerance < 0) throw std::invalid_argument("f1_cuts: negative tolerance");
    F1Report rep;
    rep.ref_count = static_cast<int>(reference.size());
    rep.hyp_count = static_cast<int>(hypothesis.size());
    if (reference.empty() && hypothesis.empty()) {
        rep.precision = rep.recall = rep.f1 = 1.0;
        return rep;
    }
    if (reference.empty() || hypothesis.empty()) return rep;

    std::vector<long> ref = reference, hyp = hypothesis;
    std::sort(ref.begin(), ref.end());
    std::sort(hyp.begin(), hyp.end());
    std::vector<char> used(ref.size(), 0);
    int matched = 0;
    for (long h : hyp) {
        long best_gap = tolerance + 1;
        int best = -1;
        for (std::size_t r = 0; r < ref.size(); ++r) {
            if (used[r]) continue;
            const long gap = std::labs(ref[r] - h);
            if (gap < best_gap) {
                best_gap = gap;
                best = static_cast<int>(r);
            }
        }
        if (best >= 0) {
            used[best] = 1;
            ++matched;
        }
    }
    rep.matched = matched;
    rep.precision = static_cast<double>(matched) / rep.hyp_count;
    rep.recall = static_cast<double>(matched) / rep.ref_count;
    if (rep.precision + rep.recall > 0.0)
        rep.f1 = 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall);
    return rep;
}

F1Report f1_similarity(const shots::ShotLabeling& reference,
                       const shots::ShotLabeling& hypothesis) {
    if (reference.labels.size() != hypothesis.labels.size())
        throw std::invalid_argument("f1_similarity: shot inventories differ");
    const int n = static_cast<int>(reference.labels.size());

    auto others = [](const std::vector<int>& list, int self) {
        std::set<int> out(list.begin(), list.end());
        out.erase(self);
        return out;
    };

    F1Report rep;
    int matched = 0;
    for (int i = 0; i < n; ++i) {
        const auto r = others(reference.similar[i], i);
        const auto h = others(hypothesis.similar[i], i);
        if (!r.empty()) ++rep.ref_count;
        if (!h.empty()) ++rep.hyp_count;
        if (r.empty() || h.empty()) continue;
        const bool hit = std::any_of(r.begin(), r.end(), [&](int s) { return h.count(s) > 0; });
        if (hit) ++matched;
    }
    if (rep.ref_count == 0 && rep.hyp_count == 0)
        throw std::invalid_argument("f1_similarity: no shot has a similarity list on either side");
    rep.matched = matched;
    if (rep.hyp_count > 0) rep.precision = static_cast<double>(matched) / rep.hyp_count;
    if (rep.ref_count > 0) rep.recall = static_cast<double>(matched) / rep.ref_count;
    if (rep.precision + rep.recall > 0.0)
        rep.f1 = 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall);
    return rep;
}

shots::ShotLabeling align_labels(const std::vector<shots::Shot>& reference_shots,
                                 const std::vector<shots::Shot>& hypothesis_shots,
                                 const shots::ShotLabeling& hypothesis_labeling) {
    if (hypothesis_labeling.labels.size() != hypothesis_shots.size())
        throw std::invalid_argument("align_labels: labeling does not match hypothesis shots");

    shots::ShotLabeling out;
    out.labels.assign(reference_shots.size(), -1);
    for (std::size_t r = 0; r < reference_shots.size(); ++r) {
        long best_overlap = -1;
        std::size_t best = 0;
        for (std::size_t h = 0; h < hypothesis_shots.size(); ++h) {
            const long lo = std::max(reference_shots[r].start_frame,
                                     hypothesis_shots[h].start_frame);
            const long hi = std::min(reference_shots[r].end_frame,
                                     hypothesis_shots[h].end_frame);
            const long ov = hi - lo + 1;
            if (ov > best_overlap) {
                best_overlap = ov;
                best = h;
            }
        }
        out.labels[r] = hypothesis_labeling.labels[best];
    }

    const int n = static_cast<int>(out.labels.size());
    std::unordered_map<int, std::vector<int>> members;
    for (int i = 0; i < n; ++i) members[out.labels[i]].push_back(i);
    out.similar.assign(n, {});
    for (int i = 0; i < n; ++i) out.similar[i] = members[out.labels[i]];
    return out;
}

std::vector<SpeakerCountRow> speaker_count_report(const std::vector<Diarization>& systems,
                                                  const std::vector<SpeechSegment>& segments) {
    std::unordered_map<std::string, const SpeechSegment*> by_id;
    for (const auto& s : segments) by_id[s.id] = &s;

    std::vector<SpeakerCountRow> rows;
    for (const auto& sys : systems) {
        SpeakerCountRow row;
        row.system = sys.system;
        std::set<std::string> hyp, ref;
        for (const auto& [seg_id, label] : sys.label_of) {
            hyp.insert(label);
            auto it = by_id.find(seg_id);
            if (it != by_id.end() && !it->second->reference_speaker.empty())
                ref.insert(it->second->reference_speaker);
        }
        row.hypothesized = static_cast<int>(hyp.size());
        row.reference = static_cast<int>(ref.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace tvdiar::eval
