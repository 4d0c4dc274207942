#include "tvdiar/pattern_miner.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace tvdiar::patterns {

ShotSequence build_shot_sequence(const std::vector<shots::Shot>& shot_list,
                                 const shots::ShotLabeling& labeling) {
    if (labeling.labels.size() != shot_list.size())
        throw std::invalid_argument("build_shot_sequence: labeling size mismatch");
    ShotSequence seq;
    seq.labels = labeling.labels;
    seq.start_times.reserve(shot_list.size());
    seq.end_times.reserve(shot_list.size());
    for (const auto& s : shot_list) {
        seq.start_times.push_back(s.start_time);
        seq.end_times.push_back(s.end_time);
    }
    return seq;
}

std::vector<AlternationRun> scan_alternations(const std::vector<int>& labels, int min_len) {
    if (min_len < 2) throw std::invalid_argument("scan_alternations: min_len must be >= 2");
    std::vector<AlternationRun> runs;
    const int n = static_cast<int>(labels.size());
    int i = 0;
    while (i + 1 < n) {
        if (labels[i] == labels[i + 1]) {
            ++i;
            continue;
        }
        int j = i + 1;
        while (j + 1 < n && labels[j + 1] == labels[j - 1]) ++j;
        if (j - i + 1 >= min_len) {
            AlternationRun r;
            r.label_a = std::min(labels[i], labels[i + 1]);
            r.label_b = std::max(labels[i], labels[i + 1]);
            r.start_pos = i;
            r.end_pos = j;
            runs.push_back(r);
        }
        i = j;  // the next run may reuse this boundary shot
    }
    return runs;
}

PatternSet extract_patterns(const ShotSequence& seq, bool extended) {
    const auto runs = scan_alternations(seq.labels, extended ? 2 : 3);

    PatternSet ps;
    ps.extended = extended;
    std::map<std::pair<int, int>, int> slot;  // label pair -> pattern index
    for (const auto& r : runs) {
        const auto key = std::make_pair(r.label_a, r.label_b);
        auto it = slot.find(key);
        if (it == slot.end()) {
            DialoguePattern p;
            p.labels = {r.label_a, r.label_b};
            p.from_extension = true;
            it = slot.emplace(key, static_cast<int>(ps.patterns.size())).first;
            ps.patterns.push_back(std::move(p));
        }
        DialoguePattern& p = ps.patterns[it->second];
        Occurrence occ;
        occ.start_pos = r.start_pos;
        occ.end_pos = r.end_pos;
        occ.start_time = seq.start_times[r.start_pos];
        occ.end_time = seq.end_times[r.end_pos];
        p.occurrences.push_back(occ);
        if (r.length() >= 3) p.from_extension = false;
    }
    // runs arrive in scan order, so occurrence lists are already sorted
    std::sort(ps.patterns.begin(), ps.patterns.end(),
              [](const DialoguePattern& a, const DialoguePattern& b) {
                  if (a.occurrences.front().start_pos != b.occurrences.front().start_pos)
                      return a.occurrences.front().start_pos < b.occurrences.front().start_pos;
                  return a.labels < b.labels;
              });
    for (std::size_t k = 0; k < ps.patterns.size(); ++k) ps.patterns[k].id = static_cast<int>(k);
    return ps;
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

PatternSet merge_patterns(const PatternSet& ps) {
    const int n = static_cast<int>(ps.patterns.size());
    UnionFind uf(n);
    std::unordered_map<int, int> owner;  // shot label -> first pattern seen with it
    for (int k = 0; k < n; ++k)
        for (int lab : ps.patterns[k].labels) {
            auto [it, fresh] = owner.emplace(lab, k);
            if (!fresh) uf.unite(k, it->second);
        }

    std::unordered_map<int, int> group_slot;  // root -> merged index
    PatternSet out;
    out.extended = ps.extended;
    for (int k = 0; k < n; ++k) {
        const int r = uf.find(k);
        auto [it, fresh] = group_slot.emplace(r, static_cast<int>(out.patterns.size()));
        if (fresh) {
            DialoguePattern p;
            p.from_extension = true;
            out.patterns.push_back(std::move(p));
        }
        DialoguePattern& dst = out.patterns[it->second];
        const DialoguePattern& src = ps.patterns[k];
        dst.labels.insert(src.labels.begin(), src.labels.end());
        dst.occurrences.insert(dst.occurrences.end(), src.occurrences.begin(),
                               src.occurrences.end());
        dst.segment_ids.insert(dst.segment_ids.end(), src.segment_ids.begin(),
                               src.segment_ids.end());
        if (!src.from_extension) dst.from_extension = false;
        if (!fresh) dst.merged = true;
    }
    for (auto& p : out.patterns) {
        std::sort(p.occurrences.begin(), p.occurrences.end(),
                  [](const Occurrence& a, const Occurrence& b) {
                      return a.start_pos != b.start_pos ? a.start_pos < b.start_pos
                                                        : a.end_pos < b.end_pos;
                  });
        std::sort(p.segment_ids.begin(), p.segment_ids.end());
    }
    std::sort(out.patterns.begin(), out.patterns.end(),
              [](const DialoguePattern& a, const DialoguePattern& b) {
                  if (a.occurrences.front().start_pos != b.occurrences.front().start_pos)
                      return a.occurrences.front().start_pos < b.occurrences.front().start_pos;
                  return a.labels < b.labels;
              });
    for (std::size_t k = 0; k < out.patterns.size(); ++k) out.patterns[k].id = static_cast<int>(k);
    return out;
}

void assign_utterances(PatternSet& ps, const std::vector<SpeechSegment>& segments) {
    for (auto& p : ps.patterns) p.segment_ids.clear();
    for (const auto& seg : segments) {
        const double mid = seg.midpoint();
        int best_pat = -1;
        const Occurrence* best = nullptr;
        for (const auto& p : ps.patterns)
            for (const auto& occ : p.occurrences) {
                if (mid < occ.start_time || mid > occ.end_time) continue;
                if (!best || occ.start_time < best->start_time ||
                    (occ.start_time == best->start_time && occ.start_pos < best->start_pos)) {
                    best = &occ;
                    best_pat = p.id;
                }
            }
        if (best_pat >= 0) ps.patterns[best_pat].segment_ids.push_back(seg.id);
    }
}

CoverageStats coverage_stats(const PatternSet& ps, const std::vector<SpeechSegment>& segments) {
    CoverageStats st;
    st.pattern_count = static_cast<int>(ps.patterns.size());

    std::unordered_map<std::string, const SpeechSegment*> by_id;
    for (const auto& seg : segments) {
        st.total_speech += seg.duration();
        by_id[seg.id] = &seg;
    }

    double speakers_sum = 0.0;
    bool have_speakers = false;
    for (const auto& p : ps.patterns) {
        std::set<std::string> spk;
        for (const auto& id : p.segment_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw std::invalid_argument("coverage_stats: unknown segment '" + id + "'");
            st.covered_speech += it->second->duration();
            if (!it->second->reference_speaker.empty()) spk.insert(it->second->reference_speaker);
        }
        if (!spk.empty()) have_speakers = true;
        speakers_sum += static_cast<double>(spk.size());
    }

    if (st.total_speech > 0.0) st.coverage = st.covered_speech / st.total_speech;
    if (st.pattern_count > 0) {
        st.mean_speech_per_pattern = st.covered_speech / st.pattern_count;
        if (have_speakers) st.mean_speakers_per_pattern = speakers_sum / st.pattern_count;
    }
    return st;
}

}  // namespace tvdiar::patterns
