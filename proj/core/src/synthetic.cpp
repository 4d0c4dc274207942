#include "tvdiar/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tvdiar::synth {

void SyntheticEpisodeConfig::validate() const {
    if (num_speakers < 1 || num_dialogues < 1 || speakers_per_dialogue < 1 ||
        segments_per_speaker < 1 || embedding_dim < 1)
        throw std::invalid_argument("synthetic config: counts must be >= 1");
    if (separation <= 0.0) throw std::invalid_argument("synthetic config: separation must be > 0");
    if (coverage <= 0.0 || coverage > 1.0)
        throw std::invalid_argument("synthetic config: coverage must be in (0, 1]");
    if (speakers_per_dialogue > num_speakers)
        throw std::invalid_argument("synthetic config: more speakers per dialogue than speakers");
    if (embedding_dim < num_speakers)
        throw std::invalid_argument(
            "synthetic config: embedding dimension must be >= num_speakers");
    if (num_dialogues * speakers_per_dialogue < num_speakers)
        throw std::invalid_argument(
            "synthetic config: not every speaker can appear in a dialogue");
    if (synchronized_turns && speakers_per_dialogue != 2)
        throw std::invalid_argument("synthetic config: synchronized mode needs 2-speaker dialogues");
    if (synchronized_turns && 2 * segments_per_speaker < 3)
        throw std::invalid_argument(
            "synthetic config: synchronized mode needs >= 2 segments per speaker");
    if (shot_seconds <= 0.0 || fps <= 0.0)
        throw std::invalid_argument("synthetic config: shot_seconds and fps must be > 0");
    if (train_segments_per_speaker < 0)
        throw std::invalid_argument("synthetic config: negative training size");
}

int SyntheticEpisode::dialogue_of(const std::string& segment_id) const {
    for (std::size_t d = 0; d < dialogues.size(); ++d)
        for (const auto& id : dialogues[d].segment_ids)
            if (id == segment_id) return static_cast<int>(d);
    return -1;
}

namespace {

struct Builder {
    const SyntheticEpisodeConfig& cfg;
    std::mt19937_64 rng;
    std::normal_distribution<double> gauss{0.0, 1.0};

    long frames_per_shot;
    double shot_span;
    int next_label = 0;

    SyntheticEpisode ep;
    std::vector<int> shot_labels;
    std::vector<Eigen::VectorXd> centers;
    std::vector<int> bag;  // speaker deck for dialogue casting

    explicit Builder(const SyntheticEpisodeConfig& c)
        : cfg(c),
          rng(c.seed),
          frames_per_shot(std::max<long>(1, std::lround(c.shot_seconds * c.fps))),
          shot_span(frames_per_shot / c.fps) {}

    Eigen::VectorXd draw(const Eigen::VectorXd& center) {
        Eigen::VectorXd v(cfg.embedding_dim);
        for (int i = 0; i < cfg.embedding_dim; ++i) v(i) = center(i) + gauss(rng);
        return v;
    }

    int add_shot(int label) {
        const int idx = static_cast<int>(shot_labels.size());
        shots::Shot s;
        s.id = idx;
        s.start_frame = idx * frames_per_shot;
        s.end_frame = (idx + 1) * frames_per_shot - 1;
        s.start_time = s.start_frame / cfg.fps;
        s.end_time = (s.end_frame + 1) / cfg.fps;
        ep.shot_list.push_back(s);
        shot_labels.push_back(label);
        return idx;
    }

    void add_filler(int count) {
        for (int i = 0; i < count; ++i) add_shot(next_label++);
    }

    std::vector<int> cast_dialogue() {
        std::vector<int> picks, stash;
        while (static_cast<int>(picks.size()) < cfg.speakers_per_dialogue) {
            if (bag.empty()) {
                bag.resize(cfg.num_speakers);
                std::iota(bag.begin(), bag.end(), 0);
                std::shuffle(bag.begin(), bag.end(), rng);
            }
            const int x = bag.back();
            bag.pop_back();
            if (std::find(picks.begin(), picks.end(), x) != picks.end())
                stash.push_back(x);
            else
                picks.push_back(x);
        }
        bag.insert(bag.end(), stash.begin(), stash.end());
        return picks;
    }

    void add_segment(const std::string& id, double start, double end, int speaker) {
        SpeechSegment seg;
        seg.id = id;
        seg.start = start;
        seg.end = end;
        seg.reference_speaker = "spk" + std::to_string(speaker);
        ep.segments.push_back(seg);
        ep.embeddings.emplace_back(id, draw(centers[speaker]));
        ep.reference.label_of[id] = seg.reference_speaker;
    }

    SyntheticEpisode build() {
        ep.reference.system = "reference";
        centers.reserve(cfg.num_speakers);
        const double radius = cfg.separation / std::sqrt(2.0);
        for (int s = 0; s < cfg.num_speakers; ++s) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(cfg.embedding_dim);
            c(s) = radius;
            centers.push_back(std::move(c));
        }

        const int seg_per_dialogue = cfg.speakers_per_dialogue * cfg.segments_per_speaker;
        double in_run_speech = 0.0;

        add_filler(1);
        std::uniform_int_distribution<int> filler_count(1, 2);
        for (int d = 0; d < cfg.num_dialogues; ++d) {
            PlantedDialogue dlg;
            dlg.speakers = cast_dialogue();
            dlg.label_a = next_label++;
            dlg.label_b = next_label++;

            const int run_len = cfg.synchronized_turns ? seg_per_dialogue
                                                       : std::max(3, seg_per_dialogue);
            dlg.start_shot = static_cast<int>(shot_labels.size());
            for (int j = 0; j < run_len; ++j)
                add_shot(j % 2 == 0 ? dlg.label_a : dlg.label_b);
            dlg.end_shot = static_cast<int>(shot_labels.size()) - 1;

            const double run_start = ep.shot_list[dlg.start_shot].start_time;
            const double run_span = run_len * shot_span;
            for (int j = 0; j < seg_per_dialogue; ++j) {
                const int speaker = dlg.speakers[j % cfg.speakers_per_dialogue];
                const std::string id = "d" + std::to_string(d) + ".u" + std::to_string(j);
                double start, end;
                if (cfg.synchronized_turns) {
                    start = run_start + j * shot_span + 0.05 * shot_span;
                    end = run_start + (j + 1) * shot_span - 0.05 * shot_span;
                } else {
                    const double dur = run_span * 0.9 / seg_per_dialogue;
                    const double gap = run_span * 0.1 / (seg_per_dialogue + 1);
                    start = run_start + gap + j * (dur + gap);
                    end = start + dur;
                }
                add_segment(id, start, end, speaker);
                dlg.segment_ids.push_back(id);
                in_run_speech += end - start;
            }
            ep.dialogues.push_back(std::move(dlg));
            add_filler(filler_count(rng));
        }

        // pad speech outside the dialogues so in-run speech is the requested share
        const double out_speech = in_run_speech * (1.0 - cfg.coverage) / cfg.coverage;
        if (out_speech > 1e-9) {
            const double avg_dur = in_run_speech / (cfg.num_dialogues * seg_per_dialogue);
            const int n_out = std::max<int>(1, std::lround(out_speech / avg_dur));
            const double dur = out_speech / n_out;
            const int tail = static_cast<int>(std::ceil(out_speech * 1.25 / shot_span)) + 1;
            const double tail_start = ep.shot_list.back().end_time;
            add_filler(tail);
            const double gap = (tail * shot_span - out_speech) / (n_out + 1);
            double t = tail_start + gap;
            for (int j = 0; j < n_out; ++j) {
                add_segment("out.u" + std::to_string(j), t, t + dur, j % cfg.num_speakers);
                t += dur + gap;
            }
        }

        ep.labeling.labels = shot_labels;
        const int n_shots = static_cast<int>(shot_labels.size());
        std::vector<std::vector<int>> members(next_label);
        for (int i = 0; i < n_shots; ++i) members[shot_labels[i]].push_back(i);
        ep.labeling.similar.assign(n_shots, {});
        for (int i = 0; i < n_shots; ++i) ep.labeling.similar[i] = members[shot_labels[i]];

        for (int s = 0; s < cfg.num_speakers; ++s)
            for (int j = 0; j < cfg.train_segments_per_speaker; ++j)
                ep.training.push_back({"spk" + std::to_string(s), draw(centers[s])});

        return std::move(ep);
    }
};

}  // namespace

SyntheticEpisode generate_synthetic_episode(const SyntheticEpisodeConfig& config) {
    config.validate();
    Builder b(config);
    return b.build();
}

}  // namespace tvdiar::synth
