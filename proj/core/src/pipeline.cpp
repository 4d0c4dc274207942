#include "tvdiar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvdiar::pipeline {

Mode parse_mode(const std::string& name) {
    if (name == "naive") return Mode::naive;
    if (name == "local") return Mode::local_only;
    if (name == "2s") return Mode::two_step;
    if (name == "cst2s") return Mode::constrained_two_step;
    throw std::invalid_argument("unknown mode '" + name + "' (naive|local|2s|cst2s)");
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::naive: return "naive";
        case Mode::local_only: return "local";
        case Mode::two_step: return "2s";
        case Mode::constrained_two_step: return "cst2s";
    }
    return "?";
}

namespace {

Eigen::VectorXd embedding_of(const std::unordered_map<std::string, Eigen::VectorXd>& embeddings,
                             const std::string& segment_id) {
    auto it = embeddings.find(segment_id);
    if (it == embeddings.end())
        throw std::invalid_argument("no embedding for segment '" + segment_id + "'");
    return it->second;
}

}  // namespace

hac::Partition local_diarize(const std::vector<std::string>& utterance_ids,
                             const std::unordered_map<std::string, Eigen::VectorXd>& embeddings,
                             const emb::WithinClassCovariance& wcc) {
    if (utterance_ids.empty())
        throw std::invalid_argument("local_diarize: dialogue has no utterances");
    emb::Whitener whitener(wcc);
    std::vector<hac::Instance> instances;
    instances.reserve(utterance_ids.size());
    for (std::size_t i = 0; i < utterance_ids.size(); ++i) {
        hac::Instance inst;
        inst.id = static_cast<int>(i);
        inst.vector = whitener.apply(embedding_of(embeddings, utterance_ids[i]));
        instances.push_back(std::move(inst));
    }
    const auto forest = hac::agglomerate(instances, {});
    return hac::cut_forest(forest, hac::pairwise_distances(instances));
}

std::unordered_map<std::string, int> naive_assign(const patterns::DialoguePattern& pattern,
                                                  const std::vector<shots::Shot>& shot_list,
                                                  const shots::ShotLabeling& labeling,
                                                  const std::vector<SpeechSegment>& segments) {
    if (labeling.labels.size() != shot_list.size())
        throw std::invalid_argument("naive_assign: labeling does not match shots");
    if (pattern.occurrences.empty())
        throw std::invalid_argument("naive_assign: pattern without occurrences");

    auto shot_at = [&](double t) {
        // shots partition the timeline; take the last shot starting at or before t
        int lo = 0, hi = static_cast<int>(shot_list.size()) - 1;
        while (lo < hi) {
            const int mid = (lo + hi + 1) / 2;
            if (shot_list[mid].start_time <= t)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    };

    std::unordered_map<std::string, int> out;
    for (const auto& seg : segments) {
        if (std::find(pattern.segment_ids.begin(), pattern.segment_ids.end(), seg.id) ==
            pattern.segment_ids.end())
            continue;
        const double mid = seg.midpoint();
        // pick the occurrence containing the midpoint, or the nearest one
        double best_gap = std::numeric_limits<double>::infinity();
        const patterns::Occurrence* where = nullptr;
        for (const auto& occ : pattern.occurrences) {
            if (mid >= occ.start_time && mid <= occ.end_time) {
                where = &occ;
                break;
            }
            const double near = mid < occ.start_time ? occ.start_time : occ.end_time;
            const double gap = std::abs(mid - near);
            if (gap < best_gap) {
                best_gap = gap;
                where = &occ;
            }
        }
        const int pos =
            std::clamp(shot_at(std::clamp(mid, where->start_time, where->end_time)),
                       where->start_pos, where->end_pos);
        out[seg.id] = labeling.labels[pos];
    }
    return out;
}

std::vector<LocalSpeaker> build_global_instances(
    const std::vector<LocalResult>& locals,
    const std::unordered_map<std::string, Eigen::VectorXd>& embeddings, bool normalize) {
    std::vector<LocalSpeaker> out;
    for (const auto& lr : locals) {
        if (lr.partition.cluster_of.size() != lr.utterance_ids.size())
            throw std::invalid_argument("build_global_instances: partition size mismatch");
        std::vector<std::vector<std::string>> members(lr.partition.cluster_count);
        for (std::size_t i = 0; i < lr.utterance_ids.size(); ++i)
            members[lr.partition.cluster_of[i]].push_back(lr.utterance_ids[i]);
        for (int c = 0; c < lr.partition.cluster_count; ++c) {
            LocalSpeaker spk;
            spk.id = static_cast<int>(out.size());
            spk.pattern_id = lr.pattern_id;
            spk.local_cluster = c;
            spk.segment_ids = members[c];
            Eigen::VectorXd sum;
            for (const auto& id : spk.segment_ids) {
                const Eigen::VectorXd v = embedding_of(embeddings, id);
                if (sum.size() == 0)
                    sum = v;
                else
                    sum += v;
            }
            spk.representative = sum / static_cast<double>(spk.segment_ids.size());
            if (normalize) spk.representative = emb::normalized(spk.representative);
            out.push_back(std::move(spk));
        }
    }
    return out;
}

hac::ConstraintSet derive_constraints(const std::vector<LocalSpeaker>& speakers) {
    hac::ConstraintSet cs;
    for (std::size_t i = 0; i < speakers.size(); ++i)
        for (std::size_t j = i + 1; j < speakers.size(); ++j)
            if (speakers[i].pattern_id == speakers[j].pattern_id)
                cs.add(speakers[i].id, speakers[j].id);
    return cs;
}

GlobalResult global_diarize(const std::vector<LocalSpeaker>& speakers,
                            const hac::ConstraintSet& constraints, bool constrained,
                            const emb::WithinClassCovariance& wcc) {
    if (speakers.empty()) throw std::invalid_argument("global_diarize: no local speakers");
    emb::Whitener whitener(wcc);
    std::vector<hac::Instance> instances;
    instances.reserve(speakers.size());
    for (const auto& spk : speakers) {
        hac::Instance inst;
        inst.id = spk.id;
        inst.vector = whitener.apply(spk.representative);
        instances.push_back(std::move(inst));
    }
    GlobalResult res;
    res.forest = hac::agglomerate(instances, constrained ? constraints : hac::ConstraintSet{});
    res.partition = hac::cut_forest(res.forest, hac::pairwise_distances(instances));
    return res;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
    }
}

}  // namespace

PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config) {
    PipelineResult res;
    res.diarization.system = mode_name(config.mode);

    auto seq = stage("shot_sequence",
                     [&] { return patterns::build_shot_sequence(inputs.shot_list, inputs.labeling); });
    res.pattern_set = stage("extract_patterns", [&] {
        auto ps = patterns::extract_patterns(seq, config.extended);
        return config.merge ? patterns::merge_patterns(ps) : ps;
    });
    stage("assign_utterances", [&] {
        patterns::assign_utterances(res.pattern_set, inputs.segments);
        return 0;
    });
    res.coverage = stage("coverage_stats",
                         [&] { return patterns::coverage_stats(res.pattern_set, inputs.segments); });

    std::unordered_map<std::string, Eigen::VectorXd> embeddings = inputs.embeddings;
    if (config.normalize)
        for (auto& [id, v] : embeddings) v = emb::normalized(v);

    emb::WithinClassCovariance wcc;
    if (inputs.wcc) {
        wcc = *inputs.wcc;
        res.w_source = "training";
    } else {
        int d = 1;
        if (!embeddings.empty()) d = static_cast<int>(embeddings.begin()->second.size());
        wcc = emb::WithinClassCovariance::identity(d);
        res.w_source = "identity";
    }
    res.epsilon = wcc.epsilon;

    if (config.mode == Mode::naive) {
        stage("naive_assign", [&] {
            for (const auto& p : res.pattern_set.patterns) {
                if (p.segment_ids.empty()) continue;
                for (const auto& [seg, label] :
                     naive_assign(p, inputs.shot_list, inputs.labeling, inputs.segments))
                    res.diarization.label_of[seg] = "L" + std::to_string(label);
            }
            return 0;
        });
        return res;
    }

    stage("local_diarize", [&] {
        for (const auto& p : res.pattern_set.patterns) {
            if (p.segment_ids.empty()) continue;
            LocalResult lr;
            lr.pattern_id = p.id;
            lr.utterance_ids = p.segment_ids;
            lr.partition = local_diarize(lr.utterance_ids, embeddings, wcc);
            res.locals.push_back(std::move(lr));
        }
        return 0;
    });
    res.local_speakers = stage("build_global_instances", [&] {
        return build_global_instances(res.locals, embeddings, config.normalize);
    });
    res.constraints =
        stage("derive_constraints", [&] { return derive_constraints(res.local_speakers); });

    if (config.mode == Mode::local_only) {
        for (const auto& spk : res.local_speakers) {
            const std::string label =
                "p" + std::to_string(spk.pattern_id) + ".c" + std::to_string(spk.local_cluster);
            for (const auto& seg : spk.segment_ids) res.diarization.label_of[seg] = label;
        }
        return res;
    }

    if (res.local_speakers.empty()) return res;  // nothing covered, empty diarization

    const bool constrained = config.mode == Mode::constrained_two_step;
    res.global_step = stage("global_diarize", [&] {
        return global_diarize(res.local_speakers, res.constraints, constrained, wcc);
    });
    for (std::size_t i = 0; i < res.local_speakers.size(); ++i) {
        const std::string label = "S" + std::to_string(res.global_step->partition.cluster_of[i]);
        for (const auto& seg : res.local_speakers[i].segment_ids)
            res.diarization.label_of[seg] = label;
    }
    return res;
}

}  // namespace tvdiar::pipeline
