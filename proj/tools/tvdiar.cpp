#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvdiar/eval.hpp"
#include "tvdiar/io.hpp"
#include "tvdiar/pipeline.hpp"
#include "tvdiar/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tvdiar;

namespace {

shots::ShotConfig parse_shot_config(const std::string& grid, const std::string& bins, double tau1,
                                    double tau2) {
    shots::ShotConfig cfg;
    cfg.cut_threshold = tau1;
    cfg.similarity_threshold = tau2;
    if (std::sscanf(grid.c_str(), "%dx%d", &cfg.grid_rows, &cfg.grid_cols) != 2)
        throw CLI::ValidationError("--grid", "expected RxC, e.g. 5x6");
    if (std::sscanf(bins.c_str(), "%d,%d,%d", &cfg.bins_h, &cfg.bins_s, &cfg.bins_v) != 3)
        throw CLI::ValidationError("--bins", "expected H,S,V, e.g. 8,4,4");
    cfg.validate();
    return cfg;
}

std::unordered_map<std::string, Eigen::VectorXd> embedding_map(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& list) {
    std::unordered_map<std::string, Eigen::VectorXd> map;
    for (const auto& [id, v] : list) map[id] = v;
    return map;
}

Diarization read_reference(const fs::path& file, const std::vector<SpeechSegment>& segments) {
    if (file.extension() == ".rttm") return io::read_rttm(file, segments);
    Diarization dz;
    dz.system = "reference";
    for (const auto& seg : io::read_segments(file)) {
        if (seg.reference_speaker.empty())
            throw std::runtime_error("reference segment '" + seg.id + "' has no speaker label");
        dz.label_of[seg.id] = seg.reference_speaker;
    }
    return dz;
}

void print_f1(const char* what, const eval::F1Report& rep) {
    std::printf("%-12s precision %.4f  recall %.4f  f1 %.4f  (%d matched, %d hyp, %d ref)\n",
                what, rep.precision, rep.recall, rep.f1, rep.matched, rep.hyp_count,
                rep.ref_count);
}

json f1_json(const eval::F1Report& rep) {
    return {{"precision", rep.precision}, {"recall", rep.recall},     {"f1", rep.f1},
            {"matched", rep.matched},     {"hyp_count", rep.hyp_count}, {"ref_count", rep.ref_count}};
}

void maybe_write_json(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-step visually constrained speaker diarization toolkit"};
    app.require_subcommand(1);

    // ---- shots ----------------------------------------------------------
    std::string shots_input, shots_out, shots_grid = "5x6", shots_bins = "8,4,4", shots_dump;
    double tau1 = 0.5, tau2 = 0.9, shots_fps = 25.0;
    int lookback = 0;
    auto* cmd_shots = app.add_subcommand("shots", "detect shot cuts and similar shots");
    cmd_shots->add_option("--input", shots_input, "frame directory (PPM) or histogram CSV")
        ->required();
    cmd_shots->add_option("--tau1", tau1, "cut threshold on frame correlation");
    cmd_shots->add_option("--tau2", tau2, "shot similarity threshold");
    cmd_shots->add_option("--grid", shots_grid, "histogram block grid RxC");
    cmd_shots->add_option("--bins", shots_bins, "HSV bins H,S,V");
    cmd_shots->add_option("--fps", shots_fps, "frame rate for timestamps");
    cmd_shots->add_option("--lookback", lookback, "compare only this many previous shots (0 = all)");
    cmd_shots->add_option("--dump-histograms", shots_dump, "also write per-frame histograms CSV");
    cmd_shots->add_option("--out", shots_out, "output shots CSV")->required();

    // ---- patterns -------------------------------------------------------
    std::string pat_shots, pat_segments, pat_out;
    bool pat_extended = false, pat_no_merge = false;
    auto* cmd_patterns = app.add_subcommand("patterns", "mine dialogue patterns from shot labels");
    cmd_patterns->add_option("--shots", pat_shots, "shots CSV")->required();
    cmd_patterns->add_option("--segments", pat_segments, "segments CSV or SRT")->required();
    cmd_patterns->add_flag("--extended", pat_extended, "include two-shot alternations");
    cmd_patterns->add_flag("--no-merge", pat_no_merge, "keep patterns sharing a label separate");
    cmd_patterns->add_option("--out", pat_out, "output patterns JSON");
    auto* cmd_pat_stats = cmd_patterns->add_subcommand("stats", "print the coverage table");

    // ---- synth ----------------------------------------------------------
    std::string synth_config, synth_out;
    std::optional<std::uint64_t> synth_seed;
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic episode");
    cmd_synth->add_option("--config", synth_config, "episode config JSON")->required();
    cmd_synth->add_option("--seed", synth_seed, "override the config seed");
    cmd_synth->add_option("--out", synth_out, "output directory")->required();

    // ---- diarize --------------------------------------------------------
    std::string dz_shots, dz_frames, dz_segments, dz_embeddings, dz_train, dz_mode = "cst2s",
                dz_out, dz_grid = "5x6", dz_bins = "8,4,4";
    double dz_tau1 = 0.5, dz_tau2 = 0.9, dz_fps = 25.0;
    std::optional<double> dz_epsilon;
    bool dz_extended = false, dz_no_merge = false, dz_normalize = false;
    auto* cmd_diarize = app.add_subcommand("diarize", "run the diarization pipeline");
    auto* opt_dz_shots = cmd_diarize->add_option("--shots", dz_shots, "shots CSV");
    cmd_diarize->add_option("--frames", dz_frames, "frame directory (replaces --shots)")
        ->excludes(opt_dz_shots);
    cmd_diarize->add_option("--tau1", dz_tau1, "cut threshold (with --frames)");
    cmd_diarize->add_option("--tau2", dz_tau2, "similarity threshold (with --frames)");
    cmd_diarize->add_option("--grid", dz_grid, "histogram grid (with --frames)");
    cmd_diarize->add_option("--bins", dz_bins, "HSV bins (with --frames)");
    cmd_diarize->add_option("--fps", dz_fps, "frame rate (with --frames)");
    cmd_diarize->add_option("--segments", dz_segments, "segments CSV or SRT")->required();
    cmd_diarize->add_option("--embeddings", dz_embeddings, "segment embeddings CSV")->required();
    cmd_diarize->add_option("--train", dz_train, "labeled training embeddings CSV");
    cmd_diarize->add_option("--mode", dz_mode, "naive|local|2s|cst2s");
    cmd_diarize->add_option("--epsilon", dz_epsilon, "override covariance regularization");
    cmd_diarize->add_flag("--extended", dz_extended, "include two-shot alternations");
    cmd_diarize->add_flag("--no-merge", dz_no_merge, "keep patterns sharing a label separate");
    cmd_diarize->add_flag("--normalize", dz_normalize, "unit-normalize embeddings at ingestion");
    cmd_diarize->add_option("--out", dz_out, "output directory")->required();

    // ---- eval -----------------------------------------------------------
    auto* cmd_eval = app.add_subcommand("eval", "score pipeline outputs");
    cmd_eval->require_subcommand(1);
    std::string der_ref, der_hyp, der_segments, der_patterns, der_json;
    auto* cmd_der = cmd_eval->add_subcommand("der", "diarization error rate");
    cmd_der->add_option("--ref", der_ref, "reference RTTM or segments CSV with speakers")
        ->required();
    cmd_der->add_option("--hyp", der_hyp, "hypothesis RTTM")->required();
    cmd_der->add_option("--segments", der_segments, "segments CSV or SRT")->required();
    cmd_der->add_option("--per-dialogue", der_patterns,
                        "patterns JSON; adds per-dialogue and duration-weighted DER");
    cmd_der->add_option("--json", der_json, "write the report as JSON");

    std::string cuts_ref, cuts_hyp, cuts_json;
    long cuts_tol = 1;
    auto* cmd_cuts = cmd_eval->add_subcommand("cuts", "shot cut F1");
    cmd_cuts->add_option("--ref", cuts_ref, "reference shots CSV")->required();
    cmd_cuts->add_option("--hyp", cuts_hyp, "hypothesis shots CSV")->required();
    cmd_cuts->add_option("--tolerance", cuts_tol, "match tolerance in frames");
    cmd_cuts->add_option("--json", cuts_json, "write the report as JSON");

    std::string sim_ref, sim_hyp, sim_json;
    auto* cmd_sim = cmd_eval->add_subcommand("sim", "shot similarity F1");
    cmd_sim->add_option("--ref", sim_ref, "reference shots CSV")->required();
    cmd_sim->add_option("--hyp", sim_hyp, "hypothesis shots CSV")->required();
    cmd_sim->add_option("--json", sim_json, "write the report as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_shots) {
            const auto cfg = parse_shot_config(shots_grid, shots_bins, tau1, tau2);
            shots::ShotConfig with_lookback = cfg;
            with_lookback.lookback_shots = lookback;
            const auto frames = fs::is_directory(shots_input)
                                    ? io::load_frame_dir(shots_input, cfg, shots_fps)
                                    : io::read_histograms(shots_input);
            const auto shot_list = shots::detect_cuts(frames, with_lookback);
            const auto labeling = shots::detect_similar_shots(frames, shot_list, with_lookback);
            io::write_shots(shots_out, shot_list, labeling);
            if (!shots_dump.empty()) io::write_histograms(shots_dump, frames);
            int labels = 0;
            for (int l : labeling.labels) labels = std::max(labels, l + 1);
            std::printf("%zu frames, %zu shots, %d labels -> %s\n", frames.size(),
                        shot_list.size(), labels, shots_out.c_str());
        } else if (*cmd_patterns) {
            auto [shot_list, labeling] = io::read_shots(pat_shots);
            const auto segments = io::read_segments(pat_segments);
            auto ps = patterns::extract_patterns(patterns::build_shot_sequence(shot_list, labeling),
                                                 pat_extended);
            if (!pat_no_merge) ps = patterns::merge_patterns(ps);
            patterns::assign_utterances(ps, segments);
            const auto st = patterns::coverage_stats(ps, segments);
            if (*cmd_pat_stats) {
                std::printf("%-28s %10s %12s %10s\n", "metric", "value", "", "");
                std::printf("%-28s %10d\n", "patterns", st.pattern_count);
                std::printf("%-28s %9.2f%%\n", "coverage", 100.0 * st.coverage);
                std::printf("%-28s %10.2f s\n", "covered speech", st.covered_speech);
                std::printf("%-28s %10.2f s\n", "mean speech per pattern",
                            st.mean_speech_per_pattern);
                if (st.mean_speakers_per_pattern > 0.0)
                    std::printf("%-28s %10.2f\n", "mean speakers per pattern",
                                st.mean_speakers_per_pattern);
                std::printf("\n%-8s %-14s %-6s %-10s %s\n", "pattern", "labels", "occs",
                            "segments", "span");
                for (const auto& p : ps.patterns) {
                    std::string labs;
                    for (int l : p.labels) labs += (labs.empty() ? "" : "+") + std::to_string(l);
                    std::printf("%-8d %-14s %-6zu %-10zu %.1f-%.1f s\n", p.id, labs.c_str(),
                                p.occurrences.size(), p.segment_ids.size(),
                                p.occurrences.front().start_time, p.occurrences.back().end_time);
                }
            }
            if (!pat_out.empty()) {
                io::write_patterns(pat_out, ps);
                std::printf("%d patterns, coverage %.2f%% -> %s\n", st.pattern_count,
                            100.0 * st.coverage, pat_out.c_str());
            } else if (!*cmd_pat_stats) {
                throw CLI::ValidationError("--out", "required unless 'stats' is given");
            }
        } else if (*cmd_synth) {
            auto cfg = io::read_synth_config(synth_config);
            if (synth_seed) cfg.seed = *synth_seed;
            const auto ep = synth::generate_synthetic_episode(cfg);
            fs::create_directories(synth_out);
            const fs::path dir = synth_out;
            io::write_shots(dir / "shots.csv", ep.shot_list, ep.labeling);
            io::write_segments(dir / "segments.csv", ep.segments);
            io::write_embeddings(dir / "embeddings.csv", ep.embeddings);
            if (!ep.training.empty()) io::write_training(dir / "training.csv", ep.training);
            io::write_rttm(dir / "reference.rttm", ep.reference, ep.segments, "episode");
            std::printf("%zu shots, %zu dialogues, %zu segments -> %s\n", ep.shot_list.size(),
                        ep.dialogues.size(), ep.segments.size(), synth_out.c_str());
        } else if (*cmd_diarize) {
            pipeline::PipelineInputs inputs;
            bool shots_computed = false;
            if (!dz_frames.empty()) {
                const auto cfg = parse_shot_config(dz_grid, dz_bins, dz_tau1, dz_tau2);
                const auto frames = io::load_frame_dir(dz_frames, cfg, dz_fps);
                inputs.shot_list = shots::detect_cuts(frames, cfg);
                inputs.labeling = shots::detect_similar_shots(frames, inputs.shot_list, cfg);
                shots_computed = true;
            } else if (!dz_shots.empty()) {
                std::tie(inputs.shot_list, inputs.labeling) = io::read_shots(dz_shots);
            } else {
                throw CLI::ValidationError("--shots", "either --shots or --frames is required");
            }
            inputs.segments = io::read_segments(dz_segments);
            inputs.embeddings = embedding_map(io::read_embeddings(dz_embeddings));
            if (!dz_train.empty())
                inputs.wcc = emb::compute_within_class_cov(io::read_training(dz_train));
            if (dz_epsilon) {
                if (!inputs.wcc) {
                    const int d = inputs.embeddings.empty()
                                      ? 1
                                      : static_cast<int>(inputs.embeddings.begin()->second.size());
                    inputs.wcc = emb::WithinClassCovariance::identity(d);
                }
                inputs.wcc->epsilon = *dz_epsilon;
            }
            pipeline::PipelineConfig config;
            config.mode = pipeline::parse_mode(dz_mode);
            config.extended = dz_extended;
            config.merge = !dz_no_merge;
            config.normalize = dz_normalize;
            const auto result = pipeline::run_pipeline(inputs, config);
            io::write_pipeline_artifacts(dz_out, result, inputs.segments, config);
            if (shots_computed)
                io::write_shots(fs::path(dz_out) / "shots.csv", inputs.shot_list, inputs.labeling);
            std::printf("mode %s: %d patterns, coverage %.2f%%, %zu local speakers",
                        pipeline::mode_name(config.mode).c_str(), result.coverage.pattern_count,
                        100.0 * result.coverage.coverage, result.local_speakers.size());
            if (result.global_step)
                std::printf(", %d global clusters", result.global_step->partition.cluster_count);
            std::printf(", %zu segments labeled -> %s\n", result.diarization.label_of.size(),
                        dz_out.c_str());
        } else if (*cmd_der) {
            const auto segments = io::read_segments(der_segments);
            const auto reference = read_reference(der_ref, segments);
            const auto hypothesis = io::read_rttm(der_hyp, segments);
            const auto rep = eval::der(reference, hypothesis, segments);
            std::printf("DER %.4f  (%.2f of %.2f s misattributed, %d hyp / %d ref speakers)\n",
                        rep.der, rep.confusion_seconds, rep.scored_seconds, rep.hyp_speakers,
                        rep.ref_speakers);
            for (const auto& [h, r] : rep.mapping) std::printf("  %-12s -> %s\n", h.c_str(), r.c_str());
            json out = {{"der", rep.der},
                        {"scored_seconds", rep.scored_seconds},
                        {"confusion_seconds", rep.confusion_seconds},
                        {"hyp_speakers", rep.hyp_speakers},
                        {"ref_speakers", rep.ref_speakers},
                        {"mapping", rep.mapping}};
            if (!der_patterns.empty()) {
                const auto ps = io::read_patterns(der_patterns);
                std::vector<std::pair<double, double>> rated;
                json per = json::array();
                std::printf("\n%-8s %-10s %-10s\n", "pattern", "DER", "seconds");
                std::unordered_map<std::string, const SpeechSegment*> by_id;
                for (const auto& s : segments) by_id[s.id] = &s;
                for (const auto& p : ps.patterns) {
                    Diarization h_local;
                    h_local.system = hypothesis.system;
                    double seconds = 0.0;
                    for (const auto& id : p.segment_ids) {
                        auto it = hypothesis.label_of.find(id);
                        if (it == hypothesis.label_of.end()) continue;
                        h_local.label_of[id] = it->second;
                        auto seg = by_id.find(id);
                        if (seg != by_id.end()) seconds += seg->second->duration();
                    }
                    if (h_local.label_of.empty()) continue;
                    const auto local = eval::der(reference, h_local, segments);
                    rated.emplace_back(local.der, local.scored_seconds);
                    per.push_back({{"pattern", p.id},
                                   {"der", local.der},
                                   {"seconds", local.scored_seconds}});
                    std::printf("%-8d %-10.4f %-10.2f\n", p.id, local.der, local.scored_seconds);
                }
                const double weighted = eval::single_show_der(rated);
                std::printf("%-8s %-10.4f\n", "show", weighted);
                out["per_dialogue"] = per;
                out["single_show_der"] = weighted;
            }
            maybe_write_json(der_json, out);
        } else if (*cmd_cuts) {
            const auto ref = io::read_shots(cuts_ref);
            const auto hyp = io::read_shots(cuts_hyp);
            const auto rep =
                eval::f1_cuts(shots::cut_frames(ref.first), shots::cut_frames(hyp.first), cuts_tol);
            print_f1("cuts", rep);
            maybe_write_json(cuts_json, f1_json(rep));
        } else if (*cmd_sim) {
            const auto ref = io::read_shots(sim_ref);
            const auto hyp = io::read_shots(sim_hyp);
            const auto aligned = eval::align_labels(ref.first, hyp.first, hyp.second);
            const auto rep = eval::f1_similarity(ref.second, aligned);
            print_f1("similarity", rep);
            maybe_write_json(sim_json, f1_json(rep));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
