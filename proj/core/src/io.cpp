#include "tvdiar/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tvdiar::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& file, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(file, mode);
    if (!in) throw std::runtime_error("cannot open '" + file.string() + "' for reading");
    return in;
}

std::ofstream open_out(const fs::path& file, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(file, mode);
    if (!out) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string rstrip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
}

double to_double(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": bad number '" + s + "'");
    }
}

long to_long(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": bad integer '" + s + "'");
    }
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

}  // namespace

shots::Image read_ppm(const fs::path& file) {
    auto in = open_in(file, std::ios::binary);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw std::runtime_error(file.string() + ": not a binary PPM (P6)");

    auto next_int = [&]() {
        int v;
        while (true) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string comment;
                std::getline(in, comment);
                continue;
            }
            if (!(in >> v)) throw std::runtime_error(file.string() + ": truncated PPM header");
            return v;
        }
    };
    shots::Image img;
    img.width = next_int();
    img.height = next_int();
    const int maxval = next_int();
    if (img.width <= 0 || img.height <= 0 || maxval != 255)
        throw std::runtime_error(file.string() + ": unsupported PPM header");
    in.get();  // single whitespace after maxval

    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb.size()))
        throw std::runtime_error(file.string() + ": truncated PPM payload");
    return img;
}

void write_ppm(const fs::path& file, const shots::Image& img) {
    if (img.empty()) throw std::invalid_argument("write_ppm: empty image");
    auto out = open_out(file, std::ios::binary);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
}

std::vector<shots::FrameDescriptor> load_frame_dir(const fs::path& dir,
                                                   const shots::ShotConfig& cfg, double fps) {
    if (fps <= 0.0) throw std::invalid_argument("load_frame_dir: fps must be > 0");
    if (!fs::is_directory(dir))
        throw std::runtime_error("'" + dir.string() + "' is not a directory");

    std::vector<std::pair<long, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".ppm") continue;
        const std::string stem = entry.path().stem().string();
        if (stem.empty() || !std::all_of(stem.begin(), stem.end(),
                                         [](char c) { return c >= '0' && c <= '9'; }))
            continue;
        files.emplace_back(std::stol(stem), entry.path());
    }
    if (files.empty()) throw std::runtime_error("no frames (<index>.ppm) in '" + dir.string() + "'");
    std::sort(files.begin(), files.end());

    std::vector<shots::FrameDescriptor> frames;
    frames.reserve(files.size());
    for (const auto& [index, path] : files) {
        shots::FrameDescriptor fd;
        fd.frame_index = index;
        fd.timestamp = index / fps;
        fd.histogram = shots::compute_block_histograms(read_ppm(path), cfg);
        frames.push_back(std::move(fd));
    }
    return frames;
}

void write_histograms(const fs::path& file, const std::vector<shots::FrameDescriptor>& frames) {
    if (frames.empty()) throw std::invalid_argument("write_histograms: no frames");
    auto out = open_out(file);
    const auto& h0 = frames.front().histogram;
    out << "# grid=" << h0.rows << "x" << h0.cols << " bins=" << h0.bins_per_block << "\n";
    out << "frame_index,timestamp,block_index,bin_index,mass\n";
    for (const auto& f : frames) {
        for (std::size_t b = 0; b < f.histogram.blocks.size(); ++b)
            for (std::size_t k = 0; k < f.histogram.blocks[b].size(); ++k) {
                const double mass = f.histogram.blocks[b][k];
                if (mass == 0.0) continue;
                out << f.frame_index << "," << fmt("%.9f", f.timestamp) << "," << b << "," << k
                    << "," << fmt("%.17g", mass) << "\n";
            }
    }
}

std::vector<shots::FrameDescriptor> read_histograms(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    int rows = 0, cols = 0, bins = 0;
    std::vector<shots::FrameDescriptor> frames;
    std::unordered_map<long, std::size_t> slot;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::sscanf(line.c_str(), "# grid=%dx%d bins=%d", &rows, &cols, &bins);
            continue;
        }
        if (line.rfind("frame_index", 0) == 0) continue;
        const auto f = split(line, ',');
        if (f.size() != 5)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": expected 5 fields");
        if (rows <= 0 || cols <= 0 || bins <= 0)
            throw std::runtime_error(file.string() + ": missing '# grid=RxC bins=K' header");
        const long frame = to_long(f[0], file.string());
        auto [it, fresh] = slot.emplace(frame, frames.size());
        if (fresh) {
            shots::FrameDescriptor fd;
            fd.frame_index = frame;
            fd.timestamp = to_double(f[1], file.string());
            fd.histogram.rows = rows;
            fd.histogram.cols = cols;
            fd.histogram.bins_per_block = bins;
            fd.histogram.blocks.assign(static_cast<std::size_t>(rows) * cols,
                                       std::vector<double>(bins, 0.0));
            frames.push_back(std::move(fd));
        }
        auto& fd = frames[it->second];
        const long block = to_long(f[2], file.string());
        const long bin = to_long(f[3], file.string());
        if (block < 0 || block >= rows * cols || bin < 0 || bin >= bins)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": block or bin index out of range");
        fd.histogram.blocks[block][bin] = to_double(f[4], file.string());
    }
    if (frames.empty()) throw std::runtime_error(file.string() + ": no histogram records");
    std::sort(frames.begin(), frames.end(),
              [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });
    return frames;
}

void write_shots(const fs::path& file, const std::vector<shots::Shot>& shot_list,
                 const shots::ShotLabeling& labeling) {
    if (labeling.labels.size() != shot_list.size())
        throw std::invalid_argument("write_shots: labeling size mismatch");
    auto out = open_out(file);
    out << "shot_id,start_frame,end_frame,start_time,end_time,label\n";
    for (std::size_t i = 0; i < shot_list.size(); ++i) {
        const auto& s = shot_list[i];
        out << s.id << "," << s.start_frame << "," << s.end_frame << ","
            << fmt("%.6f", s.start_time) << "," << fmt("%.6f", s.end_time) << ","
            << labeling.labels[i] << "\n";
    }
}

std::pair<std::vector<shots::Shot>, shots::ShotLabeling> read_shots(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    std::vector<shots::Shot> shot_list;
    shots::ShotLabeling labeling;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty() || line[0] == '#' || line.rfind("shot_id", 0) == 0) continue;
        const auto f = split(line, ',');
        if (f.size() != 6)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": expected 6 fields");
        shots::Shot s;
        s.id = static_cast<int>(to_long(f[0], file.string()));
        s.start_frame = to_long(f[1], file.string());
        s.end_frame = to_long(f[2], file.string());
        s.start_time = to_double(f[3], file.string());
        s.end_time = to_double(f[4], file.string());
        shot_list.push_back(s);
        labeling.labels.push_back(static_cast<int>(to_long(f[5], file.string())));
    }
    if (shot_list.empty()) throw std::runtime_error(file.string() + ": no shots");

    const int n = static_cast<int>(shot_list.size());
    std::unordered_map<int, std::vector<int>> members;
    for (int i = 0; i < n; ++i) members[labeling.labels[i]].push_back(i);
    labeling.similar.assign(n, {});
    for (int i = 0; i < n; ++i) labeling.similar[i] = members[labeling.labels[i]];
    return {std::move(shot_list), std::move(labeling)};
}

std::vector<SpeechSegment> read_segments(const fs::path& file) {
    if (file.extension() == ".srt") {
        auto in = open_in(file);
        std::stringstream buf;
        buf << in.rdbuf();
        auto segments = parse_subtitles(buf.str());
        validate_segments(segments);
        return segments;
    }
    auto in = open_in(file);
    std::string line;
    std::vector<SpeechSegment> segments;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty() || line[0] == '#' || line.rfind("segment_id", 0) == 0) continue;
        const auto f = split(line, ',');
        if (f.size() < 3)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": expected segment_id,start,end[,speaker[,text]]");
        SpeechSegment seg;
        seg.id = f[0];
        seg.start = to_double(f[1], file.string());
        seg.end = to_double(f[2], file.string());
        if (f.size() > 3) seg.reference_speaker = f[3];
        for (std::size_t k = 4; k < f.size(); ++k) seg.text += (k > 4 ? "," : "") + f[k];
        segments.push_back(std::move(seg));
    }
    if (segments.empty()) throw std::runtime_error(file.string() + ": no segments");
    validate_segments(segments);
    return segments;
}

void write_segments(const fs::path& file, const std::vector<SpeechSegment>& segments) {
    auto out = open_out(file);
    out << "segment_id,start,end,speaker,text\n";
    for (const auto& seg : segments) {
        std::string text = seg.text;
        std::replace(text.begin(), text.end(), '\n', ' ');
        out << seg.id << "," << fmt("%.6f", seg.start) << "," << fmt("%.6f", seg.end) << ","
            << seg.reference_speaker << "," << text << "\n";
    }
}

std::vector<std::pair<std::string, Eigen::VectorXd>> read_embeddings(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    std::vector<std::pair<std::string, Eigen::VectorXd>> out;
    long dim = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty() || line[0] == '#' || line.rfind("segment_id", 0) == 0) continue;
        const auto f = split(line, ',');
        if (f.size() < 2)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": expected segment_id,v1,...,vd");
        if (dim < 0) dim = static_cast<long>(f.size()) - 1;
        if (static_cast<long>(f.size()) - 1 != dim)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": inconsistent dimension");
        Eigen::VectorXd v(dim);
        for (long k = 0; k < dim; ++k) v(k) = to_double(f[k + 1], file.string());
        out.emplace_back(f[0], std::move(v));
    }
    if (out.empty()) throw std::runtime_error(file.string() + ": no embeddings");
    return out;
}

void write_embeddings(const fs::path& file,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& embeddings) {
    auto out = open_out(file);
    for (const auto& [id, v] : embeddings) {
        out << id;
        for (long k = 0; k < v.size(); ++k) out << "," << fmt("%.17g", v(k));
        out << "\n";
    }
}

std::vector<emb::LabeledEmbedding> read_training(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    std::vector<emb::LabeledEmbedding> out;
    long dim = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty() || line[0] == '#' || line.rfind("segment_id", 0) == 0) continue;
        const auto f = split(line, ',');
        if (f.size() < 3)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": expected segment_id,speaker,v1,...,vd");
        if (dim < 0) dim = static_cast<long>(f.size()) - 2;
        if (static_cast<long>(f.size()) - 2 != dim)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": inconsistent dimension");
        emb::LabeledEmbedding e;
        e.speaker = f[1];
        e.vector.resize(dim);
        for (long k = 0; k < dim; ++k) e.vector(k) = to_double(f[k + 2], file.string());
        out.push_back(std::move(e));
    }
    if (out.empty()) throw std::runtime_error(file.string() + ": no training embeddings");
    return out;
}

void write_training(const fs::path& file, const std::vector<emb::LabeledEmbedding>& training) {
    auto out = open_out(file);
    for (std::size_t i = 0; i < training.size(); ++i) {
        out << "t" << i << "," << training[i].speaker;
        for (long k = 0; k < training[i].vector.size(); ++k)
            out << "," << fmt("%.17g", training[i].vector(k));
        out << "\n";
    }
}

void write_rttm(const fs::path& file, const Diarization& dz,
                const std::vector<SpeechSegment>& segments, const std::string& recording) {
    auto out = open_out(file);
    for (const auto& seg : segments) {
        auto it = dz.label_of.find(seg.id);
        if (it == dz.label_of.end()) continue;
        out << "SPEAKER " << recording << " 1 " << fmt("%.3f", seg.start) << " "
            << fmt("%.3f", seg.duration()) << " <NA> <NA> " << it->second << " <NA>\n";
    }
}

Diarization read_rttm(const fs::path& file, const std::vector<SpeechSegment>& segments) {
    auto in = open_in(file);
    Diarization dz;
    dz.system = file.stem().string();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string type, rec, chan, na1, na2, label, na3;
        double onset, dur;
        if (!(ls >> type >> rec >> chan >> onset >> dur >> na1 >> na2 >> label))
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": malformed RTTM line");
        if (type != "SPEAKER") continue;
        const double mid = onset + dur / 2.0;
        const SpeechSegment* hit = nullptr;
        for (const auto& seg : segments)
            if (mid >= seg.start && mid <= seg.end) {
                hit = &seg;
                break;
            }
        if (!hit)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": no segment covers this line");
        dz.label_of[hit->id] = label;
    }
    if (dz.label_of.empty()) throw std::runtime_error(file.string() + ": no SPEAKER lines");
    return dz;
}

namespace {

json pattern_set_to_json(const patterns::PatternSet& ps) {
    json out;
    out["extended"] = ps.extended;
    out["patterns"] = json::array();
    for (const auto& p : ps.patterns) {
        json jp;
        jp["id"] = p.id;
        jp["labels"] = p.labels;
        jp["from_extension"] = p.from_extension;
        jp["merged"] = p.merged;
        jp["occurrences"] = json::array();
        for (const auto& occ : p.occurrences)
            jp["occurrences"].push_back({{"start_pos", occ.start_pos},
                                         {"end_pos", occ.end_pos},
                                         {"start_time", occ.start_time},
                                         {"end_time", occ.end_time}});
        jp["segments"] = p.segment_ids;
        out["patterns"].push_back(std::move(jp));
    }
    return out;
}

}  // namespace

void write_patterns(const fs::path& file, const patterns::PatternSet& ps) {
    auto out = open_out(file);
    out << pattern_set_to_json(ps).dump(2) << "\n";
}

patterns::PatternSet read_patterns(const fs::path& file) {
    auto in = open_in(file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
    patterns::PatternSet ps;
    try {
        ps.extended = j.value("extended", false);
        for (const auto& jp : j.at("patterns")) {
            patterns::DialoguePattern p;
            p.id = jp.at("id").get<int>();
            for (int lab : jp.at("labels")) p.labels.insert(lab);
            p.from_extension = jp.value("from_extension", false);
            p.merged = jp.value("merged", false);
            for (const auto& jo : jp.at("occurrences")) {
                patterns::Occurrence occ;
                occ.start_pos = jo.at("start_pos").get<int>();
                occ.end_pos = jo.at("end_pos").get<int>();
                occ.start_time = jo.at("start_time").get<double>();
                occ.end_time = jo.at("end_time").get<double>();
                p.occurrences.push_back(occ);
            }
            for (const auto& s : jp.value("segments", std::vector<std::string>{}))
                p.segment_ids.push_back(s);
            ps.patterns.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
    return ps;
}

void write_forest(const fs::path& file, const hac::DendrogramForest& forest) {
    json out;
    out["leaf_count"] = forest.leaf_count;
    out["roots"] = forest.roots;
    out["nodes"] = json::array();
    for (const auto& nd : forest.nodes) {
        json jn;
        jn["node_id"] = nd.node_id;
        jn["children"] = nd.is_leaf() ? json::array() : json::array({nd.left, nd.right});
        jn["height"] = nd.height;
        jn["mass"] = nd.mass;
        jn["members"] = nd.members;
        out["nodes"].push_back(std::move(jn));
    }
    auto f = open_out(file);
    f << out.dump(2) << "\n";
}

synth::SyntheticEpisodeConfig read_synth_config(const fs::path& file) {
    auto in = open_in(file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
    synth::SyntheticEpisodeConfig cfg;
    cfg.num_speakers = j.value("num_speakers", cfg.num_speakers);
    cfg.num_dialogues = j.value("num_dialogues", cfg.num_dialogues);
    cfg.speakers_per_dialogue = j.value("speakers_per_dialogue", cfg.speakers_per_dialogue);
    cfg.segments_per_speaker = j.value("segments_per_speaker", cfg.segments_per_speaker);
    cfg.embedding_dim = j.value("embedding_dim", cfg.embedding_dim);
    cfg.separation = j.value("separation", cfg.separation);
    cfg.coverage = j.value("coverage", cfg.coverage);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.synchronized_turns = j.value("synchronized", cfg.synchronized_turns);
    cfg.shot_seconds = j.value("shot_seconds", cfg.shot_seconds);
    cfg.fps = j.value("fps", cfg.fps);
    cfg.train_segments_per_speaker =
        j.value("train_segments_per_speaker", cfg.train_segments_per_speaker);
    return cfg;
}

void write_pipeline_artifacts(const fs::path& dir, const pipeline::PipelineResult& result,
                              const std::vector<SpeechSegment>& segments,
                              const pipeline::PipelineConfig& config) {
    fs::create_directories(dir);
    write_patterns(dir / "patterns.json", result.pattern_set);

    {
        auto out = open_out(dir / "local_speakers.csv");
        out << "id,pattern_id,local_cluster,segments\n";
        for (const auto& spk : result.local_speakers) {
            out << spk.id << "," << spk.pattern_id << "," << spk.local_cluster << ",";
            for (std::size_t k = 0; k < spk.segment_ids.size(); ++k)
                out << (k ? ";" : "") << spk.segment_ids[k];
            out << "\n";
        }
    }
    {
        auto out = open_out(dir / "constraints.csv");
        out << "speaker_a,speaker_b\n";
        for (const auto& [a, b] : result.constraints.pairs()) out << a << "," << b << "\n";
    }
    if (result.global_step) write_forest(dir / "forest.json", result.global_step->forest);
    write_rttm(dir / "diarization.rttm", result.diarization, segments, "episode");

    json manifest;
    manifest["mode"] = pipeline::mode_name(config.mode);
    manifest["extended"] = config.extended;
    manifest["merge"] = config.merge;
    manifest["normalize"] = config.normalize;
    manifest["w_source"] = result.w_source;
    manifest["epsilon"] = result.epsilon;
    manifest["pattern_count"] = result.coverage.pattern_count;
    manifest["coverage"] = {{"total_speech", result.coverage.total_speech},
                            {"covered_speech", result.coverage.covered_speech},
                            {"ratio", result.coverage.coverage},
                            {"mean_speech_per_pattern", result.coverage.mean_speech_per_pattern},
                            {"mean_speakers_per_pattern", result.coverage.mean_speakers_per_pattern}};
    manifest["local_speakers"] = result.local_speakers.size();
    manifest["constraints"] = result.constraints.size();
    if (result.global_step)
        manifest["global_clusters"] = result.global_step->partition.cluster_count;
    manifest["labeled_segments"] = result.diarization.label_of.size();
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
}

}  // namespace tvdiar::io
