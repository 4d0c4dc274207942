#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "tvdiar/io.hpp"

using namespace tvdiar;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tvdiar_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file);
    out << text;
}

}  // namespace

TEST_CASE("ppm images round trip") {
    TempDir tmp;
    std::mt19937_64 rng(97);
    const auto img = oracles::random_image(rng, 17, 9);
    const auto file = tmp.path / "frame.ppm";
    io::write_ppm(file, img);
    const auto back = io::read_ppm(file);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.rgb == img.rgb);
}

TEST_CASE("ppm parsing accepts comments and rejects junk") {
    TempDir tmp;
    const auto file = tmp.path / "img.ppm";
    write_text(file, "P6\n# a comment\n2 1\n255\nabcdef");
    const auto img = io::read_ppm(file);
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.rgb.size() == 6);
    CHECK(img.rgb[0] == 'a');

    write_text(file, "P5\n2 1\n255\nabcdef");
    CHECK_THROWS_AS(io::read_ppm(file), std::runtime_error);
    write_text(file, "P6\n2 1\n255\nabc");
    CHECK_THROWS_AS(io::read_ppm(file), std::runtime_error);
    CHECK_THROWS_AS(io::read_ppm(tmp.path / "missing.ppm"), std::runtime_error);
}

TEST_CASE("frame directories load in numeric order") {
    TempDir tmp;
    std::mt19937_64 rng(101);
    shots::ShotConfig cfg;
    cfg.grid_rows = 2;
    cfg.grid_cols = 2;
    for (int i : {0, 1, 2, 10}) {
        io::write_ppm(tmp.path / (std::to_string(i) + ".ppm"),
                      oracles::random_image(rng, 8, 8));
    }
    const auto frames = io::load_frame_dir(tmp.path, cfg, 25.0);
    REQUIRE(frames.size() == 4);
    CHECK(frames[3].frame_index == 10);  // numeric, not lexicographic
    CHECK(frames[1].timestamp == Approx(1.0 / 25.0));
    CHECK(frames[0].histogram.blocks.size() == 4);
}

TEST_CASE("histograms round trip through sparse csv") {
    TempDir tmp;
    std::mt19937_64 rng(103);
    shots::ShotConfig cfg;
    std::vector<shots::FrameDescriptor> frames;
    for (int i = 0; i < 3; ++i) {
        shots::FrameDescriptor f;
        f.frame_index = i * 2;
        f.timestamp = i * 0.04;
        f.histogram = shots::compute_block_histograms(oracles::random_image(rng, 32, 20), cfg);
        frames.push_back(std::move(f));
    }
    const auto file = tmp.path / "hist.csv";
    io::write_histograms(file, frames);
    const auto back = io::read_histograms(file);
    REQUIRE(back.size() == frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        CHECK(back[i].frame_index == frames[i].frame_index);
        CHECK(back[i].timestamp == Approx(frames[i].timestamp));
        REQUIRE(back[i].histogram.blocks.size() == frames[i].histogram.blocks.size());
        for (std::size_t b = 0; b < frames[i].histogram.blocks.size(); ++b)
            for (std::size_t k = 0; k < frames[i].histogram.blocks[b].size(); ++k)
                CHECK(back[i].histogram.blocks[b][k] == frames[i].histogram.blocks[b][k]);
    }
}

TEST_CASE("shots round trip with labels") {
    TempDir tmp;
    std::vector<shots::Shot> shot_list(3);
    shot_list[0] = {0, 0, 49, 0.0, 2.0};
    shot_list[1] = {1, 50, 99, 2.0, 4.0};
    shot_list[2] = {2, 100, 149, 4.0, 6.0};
    shots::ShotLabeling lab;
    lab.labels = {0, 1, 0};
    lab.similar = {{0, 2}, {1}, {0, 2}};

    const auto file = tmp.path / "shots.csv";
    io::write_shots(file, shot_list, lab);
    const auto [back, back_lab] = io::read_shots(file);
    REQUIRE(back.size() == 3);
    CHECK(back[1].start_frame == 50);
    CHECK(back[2].end_time == Approx(6.0));
    CHECK(back_lab.labels == lab.labels);
    CHECK(back_lab.similar == lab.similar);
}

TEST_CASE("segment csv round trips speakers and text") {
    TempDir tmp;
    std::vector<SpeechSegment> segs(2);
    segs[0] = {"a", 0.0, 1.5, "anna", "hello there"};
    segs[1] = {"b", 1.5, 2.0, "", ""};
    const auto file = tmp.path / "segments.csv";
    io::write_segments(file, segs);
    const auto back = io::read_segments(file);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "a");
    CHECK(back[0].reference_speaker == "anna");
    CHECK(back[0].text == "hello there");
    CHECK(back[0].end == Approx(1.5));
    CHECK(back[1].reference_speaker.empty());
}

TEST_CASE("srt files go through the subtitle parser") {
    TempDir tmp;
    const auto file = tmp.path / "ep.srt";
    write_text(file, "1\n00:00:01,000 --> 00:00:03,000\nHi.\n\n");
    const auto segs = io::read_segments(file);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].start == Approx(1.0));
}

TEST_CASE("embeddings and training round trip exactly") {
    TempDir tmp;
    std::mt19937_64 rng(107);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::pair<std::string, Eigen::VectorXd>> embs;
    for (int i = 0; i < 5; ++i)
        embs.emplace_back("u" + std::to_string(i), Eigen::VectorXd::NullaryExpr(7, [&](Eigen::Index) {
                              return gauss(rng);
                          }));
    const auto efile = tmp.path / "emb.csv";
    io::write_embeddings(efile, embs);
    const auto eback = io::read_embeddings(efile);
    REQUIRE(eback.size() == embs.size());
    for (std::size_t i = 0; i < embs.size(); ++i) {
        CHECK(eback[i].first == embs[i].first);
        CHECK((eback[i].second - embs[i].second).norm() == 0.0);  // %.17g is lossless
    }

    std::vector<emb::LabeledEmbedding> training;
    for (int i = 0; i < 4; ++i)
        training.push_back({"spk" + std::to_string(i % 2),
                            Eigen::VectorXd::NullaryExpr(3, [&](Eigen::Index) { return gauss(rng); })});
    const auto tfile = tmp.path / "train.csv";
    io::write_training(tfile, training);
    const auto tback = io::read_training(tfile);
    REQUIRE(tback.size() == training.size());
    for (std::size_t i = 0; i < training.size(); ++i) {
        CHECK(tback[i].speaker == training[i].speaker);
        CHECK((tback[i].vector - training[i].vector).norm() == 0.0);
    }

    SUBCASE("ragged rows are rejected") {
        write_text(efile, "u0,1.0,2.0\nu1,3.0\n");
        CHECK_THROWS_AS(io::read_embeddings(efile), std::runtime_error);
    }
}

TEST_CASE("rttm round trips labels onto segments") {
    TempDir tmp;
    std::vector<SpeechSegment> segs(3);
    segs[0] = {"a", 0.0, 4.0, "", ""};
    segs[1] = {"b", 4.0, 6.0, "", ""};
    segs[2] = {"c", 6.0, 10.0, "", ""};
    Diarization dz;
    dz.system = "sys";
    dz.label_of = {{"a", "S0"}, {"b", "S1"}, {"c", "S0"}};

    const auto file = tmp.path / "hyp.rttm";
    io::write_rttm(file, dz, segs, "ep1");
    {
        std::ifstream in(file);
        std::string word;
        in >> word;
        CHECK(word == "SPEAKER");
        in >> word;
        CHECK(word == "ep1");
        in >> word;
        CHECK(word == "1");
    }
    const auto back = io::read_rttm(file, segs);
    CHECK(back.system == "hyp");  // file stem names the system
    CHECK(back.label_of.at("a") == "S0");
    CHECK(back.label_of.at("b") == "S1");
    CHECK(back.label_of.at("c") == "S0");

    SUBCASE("lines outside every segment are rejected") {
        write_text(file, "SPEAKER ep1 1 90.0 1.0 <NA> <NA> S9 <NA>\n");
        CHECK_THROWS_AS(io::read_rttm(file, segs), std::runtime_error);
    }
}

TEST_CASE("pattern sets round trip through json") {
    TempDir tmp;
    patterns::PatternSet ps;
    ps.extended = true;
    patterns::DialoguePattern p;
    p.id = 0;
    p.labels = {3, 5};
    p.occurrences.push_back({2, 5, 4.0, 12.0});
    p.occurrences.push_back({9, 11, 18.0, 24.0});
    p.segment_ids = {"a", "b"};
    p.from_extension = false;
    p.merged = true;
    ps.patterns.push_back(p);

    const auto file = tmp.path / "patterns.json";
    io::write_patterns(file, ps);
    const auto back = io::read_patterns(file);
    CHECK(back.extended == ps.extended);
    REQUIRE(back.patterns.size() == 1);
    CHECK(back.patterns[0].labels == p.labels);
    CHECK(back.patterns[0].segment_ids == p.segment_ids);
    CHECK(back.patterns[0].merged);
    REQUIRE(back.patterns[0].occurrences.size() == 2);
    CHECK(back.patterns[0].occurrences[1].start_pos == 9);
    CHECK(back.patterns[0].occurrences[1].end_time == Approx(24.0));
}

TEST_CASE("synthetic configs parse from json") {
    TempDir tmp;
    const auto file = tmp.path / "synth.json";
    write_text(file, R"({"num_speakers": 4, "separation": 7.5, "coverage": 0.8,
                         "synchronized": true, "seed": 12})");
    const auto cfg = io::read_synth_config(file);
    CHECK(cfg.num_speakers == 4);
    CHECK(cfg.separation == Approx(7.5));
    CHECK(cfg.coverage == Approx(0.8));
    CHECK(cfg.synchronized_turns);
    CHECK(cfg.seed == 12);
    CHECK(cfg.num_dialogues == synth::SyntheticEpisodeConfig{}.num_dialogues);

    write_text(file, "{not json");
    CHECK_THROWS(io::read_synth_config(file));
}

TEST_CASE("pipeline artifacts land in the output directory") {
    TempDir tmp;
    synth::SyntheticEpisodeConfig cfg;
    cfg.seed = 109;
    const auto ep = synth::generate_synthetic_episode(cfg);

    pipeline::PipelineInputs in;
    in.shot_list = ep.shot_list;
    in.labeling = ep.labeling;
    in.segments = ep.segments;
    for (const auto& [id, v] : ep.embeddings) in.embeddings.emplace(id, v);
    in.wcc = emb::compute_within_class_cov(ep.training);

    pipeline::PipelineConfig pc;
    const auto res = pipeline::run_pipeline(in, pc);
    const auto out = tmp.path / "artifacts";
    io::write_pipeline_artifacts(out, res, ep.segments, pc);

    CHECK(fs::exists(out / "patterns.json"));
    CHECK(fs::exists(out / "local_speakers.csv"));
    CHECK(fs::exists(out / "constraints.csv"));
    CHECK(fs::exists(out / "forest.json"));
    CHECK(fs::exists(out / "diarization.rttm"));
    CHECK(fs::exists(out / "manifest.json"));

    const auto labeled = io::read_rttm(out / "diarization.rttm", ep.segments);
    CHECK(labeled.label_of.size() == res.diarization.label_of.size());

    const auto ps = io::read_patterns(out / "patterns.json");
    CHECK(ps.patterns.size() == res.pattern_set.patterns.size());
}
