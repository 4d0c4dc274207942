#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tvdiar/constrained_hac.hpp"
#include "tvdiar/embedding_space.hpp"
#include "tvdiar/pattern_miner.hpp"
#include "tvdiar/pipeline.hpp"
#include "tvdiar/shot_analysis.hpp"
#include "tvdiar/synthetic.hpp"

using namespace tvdiar;

namespace {

shots::Image random_image(std::mt19937_64& rng, int width, int height) {
    std::uniform_int_distribution<int> byte(0, 255);
    shots::Image img;
    img.width = width;
    img.height = height;
    img.rgb.resize(static_cast<std::size_t>(width) * height * 3);
    for (auto& b : img.rgb) b = static_cast<std::uint8_t>(byte(rng));
    return img;
}

std::vector<hac::Instance> random_instances(std::mt19937_64& rng, int n, int d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<hac::Instance> out(n);
    for (int i = 0; i < n; ++i) {
        out[i].id = i;
        out[i].vector = Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return gauss(rng); });
    }
    return out;
}

void BM_BlockHistograms(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const int w = static_cast<int>(state.range(0));
    const auto img = random_image(rng, w, w * 3 / 4);
    shots::ShotConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(shots::compute_block_histograms(img, cfg));
    state.SetItemsProcessed(state.iterations() * img.width * img.height);
}
BENCHMARK(BM_BlockHistograms)->Arg(160)->Arg(320)->Arg(640)->Arg(1280);

void BM_ScanAlternations(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> label(0, 11);
    std::vector<int> labels(state.range(0));
    for (int& l : labels) l = label(rng);
    for (auto _ : state) benchmark::DoNotOptimize(patterns::scan_alternations(labels, 3));
    state.SetItemsProcessed(state.iterations() * labels.size());
}
BENCHMARK(BM_ScanAlternations)->Range(1 << 10, 1 << 16);

void BM_Agglomerate(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto inst = random_instances(rng, static_cast<int>(state.range(0)), 16);
    for (auto _ : state) benchmark::DoNotOptimize(hac::agglomerate(inst, {}));
}
BENCHMARK(BM_Agglomerate)->Arg(16)->Arg(64)->Arg(128)->Arg(256);

void BM_AgglomerateConstrained(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const int n = static_cast<int>(state.range(0));
    const auto inst = random_instances(rng, n, 16);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    hac::ConstraintSet cs;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (coin(rng) < 0.1) cs.add(a, b);
    for (auto _ : state) benchmark::DoNotOptimize(hac::agglomerate(inst, cs));
}
BENCHMARK(BM_AgglomerateConstrained)->Arg(16)->Arg(64)->Arg(128)->Arg(256);

void BM_WithinClassCov(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = static_cast<int>(state.range(0));
    std::vector<emb::LabeledEmbedding> training(n);
    for (int i = 0; i < n; ++i) {
        training[i].speaker = "spk" + std::to_string(i % 8);
        training[i].vector =
            Eigen::VectorXd::NullaryExpr(64, [&](Eigen::Index) { return gauss(rng); });
    }
    for (auto _ : state) benchmark::DoNotOptimize(emb::compute_within_class_cov(training));
}
BENCHMARK(BM_WithinClassCov)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Pipeline(benchmark::State& state) {
    synth::SyntheticEpisodeConfig cfg;
    cfg.num_dialogues = static_cast<int>(state.range(0));
    cfg.seed = 6;
    const auto ep = synth::generate_synthetic_episode(cfg);
    pipeline::PipelineInputs in;
    in.shot_list = ep.shot_list;
    in.labeling = ep.labeling;
    in.segments = ep.segments;
    for (const auto& [id, v] : ep.embeddings) in.embeddings.emplace(id, v);
    in.wcc = emb::compute_within_class_cov(ep.training);
    pipeline::PipelineConfig pc;
    for (auto _ : state) benchmark::DoNotOptimize(pipeline::run_pipeline(in, pc));
    state.SetItemsProcessed(state.iterations() * ep.segments.size());
}
BENCHMARK(BM_Pipeline)->Arg(8)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
