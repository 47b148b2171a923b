#include <benchmark/benchmark.h>

#include "scriptdiar/align.hpp"
#include "scriptdiar/cluster.hpp"
#include "scriptdiar/metrics.hpp"
#include "scriptdiar/segmentation.hpp"
#include "scriptdiar/synth.hpp"

using namespace scriptdiar;

namespace {

SynthEpisode episode(double runtime, int dim = 128) {
  SynthConfig c;
  c.runtime = runtime;
  c.embedding_dim = dim;
  c.seed = 1;
  return generate_episode(c);
}

}  // namespace

static void BM_Align(benchmark::State& state) {
  const auto ep = episode(static_cast<double>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(align(ep.script, ep.asr));
  state.counters["lines"] = static_cast<double>(ep.script.size());
  state.counters["words"] = static_cast<double>(ep.asr.size());
}
BENCHMARK(BM_Align)->Arg(300)->Arg(900)->Arg(1800)->Unit(benchmark::kMillisecond);

static void BM_AffinityRefine(benchmark::State& state) {
  const auto ep = episode(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(refine(cosine_affinity(ep.embeddings)));
  state.counters["n"] = static_cast<double>(ep.embeddings.size());
}
BENCHMARK(BM_AffinityRefine)->Arg(600)->Arg(1800)->Arg(3600)->Unit(benchmark::kMillisecond);

static void BM_Eigendecompose(benchmark::State& state) {
  const auto ep = episode(static_cast<double>(state.range(0)));
  const auto a = refine(cosine_affinity(ep.embeddings));
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(a, 100));
  state.counters["n"] = static_cast<double>(ep.embeddings.size());
}
BENCHMARK(BM_Eigendecompose)->Arg(600)->Arg(1800)->Arg(3600)->Unit(benchmark::kMillisecond);

static void BM_ConstrainedKMeans(benchmark::State& state) {
  const auto ep = episode(1800);
  SynthConfig c;
  c.seed = 1;
  const auto pseudo = generate_pseudo_labels(ep.reference, c, ep.embeddings.subsegments);
  const int k = static_cast<int>(state.range(0));
  const auto spec = eigendecompose(refine(cosine_affinity(ep.embeddings)), std::max(k, pseudo.k_prime()));
  const auto points = normalize_rows(spectral_embed(spec, std::max(k, pseudo.k_prime())).vectors);
  for (auto _ : state) benchmark::DoNotOptimize(constrained_kmeans(points, pseudo, k, 0));
}
BENCHMARK(BM_ConstrainedKMeans)->Arg(5)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_Der(benchmark::State& state) {
  const auto ep = episode(static_cast<double>(state.range(0)), 32);
  const auto d = diarize_unsupervised(ep.embeddings, DiarizeParams{}, std::nullopt, 0);
  for (auto _ : state) benchmark::DoNotOptimize(der(ep.reference, d.timeline));
}
BENCHMARK(BM_Der)->Arg(600)->Arg(3600)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
