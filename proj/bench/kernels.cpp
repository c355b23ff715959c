// Serial reference twins against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "vforge/candidates.hpp"
#include "vforge/classifier.hpp"
#include "vforge/knowledge.hpp"
#include "vforge/label_model.hpp"
#include "vforge/reference.hpp"
#include "vforge/synthetic.hpp"

using namespace vforge;

namespace {

struct OntologyFixture {
  synth::OntologyPair pair = synth::generate_ontology_pair(42);
  onto::OntologyIndex src{pair.source};
  onto::OntologyIndex tgt{pair.target};
  std::vector<onto::KnowledgeFunction> kfs = onto::bundled_knowledge_functions();
  onto::CandidateTable table = onto::build_candidate_table(src, tgt);
};

const OntologyFixture& ontology_fixture() {
  static const OntologyFixture f;
  return f;
}

const synth::SyntheticVotes& votes(std::size_t rows) {
  static std::map<std::size_t, synth::SyntheticVotes> cache;
  auto it = cache.find(rows);
  if (it == cache.end()) {
    it = cache.emplace(rows, synth::generate_label_matrix(0.1, {0.9, 0.8, 0.7, 0.6, 0.75, 0.85},
                                                          {0.8, 0.6, 0.9, 0.3, 0.5, 0.7}, rows, 42)).first;
  }
  return it->second;
}

std::vector<onto::FeatureVector> features(std::size_t rows) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<onto::FeatureVector> xs(rows);
  for (auto& x : xs) {
    for (auto& v : x.values) v = u(rng);
  }
  return xs;
}

ki::ClassifierModel model() {
  ki::ClassifierModel m;
  for (std::size_t k = 0; k < m.weights.size(); ++k) m.weights[k] = 0.3 * static_cast<double>(k) - 0.8;
  m.mean.fill(0.5);
  m.stddev.fill(0.29);
  return m;
}

void BM_CandidateTable(benchmark::State& state) {
  const auto& f = ontology_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(onto::build_candidate_table(f.src, f.tgt));
}

void BM_CandidateTableSerial(benchmark::State& state) {
  const auto& f = ontology_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(reference::build_candidate_table(f.src, f.tgt));
}

void BM_KnowledgeFunctions(benchmark::State& state) {
  const auto& f = ontology_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(onto::apply_knowledge_functions(f.table, f.src, f.tgt, f.kfs));
}

void BM_KnowledgeFunctionsSerial(benchmark::State& state) {
  const auto& f = ontology_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(reference::apply_knowledge_functions(f.table, f.src, f.tgt, f.kfs));
}

void BM_PosteriorBatch(benchmark::State& state) {
  const auto& v = votes(static_cast<std::size_t>(state.range(0)));
  const auto params = ki::fit_label_model(v.matrix);
  for (auto _ : state) benchmark::DoNotOptimize(ki::posterior_batch(params, v.matrix));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PosteriorBatchSerial(benchmark::State& state) {
  const auto& v = votes(static_cast<std::size_t>(state.range(0)));
  const auto params = ki::fit_label_model(v.matrix);
  for (auto _ : state) benchmark::DoNotOptimize(reference::posterior_batch(params, v.matrix));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PredictBatch(benchmark::State& state) {
  const auto xs = features(static_cast<std::size_t>(state.range(0)));
  const auto m = model();
  for (auto _ : state) benchmark::DoNotOptimize(ki::predict_batch(m, xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PredictBatchSerial(benchmark::State& state) {
  const auto xs = features(static_cast<std::size_t>(state.range(0)));
  const auto m = model();
  for (auto _ : state) benchmark::DoNotOptimize(reference::predict_batch(m, xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FitLabelModel(benchmark::State& state) {
  const auto& v = votes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ki::fit_label_model(v.matrix));
}

}  // namespace

BENCHMARK(BM_CandidateTable)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CandidateTableSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KnowledgeFunctions)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KnowledgeFunctionsSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PosteriorBatch)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PosteriorBatchSerial)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PredictBatch)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PredictBatchSerial)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FitLabelModel)->Arg(10'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
