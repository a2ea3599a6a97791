// Serial vs OpenMP kernels on synthetic sparse vectors and key lists.

#include <algorithm>
#include <random>
#include <set>

#include <benchmark/benchmark.h>

#include "assaykg/kernels.hpp"

namespace k = assaykg::kernels;

namespace {

k::SparseVector random_vector(std::mt19937_64& rng, std::uint32_t dims, std::size_t nnz) {
  std::set<std::uint32_t> idx;
  while (idx.size() < nnz) idx.insert(static_cast<std::uint32_t>(rng() % dims));
  k::SparseVector v;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto i : idx) {
    v.indices.push_back(i);
    v.values.push_back(u(rng));
  }
  k::l2_normalize(v);
  return v;
}

std::vector<k::SparseVector> vectors(std::size_t n, std::size_t nnz, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<k::SparseVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_vector(rng, 20000, nnz));
  return out;
}

std::vector<std::string> keys(std::mt19937_64& rng, std::size_t n) {
  std::set<std::string> s;
  while (s.size() < n) s.insert("has p" + std::to_string(rng() % 40) + " :: v" + std::to_string(rng() % 50));
  return {s.begin(), s.end()};
}

// Centroid count is the label-space size; documents are a batch of texts.
void BM_DotMatrix(benchmark::State& state, bool parallel) {
  const auto docs = vectors(static_cast<std::size_t>(state.range(0)), 80, 1);
  const auto centroids = vectors(400, 1500, 2);
  for (auto _ : state) {
    auto m = parallel ? k::dot_matrix_parallel(docs, centroids) : k::dot_matrix_serial(docs, centroids);
    benchmark::DoNotOptimize(m.data());
  }
  state.counters["threads"] = parallel ? k::max_threads() : 1;
}

void BM_DotScores(benchmark::State& state, bool parallel) {
  const auto doc = vectors(1, 80, 3).front();
  const auto centroids = vectors(static_cast<std::size_t>(state.range(0)), 1500, 4);
  std::vector<double> out(centroids.size());
  for (auto _ : state) {
    if (parallel) {
      k::dot_scores_parallel(doc, centroids, out);
    } else {
      k::dot_scores_serial(doc, centroids, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_JaccardScan(benchmark::State& state, bool parallel) {
  std::mt19937_64 rng(5);
  const auto query = keys(rng, 40);
  std::vector<std::vector<std::string>> candidates;
  for (int i = 0; i < state.range(0); ++i) candidates.push_back(keys(rng, 10 + rng() % 60));
  std::vector<double> out(candidates.size());
  for (auto _ : state) {
    if (parallel) {
      k::jaccard_scan_parallel(query, candidates, out);
    } else {
      k::jaccard_scan_serial(query, candidates, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_DotMatrix, serial, false)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DotMatrix, parallel, true)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DotScores, serial, false)->Arg(400)->Arg(4000)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_DotScores, parallel, true)->Arg(400)->Arg(4000)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_JaccardScan, serial, false)->Arg(1000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_JaccardScan, parallel, true)->Arg(1000)->Arg(20000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
