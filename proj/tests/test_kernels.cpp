#include <gtest/gtest.h>

#include <random>
#include <set>

#include "assaykg/kernels.hpp"
#include "oracles.hpp"

using namespace assaykg::kernels;

namespace {

SparseVector random_sparse(std::mt19937_64& rng, std::uint32_t dim, std::size_t nnz) {
  std::set<std::uint32_t> idx;
  while (idx.size() < nnz) idx.insert(static_cast<std::uint32_t>(rng() % dim));
  SparseVector v;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto i : idx) {
    v.indices.push_back(i);
    v.values.push_back(u(rng));
  }
  return v;
}

std::vector<double> dense(const SparseVector& v, std::uint32_t dim) {
  std::vector<double> d(dim, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) d[v.indices[i]] = v.values[i];
  return d;
}

}  // namespace

TEST(Dot, MatchesDense) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    auto a = random_sparse(rng, 100, rng() % 30);
    auto b = random_sparse(rng, 100, rng() % 30);
    const auto da = dense(a, 100);
    const auto db = dense(b, 100);
    double expect = 0;
    for (std::size_t i = 0; i < 100; ++i) expect += da[i] * db[i];
    EXPECT_NEAR(dot(a, b), expect, 1e-12);
  }
}

TEST(Normalize, UnitLengthAndZero) {
  SparseVector v{{1, 4}, {3.0, 4.0}};
  l2_normalize(v);
  EXPECT_DOUBLE_EQ(l2_norm(v), 1.0);
  EXPECT_DOUBLE_EQ(v.values[0], 0.6);
  SparseVector empty;
  l2_normalize(empty);
  EXPECT_TRUE(empty.empty());
}

TEST(Parallel, BitIdenticalToSerial) {
  std::mt19937_64 rng(2);
  std::vector<SparseVector> centroids;
  for (int i = 0; i < 300; ++i) centroids.push_back(random_sparse(rng, 2000, 40));
  std::vector<SparseVector> docs;
  for (int i = 0; i < 50; ++i) docs.push_back(random_sparse(rng, 2000, 60));

  std::vector<double> s(centroids.size()), p(centroids.size());
  dot_scores_serial(docs[0], centroids, s);
  dot_scores_parallel(docs[0], centroids, p);
  EXPECT_EQ(s, p);
  EXPECT_EQ(dot_matrix_serial(docs, centroids), dot_matrix_parallel(docs, centroids));

  std::vector<std::vector<std::string>> sets;
  for (int i = 0; i < 500; ++i) {
    std::set<std::string> keys;
    for (int j = 0; j < 10; ++j) keys.insert("k" + std::to_string(rng() % 25));
    sets.emplace_back(keys.begin(), keys.end());
  }
  std::vector<double> js(sets.size()), jp(sets.size());
  jaccard_scan_serial(sets[0], sets, js);
  jaccard_scan_parallel(sets[0], sets, jp);
  EXPECT_EQ(js, jp);
  EXPECT_EQ(js[0], 1.0);
  EXPECT_GE(max_threads(), 1);
}

TEST(JaccardSorted, MatchesSetOracle) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 1000; ++t) {
    std::set<std::string> a, b;
    for (std::size_t i = rng() % 8; i > 0; --i) a.insert(std::to_string(rng() % 10));
    for (std::size_t i = rng() % 8; i > 0; --i) b.insert(std::to_string(rng() % 10));
    const std::vector<std::string> va(a.begin(), a.end()), vb(b.begin(), b.end());
    EXPECT_DOUBLE_EQ(jaccard_sorted(va, vb), oracle::jaccard(a, b));
  }
}
