#include "assaykg/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace assaykg::kernels {

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (b.indices[j] < a.indices[i]) {
      ++j;
    } else {
      sum += a.values[i] * b.values[j];
      ++i;
      ++j;
    }
  }
  return sum;
}

double l2_norm(const SparseVector& v) {
  double sum = 0.0;
  for (double x : v.values) sum += x * x;
  return std::sqrt(sum);
}

void l2_normalize(SparseVector& v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) return;
  for (double& x : v.values) x /= norm;
}

void dot_scores_serial(const SparseVector& doc,
                       std::span<const SparseVector> centroids,
                       std::span<double> out) {
  assert(out.size() == centroids.size());
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    out[i] = dot(doc, centroids[i]);
  }
}

void dot_scores_parallel(const SparseVector& doc,
                         std::span<const SparseVector> centroids,
                         std::span<double> out) {
  assert(out.size() == centroids.size());
  const auto n = static_cast<std::ptrdiff_t>(centroids.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = dot(doc, centroids[i]);
  }
}

std::vector<double> dot_matrix_serial(std::span<const SparseVector> docs,
                                      std::span<const SparseVector> centroids) {
  std::vector<double> out(docs.size() * centroids.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    dot_scores_serial(docs[d], centroids,
                      std::span(out).subspan(d * centroids.size(), centroids.size()));
  }
  return out;
}

std::vector<double> dot_matrix_parallel(std::span<const SparseVector> docs,
                                        std::span<const SparseVector> centroids) {
  std::vector<double> out(docs.size() * centroids.size());
  const auto rows = static_cast<std::ptrdiff_t>(docs.size());
  const std::size_t cols = centroids.size();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t d = 0; d < rows; ++d) {
    for (std::size_t c = 0; c < cols; ++c) {
      out[static_cast<std::size_t>(d) * cols + c] = dot(docs[d], centroids[c]);
    }
  }
  return out;
}

double jaccard_sorted(std::span<const std::string> a,
                      std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const int c = a[i].compare(b[j]);
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t unions = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(unions);
}

void jaccard_scan_serial(std::span<const std::string> query,
                         std::span<const std::vector<std::string>> candidates,
                         std::span<double> out) {
  assert(out.size() == candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out[i] = jaccard_sorted(query, candidates[i]);
  }
}

void jaccard_scan_parallel(std::span<const std::string> query,
                           std::span<const std::vector<std::string>> candidates,
                           std::span<double> out) {
  assert(out.size() == candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = jaccard_sorted(query, candidates[i]);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace assaykg::kernels
