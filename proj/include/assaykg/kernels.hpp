#pragma once

// Data-parallel inner loops of the engine. Each kernel has a serial
// reference and an OpenMP version; the two must agree bit-for-bit because
// every output element is computed by exactly one thread in the same order.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace assaykg::kernels {

// Sparse vector with strictly increasing indices.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

double dot(const SparseVector& a, const SparseVector& b);
double l2_norm(const SparseVector& v);
// Scales in place to unit length; leaves an all-zero vector untouched.
void l2_normalize(SparseVector& v);

// out[i] = dot(doc, centroids[i]).
void dot_scores_serial(const SparseVector& doc,
                       std::span<const SparseVector> centroids,
                       std::span<double> out);
void dot_scores_parallel(const SparseVector& doc,
                         std::span<const SparseVector> centroids,
                         std::span<double> out);

// Row-major docs x centroids matrix of dot products.
std::vector<double> dot_matrix_serial(std::span<const SparseVector> docs,
                                      std::span<const SparseVector> centroids);
std::vector<double> dot_matrix_parallel(std::span<const SparseVector> docs,
                                        std::span<const SparseVector> centroids);

// Jaccard index of two sorted, duplicate-free key lists. Two empty lists
// score 1.0.
double jaccard_sorted(std::span<const std::string> a,
                      std::span<const std::string> b);

void jaccard_scan_serial(std::span<const std::string> query,
                         std::span<const std::vector<std::string>> candidates,
                         std::span<double> out);
void jaccard_scan_parallel(std::span<const std::string> query,
                           std::span<const std::vector<std::string>> candidates,
                           std::span<double> out);

// Number of OpenMP threads the parallel kernels use (1 without OpenMP).
int max_threads();

}  // namespace assaykg::kernels
