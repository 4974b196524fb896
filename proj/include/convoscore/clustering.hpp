#ifndef CONVOSCORE_CLUSTERING_HPP
#define CONVOSCORE_CLUSTERING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convoscore/timeline.hpp"

namespace convoscore {

// A fixed-length analysis window with its pooled embedding vector.
struct EmbeddingWindow {
  TimeSpan span;
  std::vector<double> vec;

  EmbeddingWindow(TimeSpan s, std::vector<double> v);
};

// Cuts each region of `speech` into windows of `length` seconds spaced
// `hop` seconds apart. Regions no longer than `length` yield themselves
// unsplit; otherwise the final window is right-aligned with the region end
// so no audio is dropped.
std::vector<TimeSpan> make_windows(const Timeline& speech, double length,
                                   double hop);

// Pairwise cosine similarity mapped to [0, 1] via (cos + 1) / 2, with a
// unit diagonal. Zero vectors are rejected.
Eigen::MatrixXd cosine_affinity(const std::vector<EmbeddingWindow>& windows);

// Clusters rows of a symmetric affinity matrix. The number of clusters is
// chosen by the largest eigengap among the `k_max` smallest eigenvalues of
// the normalized Laplacian, searching candidate counts from 2 upward, then
// k-means is run on the row-normalized spectral embedding. Labels are
// renumbered by first appearance, so the result is invariant to the internal
// ordering of centroids. `forced_k` overrides the eigengap choice with a
// caller-supplied cluster count; it is the only way to get one cluster.
std::vector<int> spectral_cluster(const Eigen::MatrixXd& affinity, int k_max,
                                  std::uint64_t seed,
                                  std::optional<int> forced_k = std::nullopt);

// Converts per-window cluster labels into a speaker annotation. Window
// overlap is resolved by splitting at midpoints between consecutive window
// centers; adjacent pieces with the same label merge. Speakers are named
// "spk<label>".
Annotation labels_to_annotation(const std::string& recording_id,
                                const std::vector<EmbeddingWindow>& windows,
                                const std::vector<int>& labels);

}  // namespace convoscore

#endif  // CONVOSCORE_CLUSTERING_HPP
