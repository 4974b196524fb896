#include "convoscore/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "convoscore/errors.hpp"
#include "convoscore/rng.hpp"

namespace convoscore {

namespace {

constexpr double kEps = 1e-12;

struct KMeansResult {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

// One Lloyd run from a k-means++ seeding. All random draws come from `rng`
// so repeated calls with the same generator state reproduce exactly.
KMeansResult kmeans_once(const Eigen::MatrixXd& points, int k, SplitMix64& rng,
                         int max_iters) {
  const int n = static_cast<int>(points.rows());

  Eigen::MatrixXd centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<int>(rng.next_below(n)));
  int placed = 1;

  std::vector<double> dist2(n, 0.0);
  while (placed < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < placed; ++c)
        best = std::min(best, (points.row(i) - centroids.row(c)).squaredNorm());
      dist2[i] = best;
      total += best;
    }
    int chosen;
    if (total > 0.0) {
      double target = rng.next_double() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<int>(rng.next_below(n));
    }
    centroids.row(placed++) = points.row(chosen);
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += points.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Revive an empty cluster with the point farthest from its centroid.
      int farthest = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        double d = (points.row(i) - centroids.row(labels[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      centroids.row(c) = points.row(farthest);
      labels[farthest] = c;
    }
  }

  KMeansResult result;
  result.labels = std::move(labels);
  result.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    result.inertia +=
        (points.row(i) - centroids.row(result.labels[i])).squaredNorm();
  return result;
}

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k,
                        std::uint64_t seed) {
  constexpr int kRestarts = 10;
  constexpr int kMaxIters = 300;
  SplitMix64 rng(seed);
  KMeansResult best;
  for (int r = 0; r < kRestarts; ++r) {
    KMeansResult run = kmeans_once(points, k, rng, kMaxIters);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best.labels;
}

std::vector<int> relabel_by_first_appearance(const std::vector<int>& labels) {
  std::vector<int> mapping(labels.size(), -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int raw = labels[i];
    if (mapping[raw] < 0) mapping[raw] = next++;
    out[i] = mapping[raw];
  }
  return out;
}

}  // namespace

EmbeddingWindow::EmbeddingWindow(TimeSpan s, std::vector<double> v)
    : span(s), vec(std::move(v)) {
  if (vec.empty()) throw InputError("embedding window has an empty vector");
  for (double x : vec)
    if (!std::isfinite(x))
      throw InputError("embedding window has a non-finite component");
}

std::vector<TimeSpan> make_windows(const Timeline& speech, double length,
                                   double hop) {
  if (!(length > 0.0) || !(hop > 0.0))
    throw InputError("window length and hop must be positive");
  if (hop > length + kEps)
    throw InputError("window hop must not exceed the window length");

  std::vector<TimeSpan> windows;
  for (const TimeSpan& region : speech.spans()) {
    if (region.duration() <= length + kEps) {
      windows.push_back(region);
      continue;
    }
    std::size_t region_first = windows.size();
    int k = 0;
    while (region.start + k * hop + length < region.end - 1e-9) {
      double start = region.start + k * hop;
      windows.emplace_back(start, start + length);
      ++k;
    }
    TimeSpan last(region.end - length, region.end);
    if (windows.size() == region_first || !(windows.back() == last))
      windows.push_back(last);
  }
  return windows;
}

Eigen::MatrixXd cosine_affinity(const std::vector<EmbeddingWindow>& windows) {
  const int n = static_cast<int>(windows.size());
  if (n == 0) throw InputError("cosine affinity needs at least one window");
  const std::size_t dim = windows[0].vec.size();

  Eigen::MatrixXd x(n, static_cast<int>(dim));
  for (int i = 0; i < n; ++i) {
    if (windows[i].vec.size() != dim)
      throw InputError("embedding windows have mismatched dimensions");
    for (std::size_t d = 0; d < dim; ++d)
      x(i, static_cast<int>(d)) = windows[i].vec[d];
    double norm = x.row(i).norm();
    if (norm < kEps)
      throw InputError("embedding window " + std::to_string(i) +
                       " has a zero vector");
    x.row(i) /= norm;
  }

  Eigen::MatrixXd affinity =
      (x * x.transpose() + Eigen::MatrixXd::Ones(n, n)) / 2.0;
  for (int i = 0; i < n; ++i) affinity(i, i) = 1.0;
  return affinity;
}

std::vector<int> spectral_cluster(const Eigen::MatrixXd& affinity, int k_max,
                                  std::uint64_t seed,
                                  std::optional<int> forced_k) {
  const int n = static_cast<int>(affinity.rows());
  if (n == 0) throw InputError("spectral clustering needs at least one row");
  if (affinity.cols() != n) throw InputError("affinity matrix must be square");
  if (k_max < 1) throw InputError("k_max must be at least 1");
  if (forced_k && (*forced_k < 1 || *forced_k > n))
    throw InputError("requested cluster count must be between 1 and the "
                     "number of windows");
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (std::abs(affinity(i, j) - affinity(j, i)) > 1e-9)
        throw InputError("affinity matrix must be symmetric");

  if (n == 1) return {0};

  Eigen::VectorXd degrees = affinity.rowwise().sum();
  for (int i = 0; i < n; ++i)
    if (degrees(i) <= 0.0)
      throw InputError("affinity row " + std::to_string(i) +
                       " has non-positive degree");

  Eigen::VectorXd inv_sqrt = degrees.array().rsqrt().matrix();
  Eigen::MatrixXd laplacian =
      Eigen::MatrixXd::Identity(n, n) -
      inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success)
    throw InternalError("eigendecomposition failed");
  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
  const Eigen::MatrixXd& eigenvectors = solver.eigenvectors();

  int k = 1;
  if (forced_k) {
    k = *forced_k;
  } else if (k_max > 1) {
    // lambda_0 is 0 for every connected affinity graph, so the gap below
    // lambda_1 carries no cluster structure; the search starts at two
    // clusters and only a forced k can yield a single cluster.
    k = std::min(2, n);
    const int m = std::min(n, k_max);
    double best_gap = -1.0;
    for (int i = 2; i < m; ++i) {
      double gap = eigenvalues(i) - eigenvalues(i - 1);
      if (gap > best_gap) {
        best_gap = gap;
        k = i;
      }
    }
  }

  if (k == 1) return std::vector<int>(n, 0);
  if (k == n) {
    std::vector<int> labels(n);
    std::iota(labels.begin(), labels.end(), 0);
    return labels;
  }

  Eigen::MatrixXd embedding = eigenvectors.leftCols(k);
  for (int i = 0; i < n; ++i) {
    double norm = embedding.row(i).norm();
    if (norm > kEps) embedding.row(i) /= norm;
  }

  return relabel_by_first_appearance(kmeans(embedding, k, seed));
}

Annotation labels_to_annotation(const std::string& recording_id,
                                const std::vector<EmbeddingWindow>& windows,
                                const std::vector<int>& labels) {
  if (windows.size() != labels.size())
    throw InternalError("labels_to_annotation: label count mismatch");
  if (windows.empty()) return Annotation(recording_id);
  for (int label : labels)
    if (label < 0) throw InternalError("labels_to_annotation: negative label");

  std::vector<TimeSpan> spans;
  spans.reserve(windows.size());
  for (const EmbeddingWindow& w : windows) spans.push_back(w.span);
  Timeline domain(spans);

  const int n = static_cast<int>(windows.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto center = [&](int i) {
    return (windows[i].span.start + windows[i].span.end) / 2.0;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return center(a) < center(b); });

  // Window i owns the stretch between the midpoints toward its neighbours.
  std::vector<double> cuts(n + 1);
  cuts[0] = -std::numeric_limits<double>::infinity();
  cuts[n] = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i)
    cuts[i] = (center(order[i - 1]) + center(order[i])) / 2.0;

  struct Piece {
    double start;
    double end;
    int label;
  };
  std::vector<Piece> pieces;
  for (const TimeSpan& region : domain.spans()) {
    for (int i = 0; i < n; ++i) {
      double lo = std::max(region.start, cuts[i]);
      double hi = std::min(region.end, cuts[i + 1]);
      if (hi - lo > kEps) pieces.push_back({lo, hi, labels[order[i]]});
    }
  }

  std::vector<RichSegment> segments;
  for (const Piece& piece : pieces) {
    std::string speaker = "spk" + std::to_string(piece.label);
    if (!segments.empty() && segments.back().speaker == speaker &&
        std::abs(segments.back().span.end - piece.start) <= kEps) {
      segments.back().span.end = piece.end;
      continue;
    }
    segments.emplace_back(TimeSpan(piece.start, piece.end), std::move(speaker));
  }
  return Annotation(recording_id, std::move(segments));
}

}  // namespace convoscore
