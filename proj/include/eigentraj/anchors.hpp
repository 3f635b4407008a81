#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eigentraj/etspace.hpp"
#include "eigentraj/matrix.hpp"
#include "eigentraj/path_ops.hpp"
#include "eigentraj/types.hpp"

namespace eigentraj::anchors {

// Maps normalized coordinates back to the world: p = scale * R(rotation) * q + translation.
struct NormalizationParams {
  Point2 translation{};
  double rotation = 0.0;
  double scale = 1.0;

  Similarity to_world() const { return {rotation, scale, translation}; }
};

// Mean step length below which an observation is treated as stationary: rotation
// and scale are then left at 0 and 1, and only the translation is normalized.
inline constexpr double kStationaryStep = 1e-6;

NormalizationParams normalization_params(const Path& obs);

struct NormalizedTracklet {
  Tracklet tracklet;
  NormalizationParams params;
};

// Last observed point to the origin, net observed displacement along +x, mean
// observed step length to 1. The future segment receives the same transform.
NormalizedTracklet normalize_tracklet(const Tracklet& tracklet);

Tracklet denormalize(const Tracklet& tracklet, const NormalizationParams& params);
Path denormalize(const Path& path, const NormalizationParams& params);

struct KMeansOptions {
  std::size_t clusters = 20;
  std::uint64_t seed = 0;
  int max_iter = 300;
};

struct KMeansResult {
  Matrix centroids;                    // s x dim
  std::vector<std::size_t> labels;     // one per point
  double inertia = 0.0;                // sum of squared distances to the assigned centroid
  int iterations = 0;
  std::vector<double> inertia_history;  // inertia after each assignment step
};

// k-means++ seed indices drawn from a seeded mt19937_64.
std::vector<std::size_t> kmeans_plus_plus(const Matrix& points, std::size_t clusters, std::uint64_t seed);

// Lloyd iterations from explicit initial centroids until the assignment stops
// changing or max_iter is reached. Empty clusters move to the point farthest from
// its current centroid.
KMeansResult lloyd(const Matrix& points, Matrix initial_centroids, int max_iter);

// kmeans_plus_plus + lloyd. Throws Error(argument) when points.rows() < clusters.
KMeansResult kmeans(const Matrix& points, const KMeansOptions& options);

struct AnchorSet {
  Matrix centroids;  // s x k, ET coefficients of normalized futures
  double inertia = 0.0;
  std::uint64_t seed = 0;
  std::string provenance;

  std::size_t modes() const { return centroids.rows(); }
  std::size_t rank() const { return centroids.cols(); }

  friend bool operator==(const AnchorSet&, const AnchorSet&) = default;
};

// Normalized futures of `train` projected with `pred_basis`, one row per tracklet.
Matrix normalized_future_coefficients(std::span<const Tracklet> train, const etspace::ETBasis& pred_basis);

AnchorSet generate_anchors(std::span<const Tracklet> train, const etspace::ETBasis& pred_basis,
                           const KMeansOptions& options, std::string provenance = {});

// c_hat = c_bar + f, elementwise.
Matrix refine(const AnchorSet& anchors, const Matrix& corrections);

// s future paths in world coordinates for one observation.
std::vector<Path> anchor_predict(const Path& obs, const AnchorSet& anchors, const etspace::ETBasis& pred_basis,
                                 const std::optional<Matrix>& corrections = std::nullopt);

}  // namespace eigentraj::anchors
