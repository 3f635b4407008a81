#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eigentraj/matrix.hpp"
#include "eigentraj/types.hpp"

namespace eigentraj::metrics {

// s candidate futures for one pedestrian.
struct PredictionSet {
  std::vector<Path> samples;
};

// min over samples of the mean per-timestep distance to gt.
double ade(const PredictionSet& pred, const Path& gt);
// min over samples of the final-point distance to gt.
double fde(const PredictionSet& pred, const Path& gt);

// Index of the sample with the lowest ADE (lowest index on ties).
std::size_t best_sample(const PredictionSet& pred, const Path& gt);

// Pearson correlation; 0 when either series has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

// Mean of the x and y Pearson correlations between one path and gt.
double tcc_path(const Path& pred, const Path& gt);
// tcc_path on the best-ADE sample.
double tcc(const PredictionSet& pred, const Path& gt);

struct ColOptions {
  double threshold = 0.1;     // meters
  bool all_pairings = false;  // score every sample pairing instead of best-ADE samples
};

struct ColCount {
  std::size_t colliding = 0;
  std::size_t cases = 0;

  std::optional<double> percentage() const {
    if (cases == 0) return std::nullopt;
    return 100.0 * static_cast<double>(colliding) / static_cast<double>(cases);
  }
};

// True when the two paths come closer than `threshold` at any common timestep.
bool paths_collide(const Path& a, const Path& b, double threshold);

// Collision cases among pedestrians sharing one scene window. `gts` selects each
// pedestrian's best-ADE sample unless all_pairings is set.
ColCount col_count(std::span<const PredictionSet> preds, std::span<const Path> gts, const ColOptions& options);

// Percentage of colliding cases; nullopt for fewer than two pedestrians.
std::optional<double> col(std::span<const PredictionSet> preds, std::span<const Path> gts, const ColOptions& options);

// Winner-takes-all coefficient loss for one tracklet: min_i ||candidates_i - gt||.
double loss_coeff(const Matrix& candidates, std::span<const double> gt_coefficients);

// Batch averages of the per-tracklet winner-takes-all losses.
double loss_coeff(std::span<const Matrix> candidates, std::span<const std::vector<double>> gt_coefficients);
double loss_dist(std::span<const PredictionSet> preds, std::span<const Path> gts);
double loss_end(std::span<const PredictionSet> preds, std::span<const Path> gts);

struct LossReport {
  double l_coeff = 0.0;
  double l_dist = 0.0;
  double l_end = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  double total = 0.0;
};

LossReport combine_losses(double l_coeff, double l_dist, double l_end, double alpha = 1.0, double beta = 1.0);

// Mean point distance to the least-squares line-in-time fit of the path.
double linear_fit_error(const Path& path);
bool classify_nonlinear(const Path& fut, double tol = 0.02);

struct EvaluationItem {
  Tracklet tracklet;  // identity and ground-truth future
  PredictionSet pred;
};

struct Summary {
  std::size_t tracklets = 0;
  double ade = 0.0;
  double fde = 0.0;
  double tcc = 0.0;
  std::optional<double> col;
  ColCount col_counts;
};

struct MetricsReport {
  Summary overall;
  std::vector<std::pair<std::string, Summary>> per_scene;  // sorted by scene
};

// Averages ADE/FDE/TCC over items; COL pools cases over every window of
// pedestrians sharing (scene, recording, start_frame).
MetricsReport evaluate(std::span<const EvaluationItem> items, const ColOptions& options);

}  // namespace eigentraj::metrics
