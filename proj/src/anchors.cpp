#include "eigentraj/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eigentraj/dataset.hpp"
#include "eigentraj/errors.hpp"
#include "eigentraj/kernels.hpp"

namespace eigentraj::anchors {
namespace {

// Portable [0, 1) double from the top 53 bits.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

struct Assignment {
  std::vector<std::size_t> labels;
  std::vector<double> distances;  // squared distance to the assigned centroid
  double inertia = 0.0;
};

Assignment assign(const Matrix& points, const Matrix& centroids) {
  const std::size_t n = points.rows();
  const std::size_t s = centroids.rows();
  std::vector<double> d(n * s);
  kernels::active().squared_distances(points.data().data(), n, centroids.data().data(), s, points.cols(), d.data());
  Assignment a{std::vector<std::size_t>(n), std::vector<double>(n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < s; ++j)
      if (d[i * s + j] < d[i * s + best]) best = j;
    a.labels[i] = best;
    a.distances[i] = d[i * s + best];
    a.inertia += a.distances[i];
  }
  return a;
}

Matrix update_centroids(const Matrix& points, Assignment& a, std::size_t clusters) {
  const std::size_t dim = points.cols();
  Matrix c(clusters, dim);
  std::vector<std::size_t> counts(clusters, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto row = c.row(a.labels[i]);
    const auto p = points.row(i);
    for (std::size_t d = 0; d < dim; ++d) row[d] += p[d];
    ++counts[a.labels[i]];
  }
  for (std::size_t j = 0; j < clusters; ++j) {
    if (counts[j] > 0) {
      for (double& v : c.row(j)) v /= static_cast<double>(counts[j]);
      continue;
    }
    // Empty cluster: take over the point currently farthest from its centroid.
    std::size_t far = 0;
    for (std::size_t i = 1; i < points.rows(); ++i)
      if (a.distances[i] > a.distances[far]) far = i;
    std::copy(points.row(far).begin(), points.row(far).end(), c.row(j).begin());
    a.distances[far] = 0.0;
    a.labels[far] = j;
  }
  return c;
}

}  // namespace

NormalizationParams normalization_params(const Path& obs) {
  if (obs.size() < 2) throw Error(ErrorKind::argument, "normalization needs at least 2 observed points");
  NormalizationParams params;
  params.translation = obs.back();
  double total = 0.0;
  for (std::size_t t = 1; t < obs.size(); ++t) total += distance(obs[t], obs[t - 1]);
  const double mean_step = total / static_cast<double>(obs.size() - 1);
  if (mean_step < kStationaryStep) return params;
  const Point2 net = obs.back() - obs.front();
  params.rotation = std::atan2(net.y, net.x);
  params.scale = mean_step;
  return params;
}

Path denormalize(const Path& path, const NormalizationParams& params) {
  if (!(params.scale > 0.0)) throw Error(ErrorKind::argument, "normalization scale must be positive");
  return params.to_world().apply(path);
}

Tracklet denormalize(const Tracklet& tracklet, const NormalizationParams& params) {
  Tracklet out = tracklet;
  out.obs = denormalize(tracklet.obs, params);
  out.fut = denormalize(tracklet.fut, params);
  return out;
}

NormalizedTracklet normalize_tracklet(const Tracklet& tracklet) {
  const NormalizationParams params = normalization_params(tracklet.obs);
  const double c = std::cos(params.rotation);
  const double s = std::sin(params.rotation);
  auto to_local = [&](Point2 p) {
    const Point2 d = p - params.translation;
    return Point2{(c * d.x + s * d.y) / params.scale, (-s * d.x + c * d.y) / params.scale};
  };
  NormalizedTracklet out{tracklet, params};
  for (Point2& p : out.tracklet.obs) p = to_local(p);
  for (Point2& p : out.tracklet.fut) p = to_local(p);
  return out;
}

std::vector<std::size_t> kmeans_plus_plus(const Matrix& points, std::size_t clusters, std::uint64_t seed) {
  const std::size_t n = points.rows();
  if (clusters == 0) throw Error(ErrorKind::argument, "k-means needs at least one cluster");
  if (n < clusters)
    throw Error(ErrorKind::argument, "k-means needs at least as many points (" + std::to_string(n) + ") as clusters (" +
                                         std::to_string(clusters) + ")");
  const auto& kt = kernels::active();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen{uniform_index(rng, n)};
  std::vector<double> nearest(n);
  kt.squared_distances(points.data().data(), n, points.row(chosen[0]).data(), 1, points.cols(), nearest.data());

  std::vector<double> d(n);
  while (chosen.size() < clusters) {
    double total = 0.0;
    for (double v : nearest) total += v;
    std::size_t next = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        cumulative += nearest[i];
        next = i;
        if (cumulative > target) break;
      }
    } else {
      next = uniform_index(rng, n);  // every point coincides with a chosen center
    }
    chosen.push_back(next);
    kt.squared_distances(points.data().data(), n, points.row(next).data(), 1, points.cols(), d.data());
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], d[i]);
  }
  return chosen;
}

KMeansResult lloyd(const Matrix& points, Matrix initial_centroids, int max_iter) {
  if (points.rows() == 0) throw Error(ErrorKind::argument, "k-means needs at least one point");
  if (initial_centroids.cols() != points.cols())
    throw Error(ErrorKind::shape, "centroid dimension does not match point dimension");
  if (max_iter < 0) throw Error(ErrorKind::argument, "max_iter must be >= 0");
  const std::size_t clusters = initial_centroids.rows();

  KMeansResult result;
  result.centroids = std::move(initial_centroids);
  Assignment current = assign(points, result.centroids);
  result.inertia_history.push_back(current.inertia);
  for (int iter = 1; iter <= max_iter; ++iter) {
    result.centroids = update_centroids(points, current, clusters);
    Assignment next = assign(points, result.centroids);
    result.inertia_history.push_back(next.inertia);
    result.iterations = iter;
    const bool fixpoint = next.labels == current.labels;
    current = std::move(next);
    if (fixpoint) break;
  }
  result.labels = std::move(current.labels);
  result.inertia = current.inertia;
  return result;
}

KMeansResult kmeans(const Matrix& points, const KMeansOptions& options) {
  const auto seeds = kmeans_plus_plus(points, options.clusters, options.seed);
  Matrix initial(seeds.size(), points.cols());
  for (std::size_t j = 0; j < seeds.size(); ++j)
    std::copy(points.row(seeds[j]).begin(), points.row(seeds[j]).end(), initial.row(j).begin());
  return lloyd(points, std::move(initial), options.max_iter);
}

Matrix normalized_future_coefficients(std::span<const Tracklet> train, const etspace::ETBasis& pred_basis) {
  if (pred_basis.segment() != Segment::prediction)
    throw Error(ErrorKind::argument, "anchors must be generated with a prediction-segment basis");
  Matrix coeffs(train.size(), pred_basis.rank());
  for (std::size_t n = 0; n < train.size(); ++n) {
    const auto normalized = normalize_tracklet(train[n]);
    const auto c = etspace::project_path(pred_basis, normalized.tracklet.fut);
    std::copy(c.values.begin(), c.values.end(), coeffs.row(n).begin());
  }
  return coeffs;
}

AnchorSet generate_anchors(std::span<const Tracklet> train, const etspace::ETBasis& pred_basis,
                           const KMeansOptions& options, std::string provenance) {
  if (train.empty()) throw Error(ErrorKind::argument, "cannot generate anchors from an empty corpus");
  const Matrix coeffs = normalized_future_coefficients(train, pred_basis);
  KMeansResult km = kmeans(coeffs, options);
  return AnchorSet{std::move(km.centroids), km.inertia, options.seed, std::move(provenance)};
}

Matrix refine(const AnchorSet& anchors, const Matrix& corrections) {
  if (corrections.rows() != anchors.centroids.rows() || corrections.cols() != anchors.centroids.cols())
    throw Error(ErrorKind::shape, "correction offsets must be " + std::to_string(anchors.modes()) + " x " +
                                      std::to_string(anchors.rank()));
  Matrix out = anchors.centroids;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += corrections.data()[i];
  return out;
}

std::vector<Path> anchor_predict(const Path& obs, const AnchorSet& anchors, const etspace::ETBasis& pred_basis,
                                 const std::optional<Matrix>& corrections) {
  if (anchors.rank() != pred_basis.rank())
    throw Error(ErrorKind::config, "anchor rank " + std::to_string(anchors.rank()) + " does not match basis rank " +
                                       std::to_string(pred_basis.rank()));
  if (pred_basis.segment() != Segment::prediction)
    throw Error(ErrorKind::config, "prediction needs a prediction-segment basis");
  const NormalizationParams params = normalization_params(obs);
  const Matrix candidates = corrections ? refine(anchors, *corrections) : anchors.centroids;

  std::vector<Path> out;
  out.reserve(candidates.rows());
  for (std::size_t i = 0; i < candidates.rows(); ++i)
    out.push_back(denormalize(etspace::reconstruct_path(pred_basis, candidates.row(i)), params));
  return out;
}

}  // namespace eigentraj::anchors
