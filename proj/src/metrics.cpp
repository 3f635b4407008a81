#include "eigentraj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "eigentraj/errors.hpp"
#include "eigentraj/path_ops.hpp"

namespace eigentraj::metrics {
namespace {

void check_samples(const PredictionSet& pred, const Path& gt) {
  if (pred.samples.empty()) throw Error(ErrorKind::shape, "prediction set has no samples");
  if (gt.empty()) throw Error(ErrorKind::shape, "ground-truth path is empty");
  for (const Path& s : pred.samples)
    if (s.size() != gt.size())
      throw Error(ErrorKind::shape, "sample has " + std::to_string(s.size()) + " points, ground truth has " +
                                        std::to_string(gt.size()));
}

void check_batch(std::size_t preds, std::size_t gts) {
  if (preds != gts) throw Error(ErrorKind::shape, "prediction and ground-truth batch sizes differ");
  if (preds == 0) throw Error(ErrorKind::argument, "empty batch");
}

Summary summarize(std::span<const EvaluationItem* const> items, const ColOptions& options) {
  Summary s;
  s.tracklets = items.size();
  if (items.empty()) return s;
  std::map<std::tuple<std::string, std::string, std::int64_t>, std::vector<const EvaluationItem*>> windows;
  for (const EvaluationItem* item : items) {
    s.ade += ade(item->pred, item->tracklet.fut);
    s.fde += fde(item->pred, item->tracklet.fut);
    s.tcc += tcc(item->pred, item->tracklet.fut);
    windows[{item->tracklet.scene, item->tracklet.recording, item->tracklet.start_frame}].push_back(item);
  }
  const double n = static_cast<double>(items.size());
  s.ade /= n;
  s.fde /= n;
  s.tcc /= n;

  for (const auto& [key, members] : windows) {
    if (members.size() < 2) continue;
    std::vector<PredictionSet> preds;
    std::vector<Path> gts;
    for (const EvaluationItem* m : members) {
      preds.push_back(m->pred);
      gts.push_back(m->tracklet.fut);
    }
    const ColCount c = col_count(preds, gts, options);
    s.col_counts.colliding += c.colliding;
    s.col_counts.cases += c.cases;
  }
  s.col = s.col_counts.percentage();
  return s;
}

}  // namespace

double ade(const PredictionSet& pred, const Path& gt) {
  check_samples(pred, gt);
  double best = std::numeric_limits<double>::infinity();
  for (const Path& s : pred.samples) best = std::min(best, mean_point_distance(s, gt));
  return best;
}

double fde(const PredictionSet& pred, const Path& gt) {
  check_samples(pred, gt);
  double best = std::numeric_limits<double>::infinity();
  for (const Path& s : pred.samples) best = std::min(best, distance(s.back(), gt.back()));
  return best;
}

std::size_t best_sample(const PredictionSet& pred, const Path& gt) {
  check_samples(pred, gt);
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pred.samples.size(); ++i) {
    const double err = mean_point_distance(pred.samples[i], gt);
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  return best;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::shape, "series lengths differ");
  if (a.size() < 2) return 0.0;
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

double tcc_path(const Path& pred, const Path& gt) {
  if (pred.size() != gt.size()) throw Error(ErrorKind::shape, "path lengths differ");
  std::vector<double> px(pred.size()), py(pred.size()), gx(gt.size()), gy(gt.size());
  for (std::size_t t = 0; t < pred.size(); ++t) {
    px[t] = pred[t].x;
    py[t] = pred[t].y;
    gx[t] = gt[t].x;
    gy[t] = gt[t].y;
  }
  return 0.5 * (pearson(px, gx) + pearson(py, gy));
}

double tcc(const PredictionSet& pred, const Path& gt) { return tcc_path(pred.samples[best_sample(pred, gt)], gt); }

bool paths_collide(const Path& a, const Path& b, double threshold) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t t = 0; t < n; ++t)
    if (distance(a[t], b[t]) < threshold) return true;
  return false;
}

ColCount col_count(std::span<const PredictionSet> preds, std::span<const Path> gts, const ColOptions& options) {
  if (preds.size() != gts.size()) throw Error(ErrorKind::shape, "prediction and ground-truth counts differ");
  if (!(options.threshold >= 0.0)) throw Error(ErrorKind::argument, "collision threshold must be >= 0");
  ColCount count;
  if (preds.size() < 2) return count;

  if (!options.all_pairings) {
    std::vector<const Path*> chosen;
    for (std::size_t i = 0; i < preds.size(); ++i) chosen.push_back(&preds[i].samples[best_sample(preds[i], gts[i])]);
    for (std::size_t i = 0; i < chosen.size(); ++i)
      for (std::size_t j = i + 1; j < chosen.size(); ++j) {
        ++count.cases;
        if (paths_collide(*chosen[i], *chosen[j], options.threshold)) ++count.colliding;
      }
    return count;
  }

  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t j = i + 1; j < preds.size(); ++j)
      for (const Path& a : preds[i].samples)
        for (const Path& b : preds[j].samples) {
          ++count.cases;
          if (paths_collide(a, b, options.threshold)) ++count.colliding;
        }
  return count;
}

std::optional<double> col(std::span<const PredictionSet> preds, std::span<const Path> gts, const ColOptions& options) {
  return col_count(preds, gts, options).percentage();
}

double loss_coeff(const Matrix& candidates, std::span<const double> gt_coefficients) {
  if (candidates.rows() == 0) throw Error(ErrorKind::shape, "no coefficient candidates");
  if (candidates.cols() != gt_coefficients.size())
    throw Error(ErrorKind::shape, "candidate and ground-truth coefficient lengths differ");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.rows(); ++i) {
    double sum = 0.0;
    const auto row = candidates.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) sum += (row[d] - gt_coefficients[d]) * (row[d] - gt_coefficients[d]);
    best = std::min(best, std::sqrt(sum));
  }
  return best;
}

double loss_coeff(std::span<const Matrix> candidates, std::span<const std::vector<double>> gt_coefficients) {
  check_batch(candidates.size(), gt_coefficients.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < candidates.size(); ++n) sum += loss_coeff(candidates[n], gt_coefficients[n]);
  return sum / static_cast<double>(candidates.size());
}

double loss_dist(std::span<const PredictionSet> preds, std::span<const Path> gts) {
  check_batch(preds.size(), gts.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) sum += ade(preds[n], gts[n]);
  return sum / static_cast<double>(preds.size());
}

double loss_end(std::span<const PredictionSet> preds, std::span<const Path> gts) {
  check_batch(preds.size(), gts.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) sum += fde(preds[n], gts[n]);
  return sum / static_cast<double>(preds.size());
}

LossReport combine_losses(double l_coeff, double l_dist, double l_end, double alpha, double beta) {
  return {l_coeff, l_dist, l_end, alpha, beta, l_coeff + alpha * l_dist + beta * l_end};
}

double linear_fit_error(const Path& path) {
  const std::size_t n = path.size();
  if (n < 3) return 0.0;
  // Least squares x(t) = a + b t (same for y) with t = 0..n-1.
  const double nt = static_cast<double>(n);
  const double t_mean = (nt - 1.0) / 2.0;
  double sxx = 0.0, x_mean = 0.0, y_mean = 0.0;
  for (const Point2& p : path) {
    x_mean += p.x;
    y_mean += p.y;
  }
  x_mean /= nt;
  y_mean /= nt;
  double sx = 0.0, sy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    sxx += dt * dt;
    sx += dt * (path[t].x - x_mean);
    sy += dt * (path[t].y - y_mean);
  }
  const double bx = sx / sxx;
  const double by = sy / sxx;
  double err = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    err += distance(path[t], Point2{x_mean + bx * dt, y_mean + by * dt});
  }
  return err / nt;
}

bool classify_nonlinear(const Path& fut, double tol) { return linear_fit_error(fut) > tol; }

MetricsReport evaluate(std::span<const EvaluationItem> items, const ColOptions& options) {
  MetricsReport report;
  std::vector<const EvaluationItem*> all;
  std::map<std::string, std::vector<const EvaluationItem*>> by_scene;
  for (const EvaluationItem& item : items) {
    all.push_back(&item);
    by_scene[item.tracklet.scene].push_back(&item);
  }
  report.overall = summarize(all, options);
  for (const auto& [scene, members] : by_scene) report.per_scene.emplace_back(scene, summarize(members, options));
  return report;
}

}  // namespace eigentraj::metrics
