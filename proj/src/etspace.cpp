#include "eigentraj/etspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eigentraj/errors.hpp"
#include "eigentraj/kernels.hpp"
#include "eigentraj/path_ops.hpp"

namespace eigentraj::etspace {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kConvergence = 1e-12;
constexpr double kSymmetryTolerance = 1e-9;
constexpr double kClampRatio = 1e-12;

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

double frobenius(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

// A <- J^T A J for the rotation in the (p, q) plane that zeroes A(p, q); V <- V J.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    a(r, p) = a(p, r) = c * arp - s * arq;
    a(r, q) = a(q, r) = s * arp + c * arq;
  }
  const double app = a(p, p);
  const double aqq = a(q, q);
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = a(q, p) = 0.0;

  for (std::size_t r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = c * vrp - s * vrq;
    v(r, q) = s * vrp + c * vrq;
  }
}

void apply_sign_convention(std::span<double> vec) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < vec.size(); ++i) {
    if (std::abs(vec[i]) > best) {
      best = std::abs(vec[i]);
      arg = i;
    }
  }
  if (!vec.empty() && vec[arg] < 0.0)
    for (double& x : vec) x = -x;
}

}  // namespace

std::string_view to_string(Frame frame) { return frame == Frame::absolute ? "absolute" : "last-observed"; }

Frame parse_frame(std::string_view text) {
  if (text == "absolute") return Frame::absolute;
  if (text == "last-observed" || text == "last_observed") return Frame::last_observed;
  throw Error(ErrorKind::config, "unknown frame '" + std::string(text) + "'");
}

EigenDecomposition symmetric_eigendecomposition(const Matrix& g) {
  if (g.rows() != g.cols()) throw Error(ErrorKind::shape, "eigendecomposition needs a square matrix");
  const std::size_t n = g.rows();
  double max_abs = 0.0;
  for (double v : g.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::argument, "matrix has non-finite entries");
    max_abs = std::max(max_abs, std::abs(v));
  }
  const double sym_tol = kSymmetryTolerance * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(g(i, j) - g(j, i)) > sym_tol) throw Error(ErrorKind::argument, "matrix is not symmetric");

  Matrix a = g;
  // Symmetrize exactly so the rotations see one value per off-diagonal pair.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (g(i, j) + g(j, i));
  Matrix v = Matrix::identity(n);

  const double threshold = kConvergence * frobenius(a);
  int sweeps = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweeps == kMaxSweeps)
      throw Error(ErrorKind::numeric, "Jacobi eigensolver did not converge in " + std::to_string(kMaxSweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out{std::vector<double>(n), Matrix(n, n), sweeps};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

ETBasis::ETBasis(Matrix vectors, std::vector<double> singular_values, Segment segment, Layout layout,
                 std::vector<double> mean)
    : vectors_(std::move(vectors)),
      singular_values_(std::move(singular_values)),
      segment_(segment),
      layout_(layout),
      mean_(std::move(mean)) {
  if (vectors_.rows() == 0 || vectors_.cols() == 0) throw Error(ErrorKind::argument, "basis must be non-empty");
  if (vectors_.rows() > vectors_.cols()) throw Error(ErrorKind::argument, "basis rank exceeds its dimension");
  if (vectors_.cols() % 2 != 0) throw Error(ErrorKind::shape, "basis dimension must be even (2 * frames)");
  if (!mean_.empty() && mean_.size() != vectors_.cols())
    throw Error(ErrorKind::shape, "basis mean length does not match its dimension");
}

ETBasis ETBasis::truncated(std::size_t k) const {
  if (k == 0 || k > rank())
    throw Error(ErrorKind::argument, "cannot truncate a rank-" + std::to_string(rank()) + " basis to " + std::to_string(k));
  Matrix head(k, dim());
  std::copy_n(vectors_.data().begin(), k * dim(), head.data().begin());
  return ETBasis(std::move(head), singular_values_, segment_, layout_, mean_);
}

ETBasis fit_descriptor(const dataset::TrajectoryMatrix& matrix, std::size_t k, const FitOptions& options) {
  const std::size_t rows = matrix.data.rows();
  const std::size_t cols = matrix.data.cols();
  if (rows == 0 || cols == 0) throw Error(ErrorKind::argument, "trajectory matrix is empty");
  if (k < 1 || k > std::min(rows, cols))
    throw Error(ErrorKind::argument, "rank k=" + std::to_string(k) + " outside [1, " +
                                         std::to_string(std::min(rows, cols)) + "]");
  for (double v : matrix.data.data())
    if (!std::isfinite(v)) throw Error(ErrorKind::argument, "trajectory matrix has non-finite entries");

  const Matrix* source = &matrix.data;
  Matrix centered;
  std::vector<double> mean;
  if (options.center) {
    centered = matrix.data;
    mean.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = centered.row(r);
      for (double v : row) mean[r] += v;
      mean[r] /= static_cast<double>(cols);
      for (double& v : row) v -= mean[r];
    }
    source = &centered;
  }

  Matrix gram(rows, rows);
  kernels::active().gram(source->data().data(), rows, cols, gram.data().data());
  const EigenDecomposition eig = symmetric_eigendecomposition(gram);

  const double lambda_max = std::max(eig.values.front(), 0.0);
  std::vector<double> singular(std::min(rows, cols));
  for (std::size_t i = 0; i < singular.size(); ++i) {
    const double lambda = eig.values[i];
    singular[i] = lambda < kClampRatio * lambda_max || lambda <= 0.0 ? 0.0 : std::sqrt(lambda);
  }

  Matrix vectors(k, rows);
  for (std::size_t i = 0; i < k; ++i) {
    auto row = vectors.row(i);
    for (std::size_t r = 0; r < rows; ++r) row[r] = eig.vectors(r, i);
    apply_sign_convention(row);
  }
  return ETBasis(std::move(vectors), std::move(singular), matrix.segment, matrix.layout, std::move(mean));
}

Coefficients project(const ETBasis& basis, std::span<const double> segment) {
  if (segment.size() != basis.dim())
    throw Error(ErrorKind::shape, "segment length " + std::to_string(segment.size()) + " does not match basis dimension " +
                                      std::to_string(basis.dim()));
  const auto& kt = kernels::active();
  Coefficients c{std::vector<double>(basis.rank()), basis.segment()};
  if (basis.centered()) {
    std::vector<double> shifted(segment.begin(), segment.end());
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] -= basis.mean()[i];
    for (std::size_t i = 0; i < basis.rank(); ++i) c.values[i] = kt.dot(basis.vector(i).data(), shifted.data(), basis.dim());
  } else {
    for (std::size_t i = 0; i < basis.rank(); ++i) c.values[i] = kt.dot(basis.vector(i).data(), segment.data(), basis.dim());
  }
  return c;
}

std::vector<double> reconstruct(const ETBasis& basis, std::span<const double> coefficients) {
  if (coefficients.size() != basis.rank())
    throw Error(ErrorKind::shape, "coefficient length " + std::to_string(coefficients.size()) +
                                      " does not match basis rank " + std::to_string(basis.rank()));
  std::vector<double> out = basis.centered() ? basis.mean() : std::vector<double>(basis.dim(), 0.0);
  for (std::size_t i = 0; i < basis.rank(); ++i) {
    const double ci = coefficients[i];
    const auto u = basis.vector(i);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += ci * u[r];
  }
  return out;
}

std::vector<double> reconstruct(const ETBasis& basis, const Coefficients& c) {
  if (c.segment != basis.segment()) throw Error(ErrorKind::shape, "coefficients belong to a different segment");
  return reconstruct(basis, std::span<const double>(c.values));
}

Coefficients project_path(const ETBasis& basis, const Path& path) {
  return project(basis, dataset::flatten(path, basis.layout()));
}

Path reconstruct_path(const ETBasis& basis, std::span<const double> coefficients) {
  return dataset::unflatten(reconstruct(basis, coefficients), basis.layout());
}

Tracklet to_frame(const Tracklet& tracklet, Frame frame) {
  return frame == Frame::last_observed ? dataset::relative_to_last_observed(tracklet) : tracklet;
}

DescriptorPair fit_pair(std::span<const Tracklet> train, const PairOptions& options, std::string provenance,
                        bool clamp_k) {
  if (train.empty()) throw Error(ErrorKind::argument, "cannot fit a descriptor on an empty corpus");
  std::vector<Tracklet> framed;
  framed.reserve(train.size());
  for (const Tracklet& t : train) framed.push_back(to_frame(t, options.frame));

  auto fit_segment = [&](Segment segment) {
    const auto m = dataset::to_matrix(framed, segment, options.layout);
    std::size_t k = options.k;
    if (clamp_k) k = std::min(k, std::min(m.data.rows(), m.data.cols()));
    return fit_descriptor(m, k, FitOptions{options.center});
  };
  return DescriptorPair{fit_segment(Segment::observation), fit_segment(Segment::prediction), options.frame,
                        std::move(provenance)};
}

DescriptorPair truncated(const DescriptorPair& pair, std::size_t k) {
  return DescriptorPair{pair.obs.truncated(std::min(k, pair.obs.rank())), pair.pred.truncated(std::min(k, pair.pred.rank())),
                        pair.frame, pair.provenance};
}

ApproximationError approximation_error(const DescriptorPair& pair, std::span<const Tracklet> tracklets) {
  if (tracklets.empty()) return {};
  double obs_sum = 0.0;
  double pred_sum = 0.0;
  for (const Tracklet& raw : tracklets) {
    const Tracklet t = to_frame(raw, pair.frame);
    const Path obs_hat = reconstruct_path(pair.obs, project_path(pair.obs, t.obs).values);
    const Path fut_hat = reconstruct_path(pair.pred, project_path(pair.pred, t.fut).values);
    obs_sum += mean_point_distance(obs_hat, t.obs);
    pred_sum += mean_point_distance(fut_hat, t.fut);
  }
  const double n = static_cast<double>(tracklets.size());
  return {1000.0 * obs_sum / n, 1000.0 * pred_sum / n};
}

}  // namespace eigentraj::etspace
