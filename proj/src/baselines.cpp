#include "eigentraj/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eigentraj/errors.hpp"
#include "eigentraj/etspace.hpp"

namespace eigentraj::baselines {
namespace {

constexpr double kMaxNormalCondition = 1e10;
constexpr double kRankTolerance = 1e-12;

Matrix gram_of_columns(const Matrix& m) {
  Matrix g(m.cols(), m.cols());
  for (std::size_t i = 0; i < m.cols(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t t = 0; t < m.rows(); ++t) sum += m(t, i) * m(t, j);
      g(i, j) = g(j, i) = sum;
    }
  return g;
}

// Solves (M^T M) X = M^T by Cholesky. Returns false if a pivot is not positive.
bool cholesky_pseudo_inverse(const Matrix& m, const Matrix& g, Matrix& x) {
  const std::size_t p = g.rows();
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = g(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  x = m.transposed();  // p x T right-hand sides
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < p; ++i) {  // L y = b
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    for (std::size_t i = p; i-- > 0;) {  // L^T z = y
      double s = x(i, c);
      for (std::size_t k = i + 1; k < p; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return true;
}

// Householder QR with column pivoting: X = Pi R^-1 Q^T. Returns false when M is
// numerically rank deficient.
bool pivoted_qr_pseudo_inverse(const Matrix& m, Matrix& x) {
  const std::size_t rows = m.rows();
  const std::size_t p = m.cols();
  if (rows < p) return false;
  Matrix a = m;
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<double>> reflectors;

  for (std::size_t j = 0; j < p; ++j) {
    std::size_t pivot = j;
    double best = -1.0;
    for (std::size_t c = j; c < p; ++c) {
      double norm2 = 0.0;
      for (std::size_t r = j; r < rows; ++r) norm2 += a(r, c) * a(r, c);
      if (norm2 > best) {
        best = norm2;
        pivot = c;
      }
    }
    if (pivot != j) {
      for (std::size_t r = 0; r < rows; ++r) std::swap(a(r, j), a(r, pivot));
      std::swap(perm[j], perm[pivot]);
    }

    std::vector<double> v(rows - j);
    for (std::size_t r = j; r < rows; ++r) v[r - j] = a(r, j);
    const double alpha = std::sqrt(best) * (v[0] >= 0.0 ? -1.0 : 1.0);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double e : v) vnorm2 += e * e;
    if (vnorm2 > 0.0) {
      for (std::size_t c = j; c < p; ++c) {
        double s = 0.0;
        for (std::size_t r = j; r < rows; ++r) s += v[r - j] * a(r, c);
        s *= 2.0 / vnorm2;
        for (std::size_t r = j; r < rows; ++r) a(r, c) -= s * v[r - j];
      }
    }
    reflectors.push_back(std::move(v));
  }

  const double r00 = std::abs(a(0, 0));
  for (std::size_t j = 0; j < p; ++j)
    if (!(std::abs(a(j, j)) > kRankTolerance * r00 * static_cast<double>(std::max(rows, p)))) return false;

  // Thin Q (rows x p): apply reflectors in reverse to the first p identity columns.
  Matrix q(rows, p);
  for (std::size_t c = 0; c < p; ++c) q(c, c) = 1.0;
  for (std::size_t j = p; j-- > 0;) {
    const auto& v = reflectors[j];
    double vnorm2 = 0.0;
    for (double e : v) vnorm2 += e * e;
    if (vnorm2 == 0.0) continue;
    for (std::size_t c = 0; c < p; ++c) {
      double s = 0.0;
      for (std::size_t r = j; r < rows; ++r) s += v[r - j] * q(r, c);
      s *= 2.0 / vnorm2;
      for (std::size_t r = j; r < rows; ++r) q(r, c) -= s * v[r - j];
    }
  }

  Matrix y = q.transposed();  // p x rows, then R y' = y by back substitution
  for (std::size_t c = 0; c < rows; ++c)
    for (std::size_t i = p; i-- > 0;) {
      double s = y(i, c);
      for (std::size_t k = i + 1; k < p; ++k) s -= a(i, k) * y(k, c);
      y(i, c) = s / a(i, i);
    }
  x = Matrix(p, rows);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t c = 0; c < rows; ++c) x(perm[i], c) = y(i, c);
  return true;
}

std::shared_ptr<const Matrix> build_solver(const Matrix& blend) {
  if (blend.rows() < blend.cols()) return nullptr;
  const Matrix g = gram_of_columns(blend);
  const auto eig = etspace::symmetric_eigendecomposition(g);
  const double lmax = eig.values.front();
  const double lmin = eig.values.back();
  Matrix x;
  if (lmin > 0.0 && lmax / lmin <= kMaxNormalCondition && cholesky_pseudo_inverse(blend, g, x))
    return std::make_shared<const Matrix>(std::move(x));
  if (pivoted_qr_pseudo_inverse(blend, x)) return std::make_shared<const Matrix>(std::move(x));
  return nullptr;
}

std::vector<double> uniform_parameters(std::size_t frames) {
  std::vector<double> tau(frames);
  for (std::size_t t = 0; t < frames; ++t) tau[t] = static_cast<double>(t) / static_cast<double>(frames - 1);
  return tau;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::linear: return "linear";
    case CurveKind::bezier: return "bezier";
    case CurveKind::bspline: return "bspline";
  }
  return "unknown";
}

ParametricBasis::ParametricBasis(CurveKind kind, int order, Matrix blend, std::vector<double> knots)
    : kind_(kind), order_(order), blend_(std::move(blend)), knots_(std::move(knots)), solver_(build_solver(blend_)) {}

ParametricBasis bernstein_basis(int order, std::size_t frames) {
  if (order < 1) throw Error(ErrorKind::argument, "Bernstein order must be >= 1");
  if (frames < 2) throw Error(ErrorKind::argument, "curve needs at least 2 frames");
  const auto tau = uniform_parameters(frames);
  Matrix m(frames, static_cast<std::size_t>(order) + 1);
  for (std::size_t t = 0; t < frames; ++t)
    for (int i = 0; i <= order; ++i)
      m(t, static_cast<std::size_t>(i)) = binomial(order, i) * std::pow(tau[t], i) * std::pow(1.0 - tau[t], order - i);
  return ParametricBasis(CurveKind::bezier, order, std::move(m));
}

std::vector<double> clamped_uniform_knots(int order, std::size_t num_ctrl) {
  if (order < 1) throw Error(ErrorKind::argument, "B-spline order must be >= 1");
  if (num_ctrl < static_cast<std::size_t>(order) + 1)
    throw Error(ErrorKind::argument, "B-spline needs at least order + 1 control points");
  const std::size_t degree = static_cast<std::size_t>(order);
  const std::size_t spans = num_ctrl - degree;
  std::vector<double> knots;
  knots.reserve(num_ctrl + degree + 1);
  for (std::size_t i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (std::size_t j = 1; j < spans; ++j) knots.push_back(static_cast<double>(j) / static_cast<double>(spans));
  for (std::size_t i = 0; i <= degree; ++i) knots.push_back(1.0);
  return knots;
}

ParametricBasis bspline_basis(int order, std::size_t num_ctrl, std::size_t frames) {
  if (frames < 2) throw Error(ErrorKind::argument, "curve needs at least 2 frames");
  auto knots = clamped_uniform_knots(order, num_ctrl);
  const std::size_t degree = static_cast<std::size_t>(order);
  const auto tau = uniform_parameters(frames);
  const double last_knot = knots.back();

  Matrix m(frames, num_ctrl);
  std::vector<double> n(knots.size() - 1);
  for (std::size_t t = 0; t < frames; ++t) {
    const double u = tau[t];
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) n[i] = (knots[i] <= u && u < knots[i + 1]) ? 1.0 : 0.0;
    if (u == last_knot) {
      // The right end belongs to the last non-empty span.
      std::size_t i = knots.size() - 1;
      while (i > 0 && !(knots[i - 1] < knots[i])) --i;
      n[i - 1] = 1.0;
    }
    for (std::size_t d = 1; d <= degree; ++d) {
      for (std::size_t i = 0; i + d + 1 < knots.size(); ++i) {
        const double left_den = knots[i + d] - knots[i];
        const double right_den = knots[i + d + 1] - knots[i + 1];
        const double left = left_den > 0.0 ? (u - knots[i]) / left_den * n[i] : 0.0;
        const double right = right_den > 0.0 ? (knots[i + d + 1] - u) / right_den * n[i + 1] : 0.0;
        n[i] = left + right;
      }
    }
    for (std::size_t i = 0; i < num_ctrl; ++i) m(t, i) = n[i];
  }
  return ParametricBasis(CurveKind::bspline, order, std::move(m), std::move(knots));
}

ControlPoints fit_controls(const ParametricBasis& basis, const Path& segment) {
  if (segment.size() != basis.frames())
    throw Error(ErrorKind::shape, "segment has " + std::to_string(segment.size()) + " points, basis expects " +
                                      std::to_string(basis.frames()));
  const Matrix* solver = basis.solver();
  if (solver == nullptr) throw Error(ErrorKind::numeric, "curve basis is rank deficient; least-squares fit is undefined");
  ControlPoints cp{Matrix(basis.controls(), 2)};
  for (std::size_t i = 0; i < basis.controls(); ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t t = 0; t < segment.size(); ++t) {
      sx += (*solver)(i, t) * segment[t].x;
      sy += (*solver)(i, t) * segment[t].y;
    }
    cp.points(i, 0) = sx;
    cp.points(i, 1) = sy;
  }
  return cp;
}

Path reconstruct_controls(const ParametricBasis& basis, const ControlPoints& points) {
  if (points.points.rows() != basis.controls() || points.points.cols() != 2)
    throw Error(ErrorKind::shape, "control points must be " + std::to_string(basis.controls()) + " x 2");
  const Matrix xy = basis.blend() * points.points;
  Path out(basis.frames());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = {xy(t, 0), xy(t, 1)};
  return out;
}

Path approximate(const ParametricBasis& basis, const Path& segment) {
  return reconstruct_controls(basis, fit_controls(basis, segment));
}

LinearDescriptor linear_descriptor(const Path& segment) {
  if (segment.size() < 2) throw Error(ErrorKind::argument, "linear descriptor needs at least 2 points");
  return {segment.front(), segment.back()};
}

Path expand_linear(const LinearDescriptor& descriptor, std::size_t frames) {
  if (frames < 2) throw Error(ErrorKind::argument, "linear expansion needs at least 2 frames");
  Path out(frames);
  const double last = static_cast<double>(frames - 1);
  for (std::size_t t = 0; t < frames; ++t) {
    const double tau = static_cast<double>(t) / last;
    out[t] = {(1.0 - tau) * descriptor.first.x + tau * descriptor.last.x,
              (1.0 - tau) * descriptor.first.y + tau * descriptor.last.y};
  }
  out.back() = descriptor.last;
  return out;
}

}  // namespace eigentraj::baselines
