#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "eigentraj/matrix.hpp"
#include "eigentraj/types.hpp"

namespace eigentraj::baselines {

enum class CurveKind { linear, bezier, bspline };

std::string_view to_string(CurveKind kind);

// A T x p blending matrix over uniformly spaced parameters tau_t = t / (T - 1).
// A path is represented by p control points P (p x 2) as M * P.
class ParametricBasis {
 public:
  ParametricBasis(CurveKind kind, int order, Matrix blend, std::vector<double> knots = {});

  CurveKind kind() const { return kind_; }
  int order() const { return order_; }  // polynomial degree
  std::size_t frames() const { return blend_.rows(); }
  std::size_t controls() const { return blend_.cols(); }
  const Matrix& blend() const { return blend_; }
  const std::vector<double>& knots() const { return knots_; }

  // (M^T M)^-1 M^T, or null when M^T M is singular.
  const Matrix* solver() const { return solver_.get(); }

 private:
  CurveKind kind_;
  int order_;
  Matrix blend_;
  std::vector<double> knots_;
  std::shared_ptr<const Matrix> solver_;
};

// M[t][i] = C(order, i) tau^i (1 - tau)^(order - i). Throws Error(argument) unless
// order >= 1 and frames >= 2.
ParametricBasis bernstein_basis(int order, std::size_t frames);

// Clamped uniform knot vector for `num_ctrl` control points of degree `order`.
std::vector<double> clamped_uniform_knots(int order, std::size_t num_ctrl);

// Cox-de Boor evaluation of B_{i,order}(tau) on a clamped uniform knot vector.
// Throws Error(argument) when num_ctrl < order + 1 or frames < 2.
ParametricBasis bspline_basis(int order, std::size_t num_ctrl, std::size_t frames);

struct ControlPoints {
  Matrix points;  // p x 2
};

// Least-squares control points: argmin ||M P - segment||_F, per axis.
// Throws Error(shape) on a length mismatch, Error(numeric) when M^T M is singular.
ControlPoints fit_controls(const ParametricBasis& basis, const Path& segment);

// M * P.
Path reconstruct_controls(const ParametricBasis& basis, const ControlPoints& points);

// fit_controls followed by reconstruct_controls.
Path approximate(const ParametricBasis& basis, const Path& segment);

struct LinearDescriptor {
  Point2 first;
  Point2 last;
};

LinearDescriptor linear_descriptor(const Path& segment);
// `frames` points equally spaced from first to last. Throws Error(argument) for frames < 2.
Path expand_linear(const LinearDescriptor& descriptor, std::size_t frames);

}  // namespace eigentraj::baselines
