#include <cmath>

#include "eigentraj/kernels.hpp"

namespace eigentraj::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void gram(const double* a, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i; j < rows; ++j) {
      const double v = dot(a + i * cols, a + j * cols, cols);
      out[i * rows + j] = v;
      out[j * rows + i] = v;
    }
  }
}

void squared_distances(const double* points, std::size_t n, const double* centers, std::size_t m,
                       std::size_t dim, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points + i * dim;
    for (std::size_t j = 0; j < m; ++j) {
      const double* c = centers + j * dim;
      double sum = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = p[d] - c[d];
        sum += diff * diff;
      }
      out[i * m + j] = sum;
    }
  }
}

void point_distances(const double* a, const double* b, std::size_t npoints, double* out) {
  for (std::size_t t = 0; t < npoints; ++t) {
    const double dx = a[2 * t] - b[2 * t];
    const double dy = a[2 * t + 1] - b[2 * t + 1];
    out[t] = std::sqrt(dx * dx + dy * dy);
  }
}

}  // namespace

const KernelTable table{Isa::scalar, &dot, &gram, &squared_distances, &point_distances};

}  // namespace eigentraj::kernels::scalar
