#include "eigentraj/path_ops.hpp"

#include <cmath>
#include <string>

#include "eigentraj/errors.hpp"
#include "eigentraj/kernels.hpp"

namespace eigentraj {

static_assert(sizeof(Point2) == 2 * sizeof(double), "Point2 must be two packed doubles");

std::vector<double> point_distances(const Path& a, const Path& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::shape,
                "path lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  std::vector<double> out(a.size());
  if (!a.empty())
    kernels::active().point_distances(reinterpret_cast<const double*>(a.data()),
                                      reinterpret_cast<const double*>(b.data()), a.size(), out.data());
  return out;
}

double mean_point_distance(const Path& a, const Path& b) {
  const auto d = point_distances(a, b);
  if (d.empty()) return 0.0;
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

Point2 Similarity::apply(Point2 p) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return {scale * (c * p.x - s * p.y) + translation.x, scale * (s * p.x + c * p.y) + translation.y};
}

Path Similarity::apply(const Path& path) const {
  Path out;
  out.reserve(path.size());
  for (Point2 p : path) out.push_back(apply(p));
  return out;
}

}  // namespace eigentraj
