#pragma once

#include <vector>

#include "eigentraj/types.hpp"

namespace eigentraj {

// Per-timestep Euclidean distances between two equal-length paths.
std::vector<double> point_distances(const Path& a, const Path& b);

// Mean of point_distances(a, b). Throws Error(shape) on length mismatch.
double mean_point_distance(const Path& a, const Path& b);

// A similarity transform p -> scale * R(rotation) * p + translation.
struct Similarity {
  double rotation = 0.0;  // radians
  double scale = 1.0;
  Point2 translation{};

  Point2 apply(Point2 p) const;
  Path apply(const Path& path) const;
};

}  // namespace eigentraj
