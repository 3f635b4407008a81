#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace eigentraj {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// A time-ordered sequence of equally spaced 2D positions in meters.
using Path = std::vector<Point2>;

enum class Segment { observation, prediction };

// How a path is flattened into a column of the trajectory matrix.
//   interleaved: (x1, y1, x2, y2, ..., xT, yT)
//   planar:      (x1, ..., xT, y1, ..., yT)
enum class Layout { interleaved, planar };

std::string_view to_string(Segment segment);
std::string_view to_string(Layout layout);
Segment parse_segment(std::string_view text);
Layout parse_layout(std::string_view text);

// One pedestrian's observation window and the future that follows it.
struct Tracklet {
  std::int64_t pedestrian_id = 0;
  std::string scene;
  std::string recording;         // source file stem; pedestrian ids are unique per recording
  std::int64_t start_frame = 0;  // raw frame index of obs.front()
  Path obs;
  Path fut;

  const Path& segment(Segment s) const { return s == Segment::observation ? obs : fut; }
  Path& segment(Segment s) { return s == Segment::observation ? obs : fut; }
};

}  // namespace eigentraj
