#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "eigentraj/matrix.hpp"
#include "eigentraj/types.hpp"

namespace eigentraj::dataset {

struct AnnotationRecord {
  std::int64_t frame_id = 0;
  std::int64_t pedestrian_id = 0;
  double x = 0.0;  // meters
  double y = 0.0;
};

enum class Field { frame, pedestrian, x, y };

struct ParseOptions {
  double unit_scale = 1.0;  // meters per raw coordinate unit
  // Column order of the four fields on each line.
  std::array<Field, 4> field_order{Field::frame, Field::pedestrian, Field::x, Field::y};
};

// Parses whitespace-delimited annotation text. Blank lines and lines starting with
// '#' are skipped. Output is sorted by (pedestrian_id, frame_id).
// Throws ParseError for malformed lines and Error(data) when a pedestrian's frames
// are not strictly increasing in file order.
std::vector<AnnotationRecord> parse_annotations(std::istream& in, const ParseOptions& options = {});
std::vector<AnnotationRecord> parse_annotations(const std::string& text, const ParseOptions& options = {});

struct WindowConfig {
  int t_obs = 8;
  int t_fut = 12;
  int stride = 1;
  // Raw frames between consecutive samples of one pedestrian. 0 infers the most
  // common positive gap in the records.
  std::int64_t frame_step = 0;
};

struct ExtractionStats {
  std::size_t pedestrians = 0;
  std::size_t short_pedestrians = 0;  // fewer samples than one window
  std::size_t gapped_windows = 0;     // windows skipped for a missing frame
  std::int64_t frame_step = 0;        // step actually used
};

struct ExtractionResult {
  std::vector<Tracklet> tracklets;
  ExtractionStats stats;
};

// Slides a window of t_obs + t_fut consecutive samples over every pedestrian,
// advancing by `stride` samples. Windows that span a frame gap are skipped.
ExtractionResult extract_tracklets(std::span<const AnnotationRecord> records, const WindowConfig& config,
                                   const std::string& scene = {}, const std::string& recording = {});

std::int64_t infer_frame_step(std::span<const AnnotationRecord> records);

// Flattened column for one path, and its inverse.
std::vector<double> flatten(const Path& path, Layout layout = Layout::interleaved);
Path unflatten(std::span<const double> column, Layout layout = Layout::interleaved);

struct TrajectoryMatrix {
  Matrix data;  // L x N, one flattened tracklet segment per column
  Segment segment = Segment::observation;
  Layout layout = Layout::interleaved;

  std::size_t frames() const { return data.rows() / 2; }
};

// Stacks one segment of every tracklet into an L x N matrix. Throws Error(shape)
// on mixed segment lengths and Error(argument) on an empty list.
TrajectoryMatrix to_matrix(std::span<const Tracklet> tracklets, Segment segment,
                           Layout layout = Layout::interleaved);

// Translates both segments so the last observed point sits at the origin.
Tracklet relative_to_last_observed(const Tracklet& tracklet);

struct SplitSpec {
  std::string held_out_scene;
  std::set<std::string> train_scenes;  // empty = every other scene
};

struct Split {
  std::vector<Tracklet> train;
  std::vector<Tracklet> test;
};

using SceneMap = std::map<std::string, std::vector<Tracklet>>;

Split leave_one_out(const SceneMap& scenes, const SplitSpec& spec);

// Adds i.i.d. N(0, sigma^2) noise to every observed coordinate; the future is untouched.
Tracklet perturb_observation(const Tracklet& tracklet, double sigma, std::uint64_t seed);

// Annotation files belonging to one scene: *.txt directly under root/scene, or
// under root/scene/test when the scene directory holds none. Sorted by name.
std::vector<std::filesystem::path> scene_files(const std::filesystem::path& root, const std::string& scene);

struct SceneLoadResult {
  std::vector<Tracklet> tracklets;
  ExtractionStats stats;
  std::size_t records = 0;
};

// Parses and windows every file of a scene. Frame-step inference and windowing run
// per file so pedestrians in different recordings never merge.
SceneLoadResult load_scene(const std::filesystem::path& root, const std::string& scene, const ParseOptions& parse,
                           const WindowConfig& window);

}  // namespace eigentraj::dataset
