#include "eigentraj/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "eigentraj/errors.hpp"

namespace eigentraj {

std::string_view to_string(Segment segment) {
  return segment == Segment::observation ? "observation" : "prediction";
}

std::string_view to_string(Layout layout) { return layout == Layout::interleaved ? "interleaved" : "planar"; }

Segment parse_segment(std::string_view text) {
  if (text == "observation" || text == "obs") return Segment::observation;
  if (text == "prediction" || text == "pred") return Segment::prediction;
  throw Error(ErrorKind::config, "unknown segment '" + std::string(text) + "'");
}

Layout parse_layout(std::string_view text) {
  if (text == "interleaved") return Layout::interleaved;
  if (text == "planar") return Layout::planar;
  throw Error(ErrorKind::config, "unknown layout '" + std::string(text) + "'");
}

}  // namespace eigentraj

namespace eigentraj::dataset {
namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_number(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(line_no, "not a number: '" + std::string(token) + "'");
  if (!std::isfinite(value)) throw ParseError(line_no, "non-finite value: '" + std::string(token) + "'");
  return value;
}

std::int64_t parse_index(std::string_view token, std::size_t line_no, const char* what) {
  const double v = parse_number(token, line_no);
  if (v < 0.0 || v != std::floor(v) || v > 9.0e15)
    throw ParseError(line_no, std::string(what) + " must be a non-negative integer, got '" + std::string(token) + "'");
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::vector<AnnotationRecord> parse_annotations(std::istream& in, const ParseOptions& options) {
  if (!(options.unit_scale > 0.0) || !std::isfinite(options.unit_scale))
    throw Error(ErrorKind::argument, "unit_scale must be positive and finite");

  std::vector<AnnotationRecord> records;
  std::unordered_map<std::int64_t, std::int64_t> last_frame;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 fields, found " + std::to_string(fields.size()));

    AnnotationRecord rec;
    for (std::size_t i = 0; i < 4; ++i) {
      switch (options.field_order[i]) {
        case Field::frame: rec.frame_id = parse_index(fields[i], line_no, "frame"); break;
        case Field::pedestrian: rec.pedestrian_id = parse_index(fields[i], line_no, "pedestrian id"); break;
        case Field::x: rec.x = parse_number(fields[i], line_no) * options.unit_scale; break;
        case Field::y: rec.y = parse_number(fields[i], line_no) * options.unit_scale; break;
      }
    }

    auto [it, inserted] = last_frame.try_emplace(rec.pedestrian_id, rec.frame_id);
    if (!inserted) {
      if (rec.frame_id <= it->second)
        throw Error(ErrorKind::data, "line " + std::to_string(line_no) + ": pedestrian " +
                                         std::to_string(rec.pedestrian_id) + " frame " + std::to_string(rec.frame_id) +
                                         " does not follow frame " + std::to_string(it->second));
      it->second = rec.frame_id;
    }
    records.push_back(rec);
  }

  std::stable_sort(records.begin(), records.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
    if (a.pedestrian_id != b.pedestrian_id) return a.pedestrian_id < b.pedestrian_id;
    return a.frame_id < b.frame_id;
  });
  return records;
}

std::vector<AnnotationRecord> parse_annotations(const std::string& text, const ParseOptions& options) {
  std::istringstream in(text);
  return parse_annotations(in, options);
}

std::int64_t infer_frame_step(std::span<const AnnotationRecord> records) {
  std::map<std::int64_t, std::size_t> counts;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].pedestrian_id != records[i - 1].pedestrian_id) continue;
    const std::int64_t gap = records[i].frame_id - records[i - 1].frame_id;
    if (gap > 0) ++counts[gap];
  }
  std::int64_t best = 1;
  std::size_t best_count = 0;
  for (const auto& [gap, count] : counts) {
    if (count > best_count) {  // strict: ties keep the smaller gap
      best = gap;
      best_count = count;
    }
  }
  return best;
}

ExtractionResult extract_tracklets(std::span<const AnnotationRecord> records, const WindowConfig& config,
                                   const std::string& scene, const std::string& recording) {
  if (config.t_obs < 2) throw Error(ErrorKind::argument, "t_obs must be >= 2");
  if (config.t_fut < 1) throw Error(ErrorKind::argument, "t_fut must be >= 1");
  if (config.stride < 1) throw Error(ErrorKind::argument, "stride must be >= 1");
  if (config.frame_step < 0) throw Error(ErrorKind::argument, "frame_step must be >= 0");

  ExtractionResult result;
  const std::int64_t step = config.frame_step > 0 ? config.frame_step : infer_frame_step(records);
  result.stats.frame_step = step;
  const std::size_t window = static_cast<std::size_t>(config.t_obs + config.t_fut);

  std::size_t begin = 0;
  while (begin < records.size()) {
    std::size_t end = begin + 1;
    while (end < records.size() && records[end].pedestrian_id == records[begin].pedestrian_id) ++end;
    const std::span<const AnnotationRecord> track = records.subspan(begin, end - begin);
    ++result.stats.pedestrians;

    if (track.size() < window) {
      ++result.stats.short_pedestrians;
    } else {
      // bad_before[i] = number of irregular gaps among the first i transitions.
      std::vector<std::size_t> bad_before(track.size(), 0);
      for (std::size_t i = 1; i < track.size(); ++i)
        bad_before[i] = bad_before[i - 1] + (track[i].frame_id - track[i - 1].frame_id != step ? 1 : 0);

      for (std::size_t start = 0; start + window <= track.size(); start += static_cast<std::size_t>(config.stride)) {
        if (bad_before[start + window - 1] != bad_before[start]) {
          ++result.stats.gapped_windows;
          continue;
        }
        Tracklet t;
        t.pedestrian_id = track[start].pedestrian_id;
        t.scene = scene;
        t.recording = recording;
        t.start_frame = track[start].frame_id;
        t.obs.reserve(static_cast<std::size_t>(config.t_obs));
        t.fut.reserve(static_cast<std::size_t>(config.t_fut));
        for (std::size_t j = 0; j < window; ++j) {
          const Point2 p{track[start + j].x, track[start + j].y};
          (j < static_cast<std::size_t>(config.t_obs) ? t.obs : t.fut).push_back(p);
        }
        result.tracklets.push_back(std::move(t));
      }
    }
    begin = end;
  }
  return result;
}

std::vector<double> flatten(const Path& path, Layout layout) {
  const std::size_t n = path.size();
  std::vector<double> out(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    if (layout == Layout::interleaved) {
      out[2 * t] = path[t].x;
      out[2 * t + 1] = path[t].y;
    } else {
      out[t] = path[t].x;
      out[n + t] = path[t].y;
    }
  }
  return out;
}

Path unflatten(std::span<const double> column, Layout layout) {
  if (column.size() % 2 != 0) throw Error(ErrorKind::shape, "flattened path must have even length");
  const std::size_t n = column.size() / 2;
  Path out(n);
  for (std::size_t t = 0; t < n; ++t) {
    out[t] = layout == Layout::interleaved ? Point2{column[2 * t], column[2 * t + 1]} : Point2{column[t], column[n + t]};
  }
  return out;
}

TrajectoryMatrix to_matrix(std::span<const Tracklet> tracklets, Segment segment, Layout layout) {
  if (tracklets.empty()) throw Error(ErrorKind::argument, "cannot stack an empty tracklet list");
  const std::size_t frames = tracklets.front().segment(segment).size();
  if (frames == 0) throw Error(ErrorKind::shape, "tracklet segment is empty");

  TrajectoryMatrix m{Matrix(2 * frames, tracklets.size()), segment, layout};
  for (std::size_t n = 0; n < tracklets.size(); ++n) {
    const Path& path = tracklets[n].segment(segment);
    if (path.size() != frames)
      throw Error(ErrorKind::shape, "tracklet " + std::to_string(n) + " has " + std::to_string(path.size()) +
                                        " frames, expected " + std::to_string(frames));
    m.data.set_column(n, flatten(path, layout));
  }
  return m;
}

Tracklet relative_to_last_observed(const Tracklet& tracklet) {
  Tracklet out = tracklet;
  if (tracklet.obs.empty()) return out;
  const Point2 origin = tracklet.obs.back();
  for (Point2& p : out.obs) p = p - origin;
  for (Point2& p : out.fut) p = p - origin;
  return out;
}

Split leave_one_out(const SceneMap& scenes, const SplitSpec& spec) {
  if (!scenes.contains(spec.held_out_scene))
    throw Error(ErrorKind::config, "held-out scene '" + spec.held_out_scene + "' is not in the dataset");
  if (spec.train_scenes.contains(spec.held_out_scene))
    throw Error(ErrorKind::config, "held-out scene '" + spec.held_out_scene + "' is also listed for training");
  for (const std::string& name : spec.train_scenes)
    if (!scenes.contains(name)) throw Error(ErrorKind::config, "training scene '" + name + "' is not in the dataset");

  Split split;
  for (const auto& [name, tracklets] : scenes) {
    if (name == spec.held_out_scene) {
      split.test.insert(split.test.end(), tracklets.begin(), tracklets.end());
    } else if (spec.train_scenes.empty() || spec.train_scenes.contains(name)) {
      split.train.insert(split.train.end(), tracklets.begin(), tracklets.end());
    }
  }
  return split;
}

Tracklet perturb_observation(const Tracklet& tracklet, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::argument, "sigma must be finite and >= 0");
  Tracklet out = tracklet;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (Point2& p : out.obs) {
    p.x += noise(rng);
    p.y += noise(rng);
  }
  return out;
}

std::vector<std::filesystem::path> scene_files(const std::filesystem::path& root, const std::string& scene) {
  namespace fs = std::filesystem;
  const fs::path dir = root / scene;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::config, "scene directory not found: " + dir.string());

  auto collect = [](const fs::path& d) {
    std::vector<fs::path> files;
    if (!fs::is_directory(d)) return files;
    for (const auto& entry : fs::directory_iterator(d))
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
  };
  auto files = collect(dir);
  if (files.empty()) files = collect(dir / "test");
  if (files.empty()) throw Error(ErrorKind::config, "no annotation files (*.txt) for scene '" + scene + "'");
  return files;
}

SceneLoadResult load_scene(const std::filesystem::path& root, const std::string& scene, const ParseOptions& parse,
                           const WindowConfig& window) {
  SceneLoadResult result;
  for (const auto& file : scene_files(root, scene)) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::io, "cannot open " + file.string());
    std::vector<AnnotationRecord> records;
    try {
      records = parse_annotations(in, parse);
    } catch (const ParseError& e) {
      throw Error(ErrorKind::parse, file.string() + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), file.string() + ": " + e.what());
    }
    result.records += records.size();
    auto extracted = extract_tracklets(records, window, scene, file.stem().string());
    result.stats.pedestrians += extracted.stats.pedestrians;
    result.stats.short_pedestrians += extracted.stats.short_pedestrians;
    result.stats.gapped_windows += extracted.stats.gapped_windows;
    result.stats.frame_step = extracted.stats.frame_step;
    std::move(extracted.tracklets.begin(), extracted.tracklets.end(), std::back_inserter(result.tracklets));
  }
  return result;
}

}  // namespace eigentraj::dataset
