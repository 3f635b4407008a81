#include "eigentraj/persistence.hpp"

#include <fstream>

#include "eigentraj/errors.hpp"

namespace eigentraj::persistence {
namespace {

using nlohmann::json;

constexpr const char* kDescriptorFormat = "eigentraj.descriptor";
constexpr const char* kAnchorsFormat = "eigentraj.anchors";
constexpr const char* kPredictionsFormat = "eigentraj.predictions";
constexpr const char* kCorrectionsFormat = "eigentraj.corrections";

void check_header(const json& j, const char* format) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != format)
    throw Error(ErrorKind::data, std::string("not a ") + format + " file");
  if (!j.contains("version") || !j.at("version").is_number_integer())
    throw Error(ErrorKind::data, std::string(format) + " file has no integer version");
  const int version = j.at("version").get<int>();
  if (version != kFormatVersion)
    throw Error(ErrorKind::data, std::string(format) + " version " + std::to_string(version) + " is not supported");
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::data, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::data, std::string("field '") + key + "': " + e.what());
  }
}

json matrix_values(const Matrix& m) { return json(m.data()); }

Matrix matrix_from(const json& j, const char* key, std::size_t rows, std::size_t cols) {
  auto values = field<std::vector<double>>(j, key);
  if (values.size() != rows * cols)
    throw Error(ErrorKind::data, std::string("field '") + key + "' has " + std::to_string(values.size()) +
                                     " values, expected " + std::to_string(rows * cols));
  return Matrix(rows, cols, std::move(values));
}

}  // namespace

json to_json(const etspace::ETBasis& basis) {
  json j;
  j["segment"] = std::string(to_string(basis.segment()));
  j["frames"] = basis.frames();
  j["k"] = basis.rank();
  j["layout"] = std::string(to_string(basis.layout()));
  j["centered"] = basis.centered();
  j["U"] = matrix_values(basis.u());
  j["singular_values"] = basis.singular_values();
  if (basis.centered()) j["mean"] = basis.mean();
  return j;
}

etspace::ETBasis basis_from_json(const json& j) {
  try {
    const auto frames = field<std::size_t>(j, "frames");
    const auto k = field<std::size_t>(j, "k");
    const Matrix u = matrix_from(j, "U", 2 * frames, k);
    std::vector<double> mean;
    if (field<bool>(j, "centered")) mean = field<std::vector<double>>(j, "mean");
    return etspace::ETBasis(u.transposed(), field<std::vector<double>>(j, "singular_values"),
                            parse_segment(field<std::string>(j, "segment")), parse_layout(field<std::string>(j, "layout")),
                            std::move(mean));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::data) throw;
    throw Error(ErrorKind::data, std::string("invalid basis: ") + e.what());
  }
}

json to_json(const etspace::DescriptorPair& pair) {
  json j;
  j["format"] = kDescriptorFormat;
  j["version"] = kFormatVersion;
  j["provenance"] = pair.provenance;
  j["frame"] = std::string(to_string(pair.frame));
  j["observation"] = to_json(pair.obs);
  j["prediction"] = to_json(pair.pred);
  return j;
}

etspace::DescriptorPair descriptor_from_json(const json& j) {
  check_header(j, kDescriptorFormat);
  etspace::DescriptorPair pair;
  pair.provenance = field<std::string>(j, "provenance");
  try {
    pair.frame = etspace::parse_frame(field<std::string>(j, "frame"));
  } catch (const Error& e) {
    throw Error(ErrorKind::data, e.what());
  }
  if (!j.contains("observation") || !j.contains("prediction"))
    throw Error(ErrorKind::data, "descriptor file needs observation and prediction bases");
  pair.obs = basis_from_json(j.at("observation"));
  pair.pred = basis_from_json(j.at("prediction"));
  if (pair.obs.segment() != Segment::observation || pair.pred.segment() != Segment::prediction)
    throw Error(ErrorKind::data, "descriptor bases carry the wrong segment tags");
  return pair;
}

json to_json(const anchors::AnchorSet& set) {
  json j;
  j["format"] = kAnchorsFormat;
  j["version"] = kFormatVersion;
  j["modes"] = set.modes();
  j["k"] = set.rank();
  j["seed"] = set.seed;
  j["inertia"] = set.inertia;
  j["centroids"] = matrix_values(set.centroids);
  j["provenance"] = set.provenance;
  return j;
}

anchors::AnchorSet anchors_from_json(const json& j) {
  check_header(j, kAnchorsFormat);
  anchors::AnchorSet set;
  const auto modes = field<std::size_t>(j, "modes");
  const auto k = field<std::size_t>(j, "k");
  if (modes == 0 || k == 0) throw Error(ErrorKind::data, "anchor set must have at least one mode and rank >= 1");
  set.centroids = matrix_from(j, "centroids", modes, k);
  set.seed = field<std::uint64_t>(j, "seed");
  set.inertia = field<double>(j, "inertia");
  set.provenance = field<std::string>(j, "provenance");
  return set;
}

json to_json(const PredictionFile& file) {
  json entries = json::array();
  for (const PredictionEntry& e : file.entries) {
    json samples = json::array();
    for (const Path& p : e.pred.samples) {
      json flat = json::array();
      for (const Point2& q : p) {
        flat.push_back(q.x);
        flat.push_back(q.y);
      }
      samples.push_back(std::move(flat));
    }
    entries.push_back({{"scene", e.scene},
                       {"recording", e.recording},
                       {"pedestrian_id", e.pedestrian_id},
                       {"start_frame", e.start_frame},
                       {"samples", std::move(samples)}});
  }
  json j;
  j["format"] = kPredictionsFormat;
  j["version"] = kFormatVersion;
  j["provenance"] = file.provenance;
  j["entries"] = std::move(entries);
  return j;
}

PredictionFile predictions_from_json(const json& j) {
  check_header(j, kPredictionsFormat);
  PredictionFile file;
  file.provenance = field<std::string>(j, "provenance");
  if (!j.contains("entries") || !j.at("entries").is_array()) throw Error(ErrorKind::data, "missing entries array");
  for (const json& e : j.at("entries")) {
    PredictionEntry entry;
    entry.scene = field<std::string>(e, "scene");
    entry.recording = field<std::string>(e, "recording");
    entry.pedestrian_id = field<std::int64_t>(e, "pedestrian_id");
    entry.start_frame = field<std::int64_t>(e, "start_frame");
    for (const auto& flat : field<std::vector<std::vector<double>>>(e, "samples")) {
      if (flat.size() % 2 != 0) throw Error(ErrorKind::data, "prediction sample has odd length");
      Path p(flat.size() / 2);
      for (std::size_t t = 0; t < p.size(); ++t) p[t] = {flat[2 * t], flat[2 * t + 1]};
      entry.pred.samples.push_back(std::move(p));
    }
    file.entries.push_back(std::move(entry));
  }
  return file;
}

json corrections_to_json(const Matrix& corrections) {
  json j;
  j["format"] = kCorrectionsFormat;
  j["version"] = kFormatVersion;
  j["modes"] = corrections.rows();
  j["k"] = corrections.cols();
  j["values"] = matrix_values(corrections);
  return j;
}

Matrix corrections_from_json(const json& j) {
  check_header(j, kCorrectionsFormat);
  return matrix_from(j, "values", field<std::size_t>(j, "modes"), field<std::size_t>(j, "k"));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::config, "required file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::data, path.string() + ": " + e.what());
  }
}

void save_descriptor(const std::filesystem::path& path, const etspace::DescriptorPair& pair) {
  write_json(path, to_json(pair));
}
etspace::DescriptorPair load_descriptor(const std::filesystem::path& path) {
  return descriptor_from_json(read_json(path));
}
void save_anchors(const std::filesystem::path& path, const anchors::AnchorSet& set) { write_json(path, to_json(set)); }
anchors::AnchorSet load_anchors(const std::filesystem::path& path) { return anchors_from_json(read_json(path)); }
void save_predictions(const std::filesystem::path& path, const PredictionFile& file) {
  write_json(path, to_json(file));
}
PredictionFile load_predictions(const std::filesystem::path& path) { return predictions_from_json(read_json(path)); }

}  // namespace eigentraj::persistence
