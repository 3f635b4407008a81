#pragma once

// Versioned JSON containers for the artifacts passed between CLI commands.
//
//   descriptor  {format: "eigentraj.descriptor", version, provenance, frame,
//                observation: {...}, prediction: {...}}
//               each segment: {segment, frames, k, layout, centered, U (L x k,
//               row-major), singular_values, mean (centered only)}
//   anchors     {format: "eigentraj.anchors", version, modes, k, seed, inertia,
//                centroids (s x k, row-major), provenance}
//   predictions {format: "eigentraj.predictions", version, provenance,
//                entries: [{scene, recording, pedestrian_id, start_frame,
//                           samples: [[x0, y0, x1, y1, ...], ...]}]}
//   corrections {format: "eigentraj.corrections", version, modes, k, values}
//
// Loaders reject any other format tag or version with Error(data).

#include <filesystem>
#include <string>
#include <vector>

#include "eigentraj/anchors.hpp"
#include "eigentraj/etspace.hpp"
#include "eigentraj/metrics.hpp"
#include "json.hpp"

namespace eigentraj::persistence {

inline constexpr int kFormatVersion = 1;

nlohmann::json to_json(const etspace::ETBasis& basis);
etspace::ETBasis basis_from_json(const nlohmann::json& j);

nlohmann::json to_json(const etspace::DescriptorPair& pair);
etspace::DescriptorPair descriptor_from_json(const nlohmann::json& j);

nlohmann::json to_json(const anchors::AnchorSet& anchors);
anchors::AnchorSet anchors_from_json(const nlohmann::json& j);

struct PredictionEntry {
  std::string scene;
  std::string recording;
  std::int64_t pedestrian_id = 0;
  std::int64_t start_frame = 0;
  metrics::PredictionSet pred;
};

struct PredictionFile {
  std::string provenance;
  std::vector<PredictionEntry> entries;
};

nlohmann::json to_json(const PredictionFile& file);
PredictionFile predictions_from_json(const nlohmann::json& j);

nlohmann::json corrections_to_json(const Matrix& corrections);
Matrix corrections_from_json(const nlohmann::json& j);

// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
// Throws Error(config) when the file is missing and Error(data) when it is not valid JSON.
nlohmann::json read_json(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

void save_descriptor(const std::filesystem::path& path, const etspace::DescriptorPair& pair);
etspace::DescriptorPair load_descriptor(const std::filesystem::path& path);
void save_anchors(const std::filesystem::path& path, const anchors::AnchorSet& anchors);
anchors::AnchorSet load_anchors(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path, const PredictionFile& file);
PredictionFile load_predictions(const std::filesystem::path& path);

}  // namespace eigentraj::persistence
