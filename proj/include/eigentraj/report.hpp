#pragma once

#include <string>
#include <vector>

#include "eigentraj/metrics.hpp"
#include "json.hpp"

namespace eigentraj::report {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

nlohmann::json to_json(const metrics::Summary& s);
nlohmann::json to_json(const metrics::MetricsReport& r);

// One line of the flat metrics table.
struct MetricsRow {
  std::string scene;  // "all" for the pooled row
  std::string model;
  std::size_t k = 0;
  std::size_t s = 0;
  double sigma = 0.0;
  std::string subset = "all";
  metrics::Summary summary;
};

// Per-scene rows followed by the pooled row, all sharing the given tags.
std::vector<MetricsRow> rows(const metrics::MetricsReport& r, const std::string& model, std::size_t k, std::size_t s,
                             double sigma, const std::string& subset);

inline constexpr const char* kMetricsCsvHeader = "scene,model,k,s,sigma,subset,tracklets,ade,fde,tcc,col";
std::string metrics_csv(const std::vector<MetricsRow>& rows);
nlohmann::json to_json(const MetricsRow& row);

// Reconstruction error of one descriptor on one held-out scene.
struct StudyCell {
  std::string descriptor;  // "linear", "bezier", "bspline" or "et"
  std::size_t dim = 0;     // numbers per segment and axis pair, e.g. 12 for 6 control points
  std::string scene;       // "avg" for the scene average
  double obs_mm = 0.0;
  double pred_mm = 0.0;
  std::size_t train_tracklets = 0;
  std::size_t test_tracklets = 0;
};

struct StudyReport {
  std::vector<std::string> scenes;
  std::vector<StudyCell> cells;  // descriptor-major, scenes in order, then "avg"
};

nlohmann::json to_json(const StudyReport& r);
inline constexpr const char* kStudyCsvHeader = "descriptor,dim,scene,obs_mm,pred_mm,train_tracklets,test_tracklets";
std::string study_csv(const StudyReport& r);
// Table view with integer millimeters, "obs / pred" per scene.
std::string study_text(const StudyReport& r);

}  // namespace eigentraj::report
