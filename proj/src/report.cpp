#include "eigentraj/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace eigentraj::report {
namespace {

using nlohmann::json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string mm(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02ld", std::lround(v));
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const metrics::Summary& s) {
  json j{{"tracklets", s.tracklets},
         {"ade", s.ade},
         {"fde", s.fde},
         {"tcc", s.tcc},
         {"col_cases", s.col_counts.cases},
         {"col_colliding", s.col_counts.colliding}};
  j["col"] = s.col ? json(*s.col) : json(nullptr);
  return j;
}

json to_json(const metrics::MetricsReport& r) {
  json per_scene = json::object();
  for (const auto& [scene, s] : r.per_scene) per_scene[scene] = to_json(s);
  return {{"overall", to_json(r.overall)}, {"per_scene", std::move(per_scene)}};
}

std::vector<MetricsRow> rows(const metrics::MetricsReport& r, const std::string& model, std::size_t k, std::size_t s,
                             double sigma, const std::string& subset) {
  std::vector<MetricsRow> out;
  for (const auto& [scene, summary] : r.per_scene) out.push_back({scene, model, k, s, sigma, subset, summary});
  out.push_back({"all", model, k, s, sigma, subset, r.overall});
  return out;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << csv_field(r.scene) << ',' << csv_field(r.model) << ',' << r.k << ',' << r.s << ','
        << format_double(r.sigma) << ',' << csv_field(r.subset) << ',' << r.summary.tracklets << ','
        << format_double(r.summary.ade) << ',' << format_double(r.summary.fde) << ','
        << format_double(r.summary.tcc) << ',' << (r.summary.col ? format_double(*r.summary.col) : "") << '\n';
  }
  return out.str();
}

json to_json(const MetricsRow& row) {
  json j = to_json(row.summary);
  j["scene"] = row.scene;
  j["model"] = row.model;
  j["k"] = row.k;
  j["s"] = row.s;
  j["sigma"] = row.sigma;
  j["subset"] = row.subset;
  return j;
}

json to_json(const StudyReport& r) {
  json cells = json::array();
  for (const StudyCell& c : r.cells)
    cells.push_back({{"descriptor", c.descriptor},
                     {"dim", c.dim},
                     {"scene", c.scene},
                     {"obs_mm", c.obs_mm},
                     {"pred_mm", c.pred_mm},
                     {"train_tracklets", c.train_tracklets},
                     {"test_tracklets", c.test_tracklets}});
  return {{"scenes", r.scenes}, {"cells", std::move(cells)}};
}

std::string study_csv(const StudyReport& r) {
  std::ostringstream out;
  out << kStudyCsvHeader << '\n';
  for (const StudyCell& c : r.cells)
    out << csv_field(c.descriptor) << ',' << c.dim << ',' << csv_field(c.scene) << ',' << format_double(c.obs_mm)
        << ',' << format_double(c.pred_mm) << ',' << c.train_tracklets << ',' << c.test_tracklets << '\n';
  return out.str();
}

std::string study_text(const StudyReport& r) {
  // (descriptor, dim) in first-seen order -> scene -> cell
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::map<std::string, const StudyCell*>> table;
  for (const StudyCell& c : r.cells) {
    const auto key = std::make_pair(c.descriptor, c.dim);
    if (!table.count(key)) order.push_back(key);
    table[key][c.scene] = &c;
  }
  std::vector<std::string> columns = r.scenes;
  columns.push_back("avg");

  constexpr std::size_t kName = 12;
  constexpr std::size_t kDim = 5;
  constexpr std::size_t kCell = 11;
  std::ostringstream out;
  out << pad("descriptor", kName) << pad("dim", kDim);
  for (const std::string& col : columns) out << pad(col, kCell);
  out << '\n';
  for (const auto& key : order) {
    out << pad(key.first, kName) << pad(std::to_string(key.second), kDim);
    for (const std::string& col : columns) {
      const auto& cells = table[key];
      const auto it = cells.find(col);
      out << pad(it == cells.end() ? "-" : mm(it->second->obs_mm) + " / " + mm(it->second->pred_mm), kCell);
    }
    out << '\n';
  }
  std::string text = out.str();
  // trailing spaces from the last padded column
  std::string trimmed;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    trimmed += line + '\n';
  }
  return trimmed;
}

}  // namespace eigentraj::report
