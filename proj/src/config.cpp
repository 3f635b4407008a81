#include "eigentraj/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "eigentraj/errors.hpp"
#include "eigentraj/etspace.hpp"
#include "eigentraj/types.hpp"

namespace eigentraj {
namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::config, what);
}

template <typename T>
void assign(const json& value, const std::string& key, T& out) {
  try {
    out = value.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::config, "config field '" + key + "' has the wrong type");
  }
}

void assign_path(const json& value, const std::string& key, std::filesystem::path& out) {
  std::string s;
  assign(value, key, s);
  out = s;
}

using Setter = std::function<void(const json&, const std::string&, RunConfig&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data_root", [](const json& v, const std::string& k, RunConfig& c) { assign_path(v, k, c.data_root); }},
      {"scenes", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.scenes); }},
      {"held_out", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.held_out); }},
      {"full_corpus", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.full_corpus); }},
      {"t_obs", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.t_obs); }},
      {"t_fut", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.t_fut); }},
      {"stride", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.stride); }},
      {"frame_step", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.frame_step); }},
      {"unit_scale", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.unit_scale); }},
      {"k", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.k); }},
      {"study_ranks", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.study_ranks); }},
      {"frame", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.frame); }},
      {"layout", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.layout); }},
      {"center", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.center); }},
      {"modes", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.modes); }},
      {"seed", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.seed); }},
      {"max_iter", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.max_iter); }},
      {"col_threshold", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.col_threshold); }},
      {"col_all_pairings",
       [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.col_all_pairings); }},
      {"noise_sigmas", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.noise_sigmas); }},
      {"nonlinear_tol", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.nonlinear_tol); }},
      {"bezier_order", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.bezier_order); }},
      {"bspline_order", [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.bspline_order); }},
      {"bspline_controls",
       [](const json& v, const std::string& k, RunConfig& c) { assign(v, k, c.bspline_controls); }},
      {"output_dir", [](const json& v, const std::string& k, RunConfig& c) { assign_path(v, k, c.output_dir); }},
      {"descriptor", [](const json& v, const std::string& k, RunConfig& c) { assign_path(v, k, c.descriptor); }},
      {"anchors", [](const json& v, const std::string& k, RunConfig& c) { assign_path(v, k, c.anchors); }},
      {"predictions", [](const json& v, const std::string& k, RunConfig& c) { assign_path(v, k, c.predictions); }},
      {"corrections", [](const json& v, const std::string& k, RunConfig& c) { assign_path(v, k, c.corrections); }},
  };
  return table;
}

std::filesystem::path artifact(const std::filesystem::path& explicit_path, const std::filesystem::path& dir,
                               const std::string& stem, const std::string& fold) {
  if (!explicit_path.empty()) return explicit_path;
  return dir / (stem + "_" + fold + ".json");
}

}  // namespace

void RunConfig::validate() const {
  require(!scenes.empty(), "scene list is empty");
  std::set<std::string> unique(scenes.begin(), scenes.end());
  require(unique.size() == scenes.size(), "scene list has duplicates");
  for (const std::string& s : scenes) require(!s.empty(), "scene names must be non-empty");
  require(held_out.empty() || unique.count(held_out) == 1, "held-out scene '" + held_out + "' is not in the scene list");

  if (t_obs < 2) throw Error(ErrorKind::argument, "t_obs must be >= 2");
  if (t_fut < 1) throw Error(ErrorKind::argument, "t_fut must be >= 1");
  if (stride < 1) throw Error(ErrorKind::argument, "stride must be >= 1");
  if (frame_step < 0) throw Error(ErrorKind::argument, "frame_step must be >= 0");
  if (!(unit_scale > 0.0) || !std::isfinite(unit_scale)) throw Error(ErrorKind::argument, "unit_scale must be > 0");

  const std::size_t l_min = 2 * static_cast<std::size_t>(std::min(t_obs, t_fut));
  if (k < 1 || k > l_min)
    throw Error(ErrorKind::argument, "k = " + std::to_string(k) + " outside [1, " + std::to_string(l_min) + "]");
  for (std::size_t r : study_ranks)
    if (r < 1 || r > l_min)
      throw Error(ErrorKind::argument, "study rank " + std::to_string(r) + " outside [1, " + std::to_string(l_min) + "]");
  etspace::parse_frame(frame);
  parse_layout(layout);

  if (modes < 1) throw Error(ErrorKind::argument, "modes must be >= 1");
  if (max_iter < 1) throw Error(ErrorKind::argument, "max_iter must be >= 1");
  if (!(col_threshold >= 0.0)) throw Error(ErrorKind::argument, "col_threshold must be >= 0");
  for (double s : noise_sigmas)
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorKind::argument, "noise sigmas must be >= 0");
  if (!(nonlinear_tol >= 0.0)) throw Error(ErrorKind::argument, "nonlinear_tol must be >= 0");

  if (bezier_order < 1) throw Error(ErrorKind::argument, "bezier_order must be >= 1");
  if (bspline_order < 1) throw Error(ErrorKind::argument, "bspline_order must be >= 1");
  if (bspline_controls < static_cast<std::size_t>(bspline_order) + 1)
    throw Error(ErrorKind::argument, "bspline_controls must be >= bspline_order + 1");
  const auto shortest = static_cast<std::size_t>(std::min(t_obs, t_fut));
  if (static_cast<std::size_t>(bezier_order) + 1 > shortest || bspline_controls > shortest)
    throw Error(ErrorKind::argument, "curve baselines need at least as many frames as control points");
}

std::vector<std::string> RunConfig::folds() const {
  if (!held_out.empty()) return {held_out};
  return scenes;
}

std::filesystem::path RunConfig::descriptor_path(const std::string& fold) const {
  return artifact(descriptor, output_dir, "descriptor", fold);
}
std::filesystem::path RunConfig::anchors_path(const std::string& fold) const {
  return artifact(anchors, output_dir, "anchors", fold);
}
std::filesystem::path RunConfig::predictions_path(const std::string& fold) const {
  return artifact(predictions, output_dir, "predictions", fold);
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = json{{"data_root", c.data_root.string()},
           {"scenes", c.scenes},
           {"held_out", c.held_out},
           {"full_corpus", c.full_corpus},
           {"t_obs", c.t_obs},
           {"t_fut", c.t_fut},
           {"stride", c.stride},
           {"frame_step", c.frame_step},
           {"unit_scale", c.unit_scale},
           {"k", c.k},
           {"study_ranks", c.study_ranks},
           {"frame", c.frame},
           {"layout", c.layout},
           {"center", c.center},
           {"modes", c.modes},
           {"seed", c.seed},
           {"max_iter", c.max_iter},
           {"col_threshold", c.col_threshold},
           {"col_all_pairings", c.col_all_pairings},
           {"noise_sigmas", c.noise_sigmas},
           {"nonlinear_tol", c.nonlinear_tol},
           {"bezier_order", c.bezier_order},
           {"bspline_order", c.bspline_order},
           {"bspline_controls", c.bspline_controls},
           {"output_dir", c.output_dir.string()},
           {"descriptor", c.descriptor.string()},
           {"anchors", c.anchors.string()},
           {"predictions", c.predictions.string()},
           {"corrections", c.corrections.string()}};
}

void merge_from_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : j.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw Error(ErrorKind::config, "unknown config field '" + key + "'");
    it->second(value, key, c);
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, path.string() + ": " + e.what());
  }
  RunConfig c;
  merge_from_json(j, c);
  return c;
}

}  // namespace eigentraj
