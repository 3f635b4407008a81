#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace eigentraj {

// Every knob of a CLI run. Loaded from a JSON config file, then overridden by
// command-line flags; the resolved value is embedded in every report.
struct RunConfig {
  std::filesystem::path data_root;
  std::vector<std::string> scenes{"eth", "hotel", "univ", "zara1", "zara2"};
  std::string held_out;  // empty: every scene is held out in turn
  bool full_corpus = false;  // fit on every scene, including the evaluated one

  int t_obs = 8;
  int t_fut = 12;
  int stride = 1;
  std::int64_t frame_step = 0;  // 0: infer per annotation file
  double unit_scale = 1.0;

  std::size_t k = 6;
  std::vector<std::size_t> study_ranks{4, 6, 8, 10, 12};
  std::string frame = "last-observed";
  std::string layout = "interleaved";
  bool center = false;

  std::size_t modes = 20;
  std::uint64_t seed = 0;
  int max_iter = 300;

  double col_threshold = 0.1;
  bool col_all_pairings = false;
  std::vector<double> noise_sigmas{0.0, 0.02, 0.05, 0.10};
  double nonlinear_tol = 0.02;

  int bezier_order = 5;
  int bspline_order = 5;
  std::size_t bspline_controls = 6;

  std::filesystem::path output_dir = "out";
  // Optional explicit artifact paths; defaults live in output_dir, one per fold.
  std::filesystem::path descriptor;
  std::filesystem::path anchors;
  std::filesystem::path predictions;
  std::filesystem::path corrections;

  // Throws Error(config) or Error(argument) for values downstream modules reject.
  void validate() const;

  std::vector<std::string> folds() const;
  std::filesystem::path descriptor_path(const std::string& fold) const;
  std::filesystem::path anchors_path(const std::string& fold) const;
  std::filesystem::path predictions_path(const std::string& fold) const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
// Fields absent from `j` keep their current value in `c`; unknown keys are rejected.
void merge_from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace eigentraj
