#pragma once

// Pipeline commands behind the eigentraj CLI. Each writes its artifacts under
// config.output_dir (or the explicit artifact paths), emits logfmt progress lines
// on `log`, and returns what it wrote. Nothing time-dependent is written, so two
// runs with one config produce identical bytes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "eigentraj/config.hpp"
#include "eigentraj/dataset.hpp"
#include "eigentraj/metrics.hpp"
#include "eigentraj/report.hpp"

namespace eigentraj::commands {

// Every configured scene, windowed per RunConfig. Throws Error(config) when a
// scene has no annotation files.
dataset::SceneMap load_corpus(const RunConfig& config, std::ostream& log);

// Training tracklets for one fold: every other scene, or every scene when
// config.full_corpus is set.
std::vector<Tracklet> training_set(const dataset::SceneMap& corpus, const std::string& fold, bool full_corpus);

// descriptor_<fold>.json per fold.
std::vector<std::filesystem::path> cmd_fit(const RunConfig& config, std::ostream& log);

// recon_eval.{json,csv,txt}: linear, Bezier, B-spline and ET at each study rank,
// per held-out scene plus the scene average.
report::StudyReport cmd_recon_eval(const RunConfig& config, std::ostream& log);

// anchors_<fold>.json per fold, from that fold's descriptor and training scenes.
std::vector<std::filesystem::path> cmd_anchors(const RunConfig& config, std::ostream& log);

// predictions_<fold>.json per fold: s anchor predictions for every held-out tracklet.
std::vector<std::filesystem::path> cmd_predict(const RunConfig& config, std::ostream& log);

// eval.{json,csv}: metrics of the stored predictions against ground truth.
metrics::MetricsReport cmd_eval(const RunConfig& config, std::ostream& log);

// perturb_eval.{json,csv}: anchor predictions from noisy observations, one report per sigma.
std::vector<std::pair<double, metrics::MetricsReport>> cmd_perturb_eval(const RunConfig& config, std::ostream& log);

struct NonlinearResult {
  metrics::MetricsReport all;
  metrics::MetricsReport nonlinear;
};

// nonlinear_eval.{json,csv}: stored predictions scored on every tracklet and on
// the tracklets whose future is non-linear.
NonlinearResult cmd_nonlinear_eval(const RunConfig& config, std::ostream& log);

// One SVG per basis vector of the descriptor's chosen segment, written to `out_dir`.
std::vector<std::filesystem::path> cmd_plot_basis(const std::filesystem::path& descriptor, Segment segment,
                                                  const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace eigentraj::commands
