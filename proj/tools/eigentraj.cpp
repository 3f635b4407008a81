// eigentraj command-line front end.
//
//   eigentraj <command> [--config run.json] [overrides...]
//
// Every RunConfig field can be set in the JSON config and overridden by the flag of
// the same name (underscores become dashes). Exit status: 0 ok, 2 argument or
// configuration error, 3 data error, 4 numeric failure.

#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eigentraj/commands.hpp"
#include "eigentraj/config.hpp"
#include "eigentraj/errors.hpp"

namespace {

using eigentraj::RunConfig;

// Flags parsed into scratch storage, applied on top of the config file afterwards.
class Overrides {
 public:
  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_file_, "JSON run configuration")->check(CLI::ExistingFile);
    path(cmd, "--data-root", &RunConfig::data_root, "dataset root holding one directory per scene");
    add(cmd, "--scenes", &RunConfig::scenes, "scene names")->delimiter(',');
    add(cmd, "--held-out", &RunConfig::held_out, "single fold to run (default: every scene)");
    flag(cmd, "--full-corpus", &RunConfig::full_corpus, "fit on every scene including the held-out one");
    add(cmd, "--t-obs", &RunConfig::t_obs, "observed samples per tracklet");
    add(cmd, "--t-fut", &RunConfig::t_fut, "future samples per tracklet");
    add(cmd, "--stride", &RunConfig::stride, "window stride in samples");
    add(cmd, "--frame-step", &RunConfig::frame_step, "raw frames between samples (0 infers)");
    add(cmd, "--unit-scale", &RunConfig::unit_scale, "meters per raw coordinate unit");
    add(cmd, "-k,--k", &RunConfig::k, "descriptor rank");
    add(cmd, "--study-ranks", &RunConfig::study_ranks, "ranks compared by recon-eval")->delimiter(',');
    add(cmd, "--frame", &RunConfig::frame, "absolute or last-observed");
    add(cmd, "--layout", &RunConfig::layout, "interleaved or planar");
    flag(cmd, "--center", &RunConfig::center, "subtract the mean before decomposing");
    add(cmd, "-s,--modes", &RunConfig::modes, "number of anchors");
    add(cmd, "--seed", &RunConfig::seed, "random seed");
    add(cmd, "--max-iter", &RunConfig::max_iter, "k-means iteration cap");
    add(cmd, "--col-threshold", &RunConfig::col_threshold, "collision distance in meters");
    flag(cmd, "--col-all-pairings", &RunConfig::col_all_pairings, "score every sample pairing for collisions");
    add(cmd, "--noise-sigmas", &RunConfig::noise_sigmas, "perturbation sigmas in meters")->delimiter(',');
    add(cmd, "--nonlinear-tol", &RunConfig::nonlinear_tol, "line-fit error above which a future is non-linear");
    add(cmd, "--bezier-order", &RunConfig::bezier_order, "Bezier degree");
    add(cmd, "--bspline-order", &RunConfig::bspline_order, "B-spline degree");
    add(cmd, "--bspline-controls", &RunConfig::bspline_controls, "B-spline control points");
    path(cmd, "-o,--output-dir", &RunConfig::output_dir, "directory for artifacts and reports");
    path(cmd, "--descriptor", &RunConfig::descriptor, "descriptor file (default: per fold in output dir)");
    path(cmd, "--anchors", &RunConfig::anchors, "anchor file (default: per fold in output dir)");
    path(cmd, "--predictions", &RunConfig::predictions, "prediction file (default: per fold in output dir)");
    path(cmd, "--corrections", &RunConfig::corrections, "correction offsets added to every anchor");
  }

  RunConfig resolve() const {
    RunConfig config = config_file_.empty() ? RunConfig{} : eigentraj::load_config(config_file_);
    for (const auto& [opt, apply] : setters_)
      if (opt->count() > 0) apply(config);
    config.validate();
    return config;
  }

 private:
  template <typename T>
  CLI::Option* add(CLI::App& cmd, const std::string& name, T RunConfig::*field, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = cmd.add_option(name, *value, help);
    setters_.emplace_back(opt, [value, field](RunConfig& c) { c.*field = *value; });
    return opt;
  }

  void path(CLI::App& cmd, const std::string& name, std::filesystem::path RunConfig::*field,
            const std::string& help) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = cmd.add_option(name, *value, help);
    setters_.emplace_back(opt, [value, field](RunConfig& c) { c.*field = *value; });
  }

  void flag(CLI::App& cmd, const std::string& name, bool RunConfig::*field, const std::string& help) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = cmd.add_flag(name, *value, help);
    setters_.emplace_back(opt, [value, field](RunConfig& c) { c.*field = *value; });
  }

  std::string config_file_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank trajectory descriptors, anchors and evaluation"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::unique_ptr<Overrides> overrides;
  };
  std::vector<Command> commands;
  auto command = [&](const char* name, const char* help) -> Command& {
    commands.push_back({app.add_subcommand(name, help), std::make_unique<Overrides>()});
    commands.back().overrides->attach(*commands.back().app);
    return commands.back();
  };

  command("fit", "fit observation and prediction bases per fold");
  command("recon-eval", "reconstruction error of ET and curve baselines per held-out scene");
  command("anchors", "cluster normalized training futures into anchors per fold");
  command("predict", "anchor predictions for every held-out tracklet");
  command("eval", "ADE, FDE, TCC and COL of stored predictions");
  command("perturb-eval", "metrics with Gaussian noise added to the observations");
  command("nonlinear-eval", "metrics restricted to non-linear futures");
  Command& plot = command("plot-basis", "one SVG per basis vector");
  std::string segment = "prediction";
  std::string plot_dir;
  plot.app->add_option("--segment", segment, "observation or prediction")->capture_default_str();
  plot.app->add_option("--plot-dir", plot_dir, "SVG root directory, one subdirectory per fold (default: <output-dir>/plots)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (const Command& c : commands) {
      if (!c.app->parsed()) continue;
      const RunConfig config = c.overrides->resolve();
      const std::string name = c.app->get_name();
      std::ostream& log = std::cerr;
      if (name == "fit") {
        eigentraj::commands::cmd_fit(config, log);
      } else if (name == "recon-eval") {
        const auto study = eigentraj::commands::cmd_recon_eval(config, log);
        std::cout << eigentraj::report::study_text(study);
      } else if (name == "anchors") {
        eigentraj::commands::cmd_anchors(config, log);
      } else if (name == "predict") {
        eigentraj::commands::cmd_predict(config, log);
      } else if (name == "eval") {
        eigentraj::commands::cmd_eval(config, log);
      } else if (name == "perturb-eval") {
        eigentraj::commands::cmd_perturb_eval(config, log);
      } else if (name == "nonlinear-eval") {
        eigentraj::commands::cmd_nonlinear_eval(config, log);
      } else if (name == "plot-basis") {
        const eigentraj::Segment seg = eigentraj::parse_segment(segment);
        for (const std::string& fold : config.folds()) {
          const std::filesystem::path base = plot_dir.empty() ? config.output_dir / "plots" : std::filesystem::path(plot_dir);
          // an explicit descriptor is a single file, so its plots need no fold subdirectory
          if (!config.descriptor.empty()) {
            eigentraj::commands::cmd_plot_basis(config.descriptor, seg, base, log);
            break;
          }
          eigentraj::commands::cmd_plot_basis(config.descriptor_path(fold), seg, base / fold, log);
        }
      }
    }
  } catch (const eigentraj::Error& e) {
    std::cerr << "error kind=" << eigentraj::to_string(e.kind()) << ": " << e.what() << '\n';
    return eigentraj::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
