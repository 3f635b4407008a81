#include "eigentraj/commands.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <tuple>

#include "eigentraj/anchors.hpp"
#include "eigentraj/baselines.hpp"
#include "eigentraj/errors.hpp"
#include "eigentraj/etspace.hpp"
#include "eigentraj/path_ops.hpp"
#include "eigentraj/persistence.hpp"
#include "eigentraj/plot.hpp"

namespace eigentraj::commands {
namespace {

using nlohmann::json;

constexpr const char* kModel = "et-anchor";

// logfmt value: bare when it has no spaces, quotes or equals signs.
std::string lf(const std::string& v) {
  if (!v.empty() && v.find_first_of(" \"=") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string lf(double v) { return report::format_double(v); }

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string provenance(const RunConfig& config, const std::string& fold) {
  std::vector<std::string> train;
  for (const std::string& s : config.scenes)
    if (config.full_corpus || s != fold) train.push_back(s);
  return "train=" + join(train, "+") + " held_out=" + fold + (config.full_corpus ? " full_corpus" : "");
}

etspace::PairOptions pair_options(const RunConfig& config, std::size_t k) {
  return {k, etspace::parse_frame(config.frame), parse_layout(config.layout), config.center};
}

json envelope(const RunConfig& config, const char* kind, json body) {
  json j;
  j["kind"] = kind;
  j["config"] = config;
  j["report"] = std::move(body);
  return j;
}

std::optional<Matrix> load_corrections(const RunConfig& config) {
  if (config.corrections.empty()) return std::nullopt;
  return persistence::corrections_from_json(persistence::read_json(config.corrections));
}

using TrackletKey = std::tuple<std::string, std::string, std::int64_t, std::int64_t>;

TrackletKey key_of(const Tracklet& t) { return {t.scene, t.recording, t.pedestrian_id, t.start_frame}; }

struct FoldModel {
  etspace::DescriptorPair descriptor;
  anchors::AnchorSet anchors;
};

FoldModel load_fold_model(const RunConfig& config, const std::string& fold) {
  FoldModel m{persistence::load_descriptor(config.descriptor_path(fold)),
              persistence::load_anchors(config.anchors_path(fold))};
  if (m.anchors.rank() != m.descriptor.pred.rank())
    throw Error(ErrorKind::config, "anchors for fold " + fold + " have rank " + std::to_string(m.anchors.rank()) +
                                       " but the prediction basis has rank " +
                                       std::to_string(m.descriptor.pred.rank()));
  return m;
}

// Joins stored predictions with their ground-truth tracklets, fold by fold.
std::vector<metrics::EvaluationItem> stored_items(const RunConfig& config, const dataset::SceneMap& corpus,
                                                  std::ostream& log) {
  std::map<TrackletKey, const Tracklet*> truth;
  for (const auto& [scene, tracklets] : corpus)
    for (const Tracklet& t : tracklets) truth[key_of(t)] = &t;

  std::vector<metrics::EvaluationItem> items;
  for (const std::string& fold : config.folds()) {
    const auto path = config.predictions_path(fold);
    const persistence::PredictionFile file = persistence::load_predictions(path);
    for (const persistence::PredictionEntry& e : file.entries) {
      const auto it = truth.find({e.scene, e.recording, e.pedestrian_id, e.start_frame});
      if (it == truth.end())
        throw Error(ErrorKind::data, path.string() + ": no ground truth for pedestrian " +
                                         std::to_string(e.pedestrian_id) + " of " + e.scene + "/" + e.recording +
                                         " at frame " + std::to_string(e.start_frame));
      items.push_back({*it->second, e.pred});
    }
    log << "event=predictions_loaded fold=" << lf(fold) << " entries=" << file.entries.size() << '\n';
  }
  return items;
}

metrics::ColOptions col_options(const RunConfig& config) { return {config.col_threshold, config.col_all_pairings}; }

// Mixes the run seed with a stream and an index so every tracklet draws independent noise.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

void write_metrics(const RunConfig& config, const std::string& stem, const char* kind, const json& body,
                   const std::vector<report::MetricsRow>& rows) {
  persistence::write_json(config.output_dir / (stem + ".json"), envelope(config, kind, body));
  persistence::write_text(config.output_dir / (stem + ".csv"), report::metrics_csv(rows));
}

double segment_error_mm(const Path& approx, const Path& truth) { return 1000.0 * mean_point_distance(approx, truth); }

}  // namespace

dataset::SceneMap load_corpus(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.data_root.empty()) throw Error(ErrorKind::config, "no data root configured");
  dataset::ParseOptions parse;
  parse.unit_scale = config.unit_scale;
  const dataset::WindowConfig window{config.t_obs, config.t_fut, config.stride, config.frame_step};
  dataset::SceneMap corpus;
  for (const std::string& scene : config.scenes) {
    auto loaded = dataset::load_scene(config.data_root, scene, parse, window);
    log << "event=scene_loaded scene=" << lf(scene) << " records=" << loaded.records
        << " pedestrians=" << loaded.stats.pedestrians << " short_pedestrians=" << loaded.stats.short_pedestrians
        << " gapped_windows=" << loaded.stats.gapped_windows << " tracklets=" << loaded.tracklets.size() << '\n';
    corpus[scene] = std::move(loaded.tracklets);
  }
  return corpus;
}

std::vector<Tracklet> training_set(const dataset::SceneMap& corpus, const std::string& fold, bool full_corpus) {
  if (!full_corpus) return dataset::leave_one_out(corpus, {fold, {}}).train;
  if (!corpus.count(fold)) throw Error(ErrorKind::config, "unknown scene '" + fold + "'");
  std::vector<Tracklet> all;
  for (const auto& [scene, tracklets] : corpus) all.insert(all.end(), tracklets.begin(), tracklets.end());
  return all;
}

std::vector<std::filesystem::path> cmd_fit(const RunConfig& config, std::ostream& log) {
  const dataset::SceneMap corpus = load_corpus(config, log);
  std::vector<std::filesystem::path> written;
  for (const std::string& fold : config.folds()) {
    const auto train = training_set(corpus, fold, config.full_corpus);
    const auto pair = etspace::fit_pair(train, pair_options(config, config.k), provenance(config, fold));
    for (const etspace::ETBasis* basis : {&pair.obs, &pair.pred}) {
      log << "event=spectrum fold=" << lf(fold) << " segment=" << to_string(basis->segment())
          << " train_tracklets=" << train.size() << " sigma=";
      const auto& sv = basis->singular_values();
      for (std::size_t i = 0; i < sv.size(); ++i) log << (i ? "," : "") << lf(sv[i]);
      log << '\n';
    }
    const auto path = config.descriptor_path(fold);
    persistence::save_descriptor(path, pair);
    log << "event=descriptor_written fold=" << lf(fold) << " path=" << lf(path.string()) << '\n';
    written.push_back(path);
  }
  return written;
}

report::StudyReport cmd_recon_eval(const RunConfig& config, std::ostream& log) {
  const dataset::SceneMap corpus = load_corpus(config, log);
  report::StudyReport study;
  study.scenes = config.folds();

  const auto bezier_obs = baselines::bernstein_basis(config.bezier_order, config.t_obs);
  const auto bezier_fut = baselines::bernstein_basis(config.bezier_order, config.t_fut);
  const auto bspline_obs = baselines::bspline_basis(config.bspline_order, config.bspline_controls, config.t_obs);
  const auto bspline_fut = baselines::bspline_basis(config.bspline_order, config.bspline_controls, config.t_fut);
  const std::size_t k_max = *std::max_element(config.study_ranks.begin(), config.study_ranks.end());

  // descriptor label -> dim -> per-scene cells, in table order
  std::vector<std::tuple<std::string, std::size_t, std::vector<report::StudyCell>>> rows;
  auto row = [&rows](const std::string& name, std::size_t dim) -> std::vector<report::StudyCell>& {
    for (auto& [n, d, cells] : rows)
      if (n == name && d == dim) return cells;
    rows.emplace_back(name, dim, std::vector<report::StudyCell>{});
    return std::get<2>(rows.back());
  };

  for (const std::string& fold : study.scenes) {
    const auto train = training_set(corpus, fold, config.full_corpus);
    const std::vector<Tracklet>& test = corpus.at(fold);
    const report::StudyCell base{"", 0, fold, 0.0, 0.0, train.size(), test.size()};

    auto curve_cell = [&](const std::string& name, std::size_t dim, auto&& approx_obs, auto&& approx_fut) {
      report::StudyCell cell = base;
      cell.descriptor = name;
      cell.dim = dim;
      for (const Tracklet& t : test) {
        cell.obs_mm += segment_error_mm(approx_obs(t.obs), t.obs);
        cell.pred_mm += segment_error_mm(approx_fut(t.fut), t.fut);
      }
      if (!test.empty()) {
        cell.obs_mm /= static_cast<double>(test.size());
        cell.pred_mm /= static_cast<double>(test.size());
      }
      row(name, dim).push_back(cell);
    };
    auto linear = [](const Path& p) { return baselines::expand_linear(baselines::linear_descriptor(p), p.size()); };
    curve_cell("linear", 4, linear, linear);
    curve_cell(
        "bezier", 2 * bezier_obs.controls(), [&](const Path& p) { return baselines::approximate(bezier_obs, p); },
        [&](const Path& p) { return baselines::approximate(bezier_fut, p); });
    curve_cell(
        "bspline", 2 * bspline_obs.controls(), [&](const Path& p) { return baselines::approximate(bspline_obs, p); },
        [&](const Path& p) { return baselines::approximate(bspline_fut, p); });

    const auto full = etspace::fit_pair(train, pair_options(config, k_max), provenance(config, fold), true);
    for (std::size_t k : config.study_ranks) {
      const auto err = etspace::approximation_error(etspace::truncated(full, k), test);
      report::StudyCell cell = base;
      cell.descriptor = "et";
      cell.dim = k;
      cell.obs_mm = err.obs_mm;
      cell.pred_mm = err.pred_mm;
      row("et", k).push_back(cell);
    }
    log << "event=fold_evaluated fold=" << lf(fold) << " train_tracklets=" << train.size()
        << " test_tracklets=" << test.size() << '\n';
  }

  for (auto& [name, dim, cells] : rows) {
    report::StudyCell avg{name, dim, "avg", 0.0, 0.0, 0, 0};
    std::size_t scored = 0;
    for (const report::StudyCell& c : cells) {
      study.cells.push_back(c);
      avg.test_tracklets += c.test_tracklets;
      if (c.test_tracklets == 0) continue;
      avg.obs_mm += c.obs_mm;
      avg.pred_mm += c.pred_mm;
      ++scored;
    }
    if (scored) {
      avg.obs_mm /= static_cast<double>(scored);
      avg.pred_mm /= static_cast<double>(scored);
    }
    study.cells.push_back(avg);
  }

  persistence::write_json(config.output_dir / "recon_eval.json", envelope(config, "recon-eval", report::to_json(study)));
  persistence::write_text(config.output_dir / "recon_eval.csv", report::study_csv(study));
  persistence::write_text(config.output_dir / "recon_eval.txt", report::study_text(study));
  return study;
}

std::vector<std::filesystem::path> cmd_anchors(const RunConfig& config, std::ostream& log) {
  const dataset::SceneMap corpus = load_corpus(config, log);
  std::vector<std::filesystem::path> written;
  for (const std::string& fold : config.folds()) {
    const auto descriptor = persistence::load_descriptor(config.descriptor_path(fold));
    const auto train = training_set(corpus, fold, config.full_corpus);
    const anchors::KMeansOptions opts{config.modes, config.seed, config.max_iter};
    const auto set = anchors::generate_anchors(train, descriptor.pred, opts, provenance(config, fold));
    const auto path = config.anchors_path(fold);
    persistence::save_anchors(path, set);
    log << "event=anchors_written fold=" << lf(fold) << " modes=" << set.modes() << " k=" << set.rank()
        << " inertia=" << lf(set.inertia) << " path=" << lf(path.string()) << '\n';
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> cmd_predict(const RunConfig& config, std::ostream& log) {
  const dataset::SceneMap corpus = load_corpus(config, log);
  const auto corrections = load_corrections(config);
  std::vector<std::filesystem::path> written;
  for (const std::string& fold : config.folds()) {
    const FoldModel model = load_fold_model(config, fold);
    persistence::PredictionFile file;
    file.provenance = provenance(config, fold);
    for (const Tracklet& t : corpus.at(fold)) {
      persistence::PredictionEntry e{t.scene, t.recording, t.pedestrian_id, t.start_frame, {}};
      e.pred.samples = anchors::anchor_predict(t.obs, model.anchors, model.descriptor.pred, corrections);
      file.entries.push_back(std::move(e));
    }
    const auto path = config.predictions_path(fold);
    persistence::save_predictions(path, file);
    log << "event=predictions_written fold=" << lf(fold) << " entries=" << file.entries.size()
        << " path=" << lf(path.string()) << '\n';
    written.push_back(path);
  }
  return written;
}

metrics::MetricsReport cmd_eval(const RunConfig& config, std::ostream& log) {
  const dataset::SceneMap corpus = load_corpus(config, log);
  const auto items = stored_items(config, corpus, log);
  const auto result = metrics::evaluate(items, col_options(config));
  const auto table = report::rows(result, kModel, config.k, config.modes, 0.0, "all");
  write_metrics(config, "eval", "eval", report::to_json(result), table);
  log << "event=evaluated tracklets=" << result.overall.tracklets << " ade=" << lf(result.overall.ade)
      << " fde=" << lf(result.overall.fde) << '\n';
  return result;
}

std::vector<std::pair<double, metrics::MetricsReport>> cmd_perturb_eval(const RunConfig& config, std::ostream& log) {
  const dataset::SceneMap corpus = load_corpus(config, log);
  const auto corrections = load_corrections(config);
  std::vector<std::pair<std::string, FoldModel>> models;
  for (const std::string& fold : config.folds()) models.emplace_back(fold, load_fold_model(config, fold));

  std::vector<std::pair<double, metrics::MetricsReport>> results;
  std::vector<report::MetricsRow> table;
  json body = json::array();
  for (std::size_t si = 0; si < config.noise_sigmas.size(); ++si) {
    const double sigma = config.noise_sigmas[si];
    std::vector<metrics::EvaluationItem> items;
    std::uint64_t index = 0;
    for (const auto& [fold, model] : models) {
      for (const Tracklet& t : corpus.at(fold)) {
        const Tracklet noisy = dataset::perturb_observation(t, sigma, derive_seed(config.seed, si, index++));
        metrics::PredictionSet pred{anchors::anchor_predict(noisy.obs, model.anchors, model.descriptor.pred, corrections)};
        items.push_back({t, std::move(pred)});
      }
    }
    auto result = metrics::evaluate(items, col_options(config));
    const auto r = report::rows(result, kModel, config.k, config.modes, sigma, "all");
    table.insert(table.end(), r.begin(), r.end());
    body.push_back({{"sigma", sigma}, {"metrics", report::to_json(result)}});
    log << "event=perturbed_evaluated sigma=" << lf(sigma) << " ade=" << lf(result.overall.ade)
        << " fde=" << lf(result.overall.fde) << '\n';
    results.emplace_back(sigma, std::move(result));
  }
  write_metrics(config, "perturb_eval", "perturb-eval", body, table);
  return results;
}

NonlinearResult cmd_nonlinear_eval(const RunConfig& config, std::ostream& log) {
  const dataset::SceneMap corpus = load_corpus(config, log);
  const auto items = stored_items(config, corpus, log);
  std::vector<metrics::EvaluationItem> nonlinear;
  for (const auto& item : items)
    if (metrics::classify_nonlinear(item.tracklet.fut, config.nonlinear_tol)) nonlinear.push_back(item);

  NonlinearResult result{metrics::evaluate(items, col_options(config)),
                         metrics::evaluate(nonlinear, col_options(config))};
  auto table = report::rows(result.all, kModel, config.k, config.modes, 0.0, "all");
  const auto nl = report::rows(result.nonlinear, kModel, config.k, config.modes, 0.0, "nonlinear");
  table.insert(table.end(), nl.begin(), nl.end());
  const json body{{"all", report::to_json(result.all)},
                  {"nonlinear", report::to_json(result.nonlinear)},
                  {"tolerance", config.nonlinear_tol}};
  write_metrics(config, "nonlinear_eval", "nonlinear-eval", body, table);
  log << "event=nonlinear_evaluated tracklets=" << items.size() << " nonlinear=" << nonlinear.size()
      << " ade_all=" << lf(result.all.overall.ade) << " ade_nonlinear=" << lf(result.nonlinear.overall.ade) << '\n';
  return result;
}

std::vector<std::filesystem::path> cmd_plot_basis(const std::filesystem::path& descriptor, Segment segment,
                                                  const std::filesystem::path& out_dir, std::ostream& log) {
  etspace::DescriptorPair pair;
  try {
    pair = persistence::load_descriptor(descriptor);
  } catch (const Error& e) {
    throw Error(ErrorKind::io, "unreadable descriptor: " + std::string(e.what()));
  }
  const auto& basis = segment == Segment::observation ? pair.obs : pair.pred;
  auto written = plot::write_basis_plots(basis, out_dir);
  log << "event=plots_written segment=" << to_string(segment) << " count=" << written.size()
      << " dir=" << lf(out_dir.string()) << '\n';
  return written;
}

}  // namespace eigentraj::commands
