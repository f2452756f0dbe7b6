#include "cogspeech/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "cogspeech/csv.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

using nlohmann::json;

AudioPrepOptions PipelineConfig::prep() const {
  AudioPrepOptions options;
  options.denoise = denoise;
  options.normalize = normalize;
  options.target_dbfs = target_dbfs;
  options.vad = vad;
  return options;
}

namespace {

const std::set<std::string> kComputedSets = {"mrcg", "minimal", "linguistic"};

bool parse_bool(const std::string &value, const std::string &key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key " + key + ": expected true/false, got '" +
                    value + "'");
}

std::vector<std::string> split_list(const std::string &value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    const size_t a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const size_t b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

}  // namespace

void apply_config_entry(PipelineConfig &config, const std::string &key,
                        const std::string &value) {
  if (key == "manifest") config.manifest_path = value;
  else if (key == "test_manifest") config.test_manifest_path = value;
  else if (key == "mode") config.mode = value;
  else if (key == "features") config.feature_sets = split_list(value);
  else if (key.rfind("import.", 0) == 0) config.imports[key.substr(7)] = value;
  else if (key.rfind("test_import.", 0) == 0)
    config.test_imports[key.substr(12)] = value;
  else if (key == "classifiers") config.classifiers = split_list(value);
  else if (key == "regressors") config.regressors = split_list(value);
  else if (key == "segments") config.segments_path = value;
  else if (key == "out") config.out_dir = value;
  else if (key == "seed") config.seed = static_cast<uint64_t>(parse_long(value, key));
  else if (key == "jobs") config.jobs = static_cast<int>(parse_long(value, key));
  else if (key == "denoise") config.denoise = parse_bool(value, key);
  else if (key == "normalize") config.normalize = parse_bool(value, key);
  else if (key == "normalize.target_dbfs") config.target_dbfs = parse_double(value, key);
  else if (key == "vad.threshold_db") config.vad.threshold_db = parse_double(value, key);
  else if (key == "vad.max_span_s") config.vad.max_span_s = parse_double(value, key);
  else if (key == "vad.frame_len_s") config.vad.frame_len_s = parse_double(value, key);
  else if (key == "vad.hop_s") config.vad.hop_s = parse_double(value, key);
  else if (key == "vad.bridge_gap_s") config.vad.bridge_gap_s = parse_double(value, key);
  else if (key == "vad.min_span_s") config.vad.min_span_s = parse_double(value, key);
  else if (key == "vad.relative_peak") config.vad.relative_peak = parse_bool(value, key);
  else if (key == "vad.peak_margin_db") config.vad.peak_margin_db = parse_double(value, key);
  else if (key == "standardize") config.standardize = parse_bool(value, key);
  else if (key == "duration_filter") config.duration_filter = parse_bool(value, key);
  else if (key == "filter.threshold") config.filter_threshold = parse_double(value, key);
  else if (key == "filter.p_gate") config.filter_p_gate = parse_bool(value, key);
  else if (key == "filter.scope") config.filter_scope = value;
  else if (key == "filter.sets") config.filter_sets = split_list(value);
  else if (key == "positive_class") config.positive_class = value;
  else if (key == "speaker") config.speaker = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig load_config(const std::filesystem::path &path) {
  PipelineConfig config;
  config.base_dir = path.has_parent_path() ? path.parent_path()
                                           : std::filesystem::path(".");
  const std::string text = read_text_file(path);
  std::istringstream lines(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    auto trim = [](std::string s) {
      const size_t x = s.find_first_not_of(" \t\r");
      if (x == std::string::npos) return std::string();
      const size_t y = s.find_last_not_of(" \t\r");
      return s.substr(x, y - x + 1);
    };
    apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void PipelineConfig::validate() const {
  if (manifest_path.empty()) throw ConfigError("config: manifest is required");
  if (mode != "loso" && mode != "train_test")
    throw ConfigError("config: mode must be loso or train_test, got '" + mode + "'");
  if (mode == "train_test" && test_manifest_path.empty())
    throw ConfigError("config: train_test mode needs test_manifest");
  for (const auto &name : classifiers) {
    const auto kind = model_kind_from_name(name);
    if (!kind || !is_classifier(*kind))
      throw ConfigError("config: unknown classifier '" + name + "'");
  }
  for (const auto &name : regressors) {
    const auto kind = model_kind_from_name(name);
    if (!kind || is_classifier(*kind))
      throw ConfigError("config: unknown regressor '" + name + "'");
  }
  for (const auto &set : feature_sets)
    if (!kComputedSets.count(set))
      throw ConfigError("config: unknown feature set '" + set +
                        "' (computed sets: mrcg, minimal, linguistic)");
  if (classifiers.empty() && regressors.empty())
    throw ConfigError("config: no models listed");
  if (feature_sets.empty() && imports.empty())
    throw ConfigError("config: no feature sets listed");
  if (filter_scope != "fold" && filter_scope != "global")
    throw ConfigError("config: filter.scope must be fold or global");
  if (mode == "train_test")
    for (const auto &[set, path] : imports)
      if (!test_imports.count(set))
        throw ConfigError("config: train_test mode needs test_import." + set);
}

namespace {

// The duration filter applies to segment-level acoustic sets; the timing
// and transcript sets are exempt unless filter.sets says otherwise.
bool filter_applies(const PipelineConfig &config, const std::string &set) {
  if (!config.duration_filter) return false;
  if (!config.filter_sets.empty())
    return std::find(config.filter_sets.begin(), config.filter_sets.end(), set) !=
           config.filter_sets.end();
  return set != "minimal" && set != "linguistic";
}

std::map<std::string, FeatureMatrix> build_features(
    const PipelineConfig &config, const DatasetManifest &manifest,
    const std::filesystem::path &manifest_dir, const SegmentTable &segments,
    const std::map<std::string, std::string> &imports) {
  std::map<std::string, FeatureMatrix> features;
  for (const auto &set : config.feature_sets) {
    if (set == "mrcg")
      features.emplace(set, extract_mrcg_features(manifest, manifest_dir, segments,
                                                  config.prep(), {}, config.jobs));
    else if (set == "minimal")
      features.emplace(set, extract_minimal_features(manifest, manifest_dir, segments,
                                                     config.prep(), {}, config.jobs));
    else if (set == "linguistic")
      features.emplace(set, extract_linguistic_features(manifest, manifest_dir,
                                                        config.speaker));
  }
  for (const auto &[set, path] : imports) {
    std::map<std::pair<std::string, int>, double> durations;
    for (const auto &row : segments)
      durations[{row.subject_id, row.segment_index}] = row.end_s - row.start_s;
    features.emplace(set, import_external_features(
                              resolve_path(config.base_dir, path), set, manifest,
                              &durations));
  }
  return features;
}

std::vector<std::string> ordered_set_names(const PipelineConfig &config) {
  std::vector<std::string> names = config.feature_sets;
  for (const auto &[set, path] : config.imports) names.push_back(set);
  return names;
}

}  // namespace

ExperimentResult run_experiment(
    const PipelineConfig &config, const DatasetManifest &train_manifest,
    const std::map<std::string, FeatureMatrix> &train_features,
    const DatasetManifest *test_manifest,
    const std::map<std::string, FeatureMatrix> *test_features) {
  config.validate();
  const bool train_test = config.mode == "train_test";
  if (train_test && (test_manifest == nullptr || test_features == nullptr))
    throw ConfigError("run_experiment: train_test mode needs test inputs");

  ExperimentResult result;
  result.config = config;

  std::vector<std::string> set_names = ordered_set_names(config);
  for (const auto &set : set_names) {
    const auto train_it = train_features.find(set);
    if (train_it == train_features.end())
      throw ConfigError("run_experiment: no feature matrix for set '" + set + "'");
    FeatureMatrix train_m = train_it->second;
    FeatureMatrix test_m;
    if (train_test) test_m = test_features->at(set);

    LosoOptions options;
    options.standardize = config.standardize;
    options.duration_filter = filter_applies(config, set);
    options.filter_threshold = config.filter_threshold;
    options.filter_p_gate = config.filter_p_gate;
    options.positive_class = config.positive_class;
    options.seed = config.seed;
    options.jobs = config.jobs;

    // Paper-literal global mode: fit the duration filter once on the whole
    // training matrix instead of inside each fold.
    if (options.duration_filter && config.filter_scope == "global") {
      CorrelationFilterOptions filter_options;
      filter_options.threshold = config.filter_threshold;
      filter_options.p_gate = config.filter_p_gate;
      auto [filtered, report] = correlation_filter(train_m, filter_options);
      if (train_test) {
        std::set<std::string> retained(report.retained.begin(),
                                       report.retained.end());
        std::vector<int> keep;
        for (long j = 0; j < test_m.column_count(); ++j)
          if (retained.count(test_m.column_names[static_cast<size_t>(j)]))
            keep.push_back(static_cast<int>(j));
        test_m = test_m.select_columns(keep);
      }
      train_m = std::move(filtered);
      options.duration_filter = false;
    }

    auto run_cell = [&](const std::string &model_name, bool classification) {
      const ModelSpec spec = ModelSpec::defaults(*model_kind_from_name(model_name));
      ExperimentCell cell;
      cell.feature_set = set;
      cell.model = model_name;
      try {
        if (classification) {
          LosoClassificationResult r;
          if (train_test)
            r = run_train_test_classification(train_manifest, train_m, *test_manifest,
                                              test_m, spec, options);
          else
            r = run_loso_classification(train_manifest, train_m, spec, options);
          cell.classification = std::move(r.report);
          cell.folds = std::move(r.folds);
        } else {
          LosoRegressionResult r;
          if (train_test)
            r = run_train_test_regression(train_manifest, train_m, *test_manifest,
                                          test_m, spec, options);
          else
            r = run_loso_regression(train_manifest, train_m, spec, options);
          cell.regression = std::move(r.report);
          cell.folds = std::move(r.folds);
        }
      } catch (const Error &e) {
        throw Error("experiment cell (" + set + ", " + model_name +
                    "): " + e.what());
      }
      result.cells.push_back(std::move(cell));
    };

    for (const auto &model : config.classifiers) run_cell(model, true);
    for (const auto &model : config.regressors) run_cell(model, false);
  }
  return result;
}

ExperimentResult run_experiment(const PipelineConfig &config) {
  config.validate();
  const std::filesystem::path manifest_path =
      resolve_path(config.base_dir, config.manifest_path);
  const std::filesystem::path manifest_dir = manifest_path.parent_path();
  const DatasetManifest manifest = load_manifest(manifest_path, Split::kTrain);

  SegmentTable segments;
  const bool needs_audio =
      std::find(config.feature_sets.begin(), config.feature_sets.end(), "mrcg") !=
          config.feature_sets.end() ||
      std::find(config.feature_sets.begin(), config.feature_sets.end(), "minimal") !=
          config.feature_sets.end();
  if (!config.segments_path.empty())
    segments = load_segment_table(resolve_path(config.base_dir, config.segments_path));
  else if (needs_audio)
    segments = segment_manifest(manifest, manifest_dir, config.prep(), config.jobs);

  const std::map<std::string, FeatureMatrix> features =
      build_features(config, manifest, manifest_dir, segments, config.imports);

  if (config.mode == "train_test") {
    const std::filesystem::path test_path =
        resolve_path(config.base_dir, config.test_manifest_path);
    const DatasetManifest test_manifest = load_manifest(test_path, Split::kTest);
    SegmentTable test_segments;
    if (needs_audio)
      test_segments = segment_manifest(test_manifest, test_path.parent_path(),
                                       config.prep(), config.jobs);
    const std::map<std::string, FeatureMatrix> test_features =
        build_features(config, test_manifest, test_path.parent_path(),
                       test_segments, config.test_imports);
    return run_experiment(config, manifest, features, &test_manifest, &test_features);
  }
  return run_experiment(config, manifest, features, nullptr, nullptr);
}

// ---------------------------------------------------------------------------
// Report bundle

namespace {

json config_to_json(const PipelineConfig &config) {
  json j{{"manifest", config.manifest_path},
         {"test_manifest", config.test_manifest_path},
         {"mode", config.mode},
         {"features", config.feature_sets},
         {"classifiers", config.classifiers},
         {"regressors", config.regressors},
         {"segments", config.segments_path},
         {"out", config.out_dir},
         {"seed", config.seed},
         {"jobs", config.jobs},
         {"denoise", config.denoise},
         {"normalize", config.normalize},
         {"normalize.target_dbfs", config.target_dbfs},
         {"vad.threshold_db", config.vad.threshold_db},
         {"vad.max_span_s", config.vad.max_span_s},
         {"vad.relative_peak", config.vad.relative_peak},
         {"standardize", config.standardize},
         {"duration_filter", config.duration_filter},
         {"filter.threshold", config.filter_threshold},
         {"filter.p_gate", config.filter_p_gate},
         {"filter.scope", config.filter_scope},
         {"positive_class", config.positive_class},
         {"speaker", config.speaker}};
  json imports = json::object();
  for (const auto &[set, path] : config.imports) imports[set] = path;
  j["imports"] = imports;
  json test_imports = json::object();
  for (const auto &[set, path] : config.test_imports) test_imports[set] = path;
  j["test_imports"] = test_imports;
  j["filter.sets"] = config.filter_sets;
  return j;
}

json cell_to_json(const ExperimentCell &cell) {
  json j{{"feature_set", cell.feature_set}, {"model", cell.model}};
  if (cell.classification) {
    const auto &r = *cell.classification;
    json per_class = json::object();
    for (const auto &[cls, m] : r.per_class)
      per_class[cls] = json{{"precision", m.precision},
                            {"recall", m.recall},
                            {"f1", m.f1},
                            {"flagged", m.flagged}};
    j["classification"] = json{{"accuracy", r.accuracy},
                               {"tp", r.tp},
                               {"tn", r.tn},
                               {"fp", r.fp},
                               {"fn", r.fn},
                               {"positive_class", r.positive_class},
                               {"per_class", per_class}};
  }
  if (cell.regression) {
    const auto &r = *cell.regression;
    j["regression"] = json{{"rmse", r.rmse},
                           {"pearson_r", r.pearson_r},
                           {"r_flagged", r.r_flagged}};
  }
  json folds = json::array();
  for (const auto &trace : cell.folds) {
    json f{{"subject", trace.subject}};
    if (cell.classification) {
      f["true"] = trace.true_label;
      f["predicted"] = trace.predicted_label;
      f["segments"] = trace.segment_labels;
    } else {
      f["true"] = trace.true_score;
      f["predicted"] = trace.predicted_score;
      f["segments"] = trace.segment_scores;
    }
    folds.push_back(std::move(f));
  }
  j["folds"] = std::move(folds);
  return j;
}

// Feature-set x model grid with row and column means appended.
CsvTable metric_grid(const ExperimentResult &result,
                     const std::vector<std::string> &models,
                     bool classification) {
  std::vector<std::string> sets;
  for (const auto &cell : result.cells) {
    const bool is_cls = cell.classification.has_value();
    if (is_cls != classification) continue;
    if (std::find(sets.begin(), sets.end(), cell.feature_set) == sets.end())
      sets.push_back(cell.feature_set);
  }

  auto value_of = [&](const std::string &set, const std::string &model) {
    for (const auto &cell : result.cells)
      if (cell.feature_set == set && cell.model == model) {
        if (classification && cell.classification)
          return cell.classification->accuracy;
        if (!classification && cell.regression) return cell.regression->rmse;
      }
    return std::nan("");
  };

  CsvTable table;
  table.header = {"features"};
  for (const auto &m : models) table.header.push_back(m);
  table.header.push_back("mean");

  std::vector<double> col_sums(models.size(), 0.0);
  char buf[32];
  auto fmt3 = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  for (const auto &set : sets) {
    std::vector<std::string> row = {set};
    double row_sum = 0.0;
    for (size_t m = 0; m < models.size(); ++m) {
      const double v = value_of(set, models[m]);
      row.push_back(fmt3(v));
      row_sum += v;
      col_sums[m] += v;
    }
    row.push_back(fmt3(row_sum / static_cast<double>(models.size())));
    table.rows.push_back(std::move(row));
  }
  std::vector<std::string> mean_row = {"mean"};
  for (size_t m = 0; m < models.size(); ++m)
    mean_row.push_back(fmt3(col_sums[m] / static_cast<double>(sets.size())));
  mean_row.push_back("");
  table.rows.push_back(std::move(mean_row));
  return table;
}

}  // namespace

namespace {

// Numeric grid (feature sets x models) with row/column means, for the bundle.
json grid_json(const ExperimentResult &result, const std::vector<std::string> &models,
               bool classification) {
  std::vector<std::string> sets;
  for (const auto &cell : result.cells)
    if (cell.classification.has_value() == classification &&
        std::find(sets.begin(), sets.end(), cell.feature_set) == sets.end())
      sets.push_back(cell.feature_set);

  json values = json::array();
  std::vector<double> col_sums(models.size(), 0.0);
  json row_means = json::array();
  for (const auto &set : sets) {
    json row = json::array();
    double row_sum = 0.0;
    for (size_t m = 0; m < models.size(); ++m) {
      double v = std::nan("");
      for (const auto &cell : result.cells)
        if (cell.feature_set == set && cell.model == models[m]) {
          if (classification && cell.classification) v = cell.classification->accuracy;
          if (!classification && cell.regression) v = cell.regression->rmse;
        }
      row.push_back(v);
      row_sum += v;
      col_sums[m] += v;
    }
    values.push_back(std::move(row));
    row_means.push_back(row_sum / static_cast<double>(models.size()));
  }
  json col_means = json::array();
  for (size_t m = 0; m < models.size(); ++m)
    col_means.push_back(col_sums[m] / static_cast<double>(sets.size()));
  return json{{"rows", sets},
              {"cols", models},
              {"values", values},
              {"row_means", row_means},
              {"col_means", col_means}};
}

}  // namespace

json ExperimentResult::to_json() const {
  json cells_json = json::array();
  for (const auto &cell : cells) cells_json.push_back(cell_to_json(cell));

  json decisions = json::object();
  std::set<std::string> model_names;
  for (const auto &cell : cells) model_names.insert(cell.model);
  for (const auto &name : model_names) {
    const ModelSpec spec = ModelSpec::defaults(*model_kind_from_name(name));
    json notes = json::object();
    for (const auto &[k, v] : spec.decision_notes()) notes[k] = v;
    decisions[name] = notes;
  }

  json tables = json::object();
  if (!config.classifiers.empty())
    tables["classification_accuracy"] = grid_json(*this, config.classifiers, true);
  if (!config.regressors.empty())
    tables["regression_rmse"] = grid_json(*this, config.regressors, false);

  return json{{"config", config_to_json(config)},
              {"decisions", decisions},
              {"tables", tables},
              {"cells", cells_json}};
}

void write_experiment_outputs(const ExperimentResult &result,
                              const std::filesystem::path &out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "bundle.json", result.to_json().dump(2) + "\n");

  if (!result.config.classifiers.empty())
    write_csv(out_dir / "classification_accuracy.csv",
              metric_grid(result, result.config.classifiers, true));
  if (!result.config.regressors.empty())
    write_csv(out_dir / "regression_rmse.csv",
              metric_grid(result, result.config.regressors, false));

  CsvTable class_metrics;
  class_metrics.header = {"features", "model",  "class", "precision",
                          "recall",   "f1",     "accuracy"};
  char buf[32];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  for (const auto &cell : result.cells) {
    if (!cell.classification) continue;
    for (const auto &[cls, m] : cell.classification->per_class)
      class_metrics.rows.push_back({cell.feature_set, cell.model, cls,
                                    fmt(m.precision), fmt(m.recall), fmt(m.f1),
                                    fmt(cell.classification->accuracy)});
  }
  if (!class_metrics.rows.empty())
    write_csv(out_dir / "class_metrics.csv", class_metrics);

  CsvTable predictions;
  predictions.header = {"task", "features", "model", "subject", "true", "predicted"};
  for (const auto &cell : result.cells) {
    const std::string task = cell.classification ? "classification" : "regression";
    for (const auto &trace : cell.folds) {
      if (cell.classification)
        predictions.rows.push_back({task, cell.feature_set, cell.model,
                                    trace.subject, trace.true_label,
                                    trace.predicted_label});
      else
        predictions.rows.push_back({task, cell.feature_set, cell.model,
                                    trace.subject, format_double(trace.true_score),
                                    format_double(trace.predicted_score)});
    }
  }
  write_csv(out_dir / "predictions.csv", predictions);
}

}  // namespace cogspeech
