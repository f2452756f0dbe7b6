// cogspeech: speech pipeline for dementia classification and MMSE
// regression baselines. Subcommands: segment, extract, import-features,
// filter, evaluate, report.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <nlohmann/json.hpp>

#include <CLI11.hpp>

#include "cogspeech/csv.hpp"
#include "cogspeech/error.hpp"
#include "cogspeech/experiment.hpp"

namespace cs = cogspeech;

namespace {

// Empty/sentinel values mean "keep the config file's setting".
struct CommonFlags {
  std::string manifest;
  std::string config;
  std::string out;
  long seed = -1;
  int jobs = 0;
  std::string mode;
  std::vector<std::string> overrides;  // raw key=value pairs
};

void add_common(CLI::App *cmd, CommonFlags &flags) {
  cmd->add_option("--manifest", flags.manifest, "manifest csv path")
      ->envname("COGSPEECH_MANIFEST");
  cmd->add_option("--config", flags.config, "config file (key=value lines)")
      ->envname("COGSPEECH_CONFIG");
  cmd->add_option("--out", flags.out, "output directory")
      ->envname("COGSPEECH_OUT");
  cmd->add_option("--seed", flags.seed, "random seed")->envname("COGSPEECH_SEED");
  cmd->add_option("--jobs", flags.jobs, "worker threads")
      ->envname("COGSPEECH_JOBS");
  cmd->add_option("--mode", flags.mode, "loso or train_test")
      ->envname("COGSPEECH_MODE");
  cmd->add_option("--set", flags.overrides,
                  "override any config key, e.g. --set vad.threshold_db=60");
}

// Config file first, then --set overrides, then dedicated flags on top.
cs::PipelineConfig assemble_config(const CommonFlags &flags) {
  cs::PipelineConfig config;
  if (!flags.config.empty()) config = cs::load_config(flags.config);
  else config.base_dir = ".";
  for (const auto &pair : flags.overrides) {
    const size_t eq = pair.find('=');
    if (eq == std::string::npos)
      throw cs::ConfigError("--set expects key=value, got '" + pair + "'");
    cs::apply_config_entry(config, pair.substr(0, eq), pair.substr(eq + 1));
  }
  if (!flags.manifest.empty()) {
    config.manifest_path = flags.manifest;
    config.base_dir = ".";
  }
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (flags.seed >= 0) config.seed = static_cast<uint64_t>(flags.seed);
  if (flags.jobs > 0) config.jobs = flags.jobs;
  if (!flags.mode.empty()) config.mode = flags.mode;
  return config;
}

int cmd_segment(const CommonFlags &flags, bool export_audio) {
  cs::PipelineConfig config = assemble_config(flags);
  if (config.manifest_path.empty())
    throw cs::ConfigError("segment: --manifest or config manifest required");
  const std::filesystem::path manifest_path =
      cs::resolve_path(config.base_dir, config.manifest_path);
  const cs::DatasetManifest manifest = cs::load_manifest(manifest_path);
  const std::filesystem::path manifest_dir = manifest_path.parent_path();

  const cs::SegmentTable table =
      cs::segment_manifest(manifest, manifest_dir, config.prep(), config.jobs);

  std::filesystem::create_directories(config.out_dir);
  cs::save_segment_table(std::filesystem::path(config.out_dir) / "segments.csv",
                         table);

  // Per-subject counts and the corpus mean/sd of segment counts.
  double sum = 0.0, sq = 0.0;
  for (const auto &record : manifest.records) {
    long count = 0;
    for (const auto &row : table)
      if (row.subject_id == record.subject_id) ++count;
    std::printf("%s %ld\n", record.subject_id.c_str(), count);
    sum += static_cast<double>(count);
    sq += static_cast<double>(count) * count;
  }
  const double n = static_cast<double>(manifest.records.size());
  if (n > 0) {
    const double mean = sum / n;
    const double sd = n > 1 ? std::sqrt((sq - n * mean * mean) / (n - 1)) : 0.0;
    std::printf("segments per subject: mean %.2f sd %.2f\n", mean, sd);
  }

  if (export_audio) {
    const auto seg_dir = std::filesystem::path(config.out_dir) / "segments";
    std::filesystem::create_directories(seg_dir);
    for (const auto &record : manifest.records) {
      const cs::AudioSignal signal = cs::prepare_audio(
          cs::resolve_path(manifest_dir, record.audio_path), config.prep());
      for (const auto &row : table) {
        if (row.subject_id != record.subject_id) continue;
        const cs::AudioSignal clip =
            cs::slice(signal, {row.start_s, row.end_s});
        cs::write_wav(seg_dir / (record.subject_id + "_" +
                                 std::to_string(row.segment_index) + ".wav"),
                      clip);
      }
    }
  }
  return 0;
}

int cmd_extract(const CommonFlags &flags, const std::string &sets_arg,
                const std::string &segments_arg) {
  cs::PipelineConfig config = assemble_config(flags);
  if (!sets_arg.empty()) cs::apply_config_entry(config, "features", sets_arg);
  if (!segments_arg.empty()) config.segments_path = segments_arg;
  if (config.manifest_path.empty())
    throw cs::ConfigError("extract: --manifest or config manifest required");
  for (const auto &set : config.feature_sets)
    if (set != "mrcg" && set != "minimal" && set != "linguistic")
      throw cs::ConfigError("extract: unknown feature set '" + set + "'");
  if (config.feature_sets.empty())
    throw cs::ConfigError("extract: no feature sets given (--sets)");

  const std::filesystem::path manifest_path =
      cs::resolve_path(config.base_dir, config.manifest_path);
  const cs::DatasetManifest manifest = cs::load_manifest(manifest_path);
  const std::filesystem::path manifest_dir = manifest_path.parent_path();

  cs::SegmentTable segments;
  const bool needs_audio =
      std::find(config.feature_sets.begin(), config.feature_sets.end(),
                std::string("mrcg")) != config.feature_sets.end() ||
      std::find(config.feature_sets.begin(), config.feature_sets.end(),
                std::string("minimal")) != config.feature_sets.end();
  if (!config.segments_path.empty())
    segments = cs::load_segment_table(
        cs::resolve_path(config.base_dir, config.segments_path));
  else if (needs_audio)
    segments = cs::segment_manifest(manifest, manifest_dir, config.prep(),
                                    config.jobs);

  std::filesystem::create_directories(config.out_dir);
  for (const auto &set : config.feature_sets) {
    cs::FeatureMatrix features;
    if (set == "mrcg")
      features = cs::extract_mrcg_features(manifest, manifest_dir, segments,
                                           config.prep(), {}, config.jobs);
    else if (set == "minimal")
      features = cs::extract_minimal_features(manifest, manifest_dir, segments,
                                              config.prep(), {}, config.jobs);
    else
      features = cs::extract_linguistic_features(manifest, manifest_dir,
                                                 config.speaker);
    const auto path = std::filesystem::path(config.out_dir) / (set + ".csv");
    cs::save_feature_store(path, features);
    std::printf("%s: %ld rows x %ld columns -> %s\n", set.c_str(),
                features.row_count(), features.column_count(),
                path.string().c_str());
  }
  return 0;
}

int cmd_import(const CommonFlags &flags, const std::string &input,
               const std::string &set_name, const std::string &segments_arg) {
  cs::PipelineConfig config = assemble_config(flags);
  if (config.manifest_path.empty())
    throw cs::ConfigError("import-features: --manifest required");
  const cs::DatasetManifest manifest =
      cs::load_manifest(cs::resolve_path(config.base_dir, config.manifest_path));

  std::map<std::pair<std::string, int>, double> durations;
  const std::map<std::pair<std::string, int>, double> *durations_ptr = nullptr;
  if (!segments_arg.empty()) {
    for (const auto &row : cs::load_segment_table(segments_arg))
      durations[{row.subject_id, row.segment_index}] = row.end_s - row.start_s;
    durations_ptr = &durations;
  }
  const cs::FeatureMatrix features =
      cs::import_external_features(input, set_name, manifest, durations_ptr);
  std::filesystem::create_directories(config.out_dir);
  const auto path = std::filesystem::path(config.out_dir) / (set_name + ".csv");
  cs::save_feature_store(path, features);
  std::printf("%s: %ld rows x %ld columns -> %s\n", set_name.c_str(),
              features.row_count(), features.column_count(), path.string().c_str());
  return 0;
}

int cmd_filter(const CommonFlags &flags, const std::string &features_path,
               double threshold, bool p_gate) {
  const cs::FeatureMatrix features = cs::load_feature_store(features_path);
  cs::CorrelationFilterOptions options;
  options.threshold = threshold;
  options.p_gate = p_gate;
  const auto [filtered, report] = cs::correlation_filter(features, options);

  cs::PipelineConfig config = assemble_config(flags);
  std::filesystem::create_directories(config.out_dir);
  cs::save_feature_store(std::filesystem::path(config.out_dir) / "filtered.csv",
                         filtered);
  cs::CsvTable removed;
  removed.header = {"column", "r"};
  for (const auto &[name, r] : report.removed)
    removed.rows.push_back({name, cs::format_double(r)});
  cs::write_csv(std::filesystem::path(config.out_dir) / "filter_report.csv",
                removed);
  std::printf("retained %zu columns, removed %zu\n", report.retained.size(),
              report.removed.size());
  return 0;
}

int cmd_evaluate(const CommonFlags &flags, const std::string &features_arg,
                 const std::string &classifiers_arg,
                 const std::string &regressors_arg) {
  cs::PipelineConfig config = assemble_config(flags);
  if (!features_arg.empty()) cs::apply_config_entry(config, "features", features_arg);
  if (!classifiers_arg.empty())
    cs::apply_config_entry(config, "classifiers", classifiers_arg);
  if (!regressors_arg.empty())
    cs::apply_config_entry(config, "regressors", regressors_arg);
  config.validate();
  const cs::ExperimentResult result = cs::run_experiment(config);
  cs::write_experiment_outputs(result, config.out_dir);
  std::printf("wrote %s\n",
              (std::filesystem::path(config.out_dir) / "bundle.json").string().c_str());
  return 0;
}

int cmd_report(const CommonFlags &flags, const std::string &bundle_path) {
  cs::PipelineConfig config = assemble_config(flags);
  std::filesystem::create_directories(config.out_dir);
  if (!bundle_path.empty()) {
    // Re-render the flat tables from an existing bundle.
    const auto j = nlohmann::json::parse(cs::read_text_file(bundle_path));
    cs::CsvTable table;
    table.header = {"features", "model", "metric", "value"};
    char buf[32];
    for (const auto &cell : j.at("cells")) {
      const std::string set = cell.at("feature_set").get<std::string>();
      const std::string model = cell.at("model").get<std::string>();
      if (cell.contains("classification")) {
        std::snprintf(buf, sizeof(buf), "%.4f",
                      cell["classification"].at("accuracy").get<double>());
        table.rows.push_back({set, model, "accuracy", buf});
      }
      if (cell.contains("regression")) {
        std::snprintf(buf, sizeof(buf), "%.4f",
                      cell["regression"].at("rmse").get<double>());
        table.rows.push_back({set, model, "rmse", buf});
        std::snprintf(buf, sizeof(buf), "%.4f",
                      cell["regression"].at("pearson_r").get<double>());
        table.rows.push_back({set, model, "pearson_r", buf});
      }
    }
    cs::write_csv(std::filesystem::path(config.out_dir) / "report.csv", table);
    std::printf("wrote %s\n",
                (std::filesystem::path(config.out_dir) / "report.csv").string().c_str());
    return 0;
  }
  if (config.manifest_path.empty())
    throw cs::ConfigError("report: --manifest or --bundle required");
  const cs::DatasetManifest manifest =
      cs::load_manifest(cs::resolve_path(config.base_dir, config.manifest_path));
  const std::string csv = cs::balance_report(manifest).to_csv();
  cs::write_text_file(std::filesystem::path(config.out_dir) / "balance.csv", csv);
  std::fputs(csv.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"speech feature extraction and subject-level evaluation pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;
  bool export_audio = false;
  std::string sets_arg, segments_arg, input_arg, set_name_arg;
  std::string classifiers_arg, regressors_arg, features_path, bundle_path;
  double threshold = 0.2;

  CLI::App *segment = app.add_subcommand("segment", "VAD over a manifest");
  add_common(segment, flags);
  segment->add_flag("--export-audio", export_audio, "write per-segment wavs");

  CLI::App *extract = app.add_subcommand("extract", "compute feature stores");
  add_common(extract, flags);
  extract->add_option("--sets", sets_arg, "mrcg,minimal,linguistic");
  extract->add_option("--segments", segments_arg, "precomputed segment table");

  CLI::App *import_cmd =
      app.add_subcommand("import-features", "ingest an external feature table");
  add_common(import_cmd, flags);
  import_cmd->add_option("--input", input_arg, "csv to import")->required();
  import_cmd->add_option("--set-name", set_name_arg, "namespace prefix")->required();
  import_cmd->add_option("--segments", segments_arg, "segment table for durations");

  CLI::App *filter = app.add_subcommand("filter", "duration-correlation filter");
  add_common(filter, flags);
  bool p_gate = false;
  filter->add_option("--features", features_path, "feature store csv")->required();
  filter->add_option("--threshold", threshold, "duration-correlation cutoff");
  filter->add_flag("--p-gate", p_gate, "also require p < 0.05 (two-sided)");

  CLI::App *evaluate = app.add_subcommand("evaluate", "run the experiment grid");
  add_common(evaluate, flags);
  evaluate->add_option("--features", sets_arg, "feature sets to compute");
  evaluate->add_option("--classifiers", classifiers_arg, "classifier list");
  evaluate->add_option("--regressors", regressors_arg, "regressor list");

  CLI::App *report = app.add_subcommand("report", "balance table or bundle tables");
  add_common(report, flags);
  report->add_option("--bundle", bundle_path, "bundle.json to re-render");

  CLI11_PARSE(app, argc, argv);

  try {
    if (segment->parsed()) return cmd_segment(flags, export_audio);
    if (extract->parsed()) return cmd_extract(flags, sets_arg, segments_arg);
    if (import_cmd->parsed())
      return cmd_import(flags, input_arg, set_name_arg, segments_arg);
    if (filter->parsed()) return cmd_filter(flags, features_path, threshold, p_gate);
    if (evaluate->parsed())
      return cmd_evaluate(flags, sets_arg, classifiers_arg, regressors_arg);
    if (report->parsed()) return cmd_report(flags, bundle_path);
  } catch (const cs::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
