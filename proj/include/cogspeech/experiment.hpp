#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cogspeech/evaluation.hpp"
#include "cogspeech/pipeline.hpp"

namespace cogspeech {

// Flat key=value experiment description; every key is also settable from
// command-line flags, which win over the file.
struct PipelineConfig {
  std::string manifest_path;
  std::string test_manifest_path;               // train_test mode
  std::string mode = "loso";                    // loso | train_test
  std::vector<std::string> feature_sets;        // mrcg, minimal, linguistic
  std::map<std::string, std::string> imports;   // set name -> csv path
  std::map<std::string, std::string> test_imports;  // train_test counterparts
  std::vector<std::string> classifiers;         // model kind names
  std::vector<std::string> regressors;
  std::string segments_path;                    // optional precomputed table
  std::string out_dir = "out";
  uint64_t seed = 17;
  int jobs = 1;
  bool denoise = true;
  bool normalize = true;
  double target_dbfs = -3.0;
  VadOptions vad;
  bool standardize = true;
  bool duration_filter = true;
  double filter_threshold = 0.2;
  bool filter_p_gate = false;            // also require p < 0.05
  std::string filter_scope = "fold";     // fold (leakage-safe) | global
  std::vector<std::string> filter_sets;  // empty = segment-level acoustic sets
  std::string positive_class = "AD";
  std::string speaker = "PAR";

  std::filesystem::path base_dir;  // directory config paths resolve against

  AudioPrepOptions prep() const;
  // Raises ConfigError for unknown model/set names and missing inputs,
  // before any compute starts.
  void validate() const;
};

PipelineConfig load_config(const std::filesystem::path &path);
void apply_config_entry(PipelineConfig &config, const std::string &key,
                        const std::string &value);

struct ExperimentCell {
  std::string feature_set;
  std::string model;
  std::optional<ClassificationReport> classification;
  std::optional<RegressionReport> regression;
  std::vector<FoldTrace> folds;
};

struct ExperimentResult {
  PipelineConfig config;
  std::vector<ExperimentCell> cells;

  nlohmann::json to_json() const;
};

// Runs every (feature set x model) cell under the configured protocol.
// Feature matrices are built from the config's own inputs.
ExperimentResult run_experiment(const PipelineConfig &config);

// Variant over preassembled matrices (keyed by feature set name).
ExperimentResult run_experiment(
    const PipelineConfig &config, const DatasetManifest &train_manifest,
    const std::map<std::string, FeatureMatrix> &train_features,
    const DatasetManifest *test_manifest,
    const std::map<std::string, FeatureMatrix> *test_features);

// Writes bundle.json plus the flat tables (accuracy/RMSE grid with row and
// column means, per-class metrics, per-subject predictions).
void write_experiment_outputs(const ExperimentResult &result,
                              const std::filesystem::path &out_dir);

}  // namespace cogspeech
