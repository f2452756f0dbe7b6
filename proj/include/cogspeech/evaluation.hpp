#pragma once

#include <map>
#include <string>
#include <vector>

#include "cogspeech/dataset.hpp"
#include "cogspeech/feature_matrix.hpp"
#include "cogspeech/learners.hpp"

namespace cogspeech {

// One leave-one-subject-out fold. Validation rows all belong to the held
// out subject; training rows contain none of them.
struct FoldAssignment {
  std::string held_out_subject;
  std::vector<int> train_rows;
  std::vector<int> validation_rows;
};

// One fold per manifest subject, in manifest order. Every feature row must
// belong to a manifest subject and every subject must have rows.
std::vector<FoldAssignment> loso_folds(const DatasetManifest &manifest,
                                       const FeatureMatrix &features);

// Modal label; an exact tie resolves to the positive class.
std::string majority_vote(const std::vector<std::string> &labels,
                          const std::string &positive_class = "AD");

// Arithmetic mean clamped to the MMSE range [0, 30].
double average_score(const std::vector<double> &scores);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool flagged = false;  // some ratio had a zero denominator
};

struct ClassificationReport {
  std::string positive_class;
  long tp = 0, tn = 0, fp = 0, fn = 0;  // counts w.r.t. positive_class
  double accuracy = 0.0;
  std::map<std::string, ClassMetrics> per_class;  // each class as positive
};

ClassificationReport classification_metrics(
    const std::vector<std::string> &true_labels,
    const std::vector<std::string> &predicted_labels,
    const std::string &positive_class);

struct RegressionReport {
  double rmse = 0.0;
  double pearson_r = 0.0;
  bool r_flagged = false;  // a side had zero variance
  std::vector<std::pair<double, double>> per_subject;  // (true, predicted)
};

RegressionReport regression_metrics(const std::vector<double> &true_scores,
                                    const std::vector<double> &predicted_scores);

// Per-fold record of what the two-step system did.
struct FoldTrace {
  std::string subject;
  std::string true_label;
  std::string predicted_label;
  double true_score = 0.0;
  double predicted_score = 0.0;
  std::vector<std::string> segment_labels;
  std::vector<double> segment_scores;
};

struct LosoOptions {
  bool standardize = true;
  bool duration_filter = true;
  double filter_threshold = 0.2;
  bool filter_p_gate = false;
  std::string positive_class = "AD";
  uint64_t seed = 0;
  int jobs = 1;
};

struct LosoClassificationResult {
  ClassificationReport report;
  std::vector<FoldTrace> folds;
};

struct LosoRegressionResult {
  RegressionReport report;
  std::vector<FoldTrace> folds;
};

// Segment-level fit + majority vote per held-out subject, with the duration
// filter, imputation and standardization fitted inside each training fold.
LosoClassificationResult run_loso_classification(const DatasetManifest &manifest,
                                                 const FeatureMatrix &features,
                                                 const ModelSpec &spec,
                                                 const LosoOptions &options = {});

// Segment-level fit + score averaging (clamped to [0,30]) per subject.
LosoRegressionResult run_loso_regression(const DatasetManifest &manifest,
                                         const FeatureMatrix &features,
                                         const ModelSpec &spec,
                                         const LosoOptions &options = {});

// Train-on-train / test-on-test variants of the same two-step systems.
LosoClassificationResult run_train_test_classification(
    const DatasetManifest &train_manifest, const FeatureMatrix &train_features,
    const DatasetManifest &test_manifest, const FeatureMatrix &test_features,
    const ModelSpec &spec, const LosoOptions &options = {});
LosoRegressionResult run_train_test_regression(
    const DatasetManifest &train_manifest, const FeatureMatrix &train_features,
    const DatasetManifest &test_manifest, const FeatureMatrix &test_features,
    const ModelSpec &spec, const LosoOptions &options = {});

}  // namespace cogspeech
