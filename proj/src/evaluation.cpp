#include "cogspeech/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <thread>

#include "cogspeech/error.hpp"
#include "cogspeech/rng.hpp"

namespace cogspeech {

std::vector<FoldAssignment> loso_folds(const DatasetManifest &manifest,
                                       const FeatureMatrix &features) {
  std::set<std::string> known;
  for (const auto &r : manifest.records) known.insert(r.subject_id);
  for (const auto &key : features.keys)
    if (!known.count(key.subject_id))
      throw ValidationError("loso_folds: feature row for unknown subject '" +
                            key.subject_id + "'");

  std::map<std::string, std::vector<int>> rows_by_subject;
  for (long i = 0; i < features.row_count(); ++i)
    rows_by_subject[features.keys[static_cast<size_t>(i)].subject_id].push_back(
        static_cast<int>(i));

  std::vector<FoldAssignment> folds;
  folds.reserve(manifest.records.size());
  for (const auto &record : manifest.records) {
    const auto it = rows_by_subject.find(record.subject_id);
    if (it == rows_by_subject.end())
      throw ValidationError("loso_folds: subject '" + record.subject_id +
                            "' has zero feature rows");
    FoldAssignment fold;
    fold.held_out_subject = record.subject_id;
    fold.validation_rows = it->second;
    for (long i = 0; i < features.row_count(); ++i)
      if (features.keys[static_cast<size_t>(i)].subject_id != record.subject_id)
        fold.train_rows.push_back(static_cast<int>(i));
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::string majority_vote(const std::vector<std::string> &labels,
                          const std::string &positive_class) {
  if (labels.empty()) throw ValidationError("majority_vote: empty label list");
  std::map<std::string, int> counts;
  for (const auto &label : labels) counts[label] += 1;
  std::string best;
  int best_count = -1;
  bool tie = false;
  for (const auto &[label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
      tie = false;
    } else if (count == best_count) {
      tie = true;
    }
  }
  if (tie && counts.count(positive_class) &&
      counts.at(positive_class) == best_count)
    return positive_class;
  return best;
}

double average_score(const std::vector<double> &scores) {
  if (scores.empty()) throw ValidationError("average_score: empty score list");
  double sum = 0.0;
  for (double s : scores) sum += s;
  return std::clamp(sum / static_cast<double>(scores.size()), 0.0, 30.0);
}

ClassificationReport classification_metrics(
    const std::vector<std::string> &true_labels,
    const std::vector<std::string> &predicted_labels,
    const std::string &positive_class) {
  if (true_labels.size() != predicted_labels.size())
    throw ValidationError("classification_metrics: label list length mismatch");
  if (true_labels.empty())
    throw ValidationError("classification_metrics: empty label lists");

  std::set<std::string> classes(true_labels.begin(), true_labels.end());
  classes.insert(predicted_labels.begin(), predicted_labels.end());

  ClassificationReport report;
  report.positive_class = positive_class;
  long correct = 0;
  for (size_t i = 0; i < true_labels.size(); ++i)
    if (true_labels[i] == predicted_labels[i]) ++correct;
  report.accuracy = static_cast<double>(correct) /
                    static_cast<double>(true_labels.size());

  for (const auto &cls : classes) {
    long tp = 0, tn = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < true_labels.size(); ++i) {
      const bool truth = true_labels[i] == cls;
      const bool pred = predicted_labels[i] == cls;
      if (truth && pred) ++tp;
      else if (!truth && !pred) ++tn;
      else if (!truth && pred) ++fp;
      else ++fn;
    }
    ClassMetrics m;
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / (tp + fp);
    else m.flagged = true;
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / (tp + fn);
    else m.flagged = true;
    if (m.precision + m.recall > 0.0)
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    else m.flagged = true;
    report.per_class[cls] = m;
    if (cls == positive_class) {
      report.tp = tp;
      report.tn = tn;
      report.fp = fp;
      report.fn = fn;
    }
  }
  return report;
}

RegressionReport regression_metrics(const std::vector<double> &true_scores,
                                    const std::vector<double> &predicted_scores) {
  if (true_scores.size() != predicted_scores.size())
    throw ValidationError("regression_metrics: score list length mismatch");
  if (true_scores.empty())
    throw ValidationError("regression_metrics: empty score lists");

  RegressionReport report;
  const size_t n = true_scores.size();
  double sq = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = true_scores[i] - predicted_scores[i];
    sq += e * e;
    report.per_subject.emplace_back(true_scores[i], predicted_scores[i]);
  }
  report.rmse = std::sqrt(sq / static_cast<double>(n));

  double mt = 0.0, mp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mt += true_scores[i];
    mp += predicted_scores[i];
  }
  mt /= static_cast<double>(n);
  mp /= static_cast<double>(n);
  double st = 0.0, sp = 0.0, cross = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dt = true_scores[i] - mt, dp = predicted_scores[i] - mp;
    st += dt * dt;
    sp += dp * dp;
    cross += dt * dp;
  }
  if (st == 0.0 || sp == 0.0) {
    report.pearson_r = 0.0;
    report.r_flagged = true;
  } else {
    report.pearson_r = cross / std::sqrt(st * sp);
  }
  return report;
}

namespace {

// Index-slot parallel-for; results are written by fold index so completion
// order never affects output.
void parallel_folds(size_t count, int jobs, const std::function<void(size_t)> &fn) {
  if (jobs <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  const int n_workers = std::min<int>(jobs, static_cast<int>(count));
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      for (size_t i = static_cast<size_t>(w); i < count;
           i += static_cast<size_t>(n_workers))
        fn(i);
    });
  }
  for (auto &t : workers) t.join();
}

struct FoldData {
  FeatureMatrix train;
  FeatureMatrix validation;
};

// Leakage-safe per-fold preprocessing: impute from the training fold, drop
// duration-correlated columns found on the training fold, standardize with
// training-fold statistics.
FoldData prepare_fold(const FeatureMatrix &features,
                      const std::vector<int> &train_rows,
                      const std::vector<int> &validation_rows,
                      const LosoOptions &options) {
  FoldData fold;
  fold.train = features.select_rows(train_rows);
  fold.validation = features.select_rows(validation_rows);

  const Imputer imputer = Imputer::fit(fold.train);
  fold.train = imputer.apply(fold.train);
  fold.validation = imputer.apply(fold.validation);

  if (options.duration_filter && fold.train.row_count() >= 3) {
    CorrelationFilterOptions filter_options;
    filter_options.threshold = options.filter_threshold;
    filter_options.p_gate = options.filter_p_gate;
    auto [filtered, report] = correlation_filter(fold.train, filter_options);
    std::vector<int> keep;
    std::set<std::string> retained(report.retained.begin(), report.retained.end());
    for (long j = 0; j < fold.validation.column_count(); ++j)
      if (retained.count(fold.validation.column_names[static_cast<size_t>(j)]))
        keep.push_back(static_cast<int>(j));
    fold.train = std::move(filtered);
    fold.validation = fold.validation.select_columns(keep);
  }

  if (options.standardize && fold.train.row_count() >= 2) {
    const Standardizer standardizer = Standardizer::fit(fold.train);
    fold.train = standardizer.apply(fold.train);
    fold.validation = standardizer.apply(fold.validation);
  }
  return fold;
}

void check_no_leakage(const FoldAssignment &fold, const FeatureMatrix &features) {
  std::set<std::string> train_subjects;
  for (int r : fold.train_rows)
    train_subjects.insert(features.keys[static_cast<size_t>(r)].subject_id);
  for (int r : fold.validation_rows)
    if (train_subjects.count(features.keys[static_cast<size_t>(r)].subject_id))
      throw ValidationError("loso: train/validation subject overlap for '" +
                            fold.held_out_subject + "'");
}

std::vector<std::string> labels_for_rows(const DatasetManifest &manifest,
                                         const FeatureMatrix &features,
                                         const std::vector<int> &rows) {
  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (int r : rows) {
    const auto *record =
        manifest.find(features.keys[static_cast<size_t>(r)].subject_id);
    labels.push_back(group_to_string(record->group));
  }
  return labels;
}

Eigen::VectorXd scores_for_rows(const DatasetManifest &manifest,
                                const FeatureMatrix &features,
                                const std::vector<int> &rows) {
  Eigen::VectorXd y(static_cast<long>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto *record = manifest.find(
        features.keys[static_cast<size_t>(rows[i])].subject_id);
    y[static_cast<long>(i)] = record->mmse;
  }
  return y;
}

ModelSpec seeded_spec(const ModelSpec &spec, const LosoOptions &options,
                      const std::string &fold_name) {
  ModelSpec fold_spec = spec;
  fold_spec.seed = splitmix64(options.seed ^ fnv1a64(model_kind_name(spec.kind) +
                                                     "/fold/" + fold_name));
  return fold_spec;
}

}  // namespace

LosoClassificationResult run_loso_classification(const DatasetManifest &manifest,
                                                 const FeatureMatrix &features,
                                                 const ModelSpec &spec,
                                                 const LosoOptions &options) {
  const std::vector<FoldAssignment> folds = loso_folds(manifest, features);
  LosoClassificationResult result;
  result.folds.resize(folds.size());

  parallel_folds(folds.size(), options.jobs, [&](size_t f) {
    const FoldAssignment &fold = folds[f];
    check_no_leakage(fold, features);
    const FoldData data = prepare_fold(features, fold.train_rows,
                                       fold.validation_rows, options);
    const std::vector<std::string> train_labels =
        labels_for_rows(manifest, features, fold.train_rows);
    const auto model = fit_classifier(
        seeded_spec(spec, options, fold.held_out_subject), data.train, train_labels);

    FoldTrace trace;
    trace.subject = fold.held_out_subject;
    trace.true_label = group_to_string(manifest.find(fold.held_out_subject)->group);
    trace.segment_labels = model->predict_labels(data.validation);
    trace.predicted_label = majority_vote(trace.segment_labels, options.positive_class);
    result.folds[f] = std::move(trace);
  });

  std::vector<std::string> truth, predicted;
  for (const auto &trace : result.folds) {
    truth.push_back(trace.true_label);
    predicted.push_back(trace.predicted_label);
  }
  result.report = classification_metrics(truth, predicted, options.positive_class);
  return result;
}

LosoRegressionResult run_loso_regression(const DatasetManifest &manifest,
                                         const FeatureMatrix &features,
                                         const ModelSpec &spec,
                                         const LosoOptions &options) {
  const std::vector<FoldAssignment> folds = loso_folds(manifest, features);
  LosoRegressionResult result;
  result.folds.resize(folds.size());

  parallel_folds(folds.size(), options.jobs, [&](size_t f) {
    const FoldAssignment &fold = folds[f];
    check_no_leakage(fold, features);
    const FoldData data = prepare_fold(features, fold.train_rows,
                                       fold.validation_rows, options);
    const Eigen::VectorXd train_y = scores_for_rows(manifest, features, fold.train_rows);
    const auto model = fit_regressor(
        seeded_spec(spec, options, fold.held_out_subject), data.train, train_y);

    FoldTrace trace;
    trace.subject = fold.held_out_subject;
    trace.true_score = manifest.find(fold.held_out_subject)->mmse;
    const Eigen::VectorXd scores = model->predict_scores(data.validation);
    trace.segment_scores.assign(scores.data(), scores.data() + scores.size());
    trace.predicted_score = average_score(trace.segment_scores);
    result.folds[f] = std::move(trace);
  });

  std::vector<double> truth, predicted;
  for (const auto &trace : result.folds) {
    truth.push_back(trace.true_score);
    predicted.push_back(trace.predicted_score);
  }
  result.report = regression_metrics(truth, predicted);
  return result;
}

namespace {

// Shared train/test path: one fit on all training rows, then per-subject
// aggregation over the test rows.
template <typename Result, typename FitPredict>
Result run_train_test(const FeatureMatrix &train_features,
                      const DatasetManifest &test_manifest,
                      const FeatureMatrix &test_features,
                      const LosoOptions &options, FitPredict fit_predict) {
  for (const auto &key : test_features.keys)
    if (test_manifest.find(key.subject_id) == nullptr)
      throw ValidationError("train_test: test feature row for unknown subject '" +
                            key.subject_id + "'");
  if (train_features.column_names != test_features.column_names)
    throw ValidationError("train_test: feature columns differ between splits");

  std::vector<int> all_train(static_cast<size_t>(train_features.row_count()));
  std::iota(all_train.begin(), all_train.end(), 0);
  std::vector<int> all_test(static_cast<size_t>(test_features.row_count()));
  std::iota(all_test.begin(), all_test.end(), 0);

  // prepare_fold expects one matrix; concatenate then split again.
  FeatureMatrixBuilder builder(train_features.column_names);
  for (long i = 0; i < train_features.row_count(); ++i)
    builder.add_row(train_features.keys[static_cast<size_t>(i)],
                    train_features.values.row(i).transpose());
  for (long i = 0; i < test_features.row_count(); ++i) {
    FeatureRowKey key = test_features.keys[static_cast<size_t>(i)];
    key.segment_index += 1000000;  // keep keys unique across splits
    builder.add_row(key, test_features.values.row(i).transpose());
  }
  const FeatureMatrix merged = builder.build();
  std::vector<int> test_rows;
  for (long i = train_features.row_count(); i < merged.row_count(); ++i)
    test_rows.push_back(static_cast<int>(i));

  const FoldData data = prepare_fold(merged, all_train, test_rows, options);
  return fit_predict(data, test_manifest, test_features);
}

}  // namespace

LosoClassificationResult run_train_test_classification(
    const DatasetManifest &train_manifest, const FeatureMatrix &train_features,
    const DatasetManifest &test_manifest, const FeatureMatrix &test_features,
    const ModelSpec &spec, const LosoOptions &options) {
  return run_train_test<LosoClassificationResult>(
      train_features, test_manifest, test_features, options,
      [&](const FoldData &data, const DatasetManifest &tm, const FeatureMatrix &tf) {
        std::vector<int> all_train(static_cast<size_t>(train_features.row_count()));
        std::iota(all_train.begin(), all_train.end(), 0);
        const std::vector<std::string> train_labels =
            labels_for_rows(train_manifest, train_features, all_train);
        const auto model = fit_classifier(seeded_spec(spec, options, "test"),
                                          data.train, train_labels);
        const std::vector<std::string> segment_labels =
            model->predict_labels(data.validation);

        LosoClassificationResult result;
        std::vector<std::string> truth, predicted;
        for (const auto &record : tm.records) {
          FoldTrace trace;
          trace.subject = record.subject_id;
          trace.true_label = group_to_string(record.group);
          for (long i = 0; i < tf.row_count(); ++i)
            if (tf.keys[static_cast<size_t>(i)].subject_id == record.subject_id)
              trace.segment_labels.push_back(segment_labels[static_cast<size_t>(i)]);
          if (trace.segment_labels.empty())
            throw ValidationError("train_test: subject '" + record.subject_id +
                                  "' has zero feature rows");
          trace.predicted_label =
              majority_vote(trace.segment_labels, options.positive_class);
          truth.push_back(trace.true_label);
          predicted.push_back(trace.predicted_label);
          result.folds.push_back(std::move(trace));
        }
        result.report =
            classification_metrics(truth, predicted, options.positive_class);
        return result;
      });
}

LosoRegressionResult run_train_test_regression(
    const DatasetManifest &train_manifest, const FeatureMatrix &train_features,
    const DatasetManifest &test_manifest, const FeatureMatrix &test_features,
    const ModelSpec &spec, const LosoOptions &options) {
  return run_train_test<LosoRegressionResult>(
      train_features, test_manifest, test_features, options,
      [&](const FoldData &data, const DatasetManifest &tm, const FeatureMatrix &tf) {
        std::vector<int> all_train(static_cast<size_t>(train_features.row_count()));
        std::iota(all_train.begin(), all_train.end(), 0);
        const Eigen::VectorXd train_y =
            scores_for_rows(train_manifest, train_features, all_train);
        const auto model = fit_regressor(seeded_spec(spec, options, "test"),
                                         data.train, train_y);
        const Eigen::VectorXd segment_scores = model->predict_scores(data.validation);

        LosoRegressionResult result;
        std::vector<double> truth, predicted;
        for (const auto &record : tm.records) {
          FoldTrace trace;
          trace.subject = record.subject_id;
          trace.true_score = record.mmse;
          for (long i = 0; i < tf.row_count(); ++i)
            if (tf.keys[static_cast<size_t>(i)].subject_id == record.subject_id)
              trace.segment_scores.push_back(segment_scores[i]);
          if (trace.segment_scores.empty())
            throw ValidationError("train_test: subject '" + record.subject_id +
                                  "' has zero feature rows");
          trace.predicted_score = average_score(trace.segment_scores);
          truth.push_back(trace.true_score);
          predicted.push_back(trace.predicted_score);
          result.folds.push_back(std::move(trace));
        }
        result.report = regression_metrics(truth, predicted);
        return result;
      });
}

}  // namespace cogspeech
