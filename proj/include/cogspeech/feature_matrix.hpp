#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cogspeech/dataset.hpp"
#include "cogspeech/named_vector.hpp"

namespace cogspeech {

// Row key and metadata. Subject-level feature sets use segment_index 0.
struct FeatureRowKey {
  std::string subject_id;
  int segment_index = 0;
  double duration_s = 0.0;
};

// Named-column numeric table keyed by (subject, segment). Immutable in
// spirit: operations return new matrices.
struct FeatureMatrix {
  std::vector<std::string> column_names;
  std::vector<FeatureRowKey> keys;  // parallel to values rows
  Eigen::MatrixXd values;           // keys.size() x column_names.size()

  long row_count() const { return values.rows(); }
  long column_count() const { return values.cols(); }
  Eigen::VectorXd durations() const;
  std::vector<int> rows_for_subject(const std::string &subject_id) const;
  FeatureMatrix select_rows(const std::vector<int> &rows) const;
  FeatureMatrix select_columns(const std::vector<int> &cols) const;
};

class FeatureMatrixBuilder {
 public:
  explicit FeatureMatrixBuilder(std::vector<std::string> column_names);
  void add_row(const FeatureRowKey &key, const Eigen::VectorXd &values);
  void add_row(const FeatureRowKey &key, const NamedVector &vec);  // checks names
  FeatureMatrix build();

 private:
  FeatureMatrix m_;
  std::vector<Eigen::VectorXd> rows_;
  std::map<std::pair<std::string, int>, bool> seen_;
};

// Store format: header subject_id,segment_index,duration_s,<feature...>,
// values written with 17 significant digits so they round-trip exactly.
void save_feature_store(const std::filesystem::path &path, const FeatureMatrix &m);
FeatureMatrix load_feature_store(const std::filesystem::path &path);

struct ColumnFilterReport {
  std::vector<std::string> retained;
  std::vector<std::pair<std::string, double>> removed;  // (name, r)
};

struct CorrelationFilterOptions {
  double threshold = 0.2;   // remove when |r| > threshold
  bool p_gate = false;      // additionally require p < p_value (two-sided)
  double p_value = 0.05;
};

// Pearson correlation of each column against segment duration; columns
// whose |r| exceeds the threshold are dropped. Zero-variance columns have
// r defined as 0 and are retained. Never looks at labels.
std::pair<FeatureMatrix, ColumnFilterReport> correlation_filter(
    const FeatureMatrix &m, const CorrelationFilterOptions &options = {});

// Two-sided p-value for a Pearson correlation under the t distribution.
double pearson_p_value(double r, long n);

// Externally computed feature tables (one row per subject/segment) enter
// here; columns are namespaced <set_name>.<feature> and row keys are
// validated against the manifest. durations maps (subject, segment) to
// seconds for tables that lack a duration_s column.
FeatureMatrix import_external_features(
    const std::filesystem::path &path, const std::string &set_name,
    const DatasetManifest &manifest,
    const std::map<std::pair<std::string, int>, double> *durations = nullptr);

// Column z-scoring fitted on a training matrix. Zero-sd columns pass
// through unscaled.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // 0 marks a pass-through column
  static Standardizer fit(const FeatureMatrix &train);
  FeatureMatrix apply(const FeatureMatrix &m) const;
};

std::pair<FeatureMatrix, FeatureMatrix> standardize(const FeatureMatrix &train,
                                                    const FeatureMatrix &apply_to);

// Replaces non-finite cells with the training-fold column median.
struct Imputer {
  Eigen::VectorXd median;
  static Imputer fit(const FeatureMatrix &train);
  FeatureMatrix apply(const FeatureMatrix &m) const;
};

}  // namespace cogspeech
