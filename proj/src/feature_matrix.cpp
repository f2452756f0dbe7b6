#include "cogspeech/feature_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "cogspeech/csv.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

double NamedVector::at(const std::string &name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[static_cast<long>(i)];
  throw ValidationError("named vector has no entry '" + name + "'");
}

Eigen::VectorXd FeatureMatrix::durations() const {
  Eigen::VectorXd d(row_count());
  for (long i = 0; i < row_count(); ++i) d[i] = keys[static_cast<size_t>(i)].duration_s;
  return d;
}

std::vector<int> FeatureMatrix::rows_for_subject(const std::string &subject_id) const {
  std::vector<int> rows;
  for (long i = 0; i < row_count(); ++i)
    if (keys[static_cast<size_t>(i)].subject_id == subject_id)
      rows.push_back(static_cast<int>(i));
  return rows;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<int> &rows) const {
  FeatureMatrix out;
  out.column_names = column_names;
  out.keys.reserve(rows.size());
  out.values.resize(static_cast<long>(rows.size()), column_count());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.keys.push_back(keys[static_cast<size_t>(rows[i])]);
    out.values.row(static_cast<long>(i)) = values.row(rows[i]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<int> &cols) const {
  FeatureMatrix out;
  out.keys = keys;
  out.column_names.reserve(cols.size());
  out.values.resize(row_count(), static_cast<long>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    out.column_names.push_back(column_names[static_cast<size_t>(cols[j])]);
    out.values.col(static_cast<long>(j)) = values.col(cols[j]);
  }
  return out;
}

FeatureMatrixBuilder::FeatureMatrixBuilder(std::vector<std::string> column_names) {
  std::set<std::string> unique(column_names.begin(), column_names.end());
  if (unique.size() != column_names.size())
    throw ValidationError("feature matrix: duplicate column name");
  m_.column_names = std::move(column_names);
}

void FeatureMatrixBuilder::add_row(const FeatureRowKey &key,
                                   const Eigen::VectorXd &values) {
  if (values.size() != static_cast<long>(m_.column_names.size()))
    throw ValidationError("feature matrix: row for subject '" + key.subject_id +
                          "' has " + std::to_string(values.size()) +
                          " values, expected " +
                          std::to_string(m_.column_names.size()));
  if (!seen_.emplace(std::make_pair(key.subject_id, key.segment_index), true).second)
    throw ValidationError("feature matrix: duplicate row key (" + key.subject_id +
                          ", " + std::to_string(key.segment_index) + ")");
  m_.keys.push_back(key);
  rows_.push_back(values);
}

void FeatureMatrixBuilder::add_row(const FeatureRowKey &key, const NamedVector &vec) {
  if (vec.names != m_.column_names)
    throw ValidationError("feature matrix: column names differ for subject '" +
                          key.subject_id + "'");
  add_row(key, vec.values);
}

FeatureMatrix FeatureMatrixBuilder::build() {
  m_.values.resize(static_cast<long>(rows_.size()),
                   static_cast<long>(m_.column_names.size()));
  for (size_t i = 0; i < rows_.size(); ++i)
    m_.values.row(static_cast<long>(i)) = rows_[i];
  rows_.clear();
  return std::move(m_);
}

void save_feature_store(const std::filesystem::path &path, const FeatureMatrix &m) {
  std::string out = "subject_id,segment_index,duration_s";
  for (const auto &name : m.column_names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (long i = 0; i < m.row_count(); ++i) {
    const auto &key = m.keys[static_cast<size_t>(i)];
    out += key.subject_id;
    out += ',';
    out += std::to_string(key.segment_index);
    out += ',';
    out += format_double(key.duration_s);
    for (long j = 0; j < m.column_count(); ++j) {
      out += ',';
      out += format_double(m.values(i, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

FeatureMatrix load_feature_store(const std::filesystem::path &path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 3 || table.header[0] != "subject_id" ||
      table.header[1] != "segment_index" || table.header[2] != "duration_s")
    throw ParseError("feature store " + path.string() +
                     ": header must start subject_id,segment_index,duration_s");

  FeatureMatrixBuilder builder(
      {table.header.begin() + 3, table.header.end()});
  const long d = static_cast<long>(table.header.size()) - 3;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string ctx = "feature store row " + std::to_string(r + 1);
    FeatureRowKey key;
    key.subject_id = row[0];
    key.segment_index = static_cast<int>(parse_long(row[1], ctx));
    key.duration_s = parse_double(row[2], ctx);
    Eigen::VectorXd values(d);
    for (long j = 0; j < d; ++j)
      values[j] = parse_double(row[static_cast<size_t>(j) + 3], ctx);
    builder.add_row(key, values);
  }
  return builder.build();
}

namespace {

// Plain two-pass Pearson correlation; zero variance on either side yields 0.
double pearson_or_zero(const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
  const double mx = x.mean(), my = y.mean();
  const Eigen::VectorXd dx = x.array() - mx;
  const Eigen::VectorXd dy = y.array() - my;
  const double sxx = dx.squaredNorm(), syy = dy.squaredNorm();
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return dx.dot(dy) / std::sqrt(sxx * syy);
}

}  // namespace

double pearson_p_value(double r, long n) {
  if (n < 3) return 1.0;
  const double r2 = std::min(r * r, 1.0 - 1e-15);
  const double t = std::abs(r) * std::sqrt((n - 2) / (1.0 - r2));
  boost::math::students_t dist(static_cast<double>(n - 2));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

std::pair<FeatureMatrix, ColumnFilterReport> correlation_filter(
    const FeatureMatrix &m, const CorrelationFilterOptions &options) {
  if (m.row_count() < 3)
    throw ValidationError("correlation_filter: need at least 3 rows, have " +
                          std::to_string(m.row_count()));

  const Eigen::VectorXd durations = m.durations();
  ColumnFilterReport report;
  std::vector<int> retained_cols;
  for (long j = 0; j < m.column_count(); ++j) {
    const double r = pearson_or_zero(m.values.col(j), durations);
    bool remove = std::abs(r) > options.threshold;
    if (remove && options.p_gate)
      remove = pearson_p_value(r, m.row_count()) < options.p_value;
    if (remove) {
      report.removed.emplace_back(m.column_names[static_cast<size_t>(j)], r);
    } else {
      report.retained.push_back(m.column_names[static_cast<size_t>(j)]);
      retained_cols.push_back(static_cast<int>(j));
    }
  }
  return {m.select_columns(retained_cols), std::move(report)};
}

FeatureMatrix import_external_features(
    const std::filesystem::path &path, const std::string &set_name,
    const DatasetManifest &manifest,
    const std::map<std::pair<std::string, int>, double> *durations) {
  const CsvTable table = read_csv(path);
  const int subject_col = table.column("subject_id");
  const int segment_col = table.column("segment_index");
  const int duration_col = table.column("duration_s");
  if (subject_col < 0 || segment_col < 0)
    throw ParseError("import " + path.string() +
                     ": table needs subject_id and segment_index columns");
  if (duration_col < 0 && durations == nullptr)
    throw ValidationError("import " + path.string() +
                          ": no duration_s column and no segment table to join");

  std::vector<int> feature_cols;
  std::vector<std::string> names;
  for (size_t j = 0; j < table.header.size(); ++j) {
    if (static_cast<int>(j) == subject_col || static_cast<int>(j) == segment_col ||
        static_cast<int>(j) == duration_col)
      continue;
    feature_cols.push_back(static_cast<int>(j));
    names.push_back(set_name + "." + table.header[j]);
  }

  FeatureMatrixBuilder builder(std::move(names));
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string ctx = "import row " + std::to_string(r + 1);
    FeatureRowKey key;
    key.subject_id = row[static_cast<size_t>(subject_col)];
    key.segment_index =
        static_cast<int>(parse_long(row[static_cast<size_t>(segment_col)], ctx));
    if (manifest.find(key.subject_id) == nullptr)
      throw ValidationError(ctx + ": unknown subject '" + key.subject_id + "'");
    if (duration_col >= 0) {
      key.duration_s = parse_double(row[static_cast<size_t>(duration_col)], ctx);
    } else {
      const auto it = durations->find({key.subject_id, key.segment_index});
      if (it == durations->end())
        throw ValidationError(ctx + ": no duration for (" + key.subject_id + ", " +
                              std::to_string(key.segment_index) + ")");
      key.duration_s = it->second;
    }
    Eigen::VectorXd values(static_cast<long>(feature_cols.size()));
    for (size_t j = 0; j < feature_cols.size(); ++j)
      values[static_cast<long>(j)] =
          parse_double(row[static_cast<size_t>(feature_cols[j])], ctx);
    builder.add_row(key, values);
  }
  return builder.build();
}

Standardizer Standardizer::fit(const FeatureMatrix &train) {
  if (train.row_count() < 2)
    throw ValidationError("standardize: need at least 2 training rows");
  Standardizer s;
  const long n = train.row_count(), d = train.column_count();
  s.mean = train.values.colwise().mean();
  s.sd.resize(d);
  for (long j = 0; j < d; ++j) {
    const double ss = (train.values.col(j).array() - s.mean[j]).square().sum();
    s.sd[j] = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix &m) const {
  if (m.column_count() != mean.size())
    throw ValidationError("standardize: column count mismatch");
  FeatureMatrix out = m;
  for (long j = 0; j < m.column_count(); ++j) {
    if (sd[j] == 0.0) continue;  // pass through unscaled
    out.values.col(j) = (m.values.col(j).array() - mean[j]) / sd[j];
  }
  return out;
}

std::pair<FeatureMatrix, FeatureMatrix> standardize(const FeatureMatrix &train,
                                                    const FeatureMatrix &apply_to) {
  if (train.column_names != apply_to.column_names)
    throw ValidationError("standardize: column names differ between matrices");
  const Standardizer s = Standardizer::fit(train);
  return {s.apply(train), s.apply(apply_to)};
}

Imputer Imputer::fit(const FeatureMatrix &train) {
  Imputer imp;
  const long d = train.column_count();
  imp.median.resize(d);
  std::vector<double> finite;
  for (long j = 0; j < d; ++j) {
    finite.clear();
    for (long i = 0; i < train.row_count(); ++i)
      if (std::isfinite(train.values(i, j))) finite.push_back(train.values(i, j));
    if (finite.empty()) {
      imp.median[j] = 0.0;
      continue;
    }
    std::sort(finite.begin(), finite.end());
    const size_t n = finite.size();
    imp.median[j] = n % 2 ? finite[n / 2] : 0.5 * (finite[n / 2 - 1] + finite[n / 2]);
  }
  return imp;
}

FeatureMatrix Imputer::apply(const FeatureMatrix &m) const {
  if (m.column_count() != median.size())
    throw ValidationError("impute: column count mismatch");
  FeatureMatrix out = m;
  for (long i = 0; i < m.row_count(); ++i)
    for (long j = 0; j < m.column_count(); ++j)
      if (!std::isfinite(out.values(i, j))) out.values(i, j) = median[j];
  return out;
}

}  // namespace cogspeech
