#include <doctest.h>

#include <cmath>
#include <random>

#include "cogspeech/csv.hpp"
#include "cogspeech/error.hpp"
#include "cogspeech/feature_matrix.hpp"
#include "testutil.hpp"

using namespace cogspeech;

namespace {

FeatureMatrix make_matrix(const std::vector<std::string> &columns,
                          const std::vector<double> &durations,
                          const Eigen::MatrixXd &values) {
  FeatureMatrixBuilder builder(columns);
  for (long i = 0; i < values.rows(); ++i)
    builder.add_row({"s" + std::to_string(i), 0, durations[static_cast<size_t>(i)]},
                    values.row(i).transpose());
  return builder.build();
}

}  // namespace

TEST_CASE("a column equal to duration is removed with r = 1") {
  const std::vector<double> durations = {1.0, 2.0, 3.0, 4.0, 5.0};
  Eigen::MatrixXd values(5, 2);
  for (int i = 0; i < 5; ++i) {
    values(i, 0) = durations[static_cast<size_t>(i)];
    values(i, 1) = (i % 2) ? 0.5 : -0.5;
  }
  const FeatureMatrix m = make_matrix({"dup", "other"}, durations, values);
  const auto [filtered, report] = correlation_filter(m);
  REQUIRE(report.removed.size() == 1);
  CHECK(report.removed[0].first == "dup");
  CHECK(report.removed[0].second == doctest::Approx(1.0));
  CHECK(filtered.column_names == std::vector<std::string>{"other"});
}

TEST_CASE("constant columns have r defined as 0 and are retained") {
  const std::vector<double> durations = {1.0, 2.0, 3.0};
  Eigen::MatrixXd values = Eigen::MatrixXd::Constant(3, 1, 7.0);
  const FeatureMatrix m = make_matrix({"flat"}, durations, values);
  const auto [filtered, report] = correlation_filter(m);
  CHECK(report.removed.empty());
  CHECK(report.retained == std::vector<std::string>{"flat"});
  CHECK(filtered.column_count() == 1);
}

TEST_CASE("a Gram-Schmidt-orthogonalized column survives the filter") {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 60;
  std::vector<double> durations(n);
  Eigen::VectorXd dur(n), raw(n);
  for (int i = 0; i < n; ++i) {
    durations[static_cast<size_t>(i)] = 1.0 + 0.2 * i + gauss(rng) * 0.1;
    dur[i] = durations[static_cast<size_t>(i)];
    raw[i] = gauss(rng) + 0.4 * dur[i];
  }
  // Orthogonalize against the centered duration vector.
  const Eigen::VectorXd dc = dur.array() - dur.mean();
  Eigen::VectorXd ortho = raw.array() - raw.mean();
  ortho -= dc * (ortho.dot(dc) / dc.squaredNorm());

  Eigen::MatrixXd values(n, 1);
  values.col(0) = ortho;
  const FeatureMatrix m = make_matrix({"ortho"}, durations, values);
  const auto [filtered, report] = correlation_filter(m);
  CHECK(report.removed.empty());

  // Naive Pearson oracle confirms the construction.
  std::vector<double> a(ortho.data(), ortho.data() + n);
  CHECK(std::abs(testutil::pearson(a, durations)) < 0.05);
}

TEST_CASE("filter is idempotent") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 40, d = 25;
  std::vector<double> durations(n);
  Eigen::MatrixXd values(n, d);
  for (int i = 0; i < n; ++i) {
    durations[static_cast<size_t>(i)] = 1.0 + 0.1 * i;
    for (int j = 0; j < d; ++j)
      values(i, j) = gauss(rng) + (j % 3 == 0 ? 0.3 * i : 0.0);
  }
  std::vector<std::string> columns;
  for (int j = 0; j < d; ++j) columns.push_back("c" + std::to_string(j));
  const FeatureMatrix m = make_matrix(columns, durations, values);

  const auto [once, report1] = correlation_filter(m);
  const auto [twice, report2] = correlation_filter(once);
  CHECK(report2.removed.empty());
  CHECK(twice.column_names == once.column_names);
}

TEST_CASE("filter report partitions the original columns") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 30, d = 12;
  std::vector<double> durations(n);
  Eigen::MatrixXd values(n, d);
  for (int i = 0; i < n; ++i) {
    durations[static_cast<size_t>(i)] = gauss(rng) + 5.0;
    for (int j = 0; j < d; ++j)
      values(i, j) = gauss(rng) + 0.1 * j * durations[static_cast<size_t>(i)];
  }
  std::vector<std::string> columns;
  for (int j = 0; j < d; ++j) columns.push_back("c" + std::to_string(j));
  const auto [filtered, report] =
      correlation_filter(make_matrix(columns, durations, values));
  CHECK(report.retained.size() + report.removed.size() == static_cast<size_t>(d));
  for (const auto &[name, r] : report.removed) {
    CHECK(std::abs(r) > 0.2);
    CHECK(std::find(report.retained.begin(), report.retained.end(), name) ==
          report.retained.end());
  }
}

TEST_CASE("p-value gate keeps weakly supported correlations") {
  CHECK(pearson_p_value(0.0, 50) == doctest::Approx(1.0));
  CHECK(pearson_p_value(0.999999, 50) < 1e-12);
  CHECK(pearson_p_value(0.6, 4) > 0.05);
  CHECK(pearson_p_value(0.6, 400) < 0.05);

  // durations {0..3} against {1,0,3,2} give r = 0.6 exactly: above the
  // magnitude cutoff but nowhere near significant on 4 rows.
  Eigen::MatrixXd values(4, 1);
  values << 1, 0, 3, 2;
  const FeatureMatrix small = make_matrix({"c"}, {0, 1, 2, 3}, values);

  const auto [plain_m, plain] = correlation_filter(small);
  REQUIRE(plain.removed.size() == 1);
  CHECK(plain.removed[0].second == doctest::Approx(0.6));

  CorrelationFilterOptions gated;
  gated.p_gate = true;
  const auto [gated_m, with_gate] = correlation_filter(small, gated);
  CHECK(with_gate.removed.empty());
}

TEST_CASE("filter needs at least 3 rows") {
  Eigen::MatrixXd values(2, 1);
  values << 1, 2;
  const FeatureMatrix m = make_matrix({"a"}, {1.0, 2.0}, values);
  CHECK_THROWS_AS(correlation_filter(m), ValidationError);
}

TEST_CASE("import namespaces columns and validates subjects") {
  const auto dir = testutil::scratch_dir("import");
  DatasetManifest manifest;
  for (int i = 0; i < 10; ++i)
    manifest.records.push_back(
        testutil::subject("s" + std::to_string(i), Group::kAd, 20));

  std::string csv = "subject_id,segment_index,duration_s";
  for (int j = 0; j < 88; ++j) csv += ",f" + std::to_string(j);
  csv += "\n";
  for (int i = 0; i < 10; ++i) {
    csv += "s" + std::to_string(i) + ",0,2.5";
    for (int j = 0; j < 88; ++j) csv += "," + std::to_string(j + i);
    csv += "\n";
  }
  write_text_file(dir / "egemaps.csv", csv);
  const FeatureMatrix m =
      import_external_features(dir / "egemaps.csv", "egemaps", manifest);
  CHECK(m.row_count() == 10);
  CHECK(m.column_count() == 88);
  CHECK(m.column_names[0] == "egemaps.f0");
  CHECK(m.column_names[87] == "egemaps.f87");
  CHECK(m.keys[0].duration_s == doctest::Approx(2.5));
}

TEST_CASE("import with an unknown subject names it in the error") {
  const auto dir = testutil::scratch_dir("import_unknown");
  DatasetManifest manifest;
  manifest.records.push_back(testutil::subject("known", Group::kAd, 20));
  write_text_file(dir / "x.csv",
                  "subject_id,segment_index,duration_s,f0\n"
                  "mystery,0,1.0,3.5\n");
  CHECK_THROWS_WITH_AS(
      import_external_features(dir / "x.csv", "x", manifest),
      doctest::Contains("mystery"), ValidationError);
}

TEST_CASE("header-only import yields an empty matrix") {
  const auto dir = testutil::scratch_dir("import_empty");
  DatasetManifest manifest;
  write_text_file(dir / "x.csv", "subject_id,segment_index,duration_s,f0,f1\n");
  const FeatureMatrix m = import_external_features(dir / "x.csv", "x", manifest);
  CHECK(m.row_count() == 0);
  CHECK(m.column_count() == 2);
}

TEST_CASE("import joins durations from a segment table when absent") {
  const auto dir = testutil::scratch_dir("import_join");
  DatasetManifest manifest;
  manifest.records.push_back(testutil::subject("a", Group::kAd, 20));
  write_text_file(dir / "x.csv", "subject_id,segment_index,f0\na,3,1.5\n");
  std::map<std::pair<std::string, int>, double> durations = {{{"a", 3}, 7.25}};
  const FeatureMatrix m =
      import_external_features(dir / "x.csv", "x", manifest, &durations);
  CHECK(m.keys[0].duration_s == doctest::Approx(7.25));
  CHECK_THROWS_AS(import_external_features(dir / "x.csv", "x", manifest),
                  ValidationError);
}

TEST_CASE("two-point standardization and idempotence") {
  Eigen::MatrixXd train_values(2, 1);
  train_values << 1, 3;
  const FeatureMatrix train = make_matrix({"a"}, {1.0, 1.0}, train_values);

  Eigen::MatrixXd apply_values(1, 1);
  apply_values << 2;  // the training mean
  FeatureMatrixBuilder builder({"a"});
  builder.add_row({"t", 0, 1.0}, apply_values.row(0).transpose());
  const FeatureMatrix apply_to = builder.build();

  const auto [train_z, apply_z] = standardize(train, apply_to);
  CHECK(train_z.values(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(train_z.values(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(apply_z.values(0, 0) == doctest::Approx(0.0));

  // Refitting on standardized data leaves mean 0, sd 1.
  const auto [again, unused] = standardize(train_z, train_z);
  CHECK(again.values.col(0).mean() == doctest::Approx(0.0).epsilon(1e-9));
  const double sd = std::sqrt(
      (again.values.col(0).array() - again.values.col(0).mean()).square().sum());
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero-sd columns pass through unscaled") {
  Eigen::MatrixXd values(3, 2);
  values << 4, 1, 4, 2, 4, 3;
  const FeatureMatrix m = make_matrix({"flat", "varies"}, {1, 1, 1}, values);
  const auto [z, same] = standardize(m, m);
  CHECK(z.values(0, 0) == doctest::Approx(4.0));
  CHECK(z.values(1, 0) == doctest::Approx(4.0));
  CHECK(z.values.col(1).mean() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("feature store round-trips losslessly") {
  const auto dir = testutil::scratch_dir("store");
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  FeatureMatrixBuilder builder({"a", "b", "c"});
  for (int i = 0; i < 25; ++i) {
    Eigen::VectorXd row(3);
    row << dist(rng), dist(rng) * 1e-12, dist(rng) * 1e9;
    builder.add_row({"s" + std::to_string(i / 5), i % 5, dist(rng)}, row);
  }
  const FeatureMatrix m = builder.build();
  save_feature_store(dir / "m.csv", m);
  const FeatureMatrix loaded = load_feature_store(dir / "m.csv");
  REQUIRE(loaded.row_count() == m.row_count());
  CHECK(loaded.column_names == m.column_names);
  for (long i = 0; i < m.row_count(); ++i) {
    CHECK(loaded.keys[static_cast<size_t>(i)].subject_id ==
          m.keys[static_cast<size_t>(i)].subject_id);
    CHECK(loaded.keys[static_cast<size_t>(i)].duration_s ==
          m.keys[static_cast<size_t>(i)].duration_s);
    for (long j = 0; j < m.column_count(); ++j)
      CHECK(loaded.values(i, j) == m.values(i, j));  // bit-exact
  }
}

TEST_CASE("imputer fills non-finite cells with the training median") {
  Eigen::MatrixXd train_values(4, 1);
  train_values << 1.0, 2.0, std::nan(""), 10.0;
  FeatureMatrixBuilder builder({"a"});
  for (int i = 0; i < 4; ++i)
    builder.add_row({"s" + std::to_string(i), 0, 1.0},
                    train_values.row(i).transpose());
  const FeatureMatrix train = builder.build();
  const Imputer imputer = Imputer::fit(train);
  CHECK(imputer.median[0] == doctest::Approx(2.0));
  const FeatureMatrix fixed = imputer.apply(train);
  CHECK(fixed.values(2, 0) == doctest::Approx(2.0));
  CHECK(fixed.values.allFinite());
}

TEST_CASE("duplicate row keys are rejected") {
  FeatureMatrixBuilder builder({"a"});
  Eigen::VectorXd row(1);
  row << 1.0;
  builder.add_row({"s", 0, 1.0}, row);
  CHECK_THROWS_AS(builder.add_row({"s", 0, 2.0}, row), ValidationError);
}
