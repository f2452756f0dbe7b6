#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "cogspeech/error.hpp"
#include "cogspeech/learners.hpp"

using namespace cogspeech;

namespace {

const std::vector<std::string> kColumns2 = {"x0", "x1"};

// Two well-separated Gaussian blobs, 50 rows per class.
void make_blobs(Eigen::MatrixXd &X, std::vector<std::string> &labels,
                uint64_t seed = 2024, double separation = 10.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  X.resize(100, 2);
  labels.clear();
  for (int i = 0; i < 100; ++i) {
    const bool positive = i < 50;
    X(i, 0) = gauss(rng) + (positive ? separation : 0.0);
    X(i, 1) = gauss(rng);
    labels.push_back(positive ? "AD" : "nonAD");
  }
}

double training_accuracy(const TrainedModel &model, const Eigen::MatrixXd &X,
                         const std::vector<std::string> &labels) {
  const std::vector<std::string> predicted = model.predict_labels(X);
  long correct = 0;
  for (size_t i = 0; i < labels.size(); ++i)
    if (predicted[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace

TEST_CASE("hyperparameter defaults match the reference values") {
  CHECK(ModelSpec::defaults(ModelKind::kDecisionTree).leaf_size == 20);
  CHECK(ModelSpec::defaults(ModelKind::kNearestNeighbor).neighbors == 1);
  CHECK(ModelSpec::defaults(ModelKind::kLinearSvm).box_constraint ==
        doctest::Approx(0.1));
  CHECK(ModelSpec::defaults(ModelKind::kRandomForest).tree_count == 50);
  CHECK(ModelSpec::defaults(ModelKind::kRandomForest).leaf_size == 20);
  CHECK(ModelSpec::defaults(ModelKind::kLsBoost).boost_rounds == 100);
  CHECK(ModelSpec::defaults(ModelKind::kLsBoost).learn_rate == doctest::Approx(1.0));
  CHECK(ModelSpec::defaults(ModelKind::kRbfSvr).box_constraint == doctest::Approx(0.1));
  CHECK(ModelSpec::defaults(ModelKind::kLinearSvm).kkt_tolerance ==
        doctest::Approx(1e-3));
}

TEST_CASE("all five classifiers separate distant blobs perfectly") {
  Eigen::MatrixXd X;
  std::vector<std::string> labels;
  make_blobs(X, labels);
  for (ModelKind kind : {ModelKind::kLda, ModelKind::kDecisionTree,
                         ModelKind::kNearestNeighbor, ModelKind::kLinearSvm,
                         ModelKind::kRandomForest}) {
    const auto model = fit_classifier(ModelSpec::defaults(kind), X, labels, kColumns2);
    CHECK(training_accuracy(*model, X, labels) == doctest::Approx(1.0));
  }
}

TEST_CASE("antisymmetric pair puts the SVM boundary at zero") {
  Eigen::MatrixXd X(2, 1);
  X << -1.0, 1.0;
  const std::vector<std::string> labels = {"neg", "pos"};
  const auto model = fit_classifier(ModelSpec::defaults(ModelKind::kLinearSvm), X,
                                    labels, {"x"});
  const nlohmann::json params = model->params_json();
  CHECK(std::abs(params.at("bias").get<double>()) < 1e-9);
  // Points on either side of zero classify by sign.
  Eigen::MatrixXd probe(2, 1);
  probe << -0.01, 0.01;
  const auto out = model->predict_labels(probe);
  CHECK(out[0] == "neg");
  CHECK(out[1] == "pos");
}

TEST_CASE("15-row regression tree collapses to the mean leaf") {
  Eigen::MatrixXd X(15, 1);
  Eigen::VectorXd y(15);
  for (int i = 0; i < 15; ++i) {
    X(i, 0) = i;
    y[i] = 2.0 * i + 1.0;
  }
  const auto model =
      fit_regressor(ModelSpec::defaults(ModelKind::kRegressionTree), X, y, {"x"});
  const Eigen::VectorXd predictions = model->predict_scores(X);
  for (int i = 0; i < 15; ++i)
    CHECK(predictions[i] == doctest::Approx(y.mean()));
}

TEST_CASE("1nn predicts its own training rows exactly") {
  Eigen::MatrixXd X;
  std::vector<std::string> labels;
  make_blobs(X, labels, 7, 2.0);  // overlapping blobs; memorization still exact
  const auto model = fit_classifier(ModelSpec::defaults(ModelKind::kNearestNeighbor),
                                    X, labels, kColumns2);
  CHECK(training_accuracy(*model, X, labels) == doctest::Approx(1.0));
}

TEST_CASE("noiseless GPR interpolates its training targets") {
  Eigen::MatrixXd X(6, 1);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = i;
    y[i] = std::sin(0.8 * i);
  }
  ModelSpec spec = ModelSpec::defaults(ModelKind::kGaussianProcess);
  spec.gpr_fixed = GprHyperparams{1.0, 1.0, 1e-6};
  const auto model = fit_regressor(spec, X, y, {"x"});
  const Eigen::VectorXd predictions = model->predict_scores(X);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(predictions[i] - y[i]) < 1e-6);
}

TEST_CASE("svr tracks a smooth function within its epsilon tube") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(40, 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = gauss(rng);
    y[i] = std::sin(X(i, 0));
  }
  // A permissive box constraint isolates the tube property from the heavy
  // C = 0.1 regularization.
  ModelSpec spec = ModelSpec::defaults(ModelKind::kRbfSvr);
  spec.box_constraint = 10.0;
  const auto model = fit_regressor(spec, X, y, {"x"});
  const Eigen::VectorXd predictions = model->predict_scores(X);
  const double sd = std::sqrt((y.array() - y.mean()).square().sum() / 39.0);
  const double epsilon = 0.1 * sd;
  for (int i = 0; i < 40; ++i)
    CHECK(std::abs(predictions[i] - y[i]) < epsilon + 0.05);
}

TEST_CASE("svr at the default box constraint still beats the constant mean") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(50, 1);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    X(i, 0) = gauss(rng);
    y[i] = 2.0 * X(i, 0);
  }
  const auto model = fit_regressor(ModelSpec::defaults(ModelKind::kRbfSvr), X, y, {"x"});
  const Eigen::VectorXd predictions = model->predict_scores(X);
  const double fit_sse = (predictions - y).squaredNorm();
  const double mean_sse = (y.array() - y.mean()).matrix().squaredNorm();
  CHECK(fit_sse < mean_sse);
}

TEST_CASE("regression fits reject non-finite targets") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 1.0, std::nan(""), 2.0;
  CHECK_THROWS_AS(
      fit_regressor(ModelSpec::defaults(ModelKind::kLinearRegression), X, y, {"x"}),
      ValidationError);
}

TEST_CASE("classification fits reject single-class input") {
  Eigen::MatrixXd X(4, 1);
  X << 1, 2, 3, 4;
  const std::vector<std::string> labels(4, "AD");
  CHECK_THROWS_AS(
      fit_classifier(ModelSpec::defaults(ModelKind::kLda), X, labels, {"x"}),
      ValidationError);
}

TEST_CASE("predict enforces column compatibility") {
  Eigen::MatrixXd X;
  std::vector<std::string> labels;
  make_blobs(X, labels);
  const auto model =
      fit_classifier(ModelSpec::defaults(ModelKind::kLda), X, labels, kColumns2);
  Eigen::MatrixXd wrong(1, 3);
  wrong << 1, 2, 3;
  CHECK_THROWS_AS(model->predict_labels(wrong), ValidationError);
}

TEST_CASE("forest and boosting are bit-reproducible under a fixed seed") {
  Eigen::MatrixXd X;
  std::vector<std::string> labels;
  make_blobs(X, labels, 99, 3.0);
  ModelSpec rf = ModelSpec::defaults(ModelKind::kRandomForest);
  rf.seed = 123;
  const auto a = fit_classifier(rf, X, labels, kColumns2);
  const auto b = fit_classifier(rf, X, labels, kColumns2);
  CHECK(a->params_json() == b->params_json());

  rf.seed = 124;
  const auto c = fit_classifier(rf, X, labels, kColumns2);
  CHECK(a->params_json() != c->params_json());

  Eigen::VectorXd y(100);
  for (int i = 0; i < 100; ++i) y[i] = X(i, 0) + 0.5 * X(i, 1);
  ModelSpec boost = ModelSpec::defaults(ModelKind::kLsBoost);
  boost.seed = 5;
  const auto r1 = fit_regressor(boost, X, y, kColumns2);
  const auto r2 = fit_regressor(boost, X, y, kColumns2);
  CHECK(r1->params_json() == r2->params_json());
}

TEST_CASE("lda decisions survive uniform affine rescaling") {
  Eigen::MatrixXd X;
  std::vector<std::string> labels;
  make_blobs(X, labels, 31, 1.5);  // overlapping: nontrivial boundary
  Eigen::MatrixXd probe(40, 2);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.75, 2.0);
  for (int i = 0; i < 40; ++i) {
    probe(i, 0) = gauss(rng);
    probe(i, 1) = gauss(rng);
  }

  const auto base =
      fit_classifier(ModelSpec::defaults(ModelKind::kLda), X, labels, kColumns2);
  const std::vector<std::string> base_out = base->predict_labels(probe);

  const double a = 37.5;
  const Eigen::RowVector2d shift(-4.0, 11.0);
  Eigen::MatrixXd X2 = (X * a).rowwise() + shift;
  Eigen::MatrixXd probe2 = (probe * a).rowwise() + shift;
  const auto scaled =
      fit_classifier(ModelSpec::defaults(ModelKind::kLda), X2, labels, kColumns2);
  CHECK(scaled->predict_labels(probe2) == base_out);
}

TEST_CASE("every model kind round-trips through json to equal predictions") {
  std::mt19937_64 rng(246);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(60, 3);
  std::vector<std::string> labels;
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = gauss(rng);
    const bool positive = X(i, 0) + 0.2 * gauss(rng) > 0;
    labels.push_back(positive ? "AD" : "nonAD");
    y[i] = 3.0 * X(i, 0) - X(i, 1) + 0.1 * gauss(rng);
  }
  Eigen::MatrixXd probe(20, 3);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) probe(i, j) = gauss(rng);
  const std::vector<std::string> columns = {"a", "b", "c"};

  for (ModelKind kind : {ModelKind::kLda, ModelKind::kDecisionTree,
                         ModelKind::kNearestNeighbor, ModelKind::kLinearSvm,
                         ModelKind::kRandomForest}) {
    ModelSpec spec = ModelSpec::defaults(kind);
    spec.seed = 11;
    const auto model = fit_classifier(spec, X, labels, columns);
    const auto restored = model_from_json(model_to_json(*model));
    CHECK(restored->predict_labels(probe) == model->predict_labels(probe));
  }
  for (ModelKind kind : {ModelKind::kLinearRegression, ModelKind::kRegressionTree,
                         ModelKind::kGaussianProcess, ModelKind::kRbfSvr,
                         ModelKind::kLsBoost}) {
    ModelSpec spec = ModelSpec::defaults(kind);
    spec.seed = 11;
    const auto model = fit_regressor(spec, X, y, columns);
    const auto restored = model_from_json(model_to_json(*model));
    const Eigen::VectorXd a = model->predict_scores(probe);
    const Eigen::VectorXd b = restored->predict_scores(probe);
    for (int i = 0; i < 20; ++i) CHECK(a[i] == b[i]);  // bit-exact
  }
}

TEST_CASE("model kind names round-trip") {
  for (ModelKind kind : {ModelKind::kLda, ModelKind::kDecisionTree,
                         ModelKind::kNearestNeighbor, ModelKind::kLinearSvm,
                         ModelKind::kRandomForest, ModelKind::kLinearRegression,
                         ModelKind::kRegressionTree, ModelKind::kGaussianProcess,
                         ModelKind::kRbfSvr, ModelKind::kLsBoost})
    CHECK(model_kind_from_name(model_kind_name(kind)) == kind);
  CHECK_FALSE(model_kind_from_name("perceptron").has_value());
}
