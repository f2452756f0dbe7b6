#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cogspeech/feature_matrix.hpp"

namespace cogspeech {

enum class ModelKind {
  kLda,              // linear discriminant analysis
  kDecisionTree,     // CART classifier
  kNearestNeighbor,  // KNN, K = 1
  kLinearSvm,        // soft margin, SMO solver
  kRandomForest,
  kLinearRegression,
  kRegressionTree,   // CART regressor
  kGaussianProcess,  // squared-exponential kernel
  kRbfSvr,           // epsilon-insensitive, SMO solver
  kLsBoost,          // least-squares boosted regression trees
};

bool is_classifier(ModelKind kind);
std::string model_kind_name(ModelKind kind);
std::optional<ModelKind> model_kind_from_name(const std::string &name);

struct GprHyperparams {
  double length_scale = 1.0;
  double signal_sd = 1.0;
  double noise_sd = 0.1;
};

// Learner description. The defaults are the reference hyperparameters:
// leaf size 20 for all trees, K=1, box constraint 0.1, 50 forest trees,
// 100 boosting rounds at learn rate 1.
struct ModelSpec {
  ModelKind kind = ModelKind::kLda;
  int leaf_size = 20;
  int neighbors = 1;
  double box_constraint = 0.1;
  int tree_count = 50;
  int boost_rounds = 100;
  double learn_rate = 1.0;
  double kkt_tolerance = 1e-3;
  double svr_epsilon_fraction = 0.1;        // epsilon = fraction * sd(y)
  std::optional<GprHyperparams> gpr_fixed;  // skip the grid search when set
  uint64_t seed = 0;

  static ModelSpec defaults(ModelKind kind);

  // Solver choices the reference description leaves unstated, echoed into
  // the run report.
  std::map<std::string, std::string> decision_notes() const;
};

// A fitted, predict-capable model. Immutable and safe to share; predict is
// reentrant. Deterministic given (spec.seed, training data).
class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  const ModelSpec &spec() const { return spec_; }
  const std::vector<std::string> &columns() const { return columns_; }
  const std::vector<std::string> &classes() const { return classes_; }
  bool classifier() const { return is_classifier(spec_.kind); }

  std::vector<std::string> predict_labels(const Eigen::MatrixXd &X) const;
  Eigen::VectorXd predict_scores(const Eigen::MatrixXd &X) const;
  std::vector<std::string> predict_labels(const FeatureMatrix &m) const;
  Eigen::VectorXd predict_scores(const FeatureMatrix &m) const;

  // Kind-specific fitted parameters, serialization-complete.
  virtual nlohmann::json params_json() const = 0;

 protected:
  // Class index per row for classifiers, score for regressors.
  virtual Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const = 0;
  void check_width(const Eigen::MatrixXd &X) const;

  ModelSpec spec_;
  std::vector<std::string> columns_;
  std::vector<std::string> classes_;  // sorted; empty for regressors

  friend std::unique_ptr<TrainedModel> model_from_json(const nlohmann::json &j);
  friend std::unique_ptr<TrainedModel> fit_classifier(
      const ModelSpec &, const Eigen::MatrixXd &,
      const std::vector<std::string> &, const std::vector<std::string> &);
  friend std::unique_ptr<TrainedModel> fit_regressor(
      const ModelSpec &, const Eigen::MatrixXd &, const Eigen::VectorXd &,
      const std::vector<std::string> &);
};

std::unique_ptr<TrainedModel> fit_classifier(const ModelSpec &spec,
                                             const Eigen::MatrixXd &X,
                                             const std::vector<std::string> &labels,
                                             const std::vector<std::string> &columns);
std::unique_ptr<TrainedModel> fit_classifier(const ModelSpec &spec,
                                             const FeatureMatrix &m,
                                             const std::vector<std::string> &labels);
std::unique_ptr<TrainedModel> fit_regressor(const ModelSpec &spec,
                                            const Eigen::MatrixXd &X,
                                            const Eigen::VectorXd &y,
                                            const std::vector<std::string> &columns);
std::unique_ptr<TrainedModel> fit_regressor(const ModelSpec &spec,
                                            const FeatureMatrix &m,
                                            const Eigen::VectorXd &y);

// Self-describing document; round-trips to identical predictions.
nlohmann::json model_to_json(const TrainedModel &model);
std::unique_ptr<TrainedModel> model_from_json(const nlohmann::json &j);

}  // namespace cogspeech
