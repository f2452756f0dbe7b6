#pragma once

// Concrete model classes shared between the fit routines and the JSON
// (de)serializer. Not part of the public surface.

#include <functional>
#include <nlohmann/json.hpp>
#include <random>

#include "cogspeech/learners.hpp"

namespace cogspeech::detail {

// ---------------------------------------------------------------------------
// CART

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf payload: class index or mean
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd> &row) const;
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json &j);
};

struct TreeGrowOptions {
  int min_leaf = 20;
  bool classification = false;
  int n_classes = 0;
  int mtry = 0;                    // 0 = consider every feature
  std::mt19937_64 *rng = nullptr;  // required when mtry > 0
};

// Exhaustive threshold search, Gini impurity / variance reduction. A split
// is taken only when both children keep min_leaf rows and the gain is
// positive; ties resolve toward the lower feature index, then the lower
// threshold.
Tree grow_tree(const Eigen::MatrixXd &X, const std::vector<int> &rows,
               const Eigen::VectorXd &y, const TreeGrowOptions &options);

// ---------------------------------------------------------------------------
// SMO core: minimize 1/2 a^T Q a + p^T a  s.t. y^T a = 0, 0 <= a <= C,
// with maximal-violating-pair working set selection.

struct SmoOptions {
  double C = 0.1;
  double tol = 1e-3;
  long max_iter = 1000000;
};

struct SmoResult {
  Eigen::VectorXd alpha;
  double bias = 0.0;  // midpoint of the final violating-pair interval
  bool converged = false;
  long iterations = 0;
  double dual_objective = 0.0;
};

SmoResult smo_solve(const Eigen::VectorXd &y, const Eigen::VectorXd &p,
                    const std::function<Eigen::VectorXd(long)> &q_row,
                    const Eigen::VectorXd &q_diag, const SmoOptions &options);

// ---------------------------------------------------------------------------
// Concrete models

class LdaModel final : public TrainedModel {
 public:
  Eigen::VectorXd weights;
  double bias = 0.0;
  Eigen::VectorXd mean0, mean1;
  double ridge = 0.0;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class TreeModel final : public TrainedModel {  // CART, both tasks
 public:
  Tree tree;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class KnnModel final : public TrainedModel {
 public:
  Eigen::MatrixXd train_x;
  std::vector<int> train_y;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class LinearSvmModel final : public TrainedModel {
 public:
  Eigen::VectorXd weights;
  double bias = 0.0;
  Eigen::VectorXd alpha;  // kept for KKT inspection
  bool converged = false;
  double dual_objective = 0.0;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class ForestModel final : public TrainedModel {
 public:
  std::vector<Tree> trees;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class LinRegModel final : public TrainedModel {
 public:
  Eigen::VectorXd weights;
  double intercept = 0.0;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class GprModel final : public TrainedModel {
 public:
  Eigen::MatrixXd train_x;
  Eigen::VectorXd alpha;  // (K + sn^2 I)^-1 (y - mean)
  double y_mean = 0.0;
  GprHyperparams hyper;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class SvrModel final : public TrainedModel {
 public:
  Eigen::MatrixXd train_x;
  Eigen::VectorXd theta;  // alpha+ - alpha-
  double bias = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  bool converged = false;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

class LsBoostModel final : public TrainedModel {
 public:
  double init = 0.0;
  std::vector<Tree> trees;
  nlohmann::json params_json() const override;

 protected:
  Eigen::VectorXd predict_numeric(const Eigen::MatrixXd &X) const override;
};

Eigen::VectorXd json_to_vector(const nlohmann::json &j);
nlohmann::json vector_to_json(const Eigen::VectorXd &v);
Eigen::MatrixXd json_to_matrix(const nlohmann::json &j);
nlohmann::json matrix_to_json(const Eigen::MatrixXd &m);

}  // namespace cogspeech::detail
