#include "cogspeech/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cogspeech/error.hpp"
#include "cogspeech/rng.hpp"
#include "learners_impl.hpp"

namespace cogspeech {

using detail::Tree;
using detail::TreeGrowOptions;

bool is_classifier(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLda:
    case ModelKind::kDecisionTree:
    case ModelKind::kNearestNeighbor:
    case ModelKind::kLinearSvm:
    case ModelKind::kRandomForest:
      return true;
    default:
      return false;
  }
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLda: return "lda";
    case ModelKind::kDecisionTree: return "dt";
    case ModelKind::kNearestNeighbor: return "1nn";
    case ModelKind::kLinearSvm: return "svm";
    case ModelKind::kRandomForest: return "rf";
    case ModelKind::kLinearRegression: return "lr";
    case ModelKind::kRegressionTree: return "dt_reg";
    case ModelKind::kGaussianProcess: return "gpr";
    case ModelKind::kRbfSvr: return "svr";
    case ModelKind::kLsBoost: return "lsboost";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_name(const std::string &name) {
  static const std::map<std::string, ModelKind> kNames = {
      {"lda", ModelKind::kLda},          {"dt", ModelKind::kDecisionTree},
      {"1nn", ModelKind::kNearestNeighbor}, {"svm", ModelKind::kLinearSvm},
      {"rf", ModelKind::kRandomForest},  {"lr", ModelKind::kLinearRegression},
      {"dt_reg", ModelKind::kRegressionTree}, {"gpr", ModelKind::kGaussianProcess},
      {"svr", ModelKind::kRbfSvr},       {"lsboost", ModelKind::kLsBoost}};
  const auto it = kNames.find(name);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  return spec;
}

std::map<std::string, std::string> ModelSpec::decision_notes() const {
  switch (kind) {
    case ModelKind::kLda:
      return {{"ridge", "lambda = 1e-4 * trace(S)/d added when S is singular"}};
    case ModelKind::kDecisionTree:
    case ModelKind::kRegressionTree:
      return {{"split_ties", "equal gains resolve to the lower feature index, then the lower threshold"},
              {"leaf_ties", "class ties resolve to the first class in sorted order"}};
    case ModelKind::kNearestNeighbor:
      return {{"distance_ties", "exact distance ties break to the lowest training row index"}};
    case ModelKind::kLinearSvm:
      return {{"solver", "maximal-violating-pair SMO; bias = midpoint of the final KKT interval"}};
    case ModelKind::kRandomForest:
      return {{"mtry", "floor(sqrt(d)) features per split"},
              {"sampling", "bootstrap of n rows per tree"},
              {"vote_ties", "resolve to the first class in sorted order"}};
    case ModelKind::kLinearRegression:
      return {{"solver", "pivoted complete orthogonal decomposition; minimum-norm on rank deficiency"}};
    case ModelKind::kGaussianProcess:
      return {{"grid", "l in median_dist*{0.25,0.5,1,2,4}, sf in sd_y*{0.5,1,2}, sn in sd_y*{0.05,0.1,0.2,0.5}"}};
    case ModelKind::kRbfSvr:
      return {{"epsilon", "0.1 * sd(y)"}, {"gamma", "1/d"}};
    case ModelKind::kLsBoost:
      return {{"init", "mean(y)"}, {"learn_rate", "1.0"}};
  }
  return {};
}

void TrainedModel::check_width(const Eigen::MatrixXd &X) const {
  if (X.cols() != static_cast<long>(columns_.size()))
    throw ValidationError("predict: row width " + std::to_string(X.cols()) +
                          " does not match training width " +
                          std::to_string(columns_.size()));
}

std::vector<std::string> TrainedModel::predict_labels(const Eigen::MatrixXd &X) const {
  if (!classifier())
    throw ValidationError("predict_labels called on a regressor");
  check_width(X);
  const Eigen::VectorXd idx = predict_numeric(X);
  std::vector<std::string> out(static_cast<size_t>(idx.size()));
  for (long i = 0; i < idx.size(); ++i)
    out[static_cast<size_t>(i)] = classes_[static_cast<size_t>(std::lround(idx[i]))];
  return out;
}

Eigen::VectorXd TrainedModel::predict_scores(const Eigen::MatrixXd &X) const {
  if (classifier())
    throw ValidationError("predict_scores called on a classifier");
  check_width(X);
  return predict_numeric(X);
}

std::vector<std::string> TrainedModel::predict_labels(const FeatureMatrix &m) const {
  if (!columns_.empty() && m.column_names != columns_)
    throw ValidationError("predict: feature columns differ from training columns");
  return predict_labels(m.values);
}

Eigen::VectorXd TrainedModel::predict_scores(const FeatureMatrix &m) const {
  if (!columns_.empty() && m.column_names != columns_)
    throw ValidationError("predict: feature columns differ from training columns");
  return predict_scores(m.values);
}

namespace {

void check_training_data(const Eigen::MatrixXd &X) {
  if (X.rows() < 2) throw ValidationError("fit: need at least 2 rows");
  if (!X.allFinite())
    throw ValidationError("fit: non-finite feature value (impute first)");
}

// Sorted unique labels; class index = position.
std::vector<std::string> class_table(const std::vector<std::string> &labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  if (unique.size() < 2)
    throw ValidationError("fit: classification needs exactly 2 classes, got " +
                          std::to_string(unique.size()));
  if (unique.size() > 2)
    throw ValidationError("fit: only binary classification is supported");
  return {unique.begin(), unique.end()};
}

Eigen::VectorXd class_indices(const std::vector<std::string> &labels,
                              const std::vector<std::string> &classes) {
  Eigen::VectorXd y(static_cast<long>(labels.size()));
  for (size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::find(classes.begin(), classes.end(), labels[i]);
    y[static_cast<long>(i)] = static_cast<double>(it - classes.begin());
  }
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// CART

namespace detail {

double Tree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd> &row) const {
  int node = 0;
  while (nodes[static_cast<size_t>(node)].feature >= 0) {
    const TreeNode &n = nodes[static_cast<size_t>(node)];
    node = row[n.feature] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<size_t>(node)].value;
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double gini(const std::vector<long> &counts, long total) {
  double g = 1.0;
  for (long c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

// Best (feature, threshold) over the candidate features, or none.
SplitChoice best_split(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                       const std::vector<int> &rows,
                       const std::vector<int> &features,
                       const TreeGrowOptions &options) {
  const long n = static_cast<long>(rows.size());
  SplitChoice best;
  std::vector<int> order(rows.begin(), rows.end());

  for (int j : features) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return X(a, j) < X(b, j);
    });

    if (options.classification) {
      std::vector<long> left(static_cast<size_t>(options.n_classes), 0);
      std::vector<long> total(static_cast<size_t>(options.n_classes), 0);
      for (int r : order) total[static_cast<size_t>(std::lround(y[r]))] += 1;
      const double parent = gini(total, n);
      std::vector<long> right = total;
      for (long i = 0; i + 1 < n; ++i) {
        const size_t cls = static_cast<size_t>(std::lround(y[order[static_cast<size_t>(i)]]));
        left[cls] += 1;
        right[cls] -= 1;
        const long nl = i + 1, nr = n - nl;
        if (nl < options.min_leaf || nr < options.min_leaf) continue;
        const double lo = X(order[static_cast<size_t>(i)], j);
        const double hi = X(order[static_cast<size_t>(i + 1)], j);
        if (lo >= hi) continue;
        const double gain = parent - (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (gain > best.gain + 1e-12) {
          best = {j, 0.5 * (lo + hi), gain};
        }
      }
    } else {
      double total_sum = 0, total_sq = 0;
      for (int r : order) {
        total_sum += y[r];
        total_sq += y[r] * y[r];
      }
      const double parent_sse = total_sq - total_sum * total_sum / n;
      double lsum = 0, lsq = 0;
      for (long i = 0; i + 1 < n; ++i) {
        const double v = y[order[static_cast<size_t>(i)]];
        lsum += v;
        lsq += v * v;
        const long nl = i + 1, nr = n - nl;
        if (nl < options.min_leaf || nr < options.min_leaf) continue;
        const double lo = X(order[static_cast<size_t>(i)], j);
        const double hi = X(order[static_cast<size_t>(i + 1)], j);
        if (lo >= hi) continue;
        const double rsum = total_sum - lsum, rsq = total_sq - lsq;
        const double sse = (lsq - lsum * lsum / nl) + (rsq - rsum * rsum / nr);
        const double gain = parent_sse - sse;
        if (gain > best.gain + 1e-12) {
          best = {j, 0.5 * (lo + hi), gain};
        }
      }
    }
  }
  return best;
}

double leaf_value(const Eigen::VectorXd &y, const std::vector<int> &rows,
                  const TreeGrowOptions &options) {
  if (options.classification) {
    std::vector<long> counts(static_cast<size_t>(options.n_classes), 0);
    for (int r : rows) counts[static_cast<size_t>(std::lround(y[r]))] += 1;
    int best = 0;
    for (int c = 1; c < options.n_classes; ++c)
      if (counts[static_cast<size_t>(c)] > counts[static_cast<size_t>(best)])
        best = c;  // ties keep the lower class index
    return static_cast<double>(best);
  }
  double sum = 0;
  for (int r : rows) sum += y[r];
  return sum / static_cast<double>(rows.size());
}

int grow_node(Tree &tree, const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
              const std::vector<int> &rows, const TreeGrowOptions &options) {
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  SplitChoice split;
  if (static_cast<long>(rows.size()) >= 2 * options.min_leaf) {
    std::vector<int> features(static_cast<size_t>(X.cols()));
    std::iota(features.begin(), features.end(), 0);
    if (options.mtry > 0 && options.mtry < X.cols()) {
      for (int i = 0; i < options.mtry; ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(X.cols()) - 1);
        std::swap(features[static_cast<size_t>(i)],
                  features[static_cast<size_t>(pick(*options.rng))]);
      }
      features.resize(static_cast<size_t>(options.mtry));
      std::sort(features.begin(), features.end());
    }
    split = best_split(X, y, rows, features, options);
  }

  if (split.feature < 0) {
    tree.nodes[static_cast<size_t>(node_id)].value = leaf_value(y, rows, options);
    return node_id;
  }

  std::vector<int> left_rows, right_rows;
  for (int r : rows)
    (X(r, split.feature) < split.threshold ? left_rows : right_rows).push_back(r);

  tree.nodes[static_cast<size_t>(node_id)].feature = split.feature;
  tree.nodes[static_cast<size_t>(node_id)].threshold = split.threshold;
  const int left = grow_node(tree, X, y, left_rows, options);
  tree.nodes[static_cast<size_t>(node_id)].left = left;
  const int right = grow_node(tree, X, y, right_rows, options);
  tree.nodes[static_cast<size_t>(node_id)].right = right;
  return node_id;
}

}  // namespace

Tree grow_tree(const Eigen::MatrixXd &X, const std::vector<int> &rows,
               const Eigen::VectorXd &y, const TreeGrowOptions &options) {
  if (rows.empty()) throw ValidationError("grow_tree: no rows");
  Tree tree;
  grow_node(tree, X, y, rows, options);
  return tree;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-kind fitting

namespace {

using detail::ForestModel;
using detail::KnnModel;
using detail::LdaModel;
using detail::LinRegModel;
using detail::LsBoostModel;
using detail::TreeModel;

std::unique_ptr<TrainedModel> fit_lda(const Eigen::MatrixXd &X,
                                      const Eigen::VectorXd &y) {
  const long n = X.rows(), d = X.cols();
  long n1 = 0;
  for (long i = 0; i < n; ++i) n1 += y[i] > 0.5 ? 1 : 0;
  const long n0 = n - n1;

  Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(d), mean1 = Eigen::VectorXd::Zero(d);
  for (long i = 0; i < n; ++i)
    (y[i] > 0.5 ? mean1 : mean0) += X.row(i).transpose();
  mean0 /= static_cast<double>(n0);
  mean1 /= static_cast<double>(n1);

  Eigen::MatrixXd centered(n, d);
  for (long i = 0; i < n; ++i)
    centered.row(i) = X.row(i) - (y[i] > 0.5 ? mean1 : mean0).transpose();
  const double nu = std::max<long>(1, n - 2);

  auto model = std::make_unique<LdaModel>();
  const Eigen::VectorXd diff = mean1 - mean0;

  if (d <= n) {
    Eigen::MatrixXd cov = centered.transpose() * centered / nu;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      double lambda = 1e-4 * cov.trace() / static_cast<double>(d);
      if (lambda <= 0.0) lambda = 1e-4;
      model->ridge = lambda;
      cov.diagonal().array() += lambda;
      llt.compute(cov);
      if (llt.info() != Eigen::Success)
        throw ValidationError("lda: covariance not factorizable");
    }
    model->weights = llt.solve(diff);
  } else {
    // d > n: the pooled covariance is singular by construction, so apply
    // the ridge and invert through the n x n Gram matrix (Woodbury).
    double lambda = 1e-4 * centered.squaredNorm() / nu / static_cast<double>(d);
    if (lambda <= 0.0) lambda = 1e-4;
    model->ridge = lambda;
    Eigen::MatrixXd gram = centered * centered.transpose();
    gram.diagonal().array() += nu * lambda;
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw ValidationError("lda: gram matrix not factorizable");
    model->weights =
        (diff - centered.transpose() * llt.solve(centered * diff)) / lambda;
  }

  model->mean0 = mean0;
  model->mean1 = mean1;
  model->bias = -0.5 * (mean0 + mean1).dot(model->weights) +
                std::log(static_cast<double>(n1) / static_cast<double>(n0));
  return model;
}

std::unique_ptr<TrainedModel> fit_tree(const ModelSpec &spec,
                                       const Eigen::MatrixXd &X,
                                       const Eigen::VectorXd &y,
                                       bool classification, int n_classes) {
  TreeGrowOptions options;
  options.min_leaf = spec.leaf_size;
  options.classification = classification;
  options.n_classes = n_classes;
  std::vector<int> rows(static_cast<size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  auto model = std::make_unique<TreeModel>();
  model->tree = detail::grow_tree(X, rows, y, options);
  return model;
}

std::unique_ptr<TrainedModel> fit_knn(const ModelSpec &spec,
                                      const Eigen::MatrixXd &X,
                                      const Eigen::VectorXd &y) {
  if (spec.neighbors < 1) throw ValidationError("1nn: neighbors must be >= 1");
  auto model = std::make_unique<KnnModel>();
  model->train_x = X;
  model->train_y.resize(static_cast<size_t>(y.size()));
  for (long i = 0; i < y.size(); ++i)
    model->train_y[static_cast<size_t>(i)] = static_cast<int>(std::lround(y[i]));
  return model;
}

std::unique_ptr<TrainedModel> fit_forest(const ModelSpec &spec,
                                         const Eigen::MatrixXd &X,
                                         const Eigen::VectorXd &y, int n_classes) {
  auto model = std::make_unique<ForestModel>();
  const long n = X.rows();
  const int mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(
                                    static_cast<double>(X.cols())))));
  std::mt19937_64 master = named_stream(spec.seed, "rf");

  for (int t = 0; t < spec.tree_count; ++t) {
    std::mt19937_64 tree_rng(master());
    std::vector<int> rows(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
      std::uniform_int_distribution<long> pick(0, n - 1);
      rows[static_cast<size_t>(i)] = static_cast<int>(pick(tree_rng));
    }
    TreeGrowOptions options;
    options.min_leaf = spec.leaf_size;
    options.classification = true;
    options.n_classes = n_classes;
    options.mtry = mtry;
    options.rng = &tree_rng;
    model->trees.push_back(detail::grow_tree(X, rows, y, options));
  }
  return model;
}

std::unique_ptr<TrainedModel> fit_linreg(const Eigen::MatrixXd &X,
                                         const Eigen::VectorXd &y) {
  Eigen::MatrixXd design(X.rows(), X.cols() + 1);
  design.leftCols(X.cols()) = X;
  design.col(X.cols()).setOnes();
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd coef = cod.solve(y);
  auto model = std::make_unique<LinRegModel>();
  model->weights = coef.head(X.cols());
  model->intercept = coef[X.cols()];
  return model;
}

std::unique_ptr<TrainedModel> fit_lsboost(const ModelSpec &spec,
                                          const Eigen::MatrixXd &X,
                                          const Eigen::VectorXd &y) {
  auto model = std::make_unique<LsBoostModel>();
  model->init = y.mean();
  Eigen::VectorXd current = Eigen::VectorXd::Constant(y.size(), model->init);
  std::vector<int> rows(static_cast<size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  TreeGrowOptions options;
  options.min_leaf = spec.leaf_size;

  for (int round = 0; round < spec.boost_rounds; ++round) {
    const Eigen::VectorXd residual = y - current;
    Tree tree = detail::grow_tree(X, rows, residual, options);
    for (long i = 0; i < X.rows(); ++i)
      current[i] += spec.learn_rate * tree.predict_row(X.row(i));
    model->trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace

// SVM / SVR / GPR fits live in svm.cpp and gpr.cpp.
namespace detail {
std::unique_ptr<TrainedModel> fit_linear_svm(const ModelSpec &spec,
                                             const Eigen::MatrixXd &X,
                                             const Eigen::VectorXd &y);
std::unique_ptr<TrainedModel> fit_rbf_svr(const ModelSpec &spec,
                                          const Eigen::MatrixXd &X,
                                          const Eigen::VectorXd &y);
std::unique_ptr<TrainedModel> fit_gpr(const ModelSpec &spec,
                                      const Eigen::MatrixXd &X,
                                      const Eigen::VectorXd &y);
}  // namespace detail

std::unique_ptr<TrainedModel> fit_classifier(const ModelSpec &spec,
                                             const Eigen::MatrixXd &X,
                                             const std::vector<std::string> &labels,
                                             const std::vector<std::string> &columns) {
  if (!is_classifier(spec.kind))
    throw ValidationError("fit_classifier: " + model_kind_name(spec.kind) +
                          " is a regressor");
  check_training_data(X);
  if (static_cast<long>(labels.size()) != X.rows())
    throw ValidationError("fit: label count does not match row count");
  const std::vector<std::string> classes = class_table(labels);
  const Eigen::VectorXd y = class_indices(labels, classes);

  std::unique_ptr<TrainedModel> model;
  switch (spec.kind) {
    case ModelKind::kLda: model = fit_lda(X, y); break;
    case ModelKind::kDecisionTree: model = fit_tree(spec, X, y, true, 2); break;
    case ModelKind::kNearestNeighbor: model = fit_knn(spec, X, y); break;
    case ModelKind::kLinearSvm: model = detail::fit_linear_svm(spec, X, y); break;
    case ModelKind::kRandomForest: model = fit_forest(spec, X, y, 2); break;
    default: throw ValidationError("unreachable");
  }
  model->spec_ = spec;
  model->columns_ = columns;
  model->classes_ = classes;
  return model;
}

std::unique_ptr<TrainedModel> fit_regressor(const ModelSpec &spec,
                                            const Eigen::MatrixXd &X,
                                            const Eigen::VectorXd &y,
                                            const std::vector<std::string> &columns) {
  if (is_classifier(spec.kind))
    throw ValidationError("fit_regressor: " + model_kind_name(spec.kind) +
                          " is a classifier");
  check_training_data(X);
  if (y.size() != X.rows())
    throw ValidationError("fit: target count does not match row count");
  if (!y.allFinite()) throw ValidationError("fit: non-finite regression target");

  std::unique_ptr<TrainedModel> model;
  switch (spec.kind) {
    case ModelKind::kLinearRegression: model = fit_linreg(X, y); break;
    case ModelKind::kRegressionTree: model = fit_tree(spec, X, y, false, 0); break;
    case ModelKind::kGaussianProcess: model = detail::fit_gpr(spec, X, y); break;
    case ModelKind::kRbfSvr: model = detail::fit_rbf_svr(spec, X, y); break;
    case ModelKind::kLsBoost: model = fit_lsboost(spec, X, y); break;
    default: throw ValidationError("unreachable");
  }
  model->spec_ = spec;
  model->columns_ = columns;
  return model;
}

std::unique_ptr<TrainedModel> fit_classifier(const ModelSpec &spec,
                                             const FeatureMatrix &m,
                                             const std::vector<std::string> &labels) {
  return fit_classifier(spec, m.values, labels, m.column_names);
}

std::unique_ptr<TrainedModel> fit_regressor(const ModelSpec &spec,
                                            const FeatureMatrix &m,
                                            const Eigen::VectorXd &y) {
  return fit_regressor(spec, m.values, y, m.column_names);
}

// ---------------------------------------------------------------------------
// predict_numeric implementations for the models defined here

namespace detail {

Eigen::VectorXd LdaModel::predict_numeric(const Eigen::MatrixXd &X) const {
  Eigen::VectorXd out(X.rows());
  const Eigen::VectorXd score = (X * weights).array() + bias;
  for (long i = 0; i < X.rows(); ++i) out[i] = score[i] > 0.0 ? 1.0 : 0.0;
  return out;
}

Eigen::VectorXd TreeModel::predict_numeric(const Eigen::MatrixXd &X) const {
  Eigen::VectorXd out(X.rows());
  for (long i = 0; i < X.rows(); ++i) out[i] = tree.predict_row(X.row(i));
  return out;
}

Eigen::VectorXd KnnModel::predict_numeric(const Eigen::MatrixXd &X) const {
  const int k = std::min<int>(spec_.neighbors, static_cast<int>(train_x.rows()));
  Eigen::VectorXd out(X.rows());
  std::vector<std::pair<double, int>> dist(static_cast<size_t>(train_x.rows()));
  for (long i = 0; i < X.rows(); ++i) {
    for (long t = 0; t < train_x.rows(); ++t)
      dist[static_cast<size_t>(t)] = {
          (train_x.row(t) - X.row(i)).squaredNorm(), static_cast<int>(t)};
    // (distance, row index) ordering implements the lowest-index tie break
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    if (k == 1) {
      out[i] = train_y[static_cast<size_t>(dist[0].second)];
      continue;
    }
    std::map<int, int> votes;
    for (int t = 0; t < k; ++t)
      votes[train_y[static_cast<size_t>(dist[static_cast<size_t>(t)].second)]] += 1;
    int best_class = votes.begin()->first, best_votes = votes.begin()->second;
    for (const auto &[cls, count] : votes)
      if (count > best_votes) {
        best_class = cls;
        best_votes = count;
      }
    out[i] = best_class;
  }
  return out;
}

Eigen::VectorXd ForestModel::predict_numeric(const Eigen::MatrixXd &X) const {
  Eigen::VectorXd out(X.rows());
  for (long i = 0; i < X.rows(); ++i) {
    long votes1 = 0;
    for (const auto &tree : trees)
      votes1 += tree.predict_row(X.row(i)) > 0.5 ? 1 : 0;
    const long votes0 = static_cast<long>(trees.size()) - votes1;
    out[i] = votes1 > votes0 ? 1.0 : 0.0;  // ties keep the first class
  }
  return out;
}

Eigen::VectorXd LinRegModel::predict_numeric(const Eigen::MatrixXd &X) const {
  return (X * weights).array() + intercept;
}

Eigen::VectorXd LsBoostModel::predict_numeric(const Eigen::MatrixXd &X) const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), init);
  for (const auto &tree : trees)
    for (long i = 0; i < X.rows(); ++i)
      out[i] += spec_.learn_rate * tree.predict_row(X.row(i));
  return out;
}

}  // namespace detail

}  // namespace cogspeech
