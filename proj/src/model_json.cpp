#include <nlohmann/json.hpp>

#include "cogspeech/error.hpp"
#include "learners_impl.hpp"

namespace cogspeech {

using nlohmann::json;

namespace detail {

json vector_to_json(const Eigen::VectorXd &v) {
  json j = json::array();
  for (long i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Eigen::VectorXd json_to_vector(const json &j) {
  Eigen::VectorXd v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v[i] = j[static_cast<size_t>(i)].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i)
    rows.push_back(vector_to_json(m.row(i).transpose()));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd json_to_matrix(const json &j) {
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i)
    m.row(i) = json_to_vector(j.at("data")[static_cast<size_t>(i)]).transpose();
  return m;
}

json Tree::to_json() const {
  json out = json::array();
  for (const auto &n : nodes)
    out.push_back(json{{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value}});
  return out;
}

Tree Tree::from_json(const json &j) {
  Tree tree;
  for (const auto &n : j) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<double>();
    tree.nodes.push_back(node);
  }
  return tree;
}

json LdaModel::params_json() const {
  return json{{"weights", vector_to_json(weights)},
              {"bias", bias},
              {"mean0", vector_to_json(mean0)},
              {"mean1", vector_to_json(mean1)},
              {"ridge", ridge}};
}

json TreeModel::params_json() const { return json{{"tree", tree.to_json()}}; }

json KnnModel::params_json() const {
  return json{{"train_x", matrix_to_json(train_x)}, {"train_y", train_y}};
}

json LinearSvmModel::params_json() const {
  return json{{"weights", vector_to_json(weights)},
              {"bias", bias},
              {"alpha", vector_to_json(alpha)},
              {"converged", converged},
              {"dual_objective", dual_objective}};
}

json ForestModel::params_json() const {
  json trees_json = json::array();
  for (const auto &tree : trees) trees_json.push_back(tree.to_json());
  return json{{"trees", trees_json}};
}

json LinRegModel::params_json() const {
  return json{{"weights", vector_to_json(weights)}, {"intercept", intercept}};
}

json GprModel::params_json() const {
  return json{{"train_x", matrix_to_json(train_x)},
              {"alpha", vector_to_json(alpha)},
              {"y_mean", y_mean},
              {"length_scale", hyper.length_scale},
              {"signal_sd", hyper.signal_sd},
              {"noise_sd", hyper.noise_sd}};
}

json SvrModel::params_json() const {
  return json{{"train_x", matrix_to_json(train_x)},
              {"theta", vector_to_json(theta)},
              {"bias", bias},
              {"gamma", gamma},
              {"epsilon", epsilon},
              {"converged", converged}};
}

json LsBoostModel::params_json() const {
  json trees_json = json::array();
  for (const auto &tree : trees) trees_json.push_back(tree.to_json());
  return json{{"init", init}, {"trees", trees_json}};
}

}  // namespace detail

namespace {

json spec_to_json(const ModelSpec &spec) {
  json j{{"leaf_size", spec.leaf_size},
         {"neighbors", spec.neighbors},
         {"box_constraint", spec.box_constraint},
         {"tree_count", spec.tree_count},
         {"boost_rounds", spec.boost_rounds},
         {"learn_rate", spec.learn_rate},
         {"kkt_tolerance", spec.kkt_tolerance},
         {"svr_epsilon_fraction", spec.svr_epsilon_fraction},
         {"seed", spec.seed}};
  if (spec.gpr_fixed)
    j["gpr_fixed"] = json{{"length_scale", spec.gpr_fixed->length_scale},
                          {"signal_sd", spec.gpr_fixed->signal_sd},
                          {"noise_sd", spec.gpr_fixed->noise_sd}};
  return j;
}

ModelSpec spec_from_json(ModelKind kind, const json &j) {
  ModelSpec spec;
  spec.kind = kind;
  spec.leaf_size = j.at("leaf_size").get<int>();
  spec.neighbors = j.at("neighbors").get<int>();
  spec.box_constraint = j.at("box_constraint").get<double>();
  spec.tree_count = j.at("tree_count").get<int>();
  spec.boost_rounds = j.at("boost_rounds").get<int>();
  spec.learn_rate = j.at("learn_rate").get<double>();
  spec.kkt_tolerance = j.at("kkt_tolerance").get<double>();
  spec.svr_epsilon_fraction = j.at("svr_epsilon_fraction").get<double>();
  spec.seed = j.at("seed").get<uint64_t>();
  if (j.contains("gpr_fixed")) {
    GprHyperparams h;
    h.length_scale = j["gpr_fixed"].at("length_scale").get<double>();
    h.signal_sd = j["gpr_fixed"].at("signal_sd").get<double>();
    h.noise_sd = j["gpr_fixed"].at("noise_sd").get<double>();
    spec.gpr_fixed = h;
  }
  return spec;
}

}  // namespace

json model_to_json(const TrainedModel &model) {
  return json{{"kind", model_kind_name(model.spec().kind)},
              {"spec", spec_to_json(model.spec())},
              {"columns", model.columns()},
              {"classes", model.classes()},
              {"decisions", model.spec().decision_notes()},
              {"params", model.params_json()}};
}

std::unique_ptr<TrainedModel> model_from_json(const json &j) {
  const auto kind = model_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw ParseError("model document: unknown kind");
  const json &params = j.at("params");

  std::unique_ptr<TrainedModel> model;
  using namespace detail;
  switch (*kind) {
    case ModelKind::kLda: {
      auto m = std::make_unique<LdaModel>();
      m->weights = json_to_vector(params.at("weights"));
      m->bias = params.at("bias").get<double>();
      m->mean0 = json_to_vector(params.at("mean0"));
      m->mean1 = json_to_vector(params.at("mean1"));
      m->ridge = params.at("ridge").get<double>();
      model = std::move(m);
      break;
    }
    case ModelKind::kDecisionTree:
    case ModelKind::kRegressionTree: {
      auto m = std::make_unique<TreeModel>();
      m->tree = Tree::from_json(params.at("tree"));
      model = std::move(m);
      break;
    }
    case ModelKind::kNearestNeighbor: {
      auto m = std::make_unique<KnnModel>();
      m->train_x = json_to_matrix(params.at("train_x"));
      m->train_y = params.at("train_y").get<std::vector<int>>();
      model = std::move(m);
      break;
    }
    case ModelKind::kLinearSvm: {
      auto m = std::make_unique<LinearSvmModel>();
      m->weights = json_to_vector(params.at("weights"));
      m->bias = params.at("bias").get<double>();
      m->alpha = json_to_vector(params.at("alpha"));
      m->converged = params.at("converged").get<bool>();
      m->dual_objective = params.at("dual_objective").get<double>();
      model = std::move(m);
      break;
    }
    case ModelKind::kRandomForest: {
      auto m = std::make_unique<ForestModel>();
      for (const auto &tree : params.at("trees"))
        m->trees.push_back(Tree::from_json(tree));
      model = std::move(m);
      break;
    }
    case ModelKind::kLinearRegression: {
      auto m = std::make_unique<LinRegModel>();
      m->weights = json_to_vector(params.at("weights"));
      m->intercept = params.at("intercept").get<double>();
      model = std::move(m);
      break;
    }
    case ModelKind::kGaussianProcess: {
      auto m = std::make_unique<GprModel>();
      m->train_x = json_to_matrix(params.at("train_x"));
      m->alpha = json_to_vector(params.at("alpha"));
      m->y_mean = params.at("y_mean").get<double>();
      m->hyper.length_scale = params.at("length_scale").get<double>();
      m->hyper.signal_sd = params.at("signal_sd").get<double>();
      m->hyper.noise_sd = params.at("noise_sd").get<double>();
      model = std::move(m);
      break;
    }
    case ModelKind::kRbfSvr: {
      auto m = std::make_unique<SvrModel>();
      m->train_x = json_to_matrix(params.at("train_x"));
      m->theta = json_to_vector(params.at("theta"));
      m->bias = params.at("bias").get<double>();
      m->gamma = params.at("gamma").get<double>();
      m->epsilon = params.at("epsilon").get<double>();
      m->converged = params.at("converged").get<bool>();
      model = std::move(m);
      break;
    }
    case ModelKind::kLsBoost: {
      auto m = std::make_unique<LsBoostModel>();
      m->init = params.at("init").get<double>();
      for (const auto &tree : params.at("trees"))
        m->trees.push_back(Tree::from_json(tree));
      model = std::move(m);
      break;
    }
  }
  model->spec_ = spec_from_json(*kind, j.at("spec"));
  model->columns_ = j.at("columns").get<std::vector<std::string>>();
  model->classes_ = j.at("classes").get<std::vector<std::string>>();
  return model;
}

}  // namespace cogspeech
