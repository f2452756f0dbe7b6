#include <cmath>

#include "cogspeech/error.hpp"
#include "learners_impl.hpp"

namespace cogspeech::detail {

// Maximal-violating-pair SMO. The pair (i from I_up, j from I_low) with the
// widest KKT gap is optimized analytically along the feasible direction
// (y_i, -y_j); the gradient is maintained incrementally from the two Q rows
// touched per step. Terminates when the gap closes to tol.
SmoResult smo_solve(const Eigen::VectorXd &y, const Eigen::VectorXd &p,
                    const std::function<Eigen::VectorXd(long)> &q_row,
                    const Eigen::VectorXd &q_diag, const SmoOptions &options) {
  const long n = y.size();
  SmoResult result;
  result.alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = p;  // gradient of the dual at alpha = 0

  auto select_pair = [&](long &i, long &j, double &m, double &M) {
    i = j = -1;
    m = -std::numeric_limits<double>::infinity();
    M = std::numeric_limits<double>::infinity();
    for (long t = 0; t < n; ++t) {
      const double v = -y[t] * g[t];
      const bool up = y[t] > 0 ? result.alpha[t] < options.C : result.alpha[t] > 0;
      const bool low = y[t] > 0 ? result.alpha[t] > 0 : result.alpha[t] < options.C;
      if (up && v > m) {
        m = v;
        i = t;
      }
      if (low && v < M) {
        M = v;
        j = t;
      }
    }
  };

  long i = 0, j = 0;
  double m = 0, M = 0;
  for (result.iterations = 0; result.iterations < options.max_iter;
       ++result.iterations) {
    select_pair(i, j, m, M);
    if (i < 0 || j < 0 || m - M <= options.tol) {
      result.converged = true;
      break;
    }

    const Eigen::VectorXd qi = q_row(i);
    const Eigen::VectorXd qj = q_row(j);
    double quad = q_diag[i] + q_diag[j] - 2.0 * y[i] * y[j] * qi[j];
    if (quad <= 0.0) quad = 1e-12;

    double delta = (m - M) / quad;
    // Box limits along the direction alpha_i += y_i d, alpha_j -= y_j d.
    const double cap_i = y[i] > 0 ? options.C - result.alpha[i] : result.alpha[i];
    const double cap_j = y[j] > 0 ? result.alpha[j] : options.C - result.alpha[j];
    delta = std::min(delta, std::min(cap_i, cap_j));
    if (delta <= 0.0) break;  // numerically stuck at a box corner

    result.alpha[i] += y[i] * delta;
    result.alpha[j] -= y[j] * delta;
    g += delta * (y[i] * qi - y[j] * qj);
  }

  select_pair(i, j, m, M);
  if (std::isfinite(m) && std::isfinite(M))
    result.bias = 0.5 * (m + M);
  result.dual_objective = 0.5 * result.alpha.dot(g + p);
  return result;
}

std::unique_ptr<TrainedModel> fit_linear_svm(const ModelSpec &spec,
                                             const Eigen::MatrixXd &X,
                                             const Eigen::VectorXd &class_idx) {
  const long n = X.rows();
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) y[i] = class_idx[i] > 0.5 ? -1.0 : 1.0;  // class 0 = +1

  const Eigen::VectorXd p = Eigen::VectorXd::Constant(n, -1.0);
  Eigen::VectorXd q_diag(n);
  for (long i = 0; i < n; ++i) q_diag[i] = X.row(i).squaredNorm();
  auto q_row = [&X, &y](long t) -> Eigen::VectorXd {
    return y[t] * (X * X.row(t).transpose()).cwiseProduct(y);
  };

  SmoOptions options;
  options.C = spec.box_constraint;
  options.tol = spec.kkt_tolerance;
  const SmoResult result = smo_solve(y, p, q_row, q_diag, options);

  auto model = std::make_unique<LinearSvmModel>();
  model->weights = X.transpose() * result.alpha.cwiseProduct(y);
  model->bias = result.bias;
  model->alpha = result.alpha;
  model->converged = result.converged;
  model->dual_objective = result.dual_objective;
  return model;
}

Eigen::VectorXd LinearSvmModel::predict_numeric(const Eigen::MatrixXd &X) const {
  const Eigen::VectorXd f = (X * weights).array() + bias;
  Eigen::VectorXd out(X.rows());
  for (long i = 0; i < X.rows(); ++i) out[i] = f[i] >= 0.0 ? 0.0 : 1.0;
  return out;
}

namespace {

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd &A, const Eigen::MatrixXd &B,
                           double gamma) {
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * A * B.transpose();
  d2.colwise() += a2;
  d2.rowwise() += b2.transpose();
  return (-gamma * d2.cwiseMax(0.0).array()).exp();
}

}  // namespace

std::unique_ptr<TrainedModel> fit_rbf_svr(const ModelSpec &spec,
                                          const Eigen::MatrixXd &X,
                                          const Eigen::VectorXd &y) {
  const long n = X.rows();
  const double gamma = 1.0 / static_cast<double>(X.cols());
  double sd = 0.0;
  const double mean = y.mean();
  if (n >= 2) sd = std::sqrt((y.array() - mean).square().sum() / (n - 1));
  const double epsilon = spec.svr_epsilon_fraction * sd;

  const Eigen::MatrixXd K = rbf_kernel(X, X, gamma);

  // 2n-variable encoding: t < n carries alpha+, t >= n alpha-; the shared
  // SMO core sees labels +/-1 and the linear term epsilon -/+ y.
  Eigen::VectorXd yy(2 * n), p(2 * n), q_diag(2 * n);
  for (long t = 0; t < n; ++t) {
    yy[t] = 1.0;
    yy[n + t] = -1.0;
    p[t] = epsilon - y[t];
    p[n + t] = epsilon + y[t];
    q_diag[t] = K(t, t);
    q_diag[n + t] = K(t, t);
  }
  auto q_row = [&K, &yy, n](long t) -> Eigen::VectorXd {
    Eigen::VectorXd row(2 * n);
    const Eigen::VectorXd k = K.row(t % n);
    row.head(n) = yy[t] * k;
    row.tail(n) = -yy[t] * k;
    return row;
  };

  SmoOptions options;
  options.C = spec.box_constraint;
  options.tol = spec.kkt_tolerance;
  const SmoResult result = smo_solve(yy, p, q_row, q_diag, options);

  auto model = std::make_unique<SvrModel>();
  model->train_x = X;
  model->theta = result.alpha.head(n) - result.alpha.tail(n);
  model->bias = result.bias;
  model->gamma = gamma;
  model->epsilon = epsilon;
  model->converged = result.converged;
  return model;
}

Eigen::VectorXd SvrModel::predict_numeric(const Eigen::MatrixXd &X) const {
  return (rbf_kernel(X, train_x, gamma) * theta).array() + bias;
}

}  // namespace cogspeech::detail
