#include <algorithm>
#include <cmath>

#include "cogspeech/error.hpp"
#include "learners_impl.hpp"

namespace cogspeech::detail {

namespace {

Eigen::MatrixXd sq_exp_kernel(const Eigen::MatrixXd &A, const Eigen::MatrixXd &B,
                              const GprHyperparams &h) {
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * A * B.transpose();
  d2.colwise() += a2;
  d2.rowwise() += b2.transpose();
  const double sf2 = h.signal_sd * h.signal_sd;
  return sf2 * (-d2.cwiseMax(0.0).array() /
                (2.0 * h.length_scale * h.length_scale))
                   .exp();
}

double median_pairwise_distance(const Eigen::MatrixXd &X) {
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(X.rows() * (X.rows() - 1) / 2));
  for (long i = 0; i < X.rows(); ++i)
    for (long j = i + 1; j < X.rows(); ++j)
      dists.push_back((X.row(i) - X.row(j)).norm());
  if (dists.empty()) return 1.0;
  std::sort(dists.begin(), dists.end());
  const double med = dists[dists.size() / 2];
  return med > 0.0 ? med : 1.0;
}

// Negative log marginal likelihood via the Cholesky factor, or +inf when
// the kernel matrix is not positive definite at these hyperparameters.
double nll(const Eigen::MatrixXd &K_noisy, const Eigen::VectorXd &centered,
           Eigen::LLT<Eigen::MatrixXd> &llt, Eigen::VectorXd *alpha_out) {
  llt.compute(K_noisy);
  if (llt.info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = llt.solve(centered);
  double log_det = 0.0;
  const auto &L = llt.matrixLLT();
  for (long i = 0; i < L.rows(); ++i) log_det += std::log(L(i, i));
  if (alpha_out) *alpha_out = alpha;
  return 0.5 * centered.dot(alpha) + log_det +
         0.5 * centered.size() * std::log(2.0 * M_PI);
}

}  // namespace

std::unique_ptr<TrainedModel> fit_gpr(const ModelSpec &spec,
                                      const Eigen::MatrixXd &X,
                                      const Eigen::VectorXd &y) {
  const long n = X.rows();
  auto model = std::make_unique<GprModel>();
  model->train_x = X;
  model->y_mean = y.mean();
  const Eigen::VectorXd centered = y.array() - model->y_mean;

  Eigen::LLT<Eigen::MatrixXd> llt;
  if (spec.gpr_fixed) {
    model->hyper = *spec.gpr_fixed;
    Eigen::MatrixXd K = sq_exp_kernel(X, X, model->hyper);
    K.diagonal().array() += model->hyper.noise_sd * model->hyper.noise_sd;
    Eigen::VectorXd alpha;
    if (!std::isfinite(nll(K, centered, llt, &alpha)))
      throw ValidationError("gpr: kernel not positive definite at the fixed "
                            "hyperparameters");
    model->alpha = alpha;
    return model;
  }

  // Fixed log grid around data scales; ties keep the first combination.
  const double base_l = median_pairwise_distance(X);
  double sd_y = n >= 2 ? std::sqrt((y.array() - model->y_mean).square().sum() /
                                   (n - 1))
                       : 0.0;
  if (sd_y <= 0.0) sd_y = 1.0;
  static const double kLengthGrid[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  static const double kSignalGrid[] = {0.5, 1.0, 2.0};
  static const double kNoiseGrid[] = {0.05, 0.1, 0.2, 0.5};

  double best = std::numeric_limits<double>::infinity();
  for (double lf : kLengthGrid) {
    for (double sf : kSignalGrid) {
      GprHyperparams h;
      h.length_scale = lf * base_l;
      h.signal_sd = sf * sd_y;
      const Eigen::MatrixXd K = sq_exp_kernel(X, X, h);
      for (double nf : kNoiseGrid) {
        h.noise_sd = nf * sd_y;
        Eigen::MatrixXd K_noisy = K;
        K_noisy.diagonal().array() += h.noise_sd * h.noise_sd;
        Eigen::VectorXd alpha;
        const double score = nll(K_noisy, centered, llt, &alpha);
        if (score < best) {
          best = score;
          model->hyper = h;
          model->alpha = alpha;
        }
      }
    }
  }
  if (!std::isfinite(best))
    throw ValidationError("gpr: no grid point gave a positive definite kernel");
  return model;
}

Eigen::VectorXd GprModel::predict_numeric(const Eigen::MatrixXd &X) const {
  return (sq_exp_kernel(X, train_x, hyper) * alpha).array() + y_mean;
}

}  // namespace cogspeech::detail
