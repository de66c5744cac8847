#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace cabo {

// Conjugate Gaussian linear model with decayed rank-1 updates, the shared
// core for arm models and feature-selector models.
//
// State after a sequence of updates (x_s, r_s, lambda_s):
//   precision P = prod(lambda) * I + sum_s prod_{j>s}(lambda_j) x_s x_s^T
//   response  g = sum_s x_s r_s
//   mean      m = lambda_last * P^-1 g
//
// The mean is scaled by the last decay exactly as the update rule states;
// with decay 1 it is the plain ridge mean. A lower-triangular Cholesky
// factor of P is carried along through rank-1 updates and rebuilt from P
// every kRefactorInterval updates so factor drift stays bounded on long
// decayed runs.
class GaussianLinearEstimator {
 public:
  static constexpr std::uint64_t kRefactorInterval = 1000;

  explicit GaussianLinearEstimator(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return precision_.rows(); }
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }
  const Eigen::VectorXd& response() const noexcept { return response_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }

  /// P <- decay*P + x x^T;  g <- g + r x;  m <- decay * P^-1 g.
  /// decay must lie in (0, 1]; 1 is the arm update, lambda(t) the
  /// feature-selector update.
  void update(const Eigen::Ref<const Eigen::VectorXd>& x, double reward, double decay = 1.0);

  /// Draw from N(mean, v^2 P^-1); v = 0 returns the mean exactly and still
  /// consumes the same number of engine draws. May refresh the internal
  /// factorization if it has decayed numerically.
  Eigen::VectorXd sample(double v, std::mt19937_64& rng);

  /// Plain dot product w^T x with a dimension check.
  static double score(const Eigen::Ref<const Eigen::VectorXd>& w,
                      const Eigen::Ref<const Eigen::VectorXd>& x);

 private:
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd chol_;  // lower triangular, chol * chol^T == precision
  Eigen::VectorXd response_;
  Eigen::VectorXd mean_;
  std::uint64_t updates_since_refactor_ = 0;

  void refactorize();
  void recompute_mean(double decay);
  bool factor_ok() const;
};

}  // namespace cabo
