#include "cabo/gpucb.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cabo/errors.hpp"

namespace cabo {

GpUcbTuner::GpUcbTuner(GpUcbConfig config) : config_(config) {
  if (config_.grid_size < 2) throw std::invalid_argument("GpUcbTuner: grid needs >= 2 points");
  if (config_.length_scale <= 0.0 || config_.signal_variance <= 0.0 ||
      config_.noise_variance < 0.0 || config_.history_capacity < 1 || config_.delta <= 0.0) {
    throw std::invalid_argument("GpUcbTuner: bad configuration");
  }
  grid_.resize(static_cast<std::size_t>(config_.grid_size));
  for (int i = 0; i < config_.grid_size; ++i) {
    grid_[static_cast<std::size_t>(i)] = static_cast<double>(i) / (config_.grid_size - 1);
  }
}

double GpUcbTuner::kernel(double a, double b) const {
  const double d = a - b;
  return config_.signal_variance *
         std::exp(-d * d / (2.0 * config_.length_scale * config_.length_scale));
}

GpUcbTuner::Posterior GpUcbTuner::posterior(double query) const {
  if (!(query >= 0.0 && query <= 1.0)) {
    throw std::invalid_argument("GpUcbTuner::posterior: query outside [0,1]");
  }
  if (history_.empty()) {
    return Posterior{0.0, std::sqrt(config_.signal_variance)};
  }
  ensure_cache();
  const Eigen::Index n = static_cast<Eigen::Index>(history_.size());
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i) = kernel(query, history_[static_cast<std::size_t>(i)].first);
  }
  const double mean = k.dot(weights_);
  const Eigen::VectorXd half = chol_.triangularView<Eigen::Lower>().solve(k);
  double var = kernel(query, query) - half.squaredNorm();
  if (var < 0.0) var = 0.0;
  return Posterior{mean, std::sqrt(var)};
}

double GpUcbTuner::alpha(int t) const {
  if (t < 1) throw std::invalid_argument("GpUcbTuner::alpha: t must be >= 1");
  double a;
  if (config_.alpha_schedule) {
    a = config_.alpha_schedule(t);
  } else {
    const double pi = 3.14159265358979323846;
    const double td = static_cast<double>(t);
    a = 2.0 * std::log(config_.grid_size * td * td * pi * pi / (6.0 * config_.delta));
  }
  return std::max(a, 0.0);
}

double GpUcbTuner::propose(int t) const {
  const double bonus = std::sqrt(alpha(t));
  double best_lambda = grid_.front();
  double best_ucb = -std::numeric_limits<double>::infinity();
  for (double lambda : grid_) {
    const Posterior p = posterior(lambda);
    const double ucb = p.mean + bonus * p.stddev;
    if (ucb > best_ucb) {
      best_ucb = ucb;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

void GpUcbTuner::record(double lambda, double reward) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("GpUcbTuner::record: lambda outside [0,1]");
  }
  history_.emplace_back(lambda, reward);
  while (history_.size() > static_cast<std::size_t>(config_.history_capacity)) {
    history_.pop_front();
  }
  cache_valid_ = false;
}

void GpUcbTuner::ensure_cache() const {
  if (cache_valid_) return;
  const Eigen::Index n = static_cast<Eigen::Index>(history_.size());
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [li, ri] = history_[static_cast<std::size_t>(i)];
    y(i) = ri;
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double kij = kernel(li, history_[static_cast<std::size_t>(j)].first);
      gram(i, j) = kij;
      gram(j, i) = kij;
    }
    gram(i, i) += config_.noise_variance;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericError("GpUcbTuner: kernel matrix factorization failed");
  }
  chol_ = llt.matrixL();
  weights_ = llt.solve(y);
  cache_valid_ = true;
}

}  // namespace cabo
