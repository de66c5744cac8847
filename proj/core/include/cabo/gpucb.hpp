#pragma once

#include <Eigen/Dense>
#include <deque>
#include <functional>
#include <utility>
#include <vector>

namespace cabo {

struct GpUcbConfig {
  int grid_size = 101;          // equispaced on [0,1], endpoints included
  double length_scale = 0.1;    // squared-exponential kernel
  double signal_variance = 1.0;
  double noise_variance = 0.1;
  int history_capacity = 500;
  double delta = 0.1;           // alpha(t) = 2 log(|grid| t^2 pi^2 / (6 delta))
  // Overrides the schedule above when set. Values clamp at zero.
  std::function<double(int)> alpha_schedule;
};

// Continuous-armed UCB over the decay parameter lambda in [0,1], backed by
// GP regression on a fixed grid so the argmax is exact.
class GpUcbTuner {
 public:
  explicit GpUcbTuner(GpUcbConfig config = {});

  struct Posterior {
    double mean;
    double stddev;
  };

  /// GP posterior at a query point from the noisy history; the prior
  /// (mean 0, stddev sqrt(signal variance)) when the history is empty.
  Posterior posterior(double query) const;

  /// Grid argmax of mean + sqrt(alpha(t)) * stddev, ties toward the lowest
  /// lambda. Deterministic given the history.
  double propose(int t) const;

  /// Append an observation; the oldest entry falls out past capacity.
  void record(double lambda, double reward);

  double alpha(int t) const;
  const std::vector<double>& grid() const noexcept { return grid_; }
  int history_size() const noexcept { return static_cast<int>(history_.size()); }
  const GpUcbConfig& config() const noexcept { return config_; }

 private:
  GpUcbConfig config_;
  std::vector<double> grid_;
  std::deque<std::pair<double, double>> history_;  // (lambda, reward)

  // Factorization of K + sigma_n^2 I, rebuilt lazily after record().
  mutable bool cache_valid_ = false;
  mutable Eigen::MatrixXd chol_;         // lower
  mutable Eigen::VectorXd weights_;      // (K + sigma_n^2 I)^-1 y

  double kernel(double a, double b) const;
  void ensure_cache() const;
};

}  // namespace cabo
