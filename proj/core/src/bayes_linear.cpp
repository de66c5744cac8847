#include "cabo/bayes_linear.hpp"

#include <cmath>
#include <stdexcept>

#include "cabo/errors.hpp"
#include "cabo/rng.hpp"

namespace cabo {

namespace {

// In-place rank-1 Cholesky update: given lower L with L L^T = A, rewrite L
// so that L L^T = A + w w^T. Givens-style sweep, O(n^2). The positive
// update cannot fail while L has a positive diagonal.
void chol_rank1_update(Eigen::MatrixXd& L, Eigen::VectorXd w) {
  const Eigen::Index n = L.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double ljj = L(j, j);
    const double r = std::hypot(ljj, w(j));
    const double c = r / ljj;
    const double s = w(j) / ljj;
    L(j, j) = r;
    const Eigen::Index tail = n - j - 1;
    if (tail > 0) {
      L.col(j).tail(tail) = (L.col(j).tail(tail) + s * w.tail(tail)) / c;
      w.tail(tail) = c * w.tail(tail) - s * L.col(j).tail(tail);
    }
  }
}

}  // namespace

GaussianLinearEstimator::GaussianLinearEstimator(Eigen::Index dim) {
  if (dim < 1) {
    throw std::invalid_argument("GaussianLinearEstimator: dimension must be >= 1");
  }
  precision_ = Eigen::MatrixXd::Identity(dim, dim);
  chol_ = Eigen::MatrixXd::Identity(dim, dim);
  response_ = Eigen::VectorXd::Zero(dim);
  mean_ = Eigen::VectorXd::Zero(dim);
}

void GaussianLinearEstimator::update(const Eigen::Ref<const Eigen::VectorXd>& x, double reward,
                                     double decay) {
  if (x.size() != dim()) {
    throw std::invalid_argument("GaussianLinearEstimator::update: context dimension mismatch");
  }
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw std::invalid_argument("GaussianLinearEstimator::update: decay must be in (0, 1]");
  }

  if (decay != 1.0) precision_ *= decay;
  precision_.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0);
  precision_.triangularView<Eigen::StrictlyUpper>() =
      precision_.triangularView<Eigen::StrictlyLower>().transpose();
  response_ += reward * x;

  if (++updates_since_refactor_ >= kRefactorInterval) {
    refactorize();
  } else {
    if (decay != 1.0) chol_ *= std::sqrt(decay);
    chol_rank1_update(chol_, x);
    if (!factor_ok()) refactorize();
  }
  recompute_mean(decay);
}

Eigen::VectorXd GaussianLinearEstimator::sample(double v, std::mt19937_64& rng) {
  if (v < 0.0) {
    throw std::invalid_argument("GaussianLinearEstimator::sample: exploration must be >= 0");
  }
  Eigen::VectorXd z(dim());
  fill_standard_normal(rng, z.data(), static_cast<std::size_t>(dim()));

  // Cov = v^2 P^-1 = v^2 (R R^T)^-1, so R^-T z has covariance P^-1.
  Eigen::VectorXd offset =
      chol_.transpose().triangularView<Eigen::Upper>().solve(z);
  if (!offset.allFinite()) {
    refactorize();
    offset = chol_.transpose().triangularView<Eigen::Upper>().solve(z);
    if (!offset.allFinite()) {
      throw NumericError("GaussianLinearEstimator::sample: covariance factorization failed");
    }
  }
  return mean_ + v * offset;
}

double GaussianLinearEstimator::score(const Eigen::Ref<const Eigen::VectorXd>& w,
                                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (w.size() != x.size()) {
    throw std::invalid_argument("GaussianLinearEstimator::score: dimension mismatch");
  }
  return w.dot(x);
}

void GaussianLinearEstimator::refactorize() {
  Eigen::LLT<Eigen::MatrixXd> llt(precision_);
  if (llt.info() != Eigen::Success) {
    // Long decayed runs can erode the precision to numerical rank
    // deficiency (directions no recent update touches decay as lambda^t,
    // down to underflow). Heal with the smallest diagonal bump that gives
    // back a working factorization; escalate a few orders of magnitude
    // before declaring the estimator lost.
    const double scale = std::max(precision_.diagonal().maxCoeff(), 1.0);
    double jitter = scale * 1e-14;
    for (int attempt = 0; attempt < 5 && llt.info() != Eigen::Success; ++attempt) {
      precision_.diagonal().array() += jitter;
      llt.compute(precision_);
      jitter *= 1e3;
    }
    if (llt.info() != Eigen::Success) {
      throw NumericError("GaussianLinearEstimator: precision lost positive-definiteness");
    }
  }
  chol_ = llt.matrixL();
  updates_since_refactor_ = 0;
}

void GaussianLinearEstimator::recompute_mean(double decay) {
  Eigen::VectorXd y = chol_.triangularView<Eigen::Lower>().solve(response_);
  mean_ = decay * chol_.transpose().triangularView<Eigen::Upper>().solve(y);
  if (!mean_.allFinite()) {
    refactorize();
    y = chol_.triangularView<Eigen::Lower>().solve(response_);
    mean_ = decay * chol_.transpose().triangularView<Eigen::Upper>().solve(y);
    if (!mean_.allFinite()) {
      throw NumericError("GaussianLinearEstimator: posterior mean diverged");
    }
  }
}

bool GaussianLinearEstimator::factor_ok() const {
  // Underflow or NaN from the rank-1 sweep always lands on the diagonal.
  const double min_diag = chol_.diagonal().minCoeff();
  const double max_diag = chol_.diagonal().maxCoeff();
  return min_diag > 0.0 && std::isfinite(max_diag);
}

}  // namespace cabo
