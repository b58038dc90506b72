#pragma once

#include <Eigen/Core>

#include <vector>

#include "oskm/kernel.hpp"

namespace oskm {

// Baseline online kernel machine: stochastic gradient descent on the
// regularized hinge risk. Every update scales all coefficients by
// (1 - eta*lambda); a violated margin appends a support with coefficient
// eta*y. Truncation drops the oldest support once the budget is exceeded.
class Norma {
 public:
  Norma(KernelSpec spec, double lambda, double eta, int budget);

  // f(x) = sum_i coefficients(i) k(supports(i), x); 0 for the empty state.
  double predict(const Eigen::VectorXd& x) const;

  // Returns true when the margin was violated and a support was added.
  bool update(const Eigen::VectorXd& x, int y_noisy);

  int n_supports() const { return static_cast<int>(coeffs_.size()); }
  double coefficient(int i) const { return coeffs_[static_cast<size_t>(i)]; }
  const Eigen::VectorXd& support(int i) const { return supports_[static_cast<size_t>(i)]; }
  int support_label(int i) const { return labels_[static_cast<size_t>(i)]; }

 private:
  KernelSpec spec_;
  double lambda_;
  double eta_;
  int budget_;
  std::vector<Eigen::VectorXd> supports_;
  std::vector<int> labels_;
  std::vector<double> coeffs_;
};

}  // namespace oskm
