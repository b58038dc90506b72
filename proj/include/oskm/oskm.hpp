#pragma once

#include <Eigen/Core>

#include <stdexcept>

#include "oskm/kernel.hpp"

namespace oskm {

// Raised when coefficients blow up; the run harness turns this into an
// aborted, flagged trace.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OskmConfig {
  double lambda = 0.1;  // regularization weight
  double rho = 0.1;     // ADMM penalty weight; 0 disables consensus entirely
  double eta = 0.7;     // learning rate
  int tau = 100;        // observation window length
  int tau_p = 10;       // persistence window length (number of slot learners)
  int tau_e = 10;       // evaluation window length (rows of the kernel block)
  int admm_iters = 3;   // ADMM sweeps per incoming sample
  KernelSpec spec{};

  void validate() const;  // throws std::invalid_argument naming the violation
};

struct StepOutcome {
  int predicted_label;
  double raw_score;
  bool update_made;  // hinge subgradient active in any slot this step
};

// tau_p coupled online learners over one shared observation window. Slot j
// trains on the stream delayed by j samples (its realization of the
// persistence process); the consensus variable v ties the slot predictions
// over the evaluation window together through the scaled duals u_j. The
// prediction for a fresh sample averages the slot hypotheses.
//
// Per incoming sample: predict first, then slide the window and run
// admm_iters sweeps. The first sweep carries the stochastic part (coefficient
// decay plus the per-slot hinge subgradient at its realization sample)
// together with the penalty gradient; the remaining sweeps refine the
// consensus subsystem. With rho = 0, tau_p = 1, admm_iters = 1 the machine
// reproduces the Norma trace exactly.
class Oskm {
 public:
  explicit Oskm(OskmConfig config);

  // Slot-averaged raw score (1/tau_p) sum_j sum_m alpha_j(m) y(m) k(x_m, x);
  // 0 before any data.
  double predict(const Eigen::VectorXd& x) const;

  StepOutcome step(const Eigen::VectorXd& x, int y_noisy);

  // One deterministic ADMM sweep on the frozen window: coefficient decay and
  // penalty gradient for every slot, then consensus and dual updates. No data
  // subgradient (nothing arrived).
  void admm_sweep();

  const OskmConfig& config() const { return cfg_; }
  const WindowBuffer& window() const { return buffer_; }
  const KernelBlock& block() const { return block_; }
  const Eigen::MatrixXd& alphas() const { return alphas_; }  // row j = alpha_j
  const Eigen::VectorXd& consensus() const { return v_; }
  const Eigen::MatrixXd& duals() const { return duals_; }    // row j = u_j

  // Row j = K alpha_j, the slot predictions over the evaluation window.
  Eigen::MatrixXd slot_predictions() const;

  // Overwrites coefficients and consensus state (shapes must match).
  void set_state(const Eigen::MatrixXd& alphas, const Eigen::VectorXd& v,
                 const Eigen::MatrixXd& duals);

  // v = (1/tau_p) sum_j (u_j + K alpha_j), the minimizer of the consensus
  // sub-problem. Row j of slot_preds is K alpha_j.
  static Eigen::VectorXd consensus_update(const Eigen::MatrixXd& slot_preds,
                                          const Eigen::MatrixXd& duals);

  // u_j <- u_j + K alpha_j - v.
  static Eigen::MatrixXd dual_update(const Eigen::MatrixXd& duals,
                                     const Eigen::MatrixXd& slot_preds,
                                     const Eigen::VectorXd& v);

  // Deterministic part of the per-slot update direction at alpha:
  //   lambda * alpha + rho * K^T (K alpha - v + u),
  // the exact gradient of (lambda/2)||alpha||^2 + (rho/2)||K alpha - v + u||^2.
  static Eigen::VectorXd deterministic_direction(const Eigen::VectorXd& alpha,
                                                 const Eigen::MatrixXd& k_normalized,
                                                 const Eigen::VectorXd& v,
                                                 const Eigen::VectorXd& u,
                                                 double lambda, double rho);

 private:
  void slide_and_append(const Eigen::VectorXd& x, int y_noisy);
  void rebuild_block();
  bool arrival_sweep();
  void refinement_sweep();
  void consensus_and_dual();
  void check_divergence() const;

  OskmConfig cfg_;
  WindowBuffer buffer_;
  Eigen::MatrixXd gram_;     // raw window Gram, maintained incrementally
  KernelBlock block_;        // shared normalized evaluation block
  Eigen::MatrixXd alphas_;   // tau_p x w
  Eigen::VectorXd v_;        // r = min(tau_e, w)
  Eigen::MatrixXd duals_;    // tau_p x r
};

// Cost of one slot's coefficient vector over the shared window: hinge data
// term plus the quadratic RKHS-norm term, with noisy labels. Identical to
// regularized_risk; kept as the named objective of the per-slot ADMM
// sub-problem.
double objective_g(const Eigen::VectorXd& alpha, const WindowBuffer& buffer,
                   const KernelSpec& spec, double lambda);

}  // namespace oskm
