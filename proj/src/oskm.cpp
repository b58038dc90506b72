#include "oskm/oskm.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oskm/loss.hpp"

namespace oskm {

void OskmConfig::validate() const {
  spec.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must be in (0, 1)");
  if (tau_p < 1) throw std::invalid_argument("tau_p must be >= 1");
  if (tau_e < 1) throw std::invalid_argument("tau_e must be >= 1");
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");
  if (!(tau_p <= tau_e && tau_e <= tau))
    throw std::invalid_argument("window ordering violated: require tau_p <= tau_e <= tau");
  if (admm_iters < 1) throw std::invalid_argument("admm_iters must be >= 1");
}

Oskm::Oskm(OskmConfig config)
    : cfg_(std::move(config)), buffer_(cfg_.tau, cfg_.tau_p) {
  cfg_.validate();
  alphas_.resize(cfg_.tau_p, 0);
  duals_.resize(cfg_.tau_p, 0);
  v_.resize(0);
}

double Oskm::predict(const Eigen::VectorXd& x) const {
  const int w = buffer_.size();
  if (w == 0) return 0.0;
  Eigen::VectorXd kcol(w);
  for (int m = 0; m < w; ++m) kcol(m) = kernel_eval(cfg_.spec, buffer_.sample(m), x);
  return (alphas_ * buffer_.labels().cwiseProduct(kcol)).mean();
}

void Oskm::slide_and_append(const Eigen::VectorXd& x, int y_noisy) {
  const bool evicted = buffer_.push(x, y_noisy);
  if (evicted) {
    // oldest sample leaves: drop its Gram row/column and every slot's leading
    // coefficient
    gram_ = gram_.bottomRightCorner(gram_.rows() - 1, gram_.cols() - 1).eval();
    alphas_ = alphas_.rightCols(alphas_.cols() - 1).eval();
  }
  const int w = buffer_.size();
  gram_.conservativeResize(w, w);
  for (int m = 0; m < w; ++m) {
    const double k = kernel_eval(cfg_.spec, buffer_.sample(m), x);
    gram_(m, w - 1) = k;
    gram_(w - 1, m) = k;
  }
  alphas_.conservativeResize(cfg_.tau_p, w);
  alphas_.col(w - 1).setZero();
}

void Oskm::rebuild_block() {
  block_ = build_kernel_block(gram_, cfg_.tau_e);
  // v and u are indexed by lag; the new arrival shifts every lag by one, the
  // entry falling off the evaluation window is dropped, new entries start at 0
  const int r = block_.rows();
  Eigen::VectorXd v2 = Eigen::VectorXd::Zero(r);
  Eigen::MatrixXd u2 = Eigen::MatrixXd::Zero(cfg_.tau_p, r);
  const int keep = std::min(static_cast<int>(v_.size()), r - 1);
  if (keep > 0) {
    v2.segment(1, keep) = v_.head(keep);
    u2.middleCols(1, keep) = duals_.leftCols(keep);
  }
  v_ = std::move(v2);
  duals_ = std::move(u2);
}

Eigen::VectorXd Oskm::consensus_update(const Eigen::MatrixXd& slot_preds,
                                       const Eigen::MatrixXd& duals) {
  return (duals + slot_preds).colwise().mean().transpose();
}

Eigen::MatrixXd Oskm::dual_update(const Eigen::MatrixXd& duals,
                                  const Eigen::MatrixXd& slot_preds,
                                  const Eigen::VectorXd& v) {
  Eigen::MatrixXd out = duals + slot_preds;
  out.rowwise() -= v.transpose();
  return out;
}

void Oskm::consensus_and_dual() {
  const Eigen::MatrixXd preds = alphas_ * block_.normalized.transpose();
  v_ = consensus_update(preds, duals_);
  duals_ = dual_update(duals_, preds, v_);
}

bool Oskm::arrival_sweep() {
  const int w = buffer_.size();
  const Eigen::VectorXd& y = buffer_.labels();
  // slot j trains on the sample lagged by j steps, the newest sample of its
  // realization; margins come from the pre-update coefficients
  std::vector<std::pair<int, int>> kicks;
  for (int j = 0; j < cfg_.tau_p; ++j) {
    const int pos = w - 1 - j;
    if (pos < 0) break;
    const double margin =
        y(pos) * alphas_.row(j).dot(y.cwiseProduct(gram_.col(pos)));
    if (hinge_subgradient(margin) == -1.0) kicks.emplace_back(j, pos);
  }
  Eigen::MatrixXd next = (1.0 - cfg_.eta * cfg_.lambda) * alphas_;
  if (cfg_.rho > 0.0) {
    Eigen::MatrixXd residual = alphas_ * block_.normalized.transpose();
    residual.rowwise() -= v_.transpose();
    next.noalias() -= cfg_.rho * ((residual + duals_) * block_.normalized);
  }
  for (const auto& [j, pos] : kicks) next(j, pos) += cfg_.eta;
  alphas_ = std::move(next);
  if (cfg_.rho > 0.0) consensus_and_dual();
  return !kicks.empty();
}

void Oskm::refinement_sweep() {
  Eigen::MatrixXd residual = alphas_ * block_.normalized.transpose();
  residual.rowwise() -= v_.transpose();
  alphas_.noalias() -= cfg_.rho * ((residual + duals_) * block_.normalized);
  consensus_and_dual();
}

void Oskm::admm_sweep() {
  if (buffer_.empty()) return;
  Eigen::MatrixXd next = (1.0 - cfg_.eta * cfg_.lambda) * alphas_;
  if (cfg_.rho > 0.0) {
    if (block_.rows() == 0) rebuild_block();
    Eigen::MatrixXd residual = alphas_ * block_.normalized.transpose();
    residual.rowwise() -= v_.transpose();
    next.noalias() -= cfg_.rho * ((residual + duals_) * block_.normalized);
  }
  alphas_ = std::move(next);
  if (cfg_.rho > 0.0) consensus_and_dual();
  check_divergence();
}

StepOutcome Oskm::step(const Eigen::VectorXd& x, int y_noisy) {
  const double score = predict(x);
  slide_and_append(x, y_noisy);
  if (cfg_.rho > 0.0) rebuild_block();
  const bool update_made = arrival_sweep();
  if (cfg_.rho > 0.0)
    for (int it = 1; it < cfg_.admm_iters; ++it) refinement_sweep();
  check_divergence();
  return {sign_label(score), score, update_made};
}

void Oskm::check_divergence() const {
  const bool bad = !alphas_.allFinite() || !v_.allFinite() || !duals_.allFinite() ||
                   (alphas_.size() > 0 && alphas_.cwiseAbs().maxCoeff() > 1e6);
  if (bad) throw DivergenceError("divergence: reduce eta or rho");
}

Eigen::MatrixXd Oskm::slot_predictions() const {
  return alphas_ * block_.normalized.transpose();
}

void Oskm::set_state(const Eigen::MatrixXd& alphas, const Eigen::VectorXd& v,
                     const Eigen::MatrixXd& duals) {
  if (alphas.rows() != alphas_.rows() || alphas.cols() != alphas_.cols() ||
      v.size() != v_.size() || duals.rows() != duals_.rows() ||
      duals.cols() != duals_.cols())
    throw std::invalid_argument("state shape mismatch");
  alphas_ = alphas;
  v_ = v;
  duals_ = duals;
}

Eigen::VectorXd Oskm::deterministic_direction(const Eigen::VectorXd& alpha,
                                              const Eigen::MatrixXd& k_normalized,
                                              const Eigen::VectorXd& v,
                                              const Eigen::VectorXd& u,
                                              double lambda, double rho) {
  return lambda * alpha +
         rho * (k_normalized.transpose() * (k_normalized * alpha - v + u));
}

double objective_g(const Eigen::VectorXd& alpha, const WindowBuffer& buffer,
                   const KernelSpec& spec, double lambda) {
  return regularized_risk(alpha, buffer, spec, lambda);
}

}  // namespace oskm
