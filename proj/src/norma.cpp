#include "oskm/norma.hpp"

#include <stdexcept>

#include "oskm/loss.hpp"

namespace oskm {

Norma::Norma(KernelSpec spec, double lambda, double eta, int budget)
    : spec_(spec), lambda_(lambda), eta_(eta), budget_(budget) {
  spec_.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must be in (0, 1)");
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
}

double Norma::predict(const Eigen::VectorXd& x) const {
  double score = 0.0;
  for (size_t i = 0; i < coeffs_.size(); ++i)
    score += coeffs_[i] * kernel_eval(spec_, supports_[i], x);
  return score;
}

bool Norma::update(const Eigen::VectorXd& x, int y_noisy) {
  if (y_noisy != 1 && y_noisy != -1) throw std::invalid_argument("invalid label");
  const double margin = y_noisy * predict(x);
  const double scale = 1.0 - eta_ * lambda_;
  for (double& c : coeffs_) c *= scale;
  if (hinge_subgradient(margin) != -1.0) return false;
  supports_.push_back(x);
  labels_.push_back(y_noisy);
  coeffs_.push_back(eta_ * y_noisy);
  if (static_cast<int>(coeffs_.size()) > budget_) {
    supports_.erase(supports_.begin());
    labels_.erase(labels_.begin());
    coeffs_.erase(coeffs_.begin());
  }
  return true;
}

}  // namespace oskm
