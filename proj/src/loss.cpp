#include "oskm/loss.hpp"

#include <algorithm>
#include <stdexcept>

#include "oskm/kernel.hpp"

namespace oskm {

int zero_one_loss(int predicted_label, int true_label) {
  if ((predicted_label != 1 && predicted_label != -1) ||
      (true_label != 1 && true_label != -1))
    throw std::invalid_argument("invalid label");
  return predicted_label == true_label ? 0 : 1;
}

double hinge_loss(double margin) { return std::max(1.0 - margin, 0.0); }

double hinge_subgradient(double margin) { return margin < 1.0 ? -1.0 : 0.0; }

double regularized_risk(const Eigen::VectorXd& coeffs, const WindowBuffer& buffer,
                        const KernelSpec& spec, double lambda) {
  const int w = buffer.size();
  if (coeffs.size() != w) throw std::invalid_argument("coefficient/window length mismatch");
  if (w == 0) return 0.0;
  const Eigen::MatrixXd g = gram_matrix(spec, buffer);
  const Eigen::VectorXd& y = buffer.labels();
  // margins(l) = y_l f(x_l) with f = sum_m coeffs(m) y(m) k(x_m, .)
  const Eigen::VectorXd margins = y.cwiseProduct(g * y.cwiseProduct(coeffs));
  double data = 0.0;
  for (int l = 0; l < w; ++l) data += hinge_loss(margins(l));
  data /= w;
  const Eigen::VectorXd yc = y.cwiseProduct(coeffs);
  const double norm2 = yc.dot(g * yc);
  return data + 0.5 * lambda * norm2;
}

}  // namespace oskm
