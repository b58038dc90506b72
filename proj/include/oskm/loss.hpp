#pragma once

#include <Eigen/Core>

namespace oskm {

class WindowBuffer;
struct KernelSpec;

// Sign convention used throughout: sign(0) = +1.
inline int sign_label(double score) { return score >= 0.0 ? +1 : -1; }

// 0 iff the labels agree; both arguments must be in {-1, +1}.
int zero_one_loss(int predicted_label, int true_label);

// max(1 - margin, 0) with margin = y f(x).
double hinge_loss(double margin);

// Subgradient of the hinge at the given margin: -1 below the margin, 0 at and
// beyond it (the kink at margin = 1 resolves to 0, so a satisfied margin never
// triggers an update).
double hinge_subgradient(double margin);

// Regularized risk of the expansion f = sum_m coeffs(m) y(m) k(x_m, .) over
// the buffered window:
//   (1/w) sum_l hinge(y_l f(x_l)) + (lambda/2) ||f||_H^2,
// with ||f||_H^2 = sum_{l,m} coeffs(l) coeffs(m) y(l) y(m) k(x_l, x_m).
// lambda = 0 gives the empirical risk.
double regularized_risk(const Eigen::VectorXd& coeffs, const WindowBuffer& buffer,
                        const KernelSpec& spec, double lambda);

}  // namespace oskm
