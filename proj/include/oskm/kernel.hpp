#pragma once

#include <Eigen/Core>

#include "oskm/window.hpp"

namespace oskm {

enum class KernelFamily { Linear, Gaussian };

struct KernelSpec {
  KernelFamily family = KernelFamily::Linear;
  double bandwidth = 1.0;  // Gaussian width; ignored for Linear

  void validate() const;  // throws std::invalid_argument
};

// k(x, x'). Linear: <x, x'>. Gaussian: exp(-||x - x'||^2 / (2 bandwidth^2)).
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// Raw kernel Gram matrix of the buffered window, G(l, m) = k(x_l, x_m).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const WindowBuffer& buffer);

// Normalized evaluation block K = K_hat / ||K_hat||_F. Rows are the tau_e most
// recent samples (newest first, shrinking during warm-up), columns span the
// full buffered window (oldest first, aligned with the coefficient vectors).
struct KernelBlock {
  Eigen::MatrixXd raw;
  Eigen::MatrixXd normalized;
  double frob_norm = 0.0;

  int rows() const { return static_cast<int>(raw.rows()); }
  int cols() const { return static_cast<int>(raw.cols()); }
};

KernelBlock build_kernel_block(const KernelSpec& spec, const WindowBuffer& buffer,
                               int tau_e);

// Same block assembled from a precomputed window Gram matrix.
KernelBlock build_kernel_block(const Eigen::MatrixXd& gram, int tau_e);

}  // namespace oskm
