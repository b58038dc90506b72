#include "oskm/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace oskm {

void KernelSpec::validate() const {
  if (family == KernelFamily::Gaussian && !(bandwidth > 0.0))
    throw std::invalid_argument("bandwidth must be > 0 for the Gaussian kernel");
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
  switch (spec.family) {
    case KernelFamily::Linear:
      return x.dot(y);
    case KernelFamily::Gaussian: {
      const double d2 = (x - y).squaredNorm();
      return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
    }
  }
  throw std::logic_error("unknown kernel family");
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const WindowBuffer& buffer) {
  const int w = buffer.size();
  Eigen::MatrixXd g(w, w);
  for (int l = 0; l < w; ++l) {
    for (int m = l; m < w; ++m) {
      g(l, m) = kernel_eval(spec, buffer.sample(l), buffer.sample(m));
      g(m, l) = g(l, m);
    }
  }
  return g;
}

namespace {

KernelBlock normalize_block(Eigen::MatrixXd raw) {
  KernelBlock block;
  block.frob_norm = raw.norm();
  if (!(block.frob_norm > 0.0))
    throw std::invalid_argument("degenerate kernel block");
  block.normalized = raw / block.frob_norm;
  block.raw = std::move(raw);
  return block;
}

}  // namespace

KernelBlock build_kernel_block(const Eigen::MatrixXd& gram, int tau_e) {
  const int w = static_cast<int>(gram.cols());
  if (w == 0) throw std::invalid_argument("insufficient history");
  if (tau_e < 1) throw std::invalid_argument("tau_e must be >= 1");
  const int r = std::min(tau_e, w);
  Eigen::MatrixXd raw(r, w);
  for (int i = 0; i < r; ++i) raw.row(i) = gram.row(w - 1 - i);  // newest first
  return normalize_block(std::move(raw));
}

KernelBlock build_kernel_block(const KernelSpec& spec, const WindowBuffer& buffer,
                               int tau_e) {
  const int w = buffer.size();
  if (w == 0) throw std::invalid_argument("insufficient history");
  if (tau_e < 1) throw std::invalid_argument("tau_e must be >= 1");
  const int r = std::min(tau_e, w);
  Eigen::MatrixXd raw(r, w);
  for (int i = 0; i < r; ++i) {
    const Eigen::VectorXd& xi = buffer.sample(w - 1 - i);
    for (int m = 0; m < w; ++m)
      raw(i, m) = kernel_eval(spec, xi, buffer.sample(m));
  }
  return normalize_block(std::move(raw));
}

}  // namespace oskm
