#include "oskm/window.hpp"

#include <stdexcept>

namespace oskm {

WindowBuffer::WindowBuffer(int capacity, int persistence_len)
    : capacity_(capacity), persistence_len_(persistence_len) {
  if (capacity < 1) throw std::invalid_argument("window capacity must be >= 1");
  if (persistence_len < 1) throw std::invalid_argument("persistence length must be >= 1");
  samples_.reserve(static_cast<size_t>(capacity));
  labels_.reserve(static_cast<size_t>(capacity));
}

bool WindowBuffer::push(const Eigen::VectorXd& x, int y_noisy) {
  if (y_noisy != 1 && y_noisy != -1) throw std::invalid_argument("invalid label");
  if (!samples_.empty() && samples_.front().size() != x.size())
    throw std::invalid_argument("dimension mismatch");
  bool evicted = false;
  if (static_cast<int>(samples_.size()) == capacity_) {
    samples_.erase(samples_.begin());
    labels_.erase(labels_.begin());
    evicted = true;
  }
  samples_.push_back(x);
  labels_.push_back(y_noisy);
  ++global_step_;
  labels_d_.resize(static_cast<Eigen::Index>(labels_.size()));
  for (size_t i = 0; i < labels_.size(); ++i)
    labels_d_(static_cast<Eigen::Index>(i)) = labels_[i];
  return evicted;
}

const Eigen::VectorXd& WindowBuffer::sample(int i) const {
  return samples_.at(static_cast<size_t>(i));
}

int WindowBuffer::label(int i) const { return labels_.at(static_cast<size_t>(i)); }

long WindowBuffer::realization_index(long i) const { return i * persistence_len_; }

}  // namespace oskm
