#pragma once

#include <Eigen/Core>

#include <vector>

namespace oskm {

// Sliding store of the most recent samples together with the noisy labels
// shown to the learner. Holds at most `capacity` samples in arrival order;
// pushing beyond capacity evicts the oldest entry.
class WindowBuffer {
 public:
  WindowBuffer(int capacity, int persistence_len);

  // Appends (x, y_noisy); returns true when the oldest sample was evicted.
  bool push(const Eigen::VectorXd& x, int y_noisy);

  int size() const { return static_cast<int>(samples_.size()); }
  int capacity() const { return capacity_; }
  bool empty() const { return samples_.empty(); }

  // Total number of samples seen so far (the stream index n).
  long global_step() const { return global_step_; }

  // i = 0 addresses the oldest buffered sample.
  const Eigen::VectorXd& sample(int i) const;
  int label(int i) const;

  // Labels of the buffered samples as a vector aligned with sample(i).
  const Eigen::VectorXd& labels() const { return labels_d_; }

  // J(i): index of the latest sample of the i-th realization of the
  // persistence process. Non-overlapping windows: J(i) = i * tau_p.
  long realization_index(long i) const;

 private:
  int capacity_;
  int persistence_len_;
  long global_step_ = 0;
  std::vector<Eigen::VectorXd> samples_;
  std::vector<int> labels_;
  Eigen::VectorXd labels_d_;
};

}  // namespace oskm
