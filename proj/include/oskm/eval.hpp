#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oskm/datagen.hpp"
#include "oskm/oskm.hpp"

namespace oskm {

enum class Algorithm { Oskm, Norma };

struct StepRecord {
  int step;  // 1-based stream position
  double raw_score;
  int predicted_label;
  int y_noisy;
  int y_clean;
  bool mistake_vs_clean;
  bool mistake_vs_noisy;
  bool update_made;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  long n_updates = 0;  // M_N: steps with an active hinge subgradient
  long mistakes_vs_clean = 0;
  long mistakes_vs_noisy = 0;
  double accuracy_vs_clean = 0.0;
  double accuracy_vs_noisy = 0.0;
  bool diverged = false;
  std::string diagnostic;
};

// Online protocol: predict on x before seeing the label, then reveal the
// noisy label and update. Norma runs with the shared (lambda, eta, spec) and
// budget = tau. Divergence surfaces as a flagged, aborted trace.
RunTrace run_experiment(Algorithm algo, const std::vector<Sample>& stream,
                        const OskmConfig& config);

struct MeanCi {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95% normal approximation
  int n = 0;
};

MeanCi mean_ci95(const std::vector<double>& xs);

struct PairedResult {
  double mean_diff = 0.0;
  double ci_half_width = 0.0;
  bool significant = false;  // the 95% CI excludes 0
  int n = 0;
};

// Per-seed paired accuracy differences (first minus second), accuracy vs the
// clean labels. The lists must be paired by seed (equal lengths).
PairedResult paired_compare(const std::vector<RunTrace>& a,
                            const std::vector<RunTrace>& b);
PairedResult paired_compare_values(const std::vector<double>& a,
                                   const std::vector<double>& b);

struct BoundReport {
  long m_n = 0;
  double bound_value = 0.0;
  std::vector<double> rho_margin_grid;
  double best_rho = 0.0;
  double comparator_norm = 0.0;
  double trace_k = 0.0;  // sum of k(x_n, x_n) over update points
  bool holds = false;    // m_n <= bound_value
};

// Empirical check of the update bound with the projection taken as identity:
//   M_N <= min over the grid of (||L||/2 + sqrt(||L||^2/4 + tr{K}/rho))^2
// where L collects the rho-hinge losses (1 - y_n <z, x_n> / rho)_+ of the
// comparator z over the update set, using the labels the learner saw.
// Requires a linear kernel and ||z|| <= 1.
BoundReport mistake_bound(const RunTrace& trace, const std::vector<Sample>& stream,
                          const Eigen::VectorXd& comparator,
                          const std::vector<double>& rho_grid,
                          const KernelSpec& spec);

// 20 log-spaced points in [1e-3, 10].
std::vector<double> default_rho_margin_grid();

// Runs fn(i) for i in [0, n) on a worker pool capped by OSKM_THREADS
// (default: hardware concurrency). Rethrows the first worker exception.
void parallel_for_indexed(int n, const std::function<void(int)>& fn);

}  // namespace oskm
