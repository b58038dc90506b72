#include "oskm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "oskm/loss.hpp"
#include "oskm/norma.hpp"

namespace oskm {

namespace {

constexpr double kZ95 = 1.959963984540054;

void finalize(RunTrace& trace) {
  trace.n_updates = 0;
  trace.mistakes_vs_clean = 0;
  trace.mistakes_vs_noisy = 0;
  for (const StepRecord& r : trace.steps) {
    trace.n_updates += r.update_made ? 1 : 0;
    trace.mistakes_vs_clean += r.mistake_vs_clean ? 1 : 0;
    trace.mistakes_vs_noisy += r.mistake_vs_noisy ? 1 : 0;
  }
  const double n = static_cast<double>(trace.steps.size());
  if (n > 0) {
    trace.accuracy_vs_clean = 1.0 - trace.mistakes_vs_clean / n;
    trace.accuracy_vs_noisy = 1.0 - trace.mistakes_vs_noisy / n;
  }
}

}  // namespace

RunTrace run_experiment(Algorithm algo, const std::vector<Sample>& stream,
                        const OskmConfig& config) {
  if (stream.empty()) throw std::invalid_argument("stream must be nonempty");
  config.validate();
  RunTrace trace;
  trace.steps.reserve(stream.size());

  std::optional<Oskm> oskm_machine;
  std::optional<Norma> norma_machine;
  if (algo == Algorithm::Oskm)
    oskm_machine.emplace(config);
  else
    norma_machine.emplace(config.spec, config.lambda, config.eta, config.tau);

  try {
    for (size_t t = 0; t < stream.size(); ++t) {
      const Sample& s = stream[t];
      StepRecord rec;
      rec.step = static_cast<int>(t) + 1;
      if (oskm_machine) {
        const StepOutcome out = oskm_machine->step(s.x, s.y_noisy);
        rec.raw_score = out.raw_score;
        rec.predicted_label = out.predicted_label;
        rec.update_made = out.update_made;
      } else {
        rec.raw_score = norma_machine->predict(s.x);
        rec.predicted_label = sign_label(rec.raw_score);
        rec.update_made = norma_machine->update(s.x, s.y_noisy);
      }
      rec.y_noisy = s.y_noisy;
      rec.y_clean = s.y_clean;
      rec.mistake_vs_clean = rec.predicted_label != s.y_clean;
      rec.mistake_vs_noisy = rec.predicted_label != s.y_noisy;
      trace.steps.push_back(rec);
    }
  } catch (const DivergenceError& e) {
    trace.diverged = true;
    trace.diagnostic = e.what();
  }
  finalize(trace);
  return trace;
}

MeanCi mean_ci95(const std::vector<double>& xs) {
  MeanCi out;
  out.n = static_cast<int>(xs.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / out.n;
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / (out.n - 1));
  out.ci_half_width = kZ95 * sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

PairedResult paired_compare_values(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("paired comparison requires equal nonempty lists");
  std::vector<double> diffs(a.size());
  for (size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
  const MeanCi ci = mean_ci95(diffs);
  PairedResult out;
  out.mean_diff = ci.mean;
  out.ci_half_width = ci.ci_half_width;
  out.n = ci.n;
  out.significant = std::abs(out.mean_diff) > out.ci_half_width && out.n >= 2;
  return out;
}

PairedResult paired_compare(const std::vector<RunTrace>& a,
                            const std::vector<RunTrace>& b) {
  std::vector<double> xa, xb;
  xa.reserve(a.size());
  xb.reserve(b.size());
  for (const RunTrace& t : a) xa.push_back(t.accuracy_vs_clean);
  for (const RunTrace& t : b) xb.push_back(t.accuracy_vs_clean);
  return paired_compare_values(xa, xb);
}

std::vector<double> default_rho_margin_grid() {
  std::vector<double> grid(20);
  const double lo = std::log10(1e-3), hi = std::log10(10.0);
  for (int i = 0; i < 20; ++i)
    grid[static_cast<size_t>(i)] = std::pow(10.0, lo + (hi - lo) * i / 19.0);
  return grid;
}

BoundReport mistake_bound(const RunTrace& trace, const std::vector<Sample>& stream,
                          const Eigen::VectorXd& comparator,
                          const std::vector<double>& rho_grid,
                          const KernelSpec& spec) {
  if (spec.family != KernelFamily::Linear)
    throw std::invalid_argument("mistake bound requires the linear kernel");
  if (comparator.norm() > 1.0 + 1e-12)
    throw std::invalid_argument("comparator norm must be <= 1");
  if (trace.steps.size() != stream.size())
    throw std::invalid_argument("trace/stream length mismatch");
  if (rho_grid.empty()) throw std::invalid_argument("rho grid must be nonempty");

  BoundReport report;
  report.rho_margin_grid = rho_grid;
  report.comparator_norm = comparator.norm();

  std::vector<size_t> update_set;
  for (size_t t = 0; t < trace.steps.size(); ++t)
    if (trace.steps[t].update_made) update_set.push_back(t);
  report.m_n = static_cast<long>(update_set.size());

  if (update_set.empty()) {
    report.bound_value = 0.0;
    report.best_rho = rho_grid.front();
    report.holds = report.m_n == 0;
    return report;
  }

  for (size_t t : update_set)
    report.trace_k += kernel_eval(spec, stream[t].x, stream[t].x);

  double best = std::numeric_limits<double>::infinity();
  double best_rho = rho_grid.front();
  for (double rho : rho_grid) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho grid values must be > 0");
    double l2 = 0.0;  // squared norm of the rho-hinge loss vector
    for (size_t t : update_set) {
      const double m = trace.steps[t].y_noisy * comparator.dot(stream[t].x);
      const double loss = std::max(0.0, 1.0 - m / rho);
      l2 += loss * loss;
    }
    const double nl = std::sqrt(l2);
    const double root = std::sqrt(0.25 * l2 + report.trace_k / rho);
    const double bound = (0.5 * nl + root) * (0.5 * nl + root);
    if (bound < best) {
      best = bound;
      best_rho = rho;
    }
  }
  report.bound_value = best;
  report.best_rho = best_rho;
  report.holds = static_cast<double>(report.m_n) <= report.bound_value;
  return report;
}

void parallel_for_indexed(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int workers = 0;
  if (const char* env = std::getenv("OSKM_THREADS")) {
    workers = std::atoi(env);
  }
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);

  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace oskm
