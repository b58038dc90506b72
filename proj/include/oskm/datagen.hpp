#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <vector>

namespace oskm {

enum class Regime { NonStationary, Stationary };

// Synthetic noisy stream: block-persistent labels, class-conditional Gaussian
// features, additive input noise at a target SNR, independent label flips.
struct StreamConfig {
  int dim = 128;
  int block_len = 0;  // 0: derived from the regime (10 / 200)
  int n_samples = 500;
  Regime regime = Regime::NonStationary;
  double class_separation = 3.29;  // ~95% clean Bayes accuracy
  double snr_db = std::numeric_limits<double>::infinity();
  double label_flip_prob = 0.0;
  std::uint64_t seed = 1;

  int resolved_block_len() const;
  void validate() const;  // throws std::invalid_argument naming the field
};

struct Sample {
  Eigen::VectorXd x;  // features as seen by the learner (input noise applied)
  int y_clean;
  int y_noisy;
  int block_id;
};

// Per-block class chosen by a seeded fair coin; clean features drawn from
// class-conditional spherical Gaussians with means +-(class_separation/2) mu
// along a fixed seeded unit direction, scaled to unit expected norm; then
// input noise per snr_db and independent label flips. The feature, input
// noise, label flip, block class and direction substreams are independent, so
// toggling one noise source leaves the others untouched.
std::vector<Sample> gen_stream(const StreamConfig& config);

// The seeded unit direction mu separating the class means (the oracle
// comparator for bound checks).
Eigen::VectorXd class_direction(const StreamConfig& config);

// Per-coordinate noise standard deviation for the SNR model:
// sigma^2 = ||x||^2 / (dim * 10^(snr_db/10)).
double noise_sigma(const Eigen::VectorXd& x, double snr_db);

// x plus white Gaussian noise at the target SNR; x unchanged for snr_db = inf.
Eigen::VectorXd add_input_noise(const Eigen::VectorXd& x, double snr_db,
                                std::mt19937_64& rng);

// -y with probability p, else y.
int flip_label(int y, double p, std::mt19937_64& rng);

// CSV schema: step, block_id, y_clean, y_noisy, x_0..x_{dim-1}; header row
// required; round-trip exact.
void write_stream_csv(std::ostream& out, const std::vector<Sample>& stream);
std::vector<Sample> read_stream_csv(std::istream& in);

}  // namespace oskm
