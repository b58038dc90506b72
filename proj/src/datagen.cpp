#include "oskm/datagen.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "oskm/format.hpp"

namespace oskm {

namespace {

// Independent engine per noise source so toggling one source leaves the
// others untouched.
enum : std::uint32_t {
  kDirectionTag = 1,
  kBlockClassTag = 2,
  kFeatureTag = 3,
  kInputNoiseTag = 4,
  kLabelFlipTag = 5,
};

std::mt19937_64 substream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

}  // namespace

int StreamConfig::resolved_block_len() const {
  if (block_len > 0) return block_len;
  return regime == Regime::NonStationary ? 10 : 200;
}

void StreamConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (block_len < 0) throw std::invalid_argument("block_len must be >= 1 (or 0 for the regime default)");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (!(class_separation > 0.0)) throw std::invalid_argument("class_separation must be > 0");
  if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0.0))
    throw std::invalid_argument("snr_db must be a finite value or +inf");
  if (!(label_flip_prob >= 0.0 && label_flip_prob <= 0.5))
    throw std::invalid_argument("label_flip_prob must be in [0, 0.5]");
}

Eigen::VectorXd class_direction(const StreamConfig& config) {
  config.validate();
  auto rng = substream(config.seed, kDirectionTag);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd mu(config.dim);
  for (int i = 0; i < config.dim; ++i) mu(i) = gauss(rng);
  const double n = mu.norm();
  if (!(n > 0.0)) {
    mu.setZero();
    mu(0) = 1.0;
    return mu;
  }
  return mu / n;
}

double noise_sigma(const Eigen::VectorXd& x, double snr_db) {
  const double p = x.squaredNorm();
  if (!(p > 0.0)) throw std::invalid_argument("SNR undefined for zero signal");
  return std::sqrt(p / (x.size() * std::pow(10.0, snr_db / 10.0)));
}

Eigen::VectorXd add_input_noise(const Eigen::VectorXd& x, double snr_db,
                                std::mt19937_64& rng) {
  if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0.0))
    throw std::invalid_argument("snr_db must be a finite value or +inf");
  if (std::isinf(snr_db)) return x;
  const double sigma = noise_sigma(x, snr_db);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = x(i) + sigma * gauss(rng);
  return out;
}

int flip_label(int y, double p, std::mt19937_64& rng) {
  if (y != 1 && y != -1) throw std::invalid_argument("invalid label");
  if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("flip probability must be in [0, 0.5]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < p ? -y : y;
}

std::vector<Sample> gen_stream(const StreamConfig& config) {
  config.validate();
  const int block_len = config.resolved_block_len();
  const int n_blocks = (config.n_samples + block_len - 1) / block_len;

  const Eigen::VectorXd mu = class_direction(config);
  auto rng_block = substream(config.seed, kBlockClassTag);
  auto rng_feat = substream(config.seed, kFeatureTag);
  auto rng_noise = substream(config.seed, kInputNoiseTag);
  auto rng_flip = substream(config.seed, kLabelFlipTag);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<int> block_class(static_cast<size_t>(n_blocks));
  for (int b = 0; b < n_blocks; ++b) block_class[static_cast<size_t>(b)] = unif(rng_block) < 0.5 ? 1 : -1;

  // features are scaled to unit expected norm so linear-kernel scores stay
  // O(1); the Bayes error of the pair is unchanged by the global scale
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(config.dim));
  const double half_sep = 0.5 * config.class_separation;

  std::vector<Sample> stream;
  stream.reserve(static_cast<size_t>(config.n_samples));
  for (int t = 0; t < config.n_samples; ++t) {
    Sample s;
    s.block_id = t / block_len;
    s.y_clean = block_class[static_cast<size_t>(s.block_id)];
    Eigen::VectorXd x(config.dim);
    for (int i = 0; i < config.dim; ++i)
      x(i) = (s.y_clean * half_sep * mu(i) + gauss(rng_feat)) * inv_sqrt_dim;
    s.x = add_input_noise(x, config.snr_db, rng_noise);
    s.y_noisy = flip_label(s.y_clean, config.label_flip_prob, rng_flip);
    stream.push_back(std::move(s));
  }
  return stream;
}

void write_stream_csv(std::ostream& out, const std::vector<Sample>& stream) {
  if (stream.empty()) throw std::invalid_argument("empty stream");
  const Eigen::Index dim = stream.front().x.size();
  out << "step,block_id,y_clean,y_noisy";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x_" << i;
  out << "\n";
  for (size_t t = 0; t < stream.size(); ++t) {
    const Sample& s = stream[t];
    out << t << ',' << s.block_id << ',' << s.y_clean << ',' << s.y_noisy;
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << format_double(s.x(i));
    out << "\n";
  }
}

std::vector<Sample> read_stream_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("missing CSV header");
  if (line.rfind("step,block_id,y_clean,y_noisy", 0) != 0)
    throw std::invalid_argument("unexpected CSV header");
  int dim = -3;  // columns after the first comma minus the three label fields
  for (char c : line)
    if (c == ',') ++dim;
  if (dim < 1) throw std::invalid_argument("unexpected CSV header");

  std::vector<Sample> stream;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    Sample s;
    std::getline(ss, field, ',');  // step (implicit by position)
    std::getline(ss, field, ',');
    s.block_id = std::stoi(field);
    std::getline(ss, field, ',');
    s.y_clean = std::stoi(field);
    std::getline(ss, field, ',');
    s.y_noisy = std::stoi(field);
    s.x.resize(dim);
    for (int i = 0; i < dim; ++i) {
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("truncated CSV row");
      s.x(i) = std::stod(field);
    }
    stream.push_back(std::move(s));
  }
  return stream;
}

}  // namespace oskm
