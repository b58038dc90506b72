#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oskm/datagen.hpp"
#include "oskm/norma.hpp"

using namespace oskm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("empty state predicts zero") {
  Norma n(KernelSpec{}, 0.1, 0.5, 10);
  CHECK(n.predict(vec({1, 2, 3})) == 0.0);
}

TEST_CASE("single support prediction") {
  Norma n(KernelSpec{}, 0.1, 0.5, 10);
  const auto x1 = vec({2, 0});  // ||x1||^2 = 4
  CHECK(n.update(x1, 1));       // margin 0 < 1: support with coefficient +0.5
  CHECK(n.n_supports() == 1);
  CHECK(n.coefficient(0) == doctest::Approx(0.5));
  CHECK(n.predict(x1) == doctest::Approx(2.0));
}

TEST_CASE("satisfied margin only decays the coefficients") {
  Norma n(KernelSpec{}, 0.1, 0.5, 10);
  const auto x1 = vec({2, 0});
  n.update(x1, 1);
  // margin is now 1 * 2.0 >= 1: no append, scale by (1 - 0.05)
  CHECK_FALSE(n.update(x1, 1));
  CHECK(n.n_supports() == 1);
  CHECK(n.coefficient(0) == doctest::Approx(0.5 * 0.95));
}

TEST_CASE("prediction matches the expansion sum") {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Norma n(KernelSpec{}, 0.2, 0.3, 100);
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd x(4);
    for (int d = 0; d < 4; ++d) x(d) = 0.1 * gauss(rng);
    n.update(x, (rng() & 1) ? 1 : -1);
  }
  Eigen::VectorXd q(4);
  for (int d = 0; d < 4; ++d) q(d) = gauss(rng);
  double want = 0.0;
  for (int i = 0; i < n.n_supports(); ++i)
    want += n.coefficient(i) * kernel_eval(KernelSpec{}, n.support(i), q);
  CHECK(std::abs(n.predict(q) - want) < 1e-12);
}

TEST_CASE("prediction is additive across expansions sharing supports") {
  // two states built from the same inputs with different labels
  std::mt19937_64 rng(62);
  std::normal_distribution<double> gauss(0.0, 0.05);
  Norma a(KernelSpec{}, 0.1, 0.5, 100);
  Norma b(KernelSpec{}, 0.1, 0.5, 100);
  std::vector<Eigen::VectorXd> xs;
  for (int i = 0; i < 6; ++i) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x(d) = gauss(rng);
    xs.push_back(x);
    a.update(x, (i % 2) ? 1 : -1);  // tiny norms keep every margin violated
    b.update(x, (i % 3) ? 1 : -1);
  }
  REQUIRE(a.n_supports() == 6);
  REQUIRE(b.n_supports() == 6);
  Eigen::VectorXd q(3);
  for (int d = 0; d < 3; ++d) q(d) = gauss(rng);
  double combined = 0.0;
  for (int i = 0; i < 6; ++i)
    combined += (a.coefficient(i) + b.coefficient(i)) * xs[static_cast<size_t>(i)].dot(q);
  CHECK(std::abs(a.predict(q) + b.predict(q) - combined) < 1e-12);
}

TEST_CASE("trace matches a straight-line reference implementation") {
  StreamConfig scfg;
  scfg.dim = 6;
  scfg.n_samples = 50;
  scfg.label_flip_prob = 0.2;
  scfg.seed = 9;
  const auto stream = gen_stream(scfg);

  const double lambda = 0.1, eta = 0.7;
  Norma n(KernelSpec{}, lambda, eta, 1000);

  // independent re-implementation of the same rule
  std::vector<Eigen::VectorXd> supports;
  std::vector<double> coeffs;
  for (const Sample& s : stream) {
    double ref_score = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i) ref_score += coeffs[i] * supports[i].dot(s.x);
    const double got_score = n.predict(s.x);
    CHECK(std::abs(got_score - ref_score) < 1e-12);
    n.update(s.x, s.y_noisy);
    const double margin = s.y_noisy * ref_score;
    for (double& c : coeffs) c *= 1.0 - eta * lambda;
    if (margin < 1.0) {
      supports.push_back(s.x);
      coeffs.push_back(eta * s.y_noisy);
    }
  }
  REQUIRE(n.n_supports() == static_cast<int>(coeffs.size()));
  for (int i = 0; i < n.n_supports(); ++i)
    CHECK(std::abs(n.coefficient(i) - coeffs[static_cast<size_t>(i)]) < 1e-12);
}

TEST_CASE("coefficients decay geometrically with age") {
  std::mt19937_64 rng(63);
  std::normal_distribution<double> gauss(0.0, 0.01);
  const double lambda = 0.25, eta = 0.5;
  Norma n(KernelSpec{}, lambda, eta, 1000);
  std::vector<int> labels;
  const int steps = 12;
  for (int i = 0; i < steps; ++i) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x(d) = gauss(rng);
    const int y = (rng() & 1) ? 1 : -1;
    labels.push_back(y);
    CHECK(n.update(x, y));  // tiny norms keep every margin violated
  }
  // i-th oldest support after N steps carries eta * y_i * (1 - eta lambda)^(N - i)
  for (int i = 0; i < steps; ++i) {
    const double want =
        eta * labels[static_cast<size_t>(i)] * std::pow(1.0 - eta * lambda, steps - i - 1);
    CHECK(n.coefficient(i) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("hypothesis norm grows at most eta per update on unit-bounded inputs") {
  StreamConfig scfg;
  scfg.dim = 16;
  scfg.n_samples = 60;
  scfg.label_flip_prob = 0.3;
  scfg.seed = 64;
  const double eta = 0.7;
  Norma n(KernelSpec{}, 0.1, eta, 1000);
  const auto h_norm = [&] {
    double total = 0.0;
    for (int i = 0; i < n.n_supports(); ++i)
      for (int j = 0; j < n.n_supports(); ++j)
        total += n.coefficient(i) * n.coefficient(j) * n.support(i).dot(n.support(j));
    return std::sqrt(std::max(0.0, total));
  };
  double prev = 0.0;
  for (const Sample& s : gen_stream(scfg)) {
    // generator emits unit-expected-norm features; skip the rare ||x|| > 1
    const double kxx = s.x.squaredNorm();
    n.update(s.x, s.y_noisy);
    const double cur = h_norm();
    CHECK(cur <= prev + eta * std::sqrt(kxx) + 1e-12);
    prev = cur;
  }
}

TEST_CASE("budget eviction drops the oldest support") {
  Norma n(KernelSpec{}, 0.1, 0.5, 2);
  n.update(vec({0.1, 0}), 1);
  n.update(vec({0, 0.1}), -1);
  n.update(vec({0.1, 0.1}), 1);
  CHECK(n.n_supports() == 2);
  CHECK(n.support(0) == vec({0, 0.1}));
}

TEST_CASE("norma rejects bad arguments") {
  CHECK_THROWS_AS(Norma(KernelSpec{}, 0.0, 0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(Norma(KernelSpec{}, 0.1, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(Norma(KernelSpec{}, 0.1, 0.5, 0), std::invalid_argument);
  Norma n(KernelSpec{}, 0.1, 0.5, 10);
  CHECK_THROWS_WITH_AS(n.update(vec({1}), 2), "invalid label", std::invalid_argument);
}
