#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "sl2lab/embed.hpp"
#include "sl2lab/measure.hpp"
#include "sl2lab/rng.hpp"

using namespace sl2lab;
using testutil::cdf_sup_dist;
using testutil::diagonal;
using testutil::random_sl2;
using testutil::rotation;

namespace {

FiniteMeasure two_atoms(Mat2 A, Mat2 B, double pa = 0.5) {
  return FiniteMeasure{{A, B}, {pa, 1.0 - pa}};
}

bool same_matrix(const Mat2& A, const Mat2& B, double tol) {
  return (A - B).max_abs() <= tol;
}

}  // namespace

TEST_CASE("measure validation") {
  FiniteMeasure ok = two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(1.0));
  CHECK_NOTHROW(ok.validate());

  CHECK_THROWS_AS(FiniteMeasure{}.validate(), InvalidMeasure);
  CHECK_THROWS_AS((FiniteMeasure{{J}, {0.5, 0.5}}).validate(), InvalidMeasure);
  CHECK_THROWS_AS((FiniteMeasure{{J, J}, {1.0, 0.0}}).validate(), InvalidMeasure);
  CHECK_THROWS_AS((FiniteMeasure{{J, J}, {0.7, 0.7}}).validate(), InvalidMeasure);
  CHECK_THROWS_AS((FiniteMeasure{{diagonal(2.0, 1.0)}, {1.0}}).validate(), InvalidMeasure);
}

TEST_CASE("shannon entropy of the label distribution") {
  CHECK(std::abs(shannon_entropy(two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(1.0))) -
                 std::log(2.0)) <= 1e-12);
  CHECK(shannon_entropy(FiniteMeasure{{J}, {1.0}}) == 0.0);
  double h = shannon_entropy(two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(1.0), 0.25));
  CHECK(std::abs(h - 0.5623351446188083) <= 1e-12);

  // labels are not merged even when the atoms coincide
  double hsame = shannon_entropy(two_atoms(J, J));
  CHECK(std::abs(hsame - std::log(2.0)) <= 1e-12);
}

TEST_CASE("convolution of atomic measures") {
  Mat2 A = schrodinger_matrix(1.0), B = schrodinger_matrix(3.0);

  FiniteMeasure ab = convolve(FiniteMeasure{{A}, {1.0}}, FiniteMeasure{{B}, {1.0}});
  REQUIRE(ab.size() == 1);
  CHECK(same_matrix(ab.atoms[0], A * B, 0.0));
  CHECK(ab.probs[0] == 1.0);

  Mat2 D = diagonal(2.0, 0.5);
  FiniteMeasure sym = two_atoms(D, D.inv());
  FiniteMeasure sq = convolve(sym, sym);
  REQUIRE(sq.size() == 3);
  double total = 0.0;
  bool saw_identity = false;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    total += sq.probs[i];
    if (same_matrix(sq.atoms[i], Mat2::identity(), 1e-12)) {
      saw_identity = true;
      CHECK(std::abs(sq.probs[i] - 0.5) <= 1e-15);
    } else {
      CHECK(std::abs(sq.probs[i] - 0.25) <= 1e-15);
    }
  }
  CHECK(saw_identity);
  CHECK(std::abs(total - 1.0) <= 1e-12);

  FiniteMeasure free2 = convolve(two_atoms(A, B), two_atoms(A, B));
  CHECK(free2.size() == 4);
  for (double p : free2.probs) CHECK(std::abs(p - 0.25) <= 1e-15);
}

TEST_CASE("random walk entropy") {
  Mat2 A = schrodinger_matrix(1.0), B = schrodinger_matrix(3.0);
  FiniteMeasure freepair = two_atoms(A, B);

  CHECK(std::abs(rw_entropy(freepair, 3) - std::log(2.0)) <= 1e-9);
  CHECK(rw_entropy(FiniteMeasure{{schrodinger_matrix(2.0)}, {1.0}}, 5) == 0.0);

  Mat2 D = diagonal(2.0, 0.5);
  double h2 = rw_entropy(two_atoms(D, D.inv()), 2);
  CHECK(std::abs(h2 - 0.75 * std::log(2.0)) <= 1e-9);

  double hmu = shannon_entropy(freepair);
  double prev = hmu;
  for (int n = 1; n <= 6; ++n) {
    double hn = rw_entropy(freepair, n);
    CHECK(hn <= prev + 1e-12);
    CHECK(hn <= hmu + 1e-12);
    CHECK(hn >= 0.0);
    prev = hn;
  }

  std::vector<Mat2> atoms;
  std::vector<double> probs;
  for (int j = 0; j < 10; ++j) {
    atoms.push_back(schrodinger_matrix(0.25 * j));
    probs.push_back(0.1);
  }
  CHECK_THROWS_AS(rw_entropy(FiniteMeasure{atoms, probs}, 7), CapExceeded);
  CHECK_THROWS_AS(rw_entropy(freepair, 0), PreconditionFailed);
}

TEST_CASE("monte carlo lyapunov on a deterministic atom") {
  McEstimate est = lyapunov_mc(FiniteMeasure{{diagonal(2.0, 0.5)}, {1.0}}, 100, 8, 7);
  CHECK(std::abs(est.estimate - std::log(2.0)) <= 1e-13);
  CHECK(est.stderr_ == 0.0);
  CHECK(est.n == 100);
  CHECK(est.trials == 8);
}

TEST_CASE("monte carlo lyapunov vanishes for rotations") {
  McEstimate est = lyapunov_mc(two_atoms(rotation(1.0), rotation(0.4)), 50, 4, 7);
  CHECK(std::abs(est.estimate) <= 1e-12);
}

TEST_CASE("monte carlo lyapunov under the half log norm bound") {
  FiniteMeasure mu = two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(4.0));
  McEstimate est = lyapunov_mc(mu, 300, 200, 5);
  CHECK(est.estimate > 0.0);
  CHECK(est.stderr_ > 0.0);
  CHECK(est.estimate <= 0.5 * std::log(2.0 + std::sqrt(5.0)) + 3.0 * est.stderr_);
}

TEST_CASE("monte carlo lyapunov is invariant under conjugation") {
  Rng rng(31);
  Mat2 g = random_sl2(rng, 0.0, 0.5);
  FiniteMeasure mu = two_atoms(schrodinger_matrix(1.0), schrodinger_matrix(-1.0));
  FiniteMeasure nu = two_atoms(g * schrodinger_matrix(1.0) * g.inv(),
                               g * schrodinger_matrix(-1.0) * g.inv());
  McEstimate a = lyapunov_mc(mu, 2000, 300, 101);
  McEstimate b = lyapunov_mc(nu, 2000, 300, 102);
  double pooled = std::hypot(a.stderr_, b.stderr_);
  CHECK(std::abs(a.estimate - b.estimate) <= 3.0 * pooled);
}

TEST_CASE("monte carlo lyapunov is deterministic across execution modes") {
  FiniteMeasure mu = two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(4.0));
  McEstimate s = lyapunov_mc(mu, 200, 64, 9, Exec::serial);
  McEstimate p1 = lyapunov_mc(mu, 200, 64, 9, Exec::parallel);
  McEstimate p2 = lyapunov_mc(mu, 200, 64, 9, Exec::parallel);
  CHECK(s.estimate == p1.estimate);
  CHECK(s.stderr_ == p1.stderr_);
  CHECK(p1.estimate == p2.estimate);
  CHECK(p1.stderr_ == p2.stderr_);

  CHECK_THROWS_AS(lyapunov_mc(mu, 0, 8, 1), PreconditionFailed);
  CHECK_THROWS_AS(lyapunov_mc(mu, 10, 1, 1), PreconditionFailed);
}

TEST_CASE("stationary measure concentrates on the expanding direction") {
  FiniteMeasure mu{{diagonal(2.0, 0.5)}, {1.0}};
  DiscretizedP1Measure eta = stationary_measure(mu, Direction::forward, 64, 5000);
  CHECK(eta.converged);
  double total = 0.0;
  for (double w : eta.weights) total += w;
  CHECK(std::abs(total - 1.0) <= 1e-10);
  // the attractor is angle 0, straddled by the first and last bin centers
  CHECK(eta.weights[0] + eta.weights[63] >= 1.0 - 1e-6);
}

TEST_CASE("stationary measure of a rotation stays uniform") {
  FiniteMeasure mu{{rotation(1.0)}, {1.0}};
  DiscretizedP1Measure eta = stationary_measure(mu, Direction::forward, 32, 2000);
  for (double w : eta.weights) CHECK(std::abs(w - 1.0 / 32.0) <= 1e-6);
}

TEST_CASE("stationary measure is a fixed point of the markov operator") {
  FiniteMeasure mu = two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(4.0));
  DiscretizedP1Measure eta = stationary_measure(mu, Direction::forward, 256, 20000);
  CHECK(eta.converged);
  CHECK(eta.residual < 1e-8);
  std::vector<double> next = apply_markov_operator(mu, Direction::forward, eta.weights);
  CHECK(cdf_sup_dist(next, eta.weights) < 1e-8);

  CHECK_THROWS_AS(stationary_measure(mu, Direction::forward, 8, 100), PreconditionFailed);
}

TEST_CASE("backward stationary measure matches the inverted family") {
  FiniteMeasure mu = two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(4.0));
  FiniteMeasure inv = two_atoms(schrodinger_inv(0.0), schrodinger_inv(4.0));
  DiscretizedP1Measure back = stationary_measure(mu, Direction::backward, 128, 20000);
  DiscretizedP1Measure fwd = stationary_measure(inv, Direction::forward, 128, 20000);
  CHECK(cdf_sup_dist(back.weights, fwd.weights) < 1e-8);
}

TEST_CASE("entropy deviation frequencies") {
  DeviationCheck one = entropy_deviation_check(FiniteMeasure{{J}, {1.0}}, 50, 0.1, 100, 3);
  CHECK(one.observed_freq == 0.0);
  CHECK(one.ok);

  DeviationCheck uni =
      entropy_deviation_check(two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(1.0)),
                              100, 0.05, 200, 3);
  CHECK(uni.observed_freq == 0.0);
  CHECK(uni.ok);

  DeviationCheck skew =
      entropy_deviation_check(two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(1.0), 0.2),
                              200, 0.2, 10000, 3);
  double h = -std::log(0.2);
  double bound = 2.0 * std::exp(-2.0 * 200 * 0.2 * 0.2 / (h * h));
  CHECK(std::abs(skew.hoeffding_bound - bound) <= 1e-12);
  CHECK(skew.ok);
}

TEST_CASE("local dimension of uniform and atomic measures") {
  std::vector<double> scales = {0.3, 0.2, 0.13, 0.08, 0.05};

  DiscretizedP1Measure uni;
  uni.bins = 1024;
  uni.weights.assign(1024, 1.0 / 1024.0);
  uni.converged = true;
  DimensionEstimate du = local_dimension(uni, 200, scales, 17);
  CHECK(std::abs(du.dim_estimate - 1.0) <= 0.05);

  DiscretizedP1Measure atom;
  atom.bins = 1024;
  atom.weights.assign(1024, 0.0);
  atom.weights[100] = 1.0;
  atom.converged = true;
  DimensionEstimate da = local_dimension(atom, 50, scales, 17);
  CHECK(std::abs(da.dim_estimate) <= 0.05);

  CHECK_THROWS_AS(local_dimension(uni, 50, {0.3}, 1), DegenerateScales);
  CHECK_THROWS_AS(local_dimension(uni, 50, {0.1, 0.2, 0.3}, 1), DegenerateScales);
  CHECK_THROWS_AS(local_dimension(uni, 50, {0.3, 0.2, 1e-5}, 1), DegenerateScales);
  CHECK_THROWS_AS(local_dimension(uni, 50, {1.5, 0.3, 0.2}, 1), DegenerateScales);
}

TEST_CASE("local dimension respects the entropy over growth bound") {
  FiniteMeasure mu = two_atoms(schrodinger_matrix(0.0), schrodinger_matrix(4.0));
  DiscretizedP1Measure eta = stationary_measure(mu, Direction::forward, 2048, 5000);
  McEstimate lyap = lyapunov_mc(mu, 2000, 200, 23);
  double hL = shannon_entropy(mu) / (2.0 * lyap.estimate);
  std::vector<double> scales = {0.3, 0.2, 0.13, 0.08, 0.05};
  DimensionEstimate dim = local_dimension(eta, 300, scales, 29);
  CHECK(dim.dim_estimate <= std::min(1.0, hL) + 0.1);
  CHECK(dim.dim_estimate >= 0.0);
}

TEST_CASE("line fits") {
  LineFit f = fit_line({0.0, 1.0, 2.0, 3.0}, {-2.0, 1.0, 4.0, 7.0});
  CHECK(std::abs(f.slope - 3.0) <= 1e-12);
  CHECK(std::abs(f.intercept + 2.0) <= 1e-12);
  CHECK(f.r2 >= 1.0 - 1e-12);

  LineFit noisy = fit_line({0.0, 1.0, 2.0, 3.0}, {0.0, 1.2, 1.7, 3.4});
  CHECK(noisy.r2 < 1.0);
  CHECK(noisy.r2 > 0.8);

  LineFit flat = fit_line({0.0, 1.0, 2.0}, {5.0, 5.0, 5.0});
  CHECK(flat.slope == 0.0);
  CHECK(flat.r2 == 1.0);
}

TEST_CASE("hashed sub-seeds replay identically") {
  Rng a(seed_for(9, 4)), b(seed_for(9, 4));
  std::vector<double> probs = {0.3, 0.7};
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.pick(probs) == b.pick(probs));
  }
  Rng c(seed_for(9, 4)), d(seed_for(9, 5));
  bool differ = false;
  for (int i = 0; i < 64; ++i) {
    if (c.next() != d.next()) differ = true;
  }
  CHECK(differ);
}
