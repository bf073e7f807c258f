#pragma once

#include <cstdint>

#include "sl2lab/exec.hpp"
#include "sl2lab/mat2.hpp"
#include "sl2lab/rng.hpp"

namespace sl2lab {

struct InvalidMeasure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateScales : PreconditionFailed {
  using PreconditionFailed::PreconditionFailed;
};

struct FiniteMeasure {
  std::vector<Mat2> atoms;
  std::vector<double> probs;

  std::size_t size() const { return atoms.size(); }
  void validate() const;  // throws InvalidMeasure
};

// entropy of the labeled probability vector; coincident atoms are not merged
double shannon_entropy(const FiniteMeasure& mu);

FiniteMeasure convolve(const FiniteMeasure& mu, const FiniteMeasure& nu, double merge_tol = 1e-9);

// (1/n) H(mu^{*n}) with convolve's merging
double rw_entropy(const FiniteMeasure& mu, int n, std::size_t cap = 1000000);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  int n = 0;
  int trials = 0;
};

McEstimate lyapunov_mc(const FiniteMeasure& mu, int n, int trials, std::uint64_t seed,
                       Exec ex = Exec::parallel);

enum class Direction { forward, backward };

struct DiscretizedP1Measure {
  int bins = 0;
  std::vector<double> weights;
  double residual = 0.0;  // last CDF sup-distance between successive iterates
  bool converged = false;
  int iters_used = 0;
};

DiscretizedP1Measure stationary_measure(const FiniteMeasure& mu, Direction dir, int bins,
                                        int iters);

// one application of the discretized Markov operator (used to re-verify invariance)
std::vector<double> apply_markov_operator(const FiniteMeasure& mu, Direction dir,
                                          const std::vector<double>& weights);

struct DeviationCheck {
  double observed_freq = 0.0;
  double hoeffding_bound = 0.0;
  double stderr_ = 0.0;
  bool ok = false;  // observed <= bound + 3 stderr
};

DeviationCheck entropy_deviation_check(const FiniteMeasure& mu, int n, double beta, int trials,
                                       std::uint64_t seed, Exec ex = Exec::parallel);

struct DimensionEstimate {
  double dim_estimate = 0.0;
  double fit_r2 = 0.0;
};

DimensionEstimate local_dimension(const DiscretizedP1Measure& eta, int samples,
                                  const std::vector<double>& scales, std::uint64_t seed);

// least-squares slope and R^2 of y against x
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sl2lab
