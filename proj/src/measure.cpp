#include "sl2lab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sl2lab {

namespace {
constexpr double kPi = 3.141592653589793238;
}

void FiniteMeasure::validate() const {
  if (atoms.empty()) throw InvalidMeasure("measure: no atoms");
  if (atoms.size() != probs.size()) throw InvalidMeasure("measure: atoms/probs length mismatch");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw InvalidMeasure("measure: probs must be strictly positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidMeasure("measure: probs must sum to 1");
  for (const Mat2& A : atoms)
    if (std::abs(A.det() - 1.0) > 1e-9) throw InvalidMeasure("measure: atom determinant far from 1");
}

double shannon_entropy(const FiniteMeasure& mu) {
  double h = 0.0;
  for (double p : mu.probs) h -= p * std::log(p);
  return h;
}

namespace {

struct WeightedAtom {
  Mat2 m;
  double p;
};

bool atoms_close(const Mat2& x, const Mat2& y, double tol) {
  double scale = std::max(1.0, std::max(x.max_abs(), y.max_abs()));
  return (x - y).max_abs() <= tol * scale;
}

// merge coincident atoms; sort by entries, then sweep a window in the leading
// entry so comparisons stay near-linear even for 10^6 atoms
std::vector<WeightedAtom> merge_atoms(std::vector<WeightedAtom> v, double tol) {
  std::sort(v.begin(), v.end(), [](const WeightedAtom& l, const WeightedAtom& r) {
    if (l.m.a != r.m.a) return l.m.a < r.m.a;
    if (l.m.b != r.m.b) return l.m.b < r.m.b;
    if (l.m.c != r.m.c) return l.m.c < r.m.c;
    return l.m.d < r.m.d;
  });
  std::vector<WeightedAtom> out;
  out.reserve(v.size());
  for (const WeightedAtom& e : v) {
    bool merged = false;
    for (std::size_t k = out.size(); k-- > 0;) {
      double scale = std::max(1.0, std::max(e.m.max_abs(), out[k].m.max_abs()));
      if (out[k].m.a < e.m.a - tol * scale) break;
      if (atoms_close(out[k].m, e.m, tol)) {
        out[k].p += e.p;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(e);
  }
  return out;
}

}  // namespace

FiniteMeasure convolve(const FiniteMeasure& mu, const FiniteMeasure& nu, double merge_tol) {
  std::vector<WeightedAtom> prod;
  prod.reserve(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      prod.push_back({mu.atoms[i] * nu.atoms[j], mu.probs[i] * nu.probs[j]});
  std::vector<WeightedAtom> merged = merge_atoms(std::move(prod), merge_tol);
  FiniteMeasure out;
  out.atoms.reserve(merged.size());
  out.probs.reserve(merged.size());
  for (const WeightedAtom& e : merged) {
    out.atoms.push_back(e.m);
    out.probs.push_back(e.p);
  }
  return out;
}

double rw_entropy(const FiniteMeasure& mu, int n, std::size_t cap) {
  if (n < 1) throw PreconditionFailed("rw_entropy: n >= 1");
  double words = std::pow(double(mu.size()), double(n));
  if (words > double(cap)) throw CapExceeded("rw_entropy: kappa^n exceeds enumeration cap");
  FiniteMeasure conv = mu;
  for (int j = 1; j < n; ++j) conv = convolve(conv, mu);
  return shannon_entropy(conv) / double(n);
}

McEstimate lyapunov_mc(const FiniteMeasure& mu, int n, int trials, std::uint64_t seed, Exec ex) {
  if (n < 1 || trials < 2) throw PreconditionFailed("lyapunov_mc: need n >= 1 and trials >= 2");
  std::vector<double> vals(trials);
  for_each_index(trials, ex, [&](std::size_t t) {
    Rng rng(seed_for(seed, t));
    LedgerProduct prod;
    for (int j = 0; j < n; ++j) prod.mul_left(mu.atoms[rng.pick(mu.probs)]);
    vals[t] = prod.log_norm() / double(n);
  });
  // shift by the first sample before averaging: degenerate draws (all samples
  // bitwise equal) then yield an exactly zero spread
  double shift = 0.0;
  for (double v : vals) shift += v - vals[0];
  double mean = vals[0] + shift / trials;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  McEstimate est;
  est.estimate = mean;
  est.stderr_ = std::sqrt(ss / (double(trials) * double(trials - 1)));
  est.n = n;
  est.trials = trials;
  return est;
}

namespace {

double cdf_sup_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double ca = 0.0, cb = 0.0, best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
    best = std::max(best, std::abs(ca - cb));
  }
  return best;
}

}  // namespace

std::vector<double> apply_markov_operator(const FiniteMeasure& mu, Direction dir,
                                          const std::vector<double>& weights) {
  int bins = int(weights.size());
  std::vector<Mat2> maps = mu.atoms;
  if (dir == Direction::backward)
    for (Mat2& A : maps) A = A.inv();

  std::vector<double> next(bins, 0.0);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (int m = 0; m < bins; ++m) {
      double theta = (m + 0.5) * kPi / bins;
      ProjPoint img = apply(maps[i], ProjPoint::from_angle(theta));
      double pos = img.angle() / kPi * bins - 0.5;
      double f = std::floor(pos);
      double frac = pos - f;
      int lo = int(f);
      int hi = lo + 1;
      lo = ((lo % bins) + bins) % bins;
      hi = ((hi % bins) + bins) % bins;
      double mass = weights[m] * mu.probs[i];
      next[lo] += mass * (1.0 - frac);
      next[hi] += mass * frac;
    }
  }
  return next;
}

DiscretizedP1Measure stationary_measure(const FiniteMeasure& mu, Direction dir, int bins,
                                        int iters) {
  if (bins < 16) throw PreconditionFailed("stationary_measure: bins >= 16");
  DiscretizedP1Measure out;
  out.bins = bins;
  out.weights.assign(bins, 1.0 / bins);
  out.residual = 1.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> next = apply_markov_operator(mu, dir, out.weights);
    out.residual = cdf_sup_dist(out.weights, next);
    out.weights = std::move(next);
    out.iters_used = it + 1;
    if (out.residual < 1e-10) {
      out.converged = true;
      break;
    }
  }
  return out;
}

DeviationCheck entropy_deviation_check(const FiniteMeasure& mu, int n, double beta, int trials,
                                       std::uint64_t seed, Exec ex) {
  if (n < 1 || !(beta > 0.0)) throw PreconditionFailed("entropy_deviation_check: n >= 1, beta > 0");
  double H = shannon_entropy(mu);
  double h = 0.0;
  for (double p : mu.probs) h = std::max(h, -std::log(p));
  std::vector<int> hit(trials, 0);
  for_each_index(trials, ex, [&](std::size_t t) {
    Rng rng(seed_for(seed, t));
    double logp = 0.0;
    for (int j = 0; j < n; ++j) logp += std::log(mu.probs[rng.pick(mu.probs)]);
    hit[t] = (std::abs(logp / n + H) > beta) ? 1 : 0;
  });
  DeviationCheck out;
  double f = std::accumulate(hit.begin(), hit.end(), 0.0) / trials;
  out.observed_freq = f;
  out.hoeffding_bound = 2.0 * std::exp(-2.0 * n * beta * beta / (h * h));
  out.stderr_ = std::sqrt(f * (1.0 - f) / trials);
  out.ok = out.observed_freq <= out.hoeffding_bound + 3.0 * out.stderr_;
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy <= 1e-30) {
    fit.r2 = 1.0;  // flat data perfectly fit by a flat line
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

DimensionEstimate local_dimension(const DiscretizedP1Measure& eta, int samples,
                                  const std::vector<double>& scales, std::uint64_t seed) {
  if (scales.size() < 2) throw DegenerateScales("local_dimension: need at least 2 scales");
  double bin_width = kPi / eta.bins;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    if (s > 0 && !(scales[s] < scales[s - 1]))
      throw DegenerateScales("local_dimension: scales must be strictly decreasing");
    if (!(scales[s] > bin_width) || !(scales[s] < 1.0))
      throw DegenerateScales("local_dimension: scales must lie in (bin width, 1)");
  }

  int bins = eta.bins;
  std::vector<double> slope_acc(samples), r2_acc(samples);
  for_each_index(samples, Exec::serial, [&](std::size_t t) {
    Rng rng(seed_for(seed, t));
    int mx = rng.pick(eta.weights);
    std::vector<double> lx, ly;
    lx.reserve(scales.size());
    ly.reserve(scales.size());
    for (double delta : scales) {
      double half = std::asin(std::min(1.0, delta));
      int reach = int(half / bin_width);
      double mass = 0.0;
      for (int off = -reach; off <= reach; ++off) {
        int m = ((mx + off) % bins + bins) % bins;
        // angular distance from the sampled center, folded mod pi
        double ang = std::abs(off) * bin_width;
        ang = std::min(ang, kPi - ang);
        if (ang <= half) mass += eta.weights[m];
      }
      if (mass <= 0.0) mass = 1e-300;
      lx.push_back(std::log(delta));
      ly.push_back(std::log(mass));
    }
    LineFit fit = fit_line(lx, ly);
    slope_acc[t] = fit.slope;
    r2_acc[t] = fit.r2;
  });
  DimensionEstimate out;
  out.dim_estimate = std::accumulate(slope_acc.begin(), slope_acc.end(), 0.0) / samples;
  out.fit_r2 = std::accumulate(r2_acc.begin(), r2_acc.end(), 0.0) / samples;
  return out;
}

}  // namespace sl2lab
