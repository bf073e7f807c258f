#include "sl2lab/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sl2lab/matching.hpp"

namespace sl2lab {

namespace {

constexpr double kPivotFloor = 1e-290;

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};

MeanStderr reduce(const std::vector<double>& vals) {
  const int m = int(vals.size());
  // shifted two-pass mean: identical samples produce an exactly zero spread
  double shift = 0.0;
  for (double v : vals) shift += v - vals[0];
  double mean = vals[0] + shift / m;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  double se = m > 1 ? std::sqrt(ss / (double(m) * (m - 1))) : 0.0;
  return {mean, se};
}

}  // namespace

int count_below(const Tridiag& H, double t) {
  int cnt = 0;
  double q = std::numeric_limits<double>::infinity();
  for (double d : H.diag) {
    q = (d - t) - 1.0 / q;
    if (std::abs(q) < kPivotFloor) q = (q > 0.0) ? kPivotFloor : -kPivotFloor;
    if (q < 0.0) ++cnt;
  }
  return cnt;
}

std::pair<double, double> gershgorin(const Tridiag& H) {
  if (H.diag.empty()) throw PreconditionFailed("gershgorin: empty matrix");
  auto [lo, hi] = std::minmax_element(H.diag.begin(), H.diag.end());
  return {*lo - 2.0, *hi + 2.0};
}

std::vector<double> eigenvalues(const Tridiag& H, double tol) {
  if (!(tol > 0.0)) throw PreconditionFailed("eigenvalues: tol must be positive");
  const int n = H.n();
  if (n == 0) return {};
  auto [glo, ghi] = gershgorin(H);

  struct Piece {
    double lo, hi;
    int clo, chi;
  };
  std::vector<double> out(n, 0.0);
  std::vector<Piece> stack{{glo - tol, ghi + tol, 0, n}};
  while (!stack.empty()) {
    Piece p = stack.back();
    stack.pop_back();
    if (p.chi == p.clo) continue;
    double mid = 0.5 * (p.lo + p.hi);
    if (p.hi - p.lo <= tol || mid <= p.lo || mid >= p.hi) {
      for (int i = p.clo; i < p.chi; ++i) out[i] = mid;
      continue;
    }
    int cmid = std::clamp(count_below(H, mid), p.clo, p.chi);
    stack.push_back({p.lo, mid, p.clo, cmid});
    stack.push_back({mid, p.hi, cmid, p.chi});
  }
  return out;
}

IdsCurve finite_ids(const EnergyFamily& fam, int n, const std::vector<double>& energies,
                    int samples, std::uint64_t seed, Exec ex) {
  if (n < 4) throw PreconditionFailed("finite_ids: n must be at least 4");
  if (energies.empty() || !std::is_sorted(energies.begin(), energies.end()))
    throw PreconditionFailed("finite_ids: energies must be sorted ascending");
  if (samples < 1) throw PreconditionFailed("finite_ids: samples must be positive");

  const int G = int(energies.size());
  std::vector<double> acc(std::size_t(samples) * G, 0.0);
  for_each_index(samples, ex, [&](long long s) {
    Rng rng(seed_for(seed, std::uint64_t(s)));
    Tridiag H{sample_potential(fam.system, rng, n)};
    for (int g = 0; g < G; ++g)
      acc[std::size_t(s) * G + g] = double(count_below(H, energies[g])) / n;
  });

  IdsCurve c;
  c.energies = energies;
  c.values.assign(G, 0.0);
  c.n = n;
  c.samples = samples;
  c.seed = seed;
  for (int s = 0; s < samples; ++s)
    for (int g = 0; g < G; ++g) c.values[g] += acc[std::size_t(s) * G + g];
  for (double& v : c.values) v /= samples;
  return c;
}

DeltaIds ids_window(const EnergyFamily& fam, double a, double b, int n, int samples,
                    std::uint64_t seed, Exec ex) {
  if (n < 4) throw PreconditionFailed("ids_window: n must be at least 4");
  if (!(b > a)) throw PreconditionFailed("ids_window: window must have b > a");
  if (samples < 1) throw PreconditionFailed("ids_window: samples must be positive");

  std::vector<double> vals(samples, 0.0);
  for_each_index(samples, ex, [&](long long s) {
    Rng rng(seed_for(seed, std::uint64_t(s)));
    Tridiag H{sample_potential(fam.system, rng, n)};
    vals[s] = double(count_below(H, b) - count_below(H, a)) / n;
  });
  auto [mean, se] = reduce(vals);
  return {mean, se};
}

ThoulessReport thouless_gap(const EnergyFamily& fam, double E, int n, int samples,
                            std::uint64_t seed, double clip, Exec ex) {
  if (n < 2) throw PreconditionFailed("thouless_gap: n must be at least 2");
  if (samples < 1) throw PreconditionFailed("thouless_gap: samples must be positive");
  if (!(clip > 0.0)) throw PreconditionFailed("thouless_gap: clip must be positive");

  std::vector<double> lt(samples, 0.0), lth(samples, 0.0);
  const double floor_log = std::log(clip);
  for_each_index(samples, ex, [&](long long s) {
    Rng rng(seed_for(seed, std::uint64_t(s)));
    auto phi = sample_potential(fam.system, rng, n);

    LedgerProduct P;
    for (double p : phi) P.mul_left(schrodinger_matrix(p - E));
    lt[s] = P.log_norm() / n;

    auto lam = eigenvalues(Tridiag{phi}, 1e-8);
    double acc = 0.0;
    for (double l : lam) acc += std::max(std::log(std::abs(E - l)), floor_log);
    lth[s] = acc / n;
  });

  auto t = reduce(lt);
  auto th = reduce(lth);
  return {t.mean, th.mean, std::abs(t.mean - th.mean), t.se, th.se};
}

bool temple_verify(const Tridiag& H, const std::vector<std::vector<double>>& vectors,
                   double lambda0, double delta) {
  if (vectors.empty()) throw PreconditionFailed("temple_verify: no trial vectors");
  if (!(delta > 0.0)) throw PreconditionFailed("temple_verify: delta must be positive");
  const int n = H.n();
  const int k = int(vectors.size());
  for (const auto& u : vectors)
    if (int(u.size()) != n) throw PreconditionFailed("temple_verify: vector length mismatch");

  auto dot = [n](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  };
  auto matvec = [&](const std::vector<double>& u) {
    std::vector<double> w(n, 0.0);
    for (int i = 0; i < n; ++i) {
      w[i] = H.diag[i] * u[i];
      if (i > 0) w[i] -= u[i - 1];
      if (i + 1 < n) w[i] -= u[i + 1];
    }
    return w;
  };

  std::vector<std::vector<double>> hu(k);
  for (int i = 0; i < k; ++i) hu[i] = matvec(vectors[i]);

  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double g = dot(vectors[i], vectors[j]) - (i == j ? 1.0 : 0.0);
      if (std::abs(g) > 1e-10)
        throw PreconditionFailed("temple_verify: trial vectors not orthonormal");
    }
  }
  for (int i = 0; i < k; ++i) {
    double rr = 0.0;
    for (int a = 0; a < n; ++a) {
      double r = hu[i][a] - lambda0 * vectors[i][a];
      rr += r * r;
    }
    if (std::sqrt(rr) > delta)
      throw PreconditionFailed("temple_verify: residual exceeds delta");
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      if (std::abs(dot(hu[i], vectors[j])) > 1e-8)
        throw PreconditionFailed("temple_verify: cross term <Hu_i, u_j> too large");
      if (std::abs(dot(hu[i], hu[j])) > 1e-8)
        throw PreconditionFailed("temple_verify: cross term <Hu_i, Hu_j> too large");
    }
  }

  int cnt = count_below(H, lambda0 + delta) - count_below(H, lambda0 - delta);
  return cnt >= k;
}

OscillationReport ids_oscillation(const EnergyFamily& fam, double I_lo, double I_hi, double delta,
                                  int k, int n, int samples, std::uint64_t seed, Exec ex) {
  if (!(delta > 0.0)) throw PreconditionFailed("ids_oscillation: delta must be positive");
  if (k < 2) throw PreconditionFailed("ids_oscillation: k must be at least 2");
  if (!(I_hi > I_lo)) throw PreconditionFailed("ids_oscillation: empty energy interval");
  if (n < k + 2 || n % (k + 2) != 0)
    throw PreconditionFailed("ids_oscillation: n must be a positive multiple of k+2");
  if (samples < 1) throw PreconditionFailed("ids_oscillation: samples must be positive");

  DeltaIds lhs = ids_window(fam, I_lo - delta, I_hi + delta, n, samples,
                            seed_for(seed, 1), ex);
  MatchingSearch det = find_matchings(fam, k, delta, I_lo, I_hi, samples,
                                      seed_for(seed, 2), ex);

  OscillationReport r;
  r.lhs = lhs.mean;
  r.lhs_stderr = lhs.stderr_;
  r.rhs = det.measure_estimate / (k + 2);
  r.rhs_stderr = det.stderr_ / (k + 2);
  double pooled = std::hypot(r.lhs_stderr, r.rhs_stderr);
  r.ok = r.lhs >= r.rhs - 3.0 * pooled;
  return r;
}

}  // namespace sl2lab
