#include "sl2lab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sl2lab {

EnergyCurve lyapunov_curve(const EnergyFamily& fam, const std::vector<double>& energies, int n,
                           int samples, std::uint64_t seed, Exec ex) {
  if (energies.empty() || !std::is_sorted(energies.begin(), energies.end()))
    throw PreconditionFailed("lyapunov_curve: energies must be sorted ascending");

  EnergyCurve c;
  c.energies = energies;
  c.n = n;
  c.samples = samples;
  c.seed = seed;
  c.kind = "lyapunov";
  c.values.reserve(energies.size());
  c.value_stderr.reserve(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    McEstimate est = lyapunov_mc(family_measure(fam, energies[i]), n, samples,
                                 seed_for(seed, std::uint64_t(i)), ex);
    c.values.push_back(est.estimate);
    c.value_stderr.push_back(est.stderr_);
  }
  return c;
}

EnergyCurve to_energy_curve(const IdsCurve& ids) {
  EnergyCurve c;
  c.energies = ids.energies;
  c.values = ids.values;
  c.n = ids.n;
  c.samples = ids.samples;
  c.seed = ids.seed;
  c.kind = "ids";
  return c;
}

namespace {

void validate_scales(const std::vector<double>& scales) {
  if (scales.size() < 4) throw PreconditionFailed("holder_scan: need at least 4 scales");
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (!(scales[j] > 0.0)) throw PreconditionFailed("holder_scan: scales must be positive");
    if (j > 0 && !(scales[j] < scales[j - 1]))
      throw PreconditionFailed("holder_scan: scales must be strictly decreasing");
  }
}

HolderEstimate fit_oscillations(double E0, const std::vector<double>& scales,
                                const std::vector<double>& osc, const std::vector<double>& se) {
  double vmax = 0.0;
  for (double o : osc) vmax = std::max(vmax, std::abs(o));
  const double floor_ = 1e-13 * std::max(1.0, vmax);

  bool any_signal = false;
  for (std::size_t j = 0; j < osc.size(); ++j)
    if (osc[j] >= std::max(10.0 * se[j], floor_)) any_signal = true;
  if (!any_signal)
    throw InsufficientSignal("holder_scan: oscillations are indistinguishable from noise");

  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < osc.size(); ++j) {
    if (!(osc[j] > 0.0)) continue;
    lx.push_back(std::log(scales[j]));
    ly.push_back(std::log(osc[j]));
  }
  if (lx.size() < 2)
    throw InsufficientSignal("holder_scan: too few nonzero oscillations to fit");

  LineFit fit = fit_line(lx, ly);
  HolderEstimate est;
  est.E0 = E0;
  est.scales = scales;
  est.oscillations = osc;
  est.alpha_hat = fit.slope;
  est.fit_r2 = fit.r2;
  return est;
}

}  // namespace

HolderEstimate holder_scan(const EnergyCurve& curve, double E0, const std::vector<double>& scales) {
  validate_scales(scales);
  if (curve.energies.empty() || curve.energies.size() != curve.values.size())
    throw PreconditionFailed("holder_scan: malformed curve");
  if (E0 < curve.energies.front() || E0 > curve.energies.back())
    throw PreconditionFailed("holder_scan: E0 outside the curve range");

  std::vector<double> osc(scales.size(), 0.0), se(scales.size(), 0.0);
  for (std::size_t j = 0; j < scales.size(); ++j) {
    double h = scales[j];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, semax = 0.0;
    int inside = 0;
    for (std::size_t i = 0; i < curve.energies.size(); ++i) {
      if (std::abs(curve.energies[i] - E0) > h) continue;
      lo = std::min(lo, curve.values[i]);
      hi = std::max(hi, curve.values[i]);
      if (i < curve.value_stderr.size()) semax = std::max(semax, curve.value_stderr[i]);
      ++inside;
    }
    if (inside < 2) throw PreconditionFailed("holder_scan: scale below the curve resolution");
    osc[j] = hi - lo;
    se[j] = semax * std::sqrt(2.0);
  }
  return fit_oscillations(E0, scales, osc, se);
}

HolderEstimate holder_scan_ids(const EnergyFamily& fam, double E0,
                               const std::vector<double>& scales, int n, int samples,
                               std::uint64_t seed, Exec ex) {
  validate_scales(scales);
  std::vector<double> osc(scales.size(), 0.0), se(scales.size(), 0.0);
  for (std::size_t j = 0; j < scales.size(); ++j) {
    DeltaIds d = ids_window(fam, E0 - scales[j], E0 + scales[j], n, samples,
                            seed_for(seed, std::uint64_t(j)), ex);
    osc[j] = d.mean;
    se[j] = d.stderr_;
  }
  return fit_oscillations(E0, scales, osc, se);
}

std::vector<double> default_holder_scales() {
  std::vector<double> s;
  for (int j = 4; j <= 14; ++j) s.push_back(std::ldexp(1.0, -j));
  return s;
}

double halperin_threshold(double a, double b) {
  if (a == b) throw DegenerateGap("halperin_threshold: a and b coincide");
  return 2.0 * std::log(2.0) / std::acosh(1.0 + 0.5 * std::abs(a - b));
}

EnergyFamily halperin_family(double a, double b) {
  return direct_family({a, b}, {0.5, 0.5});
}

BoundReport bound_report(const EnergyFamily& fam, double E0, int n, int samples,
                         std::uint64_t seed, Exec ex, std::vector<double> scales) {
  if (scales.empty()) scales = default_holder_scales();

  BoundReport rep;
  rep.H = shannon_entropy(family_measure(fam, E0));
  McEstimate L = lyapunov_mc(family_measure(fam, E0), n, samples, seed_for(seed, 1), ex);
  rep.L = L.estimate;
  rep.L_stderr = L.stderr_;
  if (!(rep.L > 5.0 * rep.L_stderr))
    throw ZeroExponent("bound_report: Lyapunov estimate not separated from zero");
  rep.ratio = rep.H / rep.L;

  try {
    HolderEstimate h = holder_scan_ids(fam, E0, scales, n, samples, seed_for(seed, 2), ex);
    rep.alpha_hat = h.alpha_hat;
    rep.fit_r2 = h.fit_r2;
  } catch (const InsufficientSignal&) {
    rep.insufficient_signal = true;
    rep.alpha_hat = std::numeric_limits<double>::quiet_NaN();
    rep.fit_r2 = std::numeric_limits<double>::quiet_NaN();
  }

  rep.verdict = (rep.insufficient_signal || rep.alpha_hat <= rep.ratio + 0.15) ? "consistent"
                                                                               : "inconsistent";
  return rep;
}

}  // namespace sl2lab
