#pragma once

#include <cstdint>
#include <string>

#include "sl2lab/tridiag.hpp"

namespace sl2lab {

struct DegenerateGap : PreconditionFailed {
  using PreconditionFailed::PreconditionFailed;
};
struct ZeroExponent : NumericalError {
  using NumericalError::NumericalError;
};
struct InsufficientSignal : NumericalError {
  using NumericalError::NumericalError;
};

struct EnergyCurve {
  std::vector<double> energies;
  std::vector<double> values;
  std::vector<double> value_stderr;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string kind;  // "lyapunov" or "ids"
};

EnergyCurve lyapunov_curve(const EnergyFamily& fam, const std::vector<double>& energies, int n,
                           int samples, std::uint64_t seed, Exec ex = Exec::parallel);

EnergyCurve to_energy_curve(const IdsCurve& ids);

struct HolderEstimate {
  double E0 = 0.0;
  std::vector<double> scales;
  std::vector<double> oscillations;
  double alpha_hat = 0.0;
  double fit_r2 = 0.0;
};

// oscillation of the curve over [E0-h, E0+h] per scale; alpha_hat is the
// least-squares slope of log oscillation against log h.  Oscillation is
// max - min over the window (two-sided local regularity), not the endpoint
// difference, since Lyapunov curves are not monotone.
HolderEstimate holder_scan(const EnergyCurve& curve, double E0, const std::vector<double>& scales);

// same scan driven by fresh finite-volume IDS estimates at the window ends
HolderEstimate holder_scan_ids(const EnergyFamily& fam, double E0,
                               const std::vector<double>& scales, int n, int samples,
                               std::uint64_t seed, Exec ex = Exec::parallel);

// default scan scales h_j = 2^-j, j = 4..14
std::vector<double> default_holder_scales();

// 2 log 2 / arccosh(1 + |a-b|/2)
double halperin_threshold(double a, double b);

// two-atom family with atoms S(a-E), S(b-E) at weight 1/2 each: the
// Bernoulli potential of Halperin's two-level model, written as a
// Schrodinger pair so both atoms keep det = 1
EnergyFamily halperin_family(double a, double b);

struct BoundReport {
  double H = 0.0;
  double L = 0.0;
  double L_stderr = 0.0;
  double ratio = 0.0;  // H / L
  double alpha_hat = 0.0;
  double fit_r2 = 0.0;
  bool insufficient_signal = false;
  std::string verdict;  // "consistent" or "inconsistent"
};

BoundReport bound_report(const EnergyFamily& fam, double E0, int n, int samples,
                         std::uint64_t seed, Exec ex = Exec::parallel,
                         std::vector<double> scales = {});

}  // namespace sl2lab
