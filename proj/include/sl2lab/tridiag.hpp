#pragma once

#include <cstdint>
#include <utility>

#include "sl2lab/embed.hpp"

namespace sl2lab {

// symmetric tridiagonal with constant off-diagonal -1 (truncated Schrodinger
// operator with Dirichlet ends)
struct Tridiag {
  std::vector<double> diag;

  int n() const { return int(diag.size()); }
};

// number of eigenvalues <= t, by the Sturm/inertia pivot recursion on H - tI
int count_below(const Tridiag& H, double t);

// [min diag - 2, max diag + 2]
std::pair<double, double> gershgorin(const Tridiag& H);

// all n eigenvalues by divide-and-conquer bisection on count_below
std::vector<double> eigenvalues(const Tridiag& H, double tol);

struct IdsCurve {
  std::vector<double> energies;
  std::vector<double> values;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
};

IdsCurve finite_ids(const EnergyFamily& fam, int n, const std::vector<double>& energies,
                    int samples, std::uint64_t seed, Exec ex = Exec::parallel);

// Monte-Carlo mean and stderr of (count_below(b) - count_below(a)) / n
struct DeltaIds {
  double mean = 0.0;
  double stderr_ = 0.0;
};
DeltaIds ids_window(const EnergyFamily& fam, double a, double b, int n, int samples,
                    std::uint64_t seed, Exec ex = Exec::parallel);

struct ThoulessReport {
  double L_transfer = 0.0;
  double L_thouless = 0.0;
  double gap = 0.0;
  double transfer_stderr = 0.0;
  double thouless_stderr = 0.0;
};

// both sides of the Thouless identity on the same sampled potentials,
// per-site normalization; log|E - lambda| clipped below at log(clip)
ThoulessReport thouless_gap(const EnergyFamily& fam, double E, int n, int samples,
                            std::uint64_t seed, double clip = 1e-12, Exec ex = Exec::parallel);

// Temple's lemma check: k orthonormal almost-eigenvectors with residual <= delta
// force >= k eigenvalues in (lambda0 - delta, lambda0 + delta)
bool temple_verify(const Tridiag& H, const std::vector<std::vector<double>>& vectors,
                   double lambda0, double delta);

struct OscillationReport {
  double lhs = 0.0;  // Delta_{I_delta} N at truncation n
  double rhs = 0.0;  // nu(Sigma(delta,k,I)) / (k+2)
  double lhs_stderr = 0.0;
  double rhs_stderr = 0.0;
  bool ok = false;   // lhs >= rhs - 3 pooled stderr
};

OscillationReport ids_oscillation(const EnergyFamily& fam, double I_lo, double I_hi, double delta,
                                  int k, int n, int samples, std::uint64_t seed,
                                  Exec ex = Exec::parallel);

}  // namespace sl2lab
