#pragma once

#include <array>
#include <cstdint>

#include "sl2lab/embed.hpp"
#include "sl2lab/measure.hpp"

namespace sl2lab {

struct NoneFound : NumericalError {
  using NumericalError::NumericalError;
};
struct RootCountMismatch : NumericalError {
  using NumericalError::NumericalError;
};

// Dirichlet eigenvalue E of the k-site window together with the transfer data
// of the matched vector: norms_log[j] = log ||A_E^j e1||, j = 0..k
struct MatchingPoint {
  double E = 0.0;
  double tau = 0.0;        // ||A_E^k e1|| / max_{0<=j<k} ||A_E^j e1||
  double edge_dist = 0.0;  // d(A_E^k e1 hat, e2 hat)
  int max_growth_index = 0;
  std::vector<double> norms_log;
};

std::vector<MatchingPoint> matching_energies(const std::vector<double>& phi, double tol = 1e-12);

struct MatchingRecord {
  std::vector<std::array<int, 2>> word;  // sampled Lambda symbols (atom, phase)
  std::vector<double> phi;
  double E = 0.0;
  double tau = 0.0;
};

struct MatchingSearch {
  std::vector<MatchingRecord> records;
  double measure_estimate = 0.0;  // fraction of windows with a (delta,k,I)-matching
  double stderr_ = 0.0;
  int samples = 0;
  int hits = 0;
};

MatchingSearch find_matchings(const EnergyFamily& fam, int k, double delta, double I_lo,
                              double I_hi, int samples, std::uint64_t seed,
                              Exec ex = Exec::parallel);

// roots of tr - rho for rho in {-1, 0, 1} plus interior critical points of the
// trace curve over [E_lo, E_hi]; throws RootCountMismatch when the grid is too
// coarse to bracket all n roots of some level (caller refines)
struct TraceDiagnostics {
  std::vector<double> rhos;
  std::vector<std::vector<double>> roots;
  std::vector<double> critical_energies;
  std::vector<double> critical_traces;
  double min_critical_abs = 0.0;
  bool morse_ok = false;
};

TraceDiagnostics trace_diagnostics(const std::vector<double>& phi, double E_lo, double E_hi,
                                   int grid);

// d/dE of the projective angle of A_E^n(v) (forward) or A_E^{-n}(v) (backward),
// by the telescoping sum over intermediate directions; positive = counterclockwise
double winding_derivative(const std::vector<double>& phi, double E, const ProjPoint& v,
                          Direction dir);

// energy velocities of the unstable/stable fixed directions of the word product
struct VelocityPair {
  double du = 0.0;
  double ds = 0.0;
};

VelocityPair stable_unstable_velocity(const std::vector<double>& phi, double E);

struct EllipticHit {
  std::vector<int> word;
  double E = 0.0;
  double trace = 0.0;
};

// scan atom words up to max_len for |tr| <= 2 - 1e-3 somewhere in
// [E0 - radius, E0 + radius]; one hit per distinct product, enumeration order
std::vector<EllipticHit> find_elliptic(const EnergyFamily& fam, double E0, int max_len,
                                       double radius, long long cap = 1000000);

struct TangencyRecord {
  std::vector<int> source_word;      // B, whose unstable direction is transported
  std::vector<int> transition_word;  // C (elliptic powers stored unrolled)
  std::vector<int> target_word;      // A, whose stable direction is hit
  double E = 0.0;
  double residual = 0.0;  // d(C_E u(B_E), s(A_E)), re-verified independently
  double gamma = 0.0;     // min log lambda over {A, B}
  double rho = 0.0;       // log ||C||
  double t = 0.0;         // -log of the smallest singular-direction gap over {A, B}
};

TangencyRecord make_tangency_record(const Mat2& A, const Mat2& B, const Mat2& C, double E);

TangencyRecord find_tangency(const EnergyFamily& fam, double E0, int max_len, double radius,
                             double min_lambda = 1.5, long long cap = 1000000);

bool is_controlled(const TangencyRecord& rec, double gamma, double rho, double t);

}  // namespace sl2lab
