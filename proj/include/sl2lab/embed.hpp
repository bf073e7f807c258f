#pragma once

#include <array>
#include <cstdint>

#include "sl2lab/measure.hpp"

namespace sl2lab {

// S(t) = [[t,-1],[1,0]]
inline Mat2 schrodinger_matrix(double t) { return {t, -1.0, 1.0, 0.0}; }
inline Mat2 schrodinger_inv(double t) { return {0.0, 1.0, -1.0, t}; }

struct SchrodingerDecomposition {
  std::array<double, 4> t{};  // B = S(t3) S(t2) S(t1) S(t0)
  Mat2 source;
  double residual = 0.0;      // max-abs entry of multiply-back minus source
  bool ill_conditioned = false;
};

// Four-factor solver.  t0 is picked from {0, 1, -1} (first maximizer in that
// order) to maximize |c + d t0|; with B' = B S(t0)^-1 = [[m11,m12],[m21,m22]]
// the remaining factors are t2 = -m22, t1 = -(m21+1)/m22, t3 = (m12-1)/m22.
// Deterministic, so golden outputs are stable under the non-uniqueness of the
// decomposition.
SchrodingerDecomposition decompose(const Mat2& B);

// Markov shift over Lambda = {atoms} x {phases}.  block_len = 4 for embedded
// families (four Schrodinger factors per atom), 1 for families whose atoms
// are single Schrodinger matrices (Anderson, Halperin, zero potential).
struct MarkovSystem {
  int kappa = 0;
  int block_len = 4;
  std::vector<std::array<double, 4>> table;  // row i: t^i_j, entries j >= block_len unused
  std::vector<double> probs;

  std::vector<double> stationary() const;    // nu over Lambda, length kappa * block_len
  double stationarity_residual() const;      // max |(K* nu - nu)(state)|
};

MarkovSystem build_markov_system(const FiniteMeasure& mu);
MarkovSystem direct_markov_system(const std::vector<double>& potentials,
                                  const std::vector<double>& probs);

struct EnergyFamily {
  FiniteMeasure base;
  MarkovSystem system;
};

EnergyFamily make_family(const FiniteMeasure& mu);
EnergyFamily direct_family(const std::vector<double>& potentials,
                           const std::vector<double>& probs);
EnergyFamily zero_potential_family();

// product of S(t^i_j - E) over one block, highest phase leftmost
Mat2 block_atom(const MarkovSystem& sys, int i, double E);

FiniteMeasure family_measure(const EnergyFamily& fam, double E);

// product over an atom word (index 0 applied first) with the log-norm ledger;
// shares the exact arithmetic path with family_measure + lyapunov products
LedgerProduct embedded_product(const EnergyFamily& fam, double E, const std::vector<int>& word);

// one site of Lambda: atom index + phase within the block
struct ChainSample {
  std::vector<double> phi;
  std::vector<std::array<int, 2>> sym;
};

// stationary sample: phase uniform, atom by mu, then the deterministic
// block cycle with fresh mu-draws between blocks
ChainSample sample_chain(const MarkovSystem& sys, Rng& rng, int n);
std::vector<double> sample_potential(const MarkovSystem& sys, Rng& rng, int n);

// potential sites of a deterministic atom word starting at a given phase
std::vector<double> word_potential(const MarkovSystem& sys, const std::vector<int>& word,
                                   int start_phase = 0);

}  // namespace sl2lab
