#include "sl2lab/embed.hpp"

#include <cmath>

namespace sl2lab {

SchrodingerDecomposition decompose(const Mat2& B) {
  const double cand[3] = {0.0, 1.0, -1.0};
  double t0 = 0.0, best = -1.0;
  for (double c : cand) {
    double v = std::abs(B.c + B.d * c);
    if (v > best) {
      best = v;
      t0 = c;
    }
  }
  Mat2 Bp = B * schrodinger_inv(t0);
  double m12 = Bp.b, m21 = Bp.c, m22 = Bp.d;
  SchrodingerDecomposition dec;
  dec.source = B;
  // + 0.0 normalizes -0.0 so exported tables are sign-clean
  dec.t = {t0, -(m21 + 1.0) / m22 + 0.0, -m22 + 0.0, (m12 - 1.0) / m22 + 0.0};
  dec.ill_conditioned = std::abs(m22) < 1e-6;
  Mat2 back = schrodinger_matrix(dec.t[3]) * schrodinger_matrix(dec.t[2]) *
              schrodinger_matrix(dec.t[1]) * schrodinger_matrix(dec.t[0]);
  dec.residual = (back - B).max_abs();
  return dec;
}

std::vector<double> MarkovSystem::stationary() const {
  std::vector<double> nu(std::size_t(kappa) * block_len);
  for (int i = 0; i < kappa; ++i)
    for (int j = 0; j < block_len; ++j) nu[std::size_t(i) * block_len + j] = probs[i] / block_len;
  return nu;
}

double MarkovSystem::stationarity_residual() const {
  std::vector<double> nu = stationary();
  double worst = 0.0;
  // inflow to (i, j+1) is nu(i, j); inflow to (k, 0) is mu_k * sum_i nu(i, last)
  double tail = 0.0;
  for (int i = 0; i < kappa; ++i) tail += nu[std::size_t(i) * block_len + block_len - 1];
  for (int i = 0; i < kappa; ++i) {
    worst = std::max(worst, std::abs(probs[i] * tail - nu[std::size_t(i) * block_len]));
    for (int j = 1; j < block_len; ++j)
      worst = std::max(worst,
                       std::abs(nu[std::size_t(i) * block_len + j - 1] - nu[std::size_t(i) * block_len + j]));
  }
  return worst;
}

MarkovSystem build_markov_system(const FiniteMeasure& mu) {
  mu.validate();
  MarkovSystem sys;
  sys.kappa = int(mu.size());
  sys.block_len = 4;
  sys.probs = mu.probs;
  sys.table.reserve(mu.size());
  for (const Mat2& A : mu.atoms) sys.table.push_back(decompose(A).t);
  return sys;
}

MarkovSystem direct_markov_system(const std::vector<double>& potentials,
                                  const std::vector<double>& probs) {
  if (potentials.empty() || potentials.size() != probs.size())
    throw InvalidMeasure("direct_markov_system: potentials/probs length mismatch");
  MarkovSystem sys;
  sys.kappa = int(potentials.size());
  sys.block_len = 1;
  sys.probs = probs;
  for (double p : potentials) sys.table.push_back({p, 0.0, 0.0, 0.0});
  return sys;
}

Mat2 block_atom(const MarkovSystem& sys, int i, double E) {
  Mat2 m = schrodinger_matrix(sys.table[i][0] - E);
  for (int j = 1; j < sys.block_len; ++j) m = schrodinger_matrix(sys.table[i][j] - E) * m;
  return m;
}

FiniteMeasure family_measure(const EnergyFamily& fam, double E) {
  FiniteMeasure out;
  out.probs = fam.system.probs;
  out.atoms.reserve(fam.system.kappa);
  for (int i = 0; i < fam.system.kappa; ++i) out.atoms.push_back(block_atom(fam.system, i, E));
  return out;
}

EnergyFamily make_family(const FiniteMeasure& mu) {
  EnergyFamily fam;
  fam.base = mu;
  fam.system = build_markov_system(mu);
  return fam;
}

EnergyFamily direct_family(const std::vector<double>& potentials,
                           const std::vector<double>& probs) {
  EnergyFamily fam;
  fam.system = direct_markov_system(potentials, probs);
  fam.base.probs = probs;
  for (double p : potentials) fam.base.atoms.push_back(schrodinger_matrix(p));
  fam.base.validate();
  return fam;
}

EnergyFamily zero_potential_family() { return direct_family({0.0}, {1.0}); }

LedgerProduct embedded_product(const EnergyFamily& fam, double E, const std::vector<int>& word) {
  LedgerProduct prod;
  for (int idx : word) prod.mul_left(block_atom(fam.system, idx, E));
  return prod;
}

ChainSample sample_chain(const MarkovSystem& sys, Rng& rng, int n) {
  ChainSample out;
  out.phi.reserve(n);
  out.sym.reserve(n);
  int phase = int(rng.uniform() * sys.block_len);
  if (phase >= sys.block_len) phase = sys.block_len - 1;
  int atom = rng.pick(sys.probs);
  while (int(out.phi.size()) < n) {
    out.phi.push_back(sys.table[atom][phase]);
    out.sym.push_back({atom, phase});
    if (++phase == sys.block_len) {
      phase = 0;
      atom = rng.pick(sys.probs);
    }
  }
  return out;
}

std::vector<double> sample_potential(const MarkovSystem& sys, Rng& rng, int n) {
  return sample_chain(sys, rng, n).phi;
}

std::vector<double> word_potential(const MarkovSystem& sys, const std::vector<int>& word,
                                   int start_phase) {
  std::vector<double> phi;
  phi.reserve(word.size() * sys.block_len);
  int phase = start_phase;
  for (std::size_t w = 0; w < word.size(); ++w) {
    for (; phase < sys.block_len; ++phase) phi.push_back(sys.table[word[w]][phase]);
    phase = 0;
  }
  return phi;
}

}  // namespace sl2lab
