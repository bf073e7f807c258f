#include "sl2lab/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "sl2lab/tridiag.hpp"

namespace sl2lab {

namespace {

constexpr double kHalfPi = 1.5707963267948966;
constexpr double kPi = 3.141592653589793238;

// telescoping sum for d/dE of the projective angle of the n-step image of v;
// every term shares the denominator ||A^n v||^2, carried in logs
double winding_core(const std::vector<double>& phi, double E, const ProjPoint& v, Direction dir) {
  const int n = int(phi.size());
  Vec2 u = v.rep();
  double ell_prev = 0.0;
  std::vector<double> slog(n), wdg(n);
  for (int j = 1; j <= n; ++j) {
    double site = (dir == Direction::forward) ? phi[j - 1] : phi[n - j];
    Mat2 f = (dir == Direction::forward) ? schrodinger_matrix(site - E) : schrodinger_inv(site - E);
    Vec2 fdu = (dir == Direction::forward) ? Vec2{-u.x, 0.0} : Vec2{0.0, -u.y};
    Vec2 w = f * u;
    double nw = norm(w);
    if (!(nw > 0.0)) throw NumericalError("winding_derivative: direction vanished");
    double ell = ell_prev + std::log(nw);
    u = (1.0 / nw) * w;
    slog[j - 1] = ell + ell_prev;
    wdg[j - 1] = wedge(u, fdu);
    ell_prev = ell;
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += std::exp(slog[j] - 2.0 * ell_prev) * wdg[j];
  return total;
}

}  // namespace

std::vector<MatchingPoint> matching_energies(const std::vector<double>& phi, double tol) {
  const int k = int(phi.size());
  if (k < 1) throw PreconditionFailed("matching_energies: empty potential");
  if (!(tol > 0.0)) throw PreconditionFailed("matching_energies: tol must be positive");

  const ProjPoint e2{Vec2{0.0, 1.0}};
  auto evs = eigenvalues(Tridiag{phi}, tol);

  std::vector<MatchingPoint> out;
  out.reserve(evs.size());
  for (double E0 : evs) {
    // Newton polish on the angle defect, clamped to a trust region around the
    // eigensolver root: near extreme eigenvalues the winding can reach 1e11,
    // where the evaluated defect is noise bound and an unguarded step can
    // escape to a neighboring root basin; keep the smallest measured defect
    const double trust = 4.0 * tol * std::max(1.0, std::abs(E0));
    double E = E0, bestE = E0;
    double bestg = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 8; ++it) {
      Vec2 w{1.0, 0.0};
      for (int j = 0; j < k; ++j) {
        w = schrodinger_matrix(phi[j] - E) * w;
        double nw = norm(w);
        if (!(nw > 0.0)) break;
        w = (1.0 / nw) * w;
      }
      double g = ProjPoint(w).angle() - kHalfPi;
      if (std::abs(g) < bestg) {
        bestg = std::abs(g);
        bestE = E;
      }
      if (std::abs(g) <= 1e-15) break;
      double gp = winding_core(phi, E, ProjPoint{}, Direction::forward);
      if (!std::isfinite(gp) || !(gp > 0.0)) break;
      double step = std::clamp(g / gp, -trust, trust);
      double next = std::clamp(E - step, E0 - trust, E0 + trust);
      if (!(std::abs(next - E) > 1e-18 * std::max(1.0, std::abs(E)))) break;
      E = next;
    }
    E = bestE;

    MatchingPoint p;
    p.E = E;
    p.norms_log.assign(std::size_t(k) + 1, 0.0);
    Vec2 w{1.0, 0.0};
    double ell = 0.0, best = 0.0;
    int bestj = 0;
    for (int j = 1; j <= k; ++j) {
      w = schrodinger_matrix(phi[j - 1] - E) * w;
      double nw = norm(w);
      if (!(nw > 0.0)) throw NumericalError("matching_energies: transfer vector vanished");
      ell += std::log(nw);
      w = (1.0 / nw) * w;
      p.norms_log[j] = ell;
      if (j <= k - 1 && ell > best) {
        best = ell;
        bestj = j;
      }
    }
    p.max_growth_index = bestj;
    p.tau = std::exp(p.norms_log[k] - best);
    p.edge_dist = proj_dist(ProjPoint(w), e2);
    out.push_back(std::move(p));
  }
  return out;
}

MatchingSearch find_matchings(const EnergyFamily& fam, int k, double delta, double I_lo,
                              double I_hi, int samples, std::uint64_t seed, Exec ex) {
  if (k < 4) throw PreconditionFailed("find_matchings: k must be at least 4");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw PreconditionFailed("find_matchings: delta must lie in (0, 1)");
  if (!(I_hi > I_lo)) throw PreconditionFailed("find_matchings: empty energy interval");
  if (samples < 1) throw PreconditionFailed("find_matchings: samples must be positive");

  std::vector<std::vector<MatchingRecord>> per(samples);
  std::vector<char> hit(samples, 0);
  for_each_index(samples, ex, [&](long long s) {
    Rng rng(seed_for(seed, std::uint64_t(s)));
    ChainSample chain = sample_chain(fam.system, rng, k);
    for (const auto& p : matching_energies(chain.phi, 1e-12)) {
      if (p.E < I_lo || p.E > I_hi || !(p.tau < delta)) continue;
      per[s].push_back({chain.sym, chain.phi, p.E, p.tau});
      hit[s] = 1;
    }
  });

  MatchingSearch out;
  out.samples = samples;
  for (int s = 0; s < samples; ++s) {
    out.hits += hit[s];
    for (auto& r : per[s]) out.records.push_back(std::move(r));
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const MatchingRecord& a, const MatchingRecord& b) {
              return std::tie(a.word, a.E) < std::tie(b.word, b.E);
            });
  double p = double(out.hits) / samples;
  out.measure_estimate = p;
  out.stderr_ = std::sqrt(p * (1.0 - p) / samples);
  return out;
}

TraceDiagnostics trace_diagnostics(const std::vector<double>& phi, double E_lo, double E_hi,
                                   int grid) {
  const int n = int(phi.size());
  if (n < 1) throw PreconditionFailed("trace_diagnostics: empty potential");
  if (!(E_hi > E_lo)) throw PreconditionFailed("trace_diagnostics: empty energy interval");
  if (grid < 8 * n) throw PreconditionFailed("trace_diagnostics: grid must be at least 8n");

  auto eval = [&phi](double E) {
    Mat2 m = Mat2::identity();
    Mat2 md{0.0, 0.0, 0.0, 0.0};
    const Mat2 fd{-1.0, 0.0, 0.0, 0.0};
    for (double p : phi) {
      Mat2 f = schrodinger_matrix(p - E);
      md = fd * m + f * md;
      m = f * m;
    }
    return std::pair<double, double>{m.tr(), md.tr()};
  };

  std::vector<double> Es(grid + 1), tr(grid + 1), dtr(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    Es[i] = E_lo + (E_hi - E_lo) * double(i) / grid;
    std::tie(tr[i], dtr[i]) = eval(Es[i]);
  }

  auto bisect = [](auto&& f, double a, double b, double fa) {
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
      double mid = 0.5 * (a + b);
      double fm = f(mid);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  TraceDiagnostics d;
  d.rhos = {-1.0, 0.0, 1.0};
  d.roots.resize(3);
  for (int r = 0; r < 3; ++r) {
    double rho = d.rhos[r];
    for (int i = 0; i < grid; ++i) {
      if ((tr[i] - rho < 0.0) != (tr[i + 1] - rho < 0.0))
        d.roots[r].push_back(bisect([&](double E) { return eval(E).first - rho; }, Es[i],
                                    Es[i + 1], tr[i] - rho));
    }
    if (int(d.roots[r].size()) != n)
      throw RootCountMismatch("trace_diagnostics: grid too coarse to isolate all level roots");
  }

  d.min_critical_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    if ((dtr[i] < 0.0) != (dtr[i + 1] < 0.0)) {
      double ec = bisect([&](double E) { return eval(E).second; }, Es[i], Es[i + 1], dtr[i]);
      double tc = eval(ec).first;
      d.critical_energies.push_back(ec);
      d.critical_traces.push_back(tc);
      d.min_critical_abs = std::min(d.min_critical_abs, std::abs(tc));
    }
  }
  d.morse_ok = true;
  for (double tc : d.critical_traces)
    if (std::abs(tc) < 2.0 - 1e-6) d.morse_ok = false;
  return d;
}

double winding_derivative(const std::vector<double>& phi, double E, const ProjPoint& v,
                          Direction dir) {
  if (phi.size() < 2) throw PreconditionFailed("winding_derivative: need at least two sites");
  return winding_core(phi, E, v, dir);
}

VelocityPair stable_unstable_velocity(const std::vector<double>& phi, double E) {
  if (phi.empty()) throw PreconditionFailed("stable_unstable_velocity: empty potential");

  // product and its energy derivative under a common renormalization; the
  // true matrix is e^ell m and the true derivative e^ell md
  struct DualPair {
    Mat2 m = Mat2::identity();
    Mat2 md{0.0, 0.0, 0.0, 0.0};
    double ell = 0.0;

    void push(const Mat2& f, const Mat2& fd) {
      md = fd * m + f * md;
      m = f * m;
      double s = op_norm(m);
      if (!(s > 0.0) || !std::isfinite(s))
        throw NumericalError("stable_unstable_velocity: degenerate scale");
      m = m * (1.0 / s);
      md = md * (1.0 / s);
      ell += std::log(s);
    }
  };

  auto speed = [](const DualPair& p) {
    double t = p.m.tr();
    double dt = p.m.det();
    double disc = t * t - 4.0 * dt;
    if (!(disc > 0.0))
      throw NotHyperbolic("stable_unstable_velocity: product has no real eigenbasis");
    double root = std::sqrt(disc);
    double edom = 0.5 * (t + (t >= 0.0 ? root : -root));
    if (p.ell + std::log(std::abs(edom)) < std::log1p(1e-6))
      throw NotHyperbolic("stable_unstable_velocity: spectral radius below 1 + 1e-6");
    Vec2 u = eigenvector_for(p.m, edom);
    u = (1.0 / norm(u)) * u;
    return edom * wedge(u, p.md * u) / (edom * edom - dt);
  };

  DualPair fw;
  const Mat2 fdot{-1.0, 0.0, 0.0, 0.0};
  for (double p : phi) fw.push(schrodinger_matrix(p - E), fdot);

  DualPair bw;
  const Mat2 gdot{0.0, 0.0, 0.0, -1.0};
  for (int j = int(phi.size()) - 1; j >= 0; --j) bw.push(schrodinger_inv(phi[j] - E), gdot);

  return {speed(fw), speed(bw)};
}

namespace {

struct WordSet {
  std::vector<std::vector<int>> words;
  std::vector<Mat2> prods;
};

// all atom words of length 1..max_len in lexicographic order, one entry per
// distinct product at the center energy (first word kept)
WordSet enumerate_words(const EnergyFamily& fam, double E0, int max_len, long long cap) {
  const int kappa = fam.system.kappa;
  if (max_len < 1) throw PreconditionFailed("word enumeration: max_len must be positive");
  if (double(max_len) * std::pow(double(kappa), double(max_len)) > double(cap))
    throw CapExceeded("word enumeration: max_len * kappa^max_len exceeds cap");

  std::vector<Mat2> atoms(kappa);
  for (int i = 0; i < kappa; ++i) atoms[i] = block_atom(fam.system, i, E0);

  WordSet ws;
  std::multimap<double, std::size_t> by_a;
  auto is_dup = [&](const Mat2& p) {
    double win = 2e-9 * std::max(1.0, p.max_abs());
    auto lo = by_a.lower_bound(p.a - win);
    auto hi = by_a.upper_bound(p.a + win);
    for (auto it = lo; it != hi; ++it) {
      const Mat2& q = ws.prods[it->second];
      double s = 1e-9 * std::max(1.0, std::max(p.max_abs(), q.max_abs()));
      if (std::abs(p.a - q.a) <= s && std::abs(p.b - q.b) <= s && std::abs(p.c - q.c) <= s &&
          std::abs(p.d - q.d) <= s)
        return true;
    }
    return false;
  };

  for (int len = 1; len <= max_len; ++len) {
    std::vector<int> word(len, 0);
    while (true) {
      Mat2 p = Mat2::identity();
      for (int i : word) p = atoms[i] * p;
      if (!is_dup(p)) {
        by_a.emplace(p.a, ws.words.size());
        ws.words.push_back(word);
        ws.prods.push_back(p);
      }
      int pos = len - 1;
      while (pos >= 0 && word[pos] == kappa - 1) word[pos--] = 0;
      if (pos < 0) break;
      ++word[pos];
    }
  }
  return ws;
}

Mat2 word_prod(const EnergyFamily& fam, const std::vector<int>& word, double E) {
  Mat2 p = Mat2::identity();
  for (int i : word) p = block_atom(fam.system, i, E) * p;
  return p;
}

double frame_gap(const Mat2& M) {
  SingularFrame f = singular_frame(M);
  return proj_dist(f.v1s, f.v2);
}

// signed angular defect folded to (-pi/2, pi/2]
double fold_angle(double g) {
  while (g > kHalfPi) g -= kPi;
  while (g <= -kHalfPi) g += kPi;
  return g;
}

}  // namespace

std::vector<EllipticHit> find_elliptic(const EnergyFamily& fam, double E0, int max_len,
                                       double radius, long long cap) {
  if (!(radius > 0.0)) throw PreconditionFailed("find_elliptic: radius must be positive");
  WordSet ws = enumerate_words(fam, E0, max_len, cap);

  const double gr = 0.6180339887498949;
  std::vector<EllipticHit> hits;
  for (std::size_t w = 0; w < ws.words.size(); ++w) {
    const auto& word = ws.words[w];
    auto tr_at = [&](double E) { return word_prod(fam, word, E).tr(); };

    int sites = int(word.size()) * fam.system.block_len;
    int npts = std::max(128, 16 * sites);
    double best_abs = std::numeric_limits<double>::infinity(), best_E = E0;
    for (int i = 0; i <= npts; ++i) {
      double E = E0 - radius + 2.0 * radius * i / npts;
      double t = std::abs(tr_at(E));
      if (t < best_abs) {
        best_abs = t;
        best_E = E;
      }
    }
    if (best_abs > 2.0 - 1e-3) continue;

    double h = 2.0 * radius / npts;
    double a = std::max(E0 - radius, best_E - h), b = std::min(E0 + radius, best_E + h);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = std::abs(tr_at(x1)), f2 = std::abs(tr_at(x2));
    for (int it = 0; it < 80; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = std::abs(tr_at(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = std::abs(tr_at(x2));
      }
    }
    double cand = 0.5 * (a + b);
    if (std::abs(tr_at(cand)) < best_abs) best_E = cand;
    hits.push_back({word, best_E, tr_at(best_E)});
  }
  if (hits.empty()) throw NoneFound("find_elliptic: no elliptic product in the window");
  return hits;
}

TangencyRecord make_tangency_record(const Mat2& A, const Mat2& B, const Mat2& C, double E) {
  FixedDirections fa = fixed_directions(A);
  FixedDirections fb = fixed_directions(B);
  TangencyRecord rec;
  rec.E = E;
  rec.residual = proj_dist(apply(C, fb.u), fa.s);
  rec.gamma = std::min(std::log(fa.lambda), std::log(fb.lambda));
  rec.rho = std::log(op_norm(C));
  rec.t = -std::log(std::min(frame_gap(A), frame_gap(B)));
  return rec;
}

bool is_controlled(const TangencyRecord& rec, double gamma, double rho, double t) {
  return rec.gamma >= gamma && rec.rho <= rho && rec.t <= t;
}

TangencyRecord find_tangency(const EnergyFamily& fam, double E0, int max_len, double radius,
                             double min_lambda, long long cap) {
  if (!(radius > 0.0)) throw PreconditionFailed("find_tangency: radius must be positive");
  if (!(min_lambda > 1.0)) throw PreconditionFailed("find_tangency: min_lambda must exceed 1");
  WordSet ws = enumerate_words(fam, E0, max_len, cap);

  std::vector<std::size_t> cand;
  for (std::size_t w = 0; w < ws.words.size(); ++w)
    if (classify(ws.prods[w]) == Mat2Class::hyperbolic && lambda_of(ws.prods[w]) >= min_lambda)
      cand.push_back(w);
  if (cand.empty())
    throw NoneFound("find_tangency: no hyperbolic candidate words at the center energy");
  std::stable_sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
    return lambda_of(ws.prods[x]) > lambda_of(ws.prods[y]);
  });
  if (cand.size() > 12) cand.resize(12);

  struct Transition {
    std::vector<int> word;
    int mult = 1;
  };
  std::vector<Transition> trans;
  trans.push_back({{}, 1});
  for (std::size_t w = 0; w < ws.words.size() && trans.size() < 65; ++w)
    trans.push_back({ws.words[w], 1});
  try {
    auto ell = find_elliptic(fam, E0, std::min(max_len, 3), radius, cap);
    for (std::size_t h = 0; h < ell.size() && h < 2; ++h)
      for (int m = 2; m <= 64; ++m) trans.push_back({ell[h].word, m});
  } catch (const NoneFound&) {
  }

  auto trans_prod = [&](const Transition& t, double E) {
    Mat2 base = word_prod(fam, t.word, E);
    Mat2 p = Mat2::identity();
    for (int i = 0; i < t.mult; ++i) p = base * p;
    return p;
  };

  const int npts = 256;
  std::vector<double> Es(npts + 1);
  for (int i = 0; i <= npts; ++i) Es[i] = E0 - radius + 2.0 * radius * i / npts;

  const std::size_t nc = cand.size();
  std::vector<std::vector<char>> valid(nc, std::vector<char>(npts + 1, 0));
  std::vector<std::vector<ProjPoint>> udir(nc), sdir(nc);
  for (std::size_t ci = 0; ci < nc; ++ci) {
    udir[ci].resize(npts + 1);
    sdir[ci].resize(npts + 1);
    for (int i = 0; i <= npts; ++i) {
      Mat2 p = word_prod(fam, ws.words[cand[ci]], Es[i]);
      if (classify(p) != Mat2Class::hyperbolic || lambda_of(p) < 1.0 + 1e-6) continue;
      FixedDirections fd = fixed_directions(p);
      udir[ci][i] = fd.u;
      sdir[ci][i] = fd.s;
      valid[ci][i] = 1;
    }
  }

  std::vector<std::vector<Mat2>> ctab(trans.size(), std::vector<Mat2>(npts + 1));
  for (std::size_t ti = 0; ti < trans.size(); ++ti)
    for (int i = 0; i <= npts; ++i) ctab[ti][i] = trans_prod(trans[ti], Es[i]);

  for (std::size_t bi = 0; bi < nc; ++bi) {
    for (std::size_t ai = 0; ai < nc; ++ai) {
      for (std::size_t ti = 0; ti < trans.size(); ++ti) {
        auto geval = [&](double E) {
          Mat2 pb = word_prod(fam, ws.words[cand[bi]], E);
          Mat2 pa = word_prod(fam, ws.words[cand[ai]], E);
          if (lambda_of(pb) < 1.0 + 1e-6 || lambda_of(pa) < 1.0 + 1e-6)
            throw NotHyperbolic("find_tangency: candidate left the hyperbolic regime");
          ProjPoint x = apply(trans_prod(trans[ti], E), fixed_directions(pb).u);
          return fold_angle(x.angle() - fixed_directions(pa).s.angle());
        };

        std::vector<double> g(npts + 1, 0.0);
        std::vector<char> ok(npts + 1, 0);
        for (int i = 0; i <= npts; ++i) {
          if (!valid[bi][i] || !valid[ai][i]) continue;
          ProjPoint x = apply(ctab[ti][i], udir[bi][i]);
          g[i] = fold_angle(x.angle() - sdir[ai][i].angle());
          ok[i] = 1;
        }

        for (int i = 0; i < npts; ++i) {
          if (!ok[i] || !ok[i + 1]) continue;
          if ((g[i] < 0.0) == (g[i + 1] < 0.0)) continue;
          if (std::abs(g[i] - g[i + 1]) >= kHalfPi) continue;  // fold jump, not a crossing

          double a = Es[i], b = Es[i + 1], ga = g[i];
          double bestE = a, bestg = std::abs(ga);
          bool failed = false;
          for (int it = 0; it < 200 && b - a > 0.0; ++it) {
            double mid = 0.5 * (a + b);
            double gm;
            try {
              gm = geval(mid);
            } catch (const NumericalError&) {
              failed = true;
              break;
            }
            if (std::abs(gm) < bestg) {
              bestg = std::abs(gm);
              bestE = mid;
            }
            if (bestg <= 1e-12) break;
            if ((gm < 0.0) == (ga < 0.0)) {
              a = mid;
              ga = gm;
            } else {
              b = mid;
            }
          }
          if (failed || bestg > 1e-10) continue;

          try {
            Mat2 A = word_prod(fam, ws.words[cand[ai]], bestE);
            Mat2 B = word_prod(fam, ws.words[cand[bi]], bestE);
            Mat2 C = trans_prod(trans[ti], bestE);
            TangencyRecord rec = make_tangency_record(A, B, C, bestE);
            if (rec.residual > 1e-10) continue;
            rec.source_word = ws.words[cand[bi]];
            rec.target_word = ws.words[cand[ai]];
            for (int r = 0; r < trans[ti].mult; ++r)
              rec.transition_word.insert(rec.transition_word.end(), trans[ti].word.begin(),
                                         trans[ti].word.end());
            return rec;
          } catch (const NumericalError&) {
            continue;
          }
        }
      }
    }
  }
  throw NoneFound("find_tangency: no tangency located in the window");
}

}  // namespace sl2lab
