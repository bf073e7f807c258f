#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sl2lab/mat2.hpp"
#include "sl2lab/rng.hpp"
#include "sl2lab/tridiag.hpp"

namespace testutil {

inline sl2lab::Mat2 rotation(double th) {
  double c = std::cos(th), s = std::sin(th);
  return {c, -s, s, c};
}

inline sl2lab::Mat2 diagonal(double a, double d) { return {a, 0.0, 0.0, d}; }

// KAK draw: R(alpha) diag(s, 1/s) R(beta) with log s uniform in [lo, hi].
inline sl2lab::Mat2 random_sl2(sl2lab::Rng& rng, double log_s_lo, double log_s_hi) {
  double s = std::exp(rng.uniform(log_s_lo, log_s_hi));
  double al = rng.uniform(0.0, 3.14159265358979323846);
  double be = rng.uniform(0.0, 3.14159265358979323846);
  return rotation(al) * diagonal(s, 1.0 / s) * rotation(be);
}

inline sl2lab::Mat2 outer(sl2lab::Vec2 u, sl2lab::Vec2 v) {
  return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
}

inline std::vector<double> random_phi(sl2lab::Rng& rng, int n, double lo, double hi) {
  std::vector<double> phi(n);
  for (auto& p : phi) p = rng.uniform(lo, hi);
  return phi;
}

// Dense symmetric eigenvalues by cyclic Jacobi, sorted ascending. Reference
// oracle for the Sturm bisection path; O(n^3) so keep n modest.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> A) {
  const int n = static_cast<int>(A.size());
  for (int sweep = 0; sweep < 120; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A[p][q]) < 1e-300) continue;
        double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - s * akq;
          A[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - s * aqk;
          A[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline std::vector<std::vector<double>> dense_of(const sl2lab::Tridiag& H) {
  int n = H.n();
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    A[i][i] = H.diag[i];
    if (i + 1 < n) {
      A[i][i + 1] = -1.0;
      A[i + 1][i] = -1.0;
    }
  }
  return A;
}

// Extended-precision renormalized product, left multiplication like
// LedgerProduct but in long double with max-entry scaling.
struct LongProd {
  long double a = 1.0L, b = 0.0L, c = 0.0L, d = 1.0L;
  long double logn = 0.0L;

  void mul_left(const sl2lab::Mat2& g) {
    long double na = (long double)g.a * a + (long double)g.b * c;
    long double nb = (long double)g.a * b + (long double)g.b * d;
    long double nc = (long double)g.c * a + (long double)g.d * c;
    long double nd = (long double)g.c * b + (long double)g.d * d;
    long double m = std::max(std::max(std::fabs(na), std::fabs(nb)),
                             std::max(std::fabs(nc), std::fabs(nd)));
    a = na / m;
    b = nb / m;
    c = nc / m;
    d = nd / m;
    logn += std::log(m);
  }

  double log_op_norm() const {
    long double T = a * a + b * b + c * c + d * d;
    long double D = a * d - b * c;
    long double disc = T * T - 4.0L * D * D;
    if (disc < 0.0L) disc = 0.0L;
    return static_cast<double>(logn + 0.5L * std::log(0.5L * (T + std::sqrt(disc))));
  }
};

// Hausdorff distance between two finite point sets on the line.
inline double set_distance(const std::vector<double>& xs, const std::vector<double>& ys) {
  double worst = 0.0;
  for (double x : xs) {
    double best = 1e300;
    for (double y : ys) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  for (double y : ys) {
    double best = 1e300;
    for (double x : xs) best = std::min(best, std::abs(y - x));
    worst = std::max(worst, best);
  }
  return worst;
}

inline double cdf_sup_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double ca = 0.0, cb = 0.0, worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
    worst = std::max(worst, std::abs(ca - cb));
  }
  return worst;
}

}  // namespace testutil
