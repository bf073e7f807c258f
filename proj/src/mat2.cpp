#include "sl2lab/mat2.hpp"

#include <limits>

namespace sl2lab {

namespace {

// top eigenvector of the symmetric matrix [[p,q],[q,r]]
Vec2 sym_top_eigvec(double p, double q, double r) {
  double half_gap = 0.5 * (p - r);
  double disc = std::sqrt(half_gap * half_gap + q * q);
  double lmax = 0.5 * (p + r) + disc;
  Vec2 cand1{q, lmax - p};
  Vec2 cand2{lmax - r, q};
  Vec2 v = (norm(cand1) >= norm(cand2)) ? cand1 : cand2;
  if (!(norm(v) > 0.0)) v = (p >= r) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  return v;
}

}  // namespace

Vec2 eigenvector_for(const Mat2& A, double e) {
  Vec2 cand1{A.b, e - A.a};
  Vec2 cand2{e - A.d, A.c};
  Vec2 v = (norm(cand1) >= norm(cand2)) ? cand1 : cand2;
  if (!(norm(v) > 0.0)) throw NumericalError("eigenvector_for: defective matrix");
  return v;
}

SingularFrame singular_frame(const Mat2& A, double tol_norm) {
  double s = op_norm(A);
  // scale-invariant gap test: s1/s2 = s^2/|det|, so the frame is determined
  // exactly when s^2 clears |det|; for det = 1 this is the familiar ||A|| > 1
  if (!(s * s >= (1.0 + tol_norm) * std::abs(A.det())))
    throw DegenerateNorm("singular_frame: singular gap too small, frame ill-determined");

  // v1 = top eigenvector of A^T A
  double p = A.a * A.a + A.c * A.c;
  double r = A.b * A.b + A.d * A.d;
  double q = A.a * A.b + A.c * A.d;
  ProjPoint v1(sym_top_eigvec(p, q, r));
  ProjPoint v2(J * v1.rep());
  ProjPoint v1s(A * v1.rep());
  // exact symplectic relation: A J v1 is parallel to J (A v1)
  ProjPoint v2s(J * v1s.rep());
  return {v1, v2, v1s, v2s, s};
}

FixedDirections fixed_directions(const Mat2& A, double tol_tr) {
  if (classify(A, tol_tr) != Mat2Class::hyperbolic)
    throw NotHyperbolic("fixed_directions: |tr| <= 2 + tol");
  double t = A.tr();
  double disc = std::sqrt(t * t - 4.0);
  double e_dom = 0.5 * (t + (t >= 0.0 ? disc : -disc));
  double e_sub = A.det() / e_dom;
  ProjPoint u(eigenvector_for(A, e_dom));
  ProjPoint sdir(eigenvector_for(A, e_sub));
  return {u, sdir, std::abs(e_dom)};
}

AvalancheReport avalanche_report(const std::vector<Mat2>& chain, double kappa, double eps) {
  std::size_t n = chain.size();
  if (n < 2) throw PreconditionFailed("avalanche_report: need a chain of length >= 2");
  if (!(kappa > 0.0) || !(eps > 0.0))
    throw PreconditionFailed("avalanche_report: kappa and eps must be positive");

  AvalancheReport rep;
  double min_norm_sq = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  double sum_log_mid = 0.0, sum_log_pair = 0.0;

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    norms[j] = op_norm(chain[j]);
    min_norm_sq = std::min(min_norm_sq, norms[j] * norms[j]);
    if (j >= 1 && j <= n - 2) sum_log_mid += std::log(norms[j]);
  }
  for (std::size_t j = 1; j < n; ++j) {
    double pn = op_norm(chain[j] * chain[j - 1]);
    min_ratio = std::min(min_ratio, pn / (norms[j] * norms[j - 1]));
    sum_log_pair += std::log(pn);
  }

  rep.min_norm_sq = min_norm_sq;
  rep.min_ratio = min_ratio;
  rep.gaps_ok = (min_norm_sq >= 1.0 / kappa) && (min_ratio >= eps);

  LedgerProduct prod;
  for (const Mat2& A : chain) prod.mul_left(A);
  rep.norm_ratio_log = prod.log_norm() + sum_log_mid - sum_log_pair;

  double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    SingularFrame fn = singular_frame(prod.m);
    try {
      rep.dir_err_head = proj_dist(fn.v1s, singular_frame(chain[n - 1]).v1s);
    } catch (const DegenerateNorm&) {
      rep.dir_err_head = nan;
    }
    try {
      rep.dir_err_tail = proj_dist(fn.v2, singular_frame(chain[0]).v2);
    } catch (const DegenerateNorm&) {
      rep.dir_err_tail = nan;
    }
  } catch (const DegenerateNorm&) {
    rep.dir_err_head = nan;
    rep.dir_err_tail = nan;
  }
  return rep;
}

}  // namespace sl2lab
