#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sl2lab {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateNorm : NumericalError {
  using NumericalError::NumericalError;
};
struct NotHyperbolic : NumericalError {
  using NumericalError::NumericalError;
};
struct PreconditionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double wedge(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// row-major [[a,b],[c,d]]
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }

  double tr() const { return a + d; }
  double det() const { return a * d - b * c; }
  Mat2 transpose() const { return {a, c, b, d}; }

  // adjugate/det; exact inverse for det == 1
  Mat2 inv() const {
    double dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }

  Mat2 operator*(double s) const { return {s * a, s * b, s * c, s * d}; }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }

  double frob_sq() const { return a * a + b * b + c * c + d * d; }
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }
};

inline const Mat2 J{0.0, -1.0, 1.0, 0.0};

// operator norm of a general 2x2 matrix:
// with T = sum of squared entries and D = det, ||A||^2 = (T + sqrt(T^2 - 4 D^2)) / 2
inline double op_norm(const Mat2& m) {
  double T = m.frob_sq();
  double D = m.det();
  double disc = T * T - 4.0 * D * D;
  if (disc < 0.0) disc = 0.0;
  return std::sqrt(0.5 * (T + std::sqrt(disc)));
}

enum class Mat2Class { elliptic, parabolic, hyperbolic };

// trace test with a tolerance band of width tol_tr around |tr| = 2
inline Mat2Class classify(const Mat2& A, double tol_tr = 1e-9) {
  double t = std::abs(A.tr());
  if (t < 2.0 - tol_tr) return Mat2Class::elliptic;
  if (t > 2.0 + tol_tr) return Mat2Class::hyperbolic;
  return Mat2Class::parabolic;
}

inline const char* class_name(Mat2Class c) {
  switch (c) {
    case Mat2Class::elliptic: return "elliptic";
    case Mat2Class::parabolic: return "parabolic";
    default: return "hyperbolic";
  }
}

// spectral radius from the trace: (|tr| + sqrt(tr^2 - 4)) / 2 beyond the
// trace band, 1 inside it (elliptic and parabolic matrices have unit radius)
inline double lambda_of(const Mat2& A) {
  double t = std::abs(A.tr());
  if (t <= 2.0) return 1.0;
  return 0.5 * (t + std::sqrt(t * t - 4.0));
}

// point of P^1: unit representative with canonical sign
// (first nonzero coordinate positive)
struct ProjPoint {
  double x = 1.0, y = 0.0;

  ProjPoint() = default;

  explicit ProjPoint(Vec2 v) {
    double n = norm(v);
    if (!(n > 0.0)) throw NumericalError("ProjPoint: zero vector");
    x = v.x / n;
    y = v.y / n;
    if (x < 0.0 || (x == 0.0 && y < 0.0)) {
      x = -x;
      y = -y;
    }
    if (x == 0.0) x = 0.0;  // normalize -0.0
  }

  Vec2 rep() const { return {x, y}; }

  // angle in [0, pi)
  double angle() const {
    double t = std::atan2(y, x);
    if (t < 0.0) t += 3.141592653589793238;
    if (t >= 3.141592653589793238) t -= 3.141592653589793238;
    return t;
  }

  static ProjPoint from_angle(double t) {
    return ProjPoint(Vec2{std::cos(t), std::sin(t)});
  }
};

// d(v,w) = |v ^ w| on unit representatives = |sin angle|
inline double proj_dist(const ProjPoint& v, const ProjPoint& w) {
  return std::abs(wedge(v.rep(), w.rep()));
}

inline ProjPoint apply(const Mat2& A, const ProjPoint& v) {
  return ProjPoint(A * v.rep());
}

// most-expanded / most-contracted directions and their images:
// A v1 = s v1*, A v2 = (1/s) v2*, with v2 = J v1 and v2* = J v1*
struct SingularFrame {
  ProjPoint v1, v2, v1s, v2s;
  double s;  // ||A||
};

SingularFrame singular_frame(const Mat2& A, double tol_norm = 1e-9);

// unstable/stable fixed directions of a hyperbolic matrix
struct FixedDirections {
  ProjPoint u, s;
  double lambda;
};

FixedDirections fixed_directions(const Mat2& A, double tol_tr = 1e-9);

// eigenvector for a known real eigenvalue, via the better-conditioned row of A - e I
Vec2 eigenvector_for(const Mat2& A, double e);

// accumulated product with the norm factored out each step; m stays O(1)
// while logn carries log of the accumulated scale.  log||product|| =
// logn + log(op_norm(m)).
struct LedgerProduct {
  Mat2 m = Mat2::identity();
  double logn = 0.0;

  void mul_left(const Mat2& g) {
    m = g * m;
    double s = op_norm(m);
    if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("LedgerProduct: degenerate scale");
    m = m * (1.0 / s);
    logn += std::log(s);
  }

  double log_norm() const { return logn + std::log(op_norm(m)); }
};

// chain diagnostics for long products of strongly expanding, aligned factors;
// chain is A_0..A_{n-1} and the product is A_{n-1}...A_0
struct AvalancheReport {
  bool gaps_ok = false;       // both hypothesis minima meet their thresholds
  double min_norm_sq = 0.0;   // min_j ||A_j||^2          (needs >= 1/kappa)
  double min_ratio = 0.0;     // min_j ||A_j A_{j-1}|| / (||A_j|| ||A_{j-1}||)  (needs >= eps)
  double dir_err_head = 0.0;  // d(v1*(A^n), v1*(A_{n-1}))
  double dir_err_tail = 0.0;  // d(v2(A^n), v2(A_0))
  double norm_ratio_log = 0.0;
};

AvalancheReport avalanche_report(const std::vector<Mat2>& chain, double kappa, double eps);

}  // namespace sl2lab
