#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace haarpush {

using Coords = std::vector<double>;
using Cmplx = std::complex<double>;

constexpr int kMaxDim = 16;  // hard cap on chart dimension (stack scratch buffers)

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Library-wide error type; message text is what the CLI surfaces.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Forward-mode dual numbers.
//
// Group laws in this codebase are rational functions of the coordinates, so
// +,-,*,/ are the only operations a chart evaluator may use. Differentiating
// through them with duals is exact to roundoff.
// ---------------------------------------------------------------------------

struct Dual {
  double v = 0.0;  // value
  double d = 0.0;  // derivative along the seeded direction

  Dual() = default;
  Dual(double value) : v(value) {}
  Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
inline Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}
inline Dual& operator+=(Dual& a, Dual b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, Dual b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, Dual b) { a = a * b; return a; }
inline Dual& operator/=(Dual& a, Dual b) { a = a / b; return a; }

// ---------------------------------------------------------------------------
// Small dense matrices (row-major). Sizes stay tiny: chart dimensions and
// matrix embeddings are at most a few rows, so no BLAS is warranted.
// ---------------------------------------------------------------------------

struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw Error("matrix product shape mismatch");
  Mat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
    }
  return z;
}

inline double max_abs_diff(const Mat& x, const Mat& y) {
  double m = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::fabs(x.a[i] - y.a[i]));
  return m;
}

/// Determinant of an n x n matrix stored in `a` (row-major), destroying it.
/// n == 0 yields 1 (empty product), which 0-dimensional charts rely on.
inline double det_inplace(double* a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::fabs(a[c * n + c]);
    for (int r = c + 1; r < n; ++r) {
      const double v = std::fabs(a[r * n + c]);
      if (v > best) { best = v; piv = r; }
    }
    if (best == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
      det = -det;
    }
    det *= a[c * n + c];
    const double inv = 1.0 / a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] * inv;
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

inline double det(Mat m) {
  if (m.rows != m.cols) throw Error("determinant of non-square matrix");
  return det_inplace(m.a.data(), m.rows);
}

// ---------------------------------------------------------------------------
// Intervals and boxes.
// ---------------------------------------------------------------------------

struct Interval {
  double lo = -kInf;
  double hi = kInf;

  double length() const { return hi - lo; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool empty() const { return lo > hi; }
};

inline Interval intersect(Interval a, Interval b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

struct Box {
  std::vector<Interval> iv;

  Box() = default;
  explicit Box(std::vector<Interval> v) : iv(std::move(v)) {}
  int dim() const { return static_cast<int>(iv.size()); }
  bool empty() const {
    for (const auto& i : iv)
      if (i.empty()) return true;
    return false;
  }
  double volume() const {
    double v = 1.0;
    for (const auto& i : iv) v *= std::max(0.0, i.length());
    return v;
  }
  bool contains(const double* x) const {
    for (int i = 0; i < dim(); ++i)
      if (!iv[i].contains(x[i])) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Deterministic RNG.
//
// splitmix64 doubles as (a) a sequential generator for sampling test inputs
// and (b) a counter-based generator for Monte Carlo, where sample i is a pure
// function of (seed, i) so parallel and serial runs can never disagree.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0,1) from a (seed, counter) pair.
inline double u01_at(uint64_t seed, uint64_t counter) {
  const uint64_t z = splitmix64(seed ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64(state_++); }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Log-uniform over [lo, hi], lo > 0. Used for scaling-type coordinates.
  double log_uniform(double lo, double hi) { return lo * std::exp(uniform() * std::log(hi / lo)); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
  }
  /// Stable derived stream, independent of draw order on the parent.
  Rng fork(uint64_t salt) const { return Rng(splitmix64(state_ ^ splitmix64(salt))); }

 private:
  uint64_t state_;
};

/// FNV-1a, used for config digests in reports.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

}  // namespace haarpush
