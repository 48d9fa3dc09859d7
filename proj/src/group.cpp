#include "haarpush/group.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace haarpush {

namespace {

void require_dim(const GroupChart& G, const Coords& x, const char* what) {
  if (static_cast<int>(x.size()) != G.dim) {
    std::ostringstream os;
    os << G.name << ": " << what << " has dimension " << x.size() << ", expected " << G.dim;
    throw Error(os.str());
  }
}

void require_in_domain(const GroupChart& G, const Coords& x, const char* what) {
  require_dim(G, x, what);
  if (!G.domain.contains(x.data())) {
    std::ostringstream os;
    os << G.name << ": " << what << " lies outside the chart domain";
    throw Error(os.str());
  }
}

}  // namespace

Coords multiply(const GroupChart& G, const Coords& x, const Coords& y) {
  require_in_domain(G, x, "left factor");
  require_in_domain(G, y, "right factor");
  Coords out(G.dim);
  G.mul(x.data(), y.data(), out.data());
  return out;
}

Coords inverse(const GroupChart& G, const Coords& x) {
  require_in_domain(G, x, "element");
  Coords out(G.dim);
  G.inv(x.data(), out.data());
  return out;
}

Mat translation_jacobian(const GroupChart& G, const Coords& g, Side side, const Coords& at) {
  require_in_domain(G, g, "translation element");
  require_in_domain(G, at, "base point");
  const int n = G.dim;
  Mat J(n, n);
  Dual a[kMaxDim], b[kMaxDim], out[kMaxDim];
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      // Variable factor carries the seed; the fixed factor is constant.
      const double var = at[i], fix = g[i];
      if (side == Side::Left) {
        a[i] = Dual(fix, 0.0);
        b[i] = Dual(var, i == col ? 1.0 : 0.0);
      } else {
        a[i] = Dual(var, i == col ? 1.0 : 0.0);
        b[i] = Dual(fix, 0.0);
      }
    }
    G.mul_dual(a, b, out);
    for (int row = 0; row < n; ++row) J(row, col) = out[row].d;
  }
  return J;
}

void right_translation_rows(const GroupChart& G, const Coords& s, Coords& v0, Mat& M) {
  require_in_domain(G, s, "translation element");
  const int n = G.dim;
  v0.assign(static_cast<size_t>(n), 0.0);
  M = Mat(n, n);
  Coords probe(static_cast<size_t>(n)), image(static_cast<size_t>(n));
  G.mul(G.identity.data(), s.data(), v0.data());
  for (int j = 0; j < n; ++j) {
    probe = G.identity;
    probe[static_cast<size_t>(j)] += 1.0;
    G.mul(probe.data(), s.data(), image.data());
    for (int i = 0; i < n; ++i) M(j, i) = image[static_cast<size_t>(i)] - v0[static_cast<size_t>(i)];
  }
  // Affinity cross-check at a joint displacement.
  Coords joint = G.identity, expect = v0;
  for (int j = 0; j < n; ++j) {
    const double step = 0.5 + 0.125 * j;
    joint[static_cast<size_t>(j)] += step;
    for (int i = 0; i < n; ++i) expect[static_cast<size_t>(i)] += step * M(j, i);
  }
  Coords actual(static_cast<size_t>(n));
  G.mul(joint.data(), s.data(), actual.data());
  for (int i = 0; i < n; ++i) {
    const double ref = std::max({1.0, std::abs(actual[static_cast<size_t>(i)]),
                                 std::abs(expect[static_cast<size_t>(i)])});
    if (std::abs(actual[static_cast<size_t>(i)] - expect[static_cast<size_t>(i)]) > 1e-9 * ref)
      throw Error("right translation is not affine in the chart " + G.name);
  }
}

std::vector<std::optional<Interval>> translate_bounds(
    const GroupChart& G, const std::vector<std::optional<Interval>>& bounds, const Coords& s) {
  const int n = G.dim;
  if (static_cast<int>(bounds.size()) != n)
    throw Error(G.name + ": bound list dimension does not match the chart");
  Coords v0;
  Mat M;
  right_translation_rows(G, s, v0, M);
  std::vector<std::optional<Interval>> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double lo = v0[static_cast<size_t>(i)];
    double hi = lo;
    bool bounded = true;
    for (int j = 0; j < n && bounded; ++j) {
      const double m = M(j, i);
      if (std::abs(m) <= 1e-13) continue;
      const auto& bj = bounds[static_cast<size_t>(j)];
      if (!bj || !bj->finite()) {
        bounded = false;
        break;
      }
      const double a = m * (bj->lo - G.identity[static_cast<size_t>(j)]);
      const double b = m * (bj->hi - G.identity[static_cast<size_t>(j)]);
      lo += std::min(a, b);
      hi += std::max(a, b);
    }
    if (bounded) out[static_cast<size_t>(i)] = Interval{lo, hi};
  }
  return out;
}

Mat translation_jacobian_fd(const GroupChart& G, const Coords& g, Side side, const Coords& at,
                            double step) {
  require_in_domain(G, g, "translation element");
  require_in_domain(G, at, "base point");
  const int n = G.dim;
  auto apply = [&](const double* y, double* out) {
    if (side == Side::Left)
      G.mul(g.data(), y, out);
    else
      G.mul(y, g.data(), out);
  };
  // Central difference at step h and h/2, then Richardson: (4*D(h/2) - D(h)) / 3.
  auto central = [&](double h, Mat& J) {
    double yp[kMaxDim], ym[kMaxDim], fp[kMaxDim], fm[kMaxDim];
    for (int col = 0; col < n; ++col) {
      for (int i = 0; i < n; ++i) yp[i] = ym[i] = at[i];
      yp[col] += h;
      ym[col] -= h;
      apply(yp, fp);
      apply(ym, fm);
      for (int row = 0; row < n; ++row) J(row, col) = (fp[row] - fm[row]) / (2.0 * h);
    }
  };
  Mat coarse(n, n), fine(n, n);
  central(step, coarse);
  central(step * 0.5, fine);
  Mat J(n, n);
  for (size_t i = 0; i < J.a.size(); ++i) J.a[i] = (4.0 * fine.a[i] - coarse.a[i]) / 3.0;
  return J;
}

namespace {

/// |det| of the left/right translation Jacobian of g at the identity,
/// everything on the stack. The hot path under every Haar integral.
double translation_det_at_identity(const GroupChart& G, const double* g, Side side) {
  const int n = G.dim;
  double jac[kMaxDim * kMaxDim];
  Dual a[kMaxDim], b[kMaxDim], out[kMaxDim];
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      const double e = G.identity[i];
      if (side == Side::Left) {
        a[i] = Dual(g[i], 0.0);
        b[i] = Dual(e, i == col ? 1.0 : 0.0);
      } else {
        a[i] = Dual(e, i == col ? 1.0 : 0.0);
        b[i] = Dual(g[i], 0.0);
      }
    }
    G.mul_dual(a, b, out);
    for (int row = 0; row < n; ++row) jac[row * n + col] = out[row].d;
  }
  return std::fabs(det_inplace(jac, n));
}

}  // namespace

double haar_density(const GroupChart& G, const double* g) {
  const double d = translation_det_at_identity(G, g, Side::Left);
  if (d == 0.0) throw Error(G.name + ": singular left translation (degenerate chart point)");
  return 1.0 / d;
}

double haar_density(const GroupChart& G, const Coords& g) {
  require_in_domain(G, g, "element");
  return haar_density(G, g.data());
}

double modular(const GroupChart& G, const double* h) {
  const double dl = translation_det_at_identity(G, h, Side::Left);
  const double dr = translation_det_at_identity(G, h, Side::Right);
  if (dl == 0.0) throw Error(G.name + ": singular left translation (degenerate chart point)");
  return dr / dl;
}

double modular(const GroupChart& G, const Coords& h) {
  require_in_domain(G, h, "element");
  return modular(G, h.data());
}

Coords random_element(const GroupChart& G, Rng& rng, double window) {
  Coords x(G.dim);
  for (int i = 0; i < G.dim; ++i) {
    if (G.domain.positive[i]) {
      x[i] = rng.log_uniform(0.25, 4.0);
    } else {
      const double lo = std::max(G.domain.bounds[i].lo, -window);
      const double hi = std::min(G.domain.bounds[i].hi, window);
      x[i] = rng.uniform(lo, hi);
    }
  }
  return x;
}

void validate_chart(const GroupChart& G, uint64_t seed, int samples, double tol) {
  if (G.dim > kMaxDim) throw Error(G.name + ": dimension exceeds supported maximum");
  if (static_cast<int>(G.identity.size()) != G.dim)
    throw Error(G.name + ": identity has wrong dimension");
  if (G.domain.dim() != G.dim) throw Error(G.name + ": domain has wrong dimension");
  if (!G.domain.contains(G.identity.data()))
    throw Error(G.name + ": identity lies outside the chart domain");

  auto max_diff = [&](const Coords& a, const Coords& b) {
    double m = 0.0;
    for (int i = 0; i < G.dim; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
  };

  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Coords x = random_element(G, rng);
    const Coords y = random_element(G, rng);
    const Coords z = random_element(G, rng);

    if (max_diff(multiply(G, x, G.identity), x) > tol ||
        max_diff(multiply(G, G.identity, x), x) > tol)
      throw Error(G.name + ": identity law fails in chart");
    if (max_diff(multiply(G, x, inverse(G, x)), G.identity) > tol ||
        max_diff(multiply(G, inverse(G, x), x), G.identity) > tol)
      throw Error(G.name + ": inverse law fails in chart");
    if (max_diff(multiply(G, multiply(G, x, y), z), multiply(G, x, multiply(G, y, z))) > tol)
      throw Error(G.name + ": associativity fails in chart");

    // Dual-number Jacobian against finite differences.
    for (Side side : {Side::Left, Side::Right}) {
      const Mat jd = translation_jacobian(G, x, side, y);
      const Mat jf = translation_jacobian_fd(G, x, side, y);
      if (max_abs_diff(jd, jf) > 1e-5)
        throw Error(G.name + ": dual-number Jacobian disagrees with finite differences");
    }

    // Matrix model, when present, must be a faithful homomorphism.
    if (G.has_embedding()) {
      const Mat mx = G.embed(x.data());
      const Mat my = G.embed(y.data());
      const Mat mxy = G.embed(multiply(G, x, y).data());
      if (max_abs_diff(mx * my, mxy) > tol * 10)
        throw Error(G.name + ": matrix model is not a homomorphism for the chart law");
      const Mat mi = G.embed(inverse(G, x).data());
      if (max_abs_diff(mx * mi, Mat::identity(mx.rows)) > tol * 10)
        throw Error(G.name + ": matrix model inverse mismatch");
    }
  }

  if (std::fabs(haar_density(G, G.identity) - 1.0) > tol)
    throw Error(G.name + ": Haar density is not normalized at the identity");
  if (std::fabs(modular(G, G.identity) - 1.0) > tol)
    throw Error(G.name + ": modular function is not 1 at the identity");
}

}  // namespace haarpush
