#include "haarpush/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace haarpush {

namespace {

double bump_profile(double t) {
  // (1 - t^2)^3 on [-1, 1], zero outside; C^2 across the boundary.
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double s = 1.0 - t * t;
  return s * s * s;
}

void require_radii(const Coords& center, const Coords& radius, const char* what) {
  if (center.size() != radius.size())
    throw Error(std::string(what) + ": center and radius dimensions differ");
  for (double r : radius)
    if (!(r > 0.0) || !std::isfinite(r))
      throw Error(std::string(what) + ": radii must be positive and finite");
}

std::string coords_str(const std::vector<int>& coords) {
  std::ostringstream os;
  for (size_t i = 0; i < coords.size(); ++i) os << (i ? "," : "") << coords[i];
  return os.str();
}

}  // namespace

TestFunction bump_fn(const Coords& center, const Coords& radius, Cmplx amp) {
  require_radii(center, radius, "bump_fn");
  const int n = static_cast<int>(center.size());
  TestFunction f;
  f.dim = n;
  f.support.iv.reserve(n);
  for (int i = 0; i < n; ++i) f.support.iv.push_back({center[i] - radius[i], center[i] + radius[i]});
  f.eval = [center, radius, amp, n](const double* x) -> Cmplx {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      prod *= bump_profile((x[i] - center[i]) / radius[i]);
      if (prod == 0.0) return 0.0;
    }
    return amp * prod;
  };
  std::ostringstream os;
  os << "bump(dim=" << n << ", amp=" << amp.real();
  if (amp.imag() != 0.0) os << (amp.imag() < 0 ? "" : "+") << amp.imag() << "i";
  os << ")";
  f.desc = os.str();
  return f;
}

TestFunction random_bump_in(const Box& window, Rng& rng) {
  const int n = window.dim();
  Coords center(n), radius(n);
  for (int i = 0; i < n; ++i) {
    const Interval& w = window.iv[i];
    if (!w.finite() || w.hi <= w.lo) throw Error("random_bump_in: window must be a finite box");
    const double half = 0.5 * (w.hi - w.lo);
    const double mid = 0.5 * (w.hi + w.lo);
    center[i] = mid + (2.0 * rng.uniform() - 1.0) * 0.55 * half;
    radius[i] = (0.15 + 0.30 * rng.uniform()) * half;
    // Keep the support inside the window.
    radius[i] = std::min(radius[i], std::min(center[i] - w.lo, w.hi - center[i]));
  }
  const Cmplx amp(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
  return bump_fn(center, radius, amp);
}

DensityFactor bump_factor(std::vector<int> coords, const Coords& center, const Coords& radius,
                          Cmplx amp) {
  if (coords.size() != center.size())
    throw Error("bump_factor: coordinate list and center dimensions differ");
  TestFunction f = bump_fn(center, radius, amp);
  DensityFactor fac;
  fac.coords = std::move(coords);
  fac.eval = f.eval;
  fac.box = f.support;
  fac.desc = f.desc;
  fac.scale = std::abs(amp);
  return fac;
}

DensityFactor constant_factor(std::vector<int> coords, Cmplx value) {
  DensityFactor fac;
  fac.coords = std::move(coords);
  fac.eval = [value](const double*) { return value; };
  fac.box = std::nullopt;
  std::ostringstream os;
  os << "const(" << value.real() << ")";
  fac.desc = os.str();
  fac.scale = std::abs(value);
  return fac;
}

Box Density::support_box() const {
  Box box;
  box.iv.reserve(bound.size());
  for (const auto& b : bound) {
    if (!b || !b->finite()) throw Error(desc + ": density support is not a compact box");
    box.iv.push_back(*b);
  }
  return box;
}

Density bump_density(ChartPtr chart, const Coords& center, const Coords& radius, Cmplx amp) {
  if (!chart) throw Error("bump_density: null chart");
  if (static_cast<int>(center.size()) != chart->dim)
    throw Error("bump_density: center dimension does not match chart " + chart->name);
  require_radii(center, radius, "bump_density");
  if (!chart->domain.contains(center.data()))
    throw Error("bump_density: center lies outside the chart domain of " + chart->name);
  TestFunction f = bump_fn(center, radius, amp);
  Density mu;
  mu.chart = std::move(chart);
  mu.phi = f.eval;
  mu.bound.reserve(f.support.dim());
  for (const auto& iv : f.support.iv) mu.bound.emplace_back(iv);
  mu.shape = DensityShape::CompactBox;
  mu.desc = f.desc + " on " + mu.chart->name;
  mu.scale = std::abs(amp);
  return mu;
}

Density product_density(ChartPtr chart, std::vector<DensityFactor> factors) {
  if (!chart) throw Error("product_density: null chart");
  const int n = chart->dim;
  std::vector<int> owner(static_cast<size_t>(n), -1);
  for (size_t k = 0; k < factors.size(); ++k) {
    for (int c : factors[k].coords) {
      if (c < 0 || c >= n)
        throw Error("product_density: factor coordinate out of range for " + chart->name);
      if (owner[static_cast<size_t>(c)] >= 0)
        throw Error("product_density: factors overlap on coordinate " + std::to_string(c));
      owner[static_cast<size_t>(c)] = static_cast<int>(k);
    }
    if (factors[k].box && factors[k].box->dim() != static_cast<int>(factors[k].coords.size()))
      throw Error("product_density: factor box dimension mismatch");
  }
  for (int c = 0; c < n; ++c)
    if (owner[static_cast<size_t>(c)] < 0)
      throw Error("product_density: coordinate " + std::to_string(c) +
                  " of " + chart->name + " is not covered by any factor");

  Density mu;
  mu.chart = std::move(chart);
  mu.bound.assign(static_cast<size_t>(n), std::nullopt);
  bool all_compact = true;
  double scale = 1.0;
  std::ostringstream os;
  for (size_t k = 0; k < factors.size(); ++k) {
    const DensityFactor& fac = factors[k];
    if (fac.box) {
      for (size_t j = 0; j < fac.coords.size(); ++j)
        mu.bound[static_cast<size_t>(fac.coords[j])] = fac.box->iv[j];
    } else {
      all_compact = false;
    }
    scale *= fac.scale;
    os << (k ? " * " : "") << fac.desc << "[" << coords_str(fac.coords) << "]";
  }
  mu.shape = all_compact ? DensityShape::CompactBox : DensityShape::ProductForm;
  mu.scale = scale;
  mu.desc = os.str() + " on " + mu.chart->name;

  auto facs = std::make_shared<std::vector<DensityFactor>>(std::move(factors));
  mu.phi = [facs](const double* x) -> Cmplx {
    Cmplx prod = 1.0;
    double gathered[kMaxDim];
    for (const DensityFactor& fac : *facs) {
      for (size_t j = 0; j < fac.coords.size(); ++j)
        gathered[j] = x[fac.coords[j]];
      if (fac.box && !fac.box->contains(gathered)) return 0.0;
      prod *= fac.eval(gathered);
      if (prod == Cmplx(0.0)) return 0.0;
    }
    return prod;
  };
  return mu;
}

PropernessCert check_membership(const Density& mu, const std::vector<int>& fiber,
                                const std::string& space) {
  if (!mu.chart) throw Error("check_membership: density has no chart");
  const int n = mu.chart->dim;
  for (int c : fiber) {
    if (c < 0 || c >= n)
      throw Error("check_membership: fiber coordinate " + std::to_string(c) +
                  " out of range for " + mu.chart->name);
    const auto& b = mu.bound[static_cast<size_t>(c)];
    if (!b || !b->finite())
      throw Error(mu.desc + " is not certifiably in M_" + space + ": coordinate " +
                  std::to_string(c) + " has unbounded support along the fiber");
  }
  PropernessCert cert;
  cert.space = space;
  cert.fiber = fiber;
  std::sort(cert.fiber.begin(), cert.fiber.end());
  cert.kind = mu.fully_compact() ? CertKind::CompactSupport : CertKind::ProductCompactFiber;
  cert.detail = (cert.kind == CertKind::CompactSupport)
                    ? "compactly supported density"
                    : "product form with compact support on fiber coordinates {" +
                          coords_str(cert.fiber) + "}";
  return cert;
}

PropernessCert restrict_cert(const PropernessCert& certH, const std::vector<int>& n_coords,
                             const std::string& n_space) {
  for (int c : n_coords)
    if (!std::binary_search(certH.fiber.begin(), certH.fiber.end(), c))
      throw Error("incompatible coordinate splits: coordinate " + std::to_string(c) +
                  " of " + n_space + " is not certified by the " + certH.space +
                  " certificate");
  PropernessCert cert = certH;
  cert.space = n_space;
  cert.fiber = n_coords;
  std::sort(cert.fiber.begin(), cert.fiber.end());
  cert.detail = "restricted from the " + certH.space + " certificate";
  return cert;
}

IntegralResult pair_density(const Density& mu, const BoxFn& f,
                            const std::vector<std::optional<Interval>>& f_bound,
                            const Integrator& integ) {
  if (!mu.chart) throw Error("pair_density: density has no chart");
  const int n = mu.chart->dim;
  if (!f_bound.empty() && static_cast<int>(f_bound.size()) != n)
    throw Error("pair_density: bound list dimension does not match chart " + mu.chart->name);

  if (!mu.support_shift.empty()) {
    // The support is a sheared box. Substitute u = g * s: the support becomes
    // the original axis box, so quadrature sees a full integrand instead of
    // scanning the hull of the sheared region (where most nodes would land on
    // zeros and convergence would stall). The substitution g = u * s^{-1} is
    // affine with a constant Jacobian.
    const ChartPtr chart = mu.chart;
    const Coords sinv = inverse(*chart, mu.support_shift);
    Coords v0;
    Mat M;
    right_translation_rows(*chart, sinv, v0, M);
    const double jac = std::abs(det(M));
    const auto fb_u =
        f_bound.empty()
            ? f_bound
            : translate_bounds(*chart, f_bound, mu.support_shift);  // hull of f-box * s

    Box box;
    box.iv.reserve(n);
    for (int i = 0; i < n; ++i) {
      Interval iv;  // defaults to the whole line
      const auto& bm = mu.shifted_bound[static_cast<size_t>(i)];
      if (bm) iv = intersect(iv, *bm);
      if (!fb_u.empty() && fb_u[static_cast<size_t>(i)])
        iv = intersect(iv, *fb_u[static_cast<size_t>(i)]);
      if (!iv.finite())
        throw Error("unbounded integrand domain: coordinate " + std::to_string(i) + " of " +
                    mu.chart->name + " has no finite support bound");
      box.iv.push_back(iv);
    }
    if (box.empty()) return {0.0, 0.0, 0};

    const BoxFn phi = mu.phi;
    BoxFn integrand = [chart, phi, f, sinv, jac](const double* u) -> Cmplx {
      double g[kMaxDim];
      chart->mul(u, sinv.data(), g);
      if (!chart->domain.contains(g)) return 0.0;
      const Cmplx p = phi(g);
      if (p == Cmplx(0.0)) return 0.0;
      const Cmplx fv = f(g);
      if (fv == Cmplx(0.0)) return 0.0;
      return p * fv * haar_density(*chart, g) * jac;
    };
    return integrate_box(integrand, box, integ);
  }

  Box box;
  box.iv.reserve(n);
  for (int i = 0; i < n; ++i) {
    Interval iv;  // defaults to the whole line
    const auto& bm = mu.bound[static_cast<size_t>(i)];
    if (bm) iv = intersect(iv, *bm);
    if (!f_bound.empty() && f_bound[static_cast<size_t>(i)])
      iv = intersect(iv, *f_bound[static_cast<size_t>(i)]);
    if (!iv.finite())
      throw Error("unbounded integrand domain: coordinate " + std::to_string(i) +
                  " of " + mu.chart->name + " has no finite support bound");
    box.iv.push_back(iv);
  }
  if (box.empty()) return {0.0, 0.0, 0};

  const ChartPtr chart = mu.chart;
  const BoxFn phi = mu.phi;
  BoxFn integrand = [chart, phi, f](const double* x) -> Cmplx {
    if (!chart->domain.contains(x)) return 0.0;
    const Cmplx p = phi(x);
    if (p == Cmplx(0.0)) return 0.0;
    const Cmplx fv = f(x);
    if (fv == Cmplx(0.0)) return 0.0;
    return p * fv * haar_density(*chart, x);
  };
  return integrate_box(integrand, box, integ);
}

IntegralResult pair_density(const Density& mu, const TestFunction& f, const Integrator& integ) {
  if (!mu.chart) throw Error("pair_density: density has no chart");
  if (f.dim != mu.chart->dim)
    throw Error("pair_density: test function dimension does not match chart " + mu.chart->name);
  std::vector<std::optional<Interval>> fb;
  fb.reserve(f.support.iv.size());
  for (const auto& iv : f.support.iv) fb.emplace_back(iv);
  return pair_density(mu, f.eval, fb, integ);
}

}  // namespace haarpush
