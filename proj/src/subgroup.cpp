#include "haarpush/subgroup.hpp"

#include <algorithm>
#include <sstream>

namespace haarpush {

namespace {

std::string index_list(const std::vector<int>& v) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "]";
  return os.str();
}

std::vector<int> complement_of(const std::vector<int>& coords, int dim) {
  std::vector<char> taken(dim, 0);
  for (int c : coords) taken[c] = 1;
  std::vector<int> out;
  for (int i = 0; i < dim; ++i)
    if (!taken[i]) out.push_back(i);
  return out;
}

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

Coords SubgroupEmbedding::include(const Coords& h) const {
  Coords g(parent->dim);
  include(h.data(), g.data());
  return g;
}

Coords SubgroupEmbedding::extract(const Coords& g) const {
  Coords h(dim());
  extract(g.data(), h.data());
  return h;
}

bool SubgroupEmbedding::contains(const double* g, double tol) const {
  int j = 0;
  for (int i = 0; i < parent->dim; ++i) {
    if (j < dim() && coords[j] == i) {
      ++j;
      continue;
    }
    if (!close_rel(g[i], parent->identity[i], tol)) return false;
  }
  return true;
}

SubgroupEmbedding coordinate_subgroup(ChartPtr parent, std::vector<int> coords, std::string name,
                                      uint64_t seed, int samples) {
  std::sort(coords.begin(), coords.end());
  if (std::adjacent_find(coords.begin(), coords.end()) != coords.end())
    throw Error(parent->name + ": subgroup coordinates must be distinct");
  for (int c : coords)
    if (c < 0 || c >= parent->dim)
      throw Error(parent->name + ": subgroup coordinate index out of range");

  SubgroupEmbedding E;
  E.parent = parent;
  E.coords = coords;
  E.name = name.empty() ? parent->name + index_list(coords) : std::move(name);

  const int k = static_cast<int>(coords.size());
  auto sub = std::make_shared<GroupChart>();
  sub->name = E.name;
  sub->dim = k;
  sub->identity.resize(k);
  sub->domain.bounds.resize(k);
  sub->domain.positive.resize(k);
  for (int j = 0; j < k; ++j) {
    sub->identity[j] = parent->identity[coords[j]];
    sub->domain.bounds[j] = parent->domain.bounds[coords[j]];
    sub->domain.positive[j] = parent->domain.positive[coords[j]];
  }
  // The restricted law: scatter into the parent, multiply there, gather back.
  const std::vector<int> idx = coords;
  const Coords pid = parent->identity;
  sub->mul = [parent, idx, pid](const double* x, const double* y, double* o) {
    double gx[kMaxDim], gy[kMaxDim], go[kMaxDim];
    for (int i = 0; i < parent->dim; ++i) gx[i] = gy[i] = pid[i];
    for (size_t j = 0; j < idx.size(); ++j) {
      gx[idx[j]] = x[j];
      gy[idx[j]] = y[j];
    }
    parent->mul(gx, gy, go);
    for (size_t j = 0; j < idx.size(); ++j) o[j] = go[idx[j]];
  };
  sub->mul_dual = [parent, idx, pid](const Dual* x, const Dual* y, Dual* o) {
    Dual gx[kMaxDim], gy[kMaxDim], go[kMaxDim];
    for (int i = 0; i < parent->dim; ++i) gx[i] = gy[i] = Dual(pid[i], 0.0);
    for (size_t j = 0; j < idx.size(); ++j) {
      gx[idx[j]] = x[j];
      gy[idx[j]] = y[j];
    }
    parent->mul_dual(gx, gy, go);
    for (size_t j = 0; j < idx.size(); ++j) o[j] = go[idx[j]];
  };
  sub->inv = [parent, idx, pid](const double* x, double* o) {
    double gx[kMaxDim], go[kMaxDim];
    for (int i = 0; i < parent->dim; ++i) gx[i] = pid[i];
    for (size_t j = 0; j < idx.size(); ++j) gx[idx[j]] = x[j];
    parent->inv(gx, go);
    for (size_t j = 0; j < idx.size(); ++j) o[j] = go[idx[j]];
  };
  if (parent->has_embedding()) {
    const EmbedFn pe = parent->embed;
    sub->embed = [pe, idx, pid, parent](const double* x) {
      double gx[kMaxDim];
      for (int i = 0; i < parent->dim; ++i) gx[i] = pid[i];
      for (size_t j = 0; j < idx.size(); ++j) gx[idx[j]] = x[j];
      return pe(gx);
    };
  }
  E.sub = sub;

  // Closure: the frozen coordinates of products and inverses of slice
  // elements must stay at their identity values.
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Coords h1 = random_element(*sub, rng);
    const Coords h2 = random_element(*sub, rng);
    const Coords p = multiply(*parent, E.include(h1), E.include(h2));
    if (!E.contains(p.data()))
      throw Error(E.name + ": coordinate slice is not closed under the group law");
    const Coords pi = inverse(*parent, E.include(h1));
    if (!E.contains(pi.data()))
      throw Error(E.name + ": coordinate slice is not closed under inversion");
  }
  validate_chart(*sub, splitmix64(seed), std::max(5, samples / 2));
  return E;
}

Coords QuotientPresentation::project(const Coords& g) const {
  Coords b(base_dim());
  project(g.data(), b.data());
  return b;
}

Coords QuotientPresentation::section(const Coords& gbar) const {
  Coords g(G->dim);
  section(gbar.data(), g.data());
  return g;
}

namespace {

/// One-dimensional polynomial bump (1 - u^2)^3 (1 + 0.3 u) on [lo, hi],
/// smooth, positive inside, vanishing to second order at the edges. The
/// asymmetric factor keeps probe functions from hiding symmetry-coincidence.
double probe_bump1(double t, double lo, double hi) {
  const double u = 2.0 * (t - lo) / (hi - lo) - 1.0;
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double v = 1.0 - u * u;
  return v * v * v * (1.0 + 0.3 * u);
}

/// Support window for automatic probe bumps: positivity-constrained
/// coordinates get a multiplicative window, free coordinates an additive one.
/// `variant` nudges the window so different probes are genuinely different.
Box probe_window(const GroupChart& G, int variant) {
  Box b;
  for (int i = 0; i < G.dim; ++i) {
    if (G.domain.positive[i]) {
      b.iv.push_back({0.5 / (1.0 + 0.07 * variant), 2.0 * (1.0 + 0.05 * variant)});
    } else {
      const double c = G.identity[i];
      b.iv.push_back({c - 1.0 - 0.11 * variant, c + 1.0 + 0.07 * variant});
    }
  }
  return b;
}

BoxFn product_bump_on(Box window) {
  return [window](const double* x) {
    double v = 1.0;
    for (int i = 0; i < window.dim(); ++i) {
      v *= probe_bump1(x[i], window.iv[i].lo, window.iv[i].hi);
      if (v == 0.0) return Cmplx(0.0, 0.0);
    }
    return Cmplx(v, 0.0);
  };
}

}  // namespace

double weil_normalize(const QuotientPresentation& Q, const BoxFn& beta, const Box& support,
                      const Integrator& integ, IntegralResult* numerator,
                      IntegralResult* denominator, const Integrator* fiber_integ) {
  const Integrator inner_integ = fiber_integ ? *fiber_integ : integ;
  const GroupChart& G = *Q.G;
  if (support.dim() != G.dim) throw Error("weil_normalize: support box has wrong dimension");

  const IntegralResult num = integrate_box(
      BoxFn([&](const double* g) { return beta(g) * haar_density(G, g); }), support, integ);

  std::vector<std::optional<Interval>> bounds(G.dim);
  for (int i = 0; i < G.dim; ++i) bounds[i] = support.iv[i];
  Box outer;
  for (int j : Q.base) outer.iv.push_back(support.iv[j]);

  const GroupChart& Nc = *Q.N.sub;
  const IntegralResult den = integrate_box(
      BoxFn([&](const double* gbar) {
        double anchor[kMaxDim];
        Q.section(gbar, anchor);
        const Box fiber = fiber_parameter_box(Q.N, anchor, bounds);
        const IntegralResult inner = integrate_box(
            BoxFn([&](const double* t) {
              double gn[kMaxDim], g[kMaxDim];
              Q.N.include(t, gn);
              G.mul(anchor, gn, g);
              return beta(g) * haar_density(Nc, t);
            }),
            fiber, inner_integ);
        return inner.value * haar_density(*Q.quotient, gbar);
      }),
      outer, integ);

  if (numerator) *numerator = num;
  if (denominator) *denominator = den;
  if (std::abs(num.value) < 1e-14 || std::abs(den.value) < 1e-300)
    throw Error(G.name + ": degenerate normalizer function (vanishing integral)");
  return (num.value / den.value).real();
}

QuotientPresentation quotient_group(ChartPtr G, const SubgroupEmbedding& N,
                                    const Integrator& weil_integrator, uint64_t seed,
                                    int samples) {
  if (N.parent != G) throw Error("quotient_group: subgroup was built for a different chart");
  QuotientPresentation Q;
  Q.G = G;
  Q.N = N;
  Q.base = complement_of(N.coords, G->dim);

  Rng rng(seed);
  // Normality under conjugation by chart elements.
  for (int s = 0; s < samples; ++s) {
    const Coords g = random_element(*G, rng);
    const Coords n = random_element(*N.sub, rng);
    const Coords conj = multiply(*G, multiply(*G, g, N.include(n)), inverse(*G, g));
    if (!N.contains(conj.data(), 1e-8))
      throw Error(G->name + ": subgroup " + N.name + " is not normal under the chart split");
  }

  // Quotient chart on the base coordinates.
  auto q = std::make_shared<GroupChart>();
  q->name = G->name + "/" + N.name;
  q->dim = Q.base_dim();
  q->identity.resize(q->dim);
  q->domain.bounds.resize(q->dim);
  q->domain.positive.resize(q->dim);
  for (int j = 0; j < q->dim; ++j) {
    q->identity[j] = G->identity[Q.base[j]];
    q->domain.bounds[j] = G->domain.bounds[Q.base[j]];
    q->domain.positive[j] = G->domain.positive[Q.base[j]];
  }
  const std::vector<int> base = Q.base;
  const Coords gid = G->identity;
  q->mul = [G, base, gid](const double* x, const double* y, double* o) {
    double gx[kMaxDim], gy[kMaxDim], go[kMaxDim];
    for (int i = 0; i < G->dim; ++i) gx[i] = gy[i] = gid[i];
    for (size_t j = 0; j < base.size(); ++j) {
      gx[base[j]] = x[j];
      gy[base[j]] = y[j];
    }
    G->mul(gx, gy, go);
    for (size_t j = 0; j < base.size(); ++j) o[j] = go[base[j]];
  };
  q->mul_dual = [G, base, gid](const Dual* x, const Dual* y, Dual* o) {
    Dual gx[kMaxDim], gy[kMaxDim], go[kMaxDim];
    for (int i = 0; i < G->dim; ++i) gx[i] = gy[i] = Dual(gid[i], 0.0);
    for (size_t j = 0; j < base.size(); ++j) {
      gx[base[j]] = x[j];
      gy[base[j]] = y[j];
    }
    G->mul_dual(gx, gy, go);
    for (size_t j = 0; j < base.size(); ++j) o[j] = go[base[j]];
  };
  q->inv = [G, base, gid](const double* x, double* o) {
    double gx[kMaxDim], go[kMaxDim];
    for (int i = 0; i < G->dim; ++i) gx[i] = gid[i];
    for (size_t j = 0; j < base.size(); ++j) gx[base[j]] = x[j];
    G->inv(gx, go);
    for (size_t j = 0; j < base.size(); ++j) o[j] = go[base[j]];
  };
  Q.quotient = q;

  // Every sample must decompose as g = section(project(g)) * n with n in N,
  // and the base coordinates must not feel motion along the fiber.
  for (int s = 0; s < samples; ++s) {
    const Coords g = random_element(*G, rng);
    const Coords b = Q.project(g);
    const Coords rest = multiply(*G, inverse(*G, Q.section(b)), g);
    if (!N.contains(rest.data(), 1e-8))
      throw Error(G->name + ": chart split does not trivialize the fiber " + N.name);
    const Coords back = multiply(*G, Q.section(b), rest);
    for (int i = 0; i < G->dim; ++i)
      if (!close_rel(back[i], g[i], 1e-9))
        throw Error(G->name + ": chart split does not trivialize the fiber " + N.name);
    const Coords n = random_element(*N.sub, rng);
    const Coords moved = multiply(*G, Q.section(b), N.include(n));
    for (int j = 0; j < Q.base_dim(); ++j)
      if (!close_rel(moved[Q.base[j]], b[j], 1e-9))
        throw Error(G->name + ": base coordinates are not constant along the fiber " + N.name);
  }

  // Projected law must be the image of the ambient law.
  for (int s = 0; s < samples; ++s) {
    const Coords x = random_element(*G, rng);
    const Coords y = random_element(*G, rng);
    const Coords lhs = Q.project(multiply(*G, x, y));
    const Coords rhs = multiply(*q, Q.project(x), Q.project(y));
    for (int j = 0; j < q->dim; ++j)
      if (!close_rel(lhs[j], rhs[j], 1e-9))
        throw Error(G->name + ": quotient law is not well defined in the chart");
  }
  validate_chart(*q, splitmix64(seed ^ 0x51ed), std::max(5, samples / 2));

  // Weil scale from three distinct probe bumps; it must not depend on them.
  double first = 0.0, lo = 0.0, hi = 0.0;
  for (int variant = 0; variant < 3; ++variant) {
    const Box window = probe_window(*G, variant);
    const double c = weil_normalize(Q, product_bump_on(window), window, weil_integrator);
    if (variant == 0) {
      first = lo = hi = c;
    } else {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  if ((hi - lo) > 1e-5 * std::fabs(first))
    throw Error(G->name + ": Weil scale is inconsistent across test functions");
  Q.weil_scale = first;
  Q.weil_scale_spread = (hi - lo) / std::fabs(first);
  return Q;
}

Coords HomogeneousSpace::project(const Coords& g) const {
  Coords b(base_dim());
  project(g.data(), b.data());
  return b;
}

Coords HomogeneousSpace::section(const Coords& b) const {
  Coords g(G->dim);
  section(b.data(), g.data());
  return g;
}

Coords HomogeneousSpace::project_checked(const Coords& g, double tol) const {
  if (static_cast<int>(g.size()) != G->dim)
    throw Error(name + ": element has wrong dimension");
  const Coords b = project(g);
  const Coords rest = multiply(*G, inverse(*G, section(b)), g);
  if (!H.contains(rest.data(), tol)) throw Error(name + ": element not decomposable in chart");
  return b;
}

HomogeneousSpace homogeneous_space(ChartPtr G, const SubgroupEmbedding& H, uint64_t seed,
                                   int samples) {
  if (H.parent != G) throw Error("homogeneous_space: subgroup was built for a different chart");
  HomogeneousSpace S;
  S.G = G;
  S.H = H;
  S.base = complement_of(H.coords, G->dim);
  S.name = G->name + "/" + H.name;

  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Coords g = random_element(*G, rng);
    const Coords b = S.project(g);
    const Coords rest = multiply(*G, inverse(*G, S.section(b)), g);
    if (!H.contains(rest.data(), 1e-8))
      throw Error(S.name + ": chart split does not trivialize the fiber");
    const Coords h = random_element(*H.sub, rng);
    const Coords moved = multiply(*G, S.section(b), H.include(h));
    for (int j = 0; j < S.base_dim(); ++j)
      if (!close_rel(moved[S.base[j]], b[j], 1e-9))
        throw Error(S.name + ": base coordinates are not constant along the fiber");
  }
  return S;
}

DescendedMaps descend_map(const QuotientPresentation& Q, const SubgroupEmbedding& H,
                          uint64_t seed, int samples) {
  if (H.parent != Q.G) throw Error("descend_map: subgroup was built for a different chart");
  for (int c : Q.N.coords)
    if (!std::binary_search(H.coords.begin(), H.coords.end(), c))
      throw Error(Q.G->name + ": chain is invalid, the normal subgroup " + Q.N.name +
                  " must lie inside " + H.name);

  DescendedMaps D;
  // H/N lives on the H-coordinates that survive the projection.
  std::vector<int> hbar;
  for (int c : H.coords) {
    if (std::binary_search(Q.N.coords.begin(), Q.N.coords.end(), c)) continue;
    const auto it = std::find(Q.base.begin(), Q.base.end(), c);
    hbar.push_back(static_cast<int>(it - Q.base.begin()));
  }
  D.Hbar = coordinate_subgroup(Q.quotient, hbar, H.name + "/" + Q.N.name, splitmix64(seed));
  D.barmod = homogeneous_space(Q.quotient, D.Hbar, splitmix64(seed ^ 0xa11));
  D.gmodh = homogeneous_space(Q.G, H, splitmix64(seed ^ 0xb22));
  D.gbar_to_barmod = D.barmod.base;
  D.g_to_gmodh = D.gmodh.base;

  // The two descents must name the same ambient coordinates...
  std::vector<int> via_quotient;
  for (int j : D.barmod.base) via_quotient.push_back(Q.base[j]);
  if (via_quotient != D.gmodh.base)
    throw Error(Q.G->name + ": descended quotient bases do not align");

  // ...and the square must close on samples.
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Coords g = random_element(*Q.G, rng);
    const Coords via_gbar = D.barmod.project(Q.project(g));
    const Coords via_gmodh = D.gmodh.project(g);
    for (size_t j = 0; j < via_gbar.size(); ++j)
      if (!close_rel(via_gbar[j], via_gmodh[j], 1e-12))
        throw Error(Q.G->name + ": quotient maps do not commute in the chart");
  }
  return D;
}

Box fiber_parameter_box(const SubgroupEmbedding& K, const double* anchor,
                        const std::vector<std::optional<Interval>>& bounds,
                        const double* shift) {
  const GroupChart& G = *K.parent;
  const int n = G.dim;
  const int k = K.dim();
  if (static_cast<int>(bounds.size()) != n)
    throw Error("fiber_parameter_box: bounds list has wrong dimension");
  if (k == 0) return Box{};  // point fiber: the caller evaluates once

  // Probe the affine map t -> anchor * include(t) [* shift] around the slice
  // identity.
  const auto image = [&](const double* t, double* out) {
    double g0[kMaxDim];
    K.include(t, g0);
    if (shift == nullptr) {
      G.mul(anchor, g0, out);
    } else {
      double mid[kMaxDim];
      G.mul(anchor, g0, mid);
      G.mul(mid, shift, out);
    }
  };
  double tid[kMaxDim], v[kMaxDim];
  for (int j = 0; j < k; ++j) tid[j] = K.sub->identity[j];
  image(tid, v);

  double M[kMaxDim][kMaxDim];  // M[j][i]: response of coordinate i to t_j
  double t[kMaxDim], w[kMaxDim];
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) t[i] = tid[i];
    t[j] += 1.0;
    image(t, w);
    for (int i = 0; i < n; ++i) M[j][i] = w[i] - v[i];
  }
  // Affinity check at a joint displacement.
  for (int j = 0; j < k; ++j) t[j] = tid[j] + 0.625 + 0.125 * j;
  image(t, w);
  for (int i = 0; i < n; ++i) {
    double pred = v[i];
    for (int j = 0; j < k; ++j) pred += (t[j] - tid[j]) * M[j][i];
    if (!close_rel(pred, w[i], 1e-8))
      throw Error(K.name + ": fiber map is not affine in the chart parameters");
  }

  Box range;
  range.iv.resize(k);
  for (int j = 0; j < k; ++j) {
    range.iv[j] = K.sub->domain.bounds[j];
    if (K.sub->domain.positive[j]) range.iv[j].lo = std::max(range.iv[j].lo, 0.0);
  }
  // Resolve the ranges. A bound on coordinate i is the affine constraint
  //   v[i] + sum_j M[j][i] (t_j - tid_j)  within  bounds[i].
  // A single-parameter constraint inverts exactly. A constraint coupling
  // several parameters is solved for each of them by interval arithmetic over
  // the ranges established so far; ranges only ever shrink, so the sweep
  // terminates and triangular couplings resolve after a few passes. The
  // result always encloses the true range, which is what integration needs.
  bool changed = true;
  for (int sweep = 0; sweep < k + 2 && changed; ++sweep) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (!bounds[i]) continue;
      const Interval bd = *bounds[i];
      const double scale = std::fabs(v[i]) + 1.0;
      int sig[kMaxDim];
      int nsig = 0;
      for (int j = 0; j < k; ++j)
        if (std::fabs(M[j][i]) > 1e-12 * scale) sig[nsig++] = j;
      if (nsig == 0) {
        if (v[i] < bd.lo - 1e-12 * scale || v[i] > bd.hi + 1e-12 * scale) {
          for (int j = 0; j < k; ++j) range.iv[j] = {1.0, 0.0};  // slice misses the bounds
          return range;
        }
        continue;
      }
      for (int jj = 0; jj < nsig; ++jj) {
        const int j = sig[jj];
        double rest_lo = 0.0, rest_hi = 0.0;
        bool usable = true;
        for (int oo = 0; oo < nsig && usable; ++oo) {
          const int o = sig[oo];
          if (o == j) continue;
          const Interval ro = range.iv[o];
          if (!ro.finite()) {
            usable = false;
            break;
          }
          const double a = M[o][i] * (ro.lo - tid[o]);
          const double b = M[o][i] * (ro.hi - tid[o]);
          rest_lo += std::min(a, b);
          rest_hi += std::max(a, b);
        }
        if (!usable) continue;
        const double m = M[j][i];
        double lo = (bd.lo - v[i] - rest_hi) / m + tid[j];
        double hi = (bd.hi - v[i] - rest_lo) / m + tid[j];
        if (m < 0.0) std::swap(lo, hi);
        const Interval next = intersect(range.iv[j], {lo, hi});
        if (next.lo != range.iv[j].lo || next.hi != range.iv[j].hi) {
          range.iv[j] = next;
          changed = true;
        }
        if (next.empty()) return range;
      }
    }
  }
  for (int j = 0; j < k; ++j) {
    if (range.iv[j].empty()) return range;
    if (!range.iv[j].finite())
      throw Error(K.name + ": fiber integration range is unbounded for parameter " +
                  std::to_string(j));
  }
  return range;
}

}  // namespace haarpush
