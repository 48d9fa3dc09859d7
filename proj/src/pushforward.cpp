#include "haarpush/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace haarpush {

Coords Route::apply(const Coords& s) const {
  if (static_cast<int>(s.size()) != source.dim)
    throw Error("route " + name + ": input has dimension " + std::to_string(s.size()) +
                ", expected " + std::to_string(source.dim));
  Coords t(select.size());
  apply(s.data(), t.data());
  return t;
}

std::vector<int> Route::dropped() const {
  std::vector<bool> kept(static_cast<size_t>(source.dim), false);
  for (int c : select) kept[static_cast<size_t>(c)] = true;
  std::vector<int> out;
  for (int i = 0; i < source.dim; ++i)
    if (!kept[static_cast<size_t>(i)]) out.push_back(i);
  return out;
}

Route Route::then(const Route& next) const {
  if (next.source.dim != target.dim)
    throw Error("routes do not compose: " + name + " ends on " + target.name +
                " (dim " + std::to_string(target.dim) + ") but " + next.name +
                " starts on " + next.source.name + " (dim " +
                std::to_string(next.source.dim) + ")");
  Route out;
  out.source = source;
  out.target = next.target;
  out.select.reserve(next.select.size());
  for (int j : next.select) out.select.push_back(select[static_cast<size_t>(j)]);
  out.name = name + " ; " + next.name;
  return out;
}

Route Route::identity(const SpaceRef& space) {
  Route r;
  r.source = space;
  r.target = space;
  r.select.resize(static_cast<size_t>(space.dim));
  for (int i = 0; i < space.dim; ++i) r.select[static_cast<size_t>(i)] = i;
  r.name = "id_" + space.name;
  return r;
}

Route Route::from_quotient(const QuotientPresentation& Q) {
  Route r;
  r.source = {Q.G->name, Q.G->dim};
  r.target = {Q.quotient->name, Q.base_dim()};
  r.select = Q.base;
  r.name = Q.G->name + " -> " + Q.quotient->name;
  return r;
}

Route Route::from_homspace(const HomogeneousSpace& S) {
  Route r;
  r.source = {S.G->name, S.G->dim};
  r.target = {S.name, S.base_dim()};
  r.select = S.base;
  r.name = S.G->name + " -> " + S.name;
  return r;
}

Route Route::selection(const SpaceRef& source, const SpaceRef& target, std::vector<int> select,
                       std::string name) {
  if (static_cast<int>(select.size()) != target.dim)
    throw Error("route " + name + ": selection size does not match the target dimension");
  for (int c : select)
    if (c < 0 || c >= source.dim)
      throw Error("route " + name + ": selected coordinate out of range");
  Route r;
  r.source = source;
  r.target = target;
  r.select = std::move(select);
  r.name = std::move(name);
  return r;
}

IntegralResult pushforward_pair(const Density& mu, const PropernessCert& cert,
                                const Route& route, const TestFunction& alpha,
                                const Integrator& integ) {
  if (!mu.chart) throw Error("pushforward_pair: density has no chart");
  if (mu.chart->dim != route.source.dim)
    throw Error("pushforward_pair: density lives on a chart of dimension " +
                std::to_string(mu.chart->dim) + " but the route starts in dimension " +
                std::to_string(route.source.dim));
  if (alpha.dim != route.target.dim)
    throw Error("pushforward_pair: test function dimension " + std::to_string(alpha.dim) +
                " does not match the route target " + route.target.name);
  for (int c : route.dropped())
    if (!std::binary_search(cert.fiber.begin(), cert.fiber.end(), c))
      throw Error("certificate does not match the route: dropped coordinate " +
                  std::to_string(c) + " is not certified proper for " + route.name);

  // Pull alpha's support back through the selection.
  std::vector<std::optional<Interval>> fb(static_cast<size_t>(route.source.dim), std::nullopt);
  for (size_t j = 0; j < route.select.size(); ++j)
    fb[static_cast<size_t>(route.select[j])] = alpha.support.iv[j];

  // Memoize on the selected coordinates: tensor quadrature grids revisit each
  // projected point once per fiber node, and alpha is often itself a nested
  // fiber integral. Keys are exact grid coordinates, so lookups are reliable;
  // the cap only matters for non-grid (Monte Carlo) evaluation patterns.
  const Route r = route;
  const BoxFn aeval = alpha.eval;
  auto cache = std::make_shared<std::map<Coords, Cmplx>>();
  constexpr size_t kCacheCap = 1u << 22;
  BoxFn pulled = [r, aeval, cache](const double* g) -> Cmplx {
    Coords t(r.select.size());
    r.apply(g, t.data());
    const auto it = cache->find(t);
    if (it != cache->end()) return it->second;
    const Cmplx v = aeval(t.data());
    if (cache->size() < kCacheCap) cache->emplace(std::move(t), v);
    return v;
  };
  return pair_density(mu, pulled, fb, integ);
}

Density pushforward_density(const Density& mu, const PropernessCert& certN,
                            const QuotientPresentation& Q, const Integrator& fiber_integ) {
  if (!mu.chart) throw Error("pushforward_density: density has no chart");
  if (mu.chart->dim != Q.G->dim)
    throw Error("pushforward_density: density chart does not match the quotient's group");
  for (int c : Q.N.coords)
    if (!std::binary_search(certN.fiber.begin(), certN.fiber.end(), c))
      throw Error("certificate does not match the quotient: fiber coordinate " +
                  std::to_string(c) + " of " + Q.N.name + " is not certified proper");

  Density psi;
  psi.chart = Q.quotient;
  psi.bound.reserve(Q.base.size());
  bool all_compact = true;
  double fiber_vol = 1.0;
  for (int c : Q.base) {
    psi.bound.push_back(mu.bound[static_cast<size_t>(c)]);
    if (!psi.bound.back() || !psi.bound.back()->finite()) all_compact = false;
  }
  for (int c : Q.N.coords) {
    const auto& b = mu.bound[static_cast<size_t>(c)];
    if (b && b->finite()) fiber_vol *= std::max(b->length(), 1e-300);
  }
  psi.shape = all_compact ? DensityShape::CompactBox : DensityShape::ProductForm;
  psi.scale = mu.scale * fiber_vol;
  psi.desc = "pushforward of " + mu.desc + " along " + Q.G->name + " -> " + Q.quotient->name;
  if (!mu.support_shift.empty()) {
    // The projection is a chart homomorphism, so a sheared support descends:
    // psi can only be nonzero where gbar * project(shift) meets the projected
    // original bounds.
    psi.support_shift = Q.project(mu.support_shift);
    psi.shifted_bound.reserve(Q.base.size());
    for (int c : Q.base) psi.shifted_bound.push_back(mu.shifted_bound[static_cast<size_t>(c)]);
  }

  // Capture by value: the returned density must outlive mu / Q references.
  const ChartPtr G = Q.G;
  const SubgroupEmbedding N = Q.N;
  const std::vector<int> base = Q.base;
  const double scale = Q.weil_scale;
  const BoxFn phi = mu.phi;
  const auto bounds = mu.bound;
  const Coords mshift = mu.support_shift;
  const auto sbounds = mu.shifted_bound;
  const ChartPtr qchart = Q.quotient;
  const Integrator integ = fiber_integ;
  psi.phi = [G, N, base, scale, phi, bounds, mshift, sbounds, qchart,
             integ](const double* gbar) -> Cmplx {
    if (!qchart->domain.contains(gbar)) return 0.0;
    double anchor[kMaxDim];
    for (int i = 0; i < G->dim; ++i) anchor[i] = G->identity[i];
    for (size_t j = 0; j < base.size(); ++j) anchor[base[j]] = gbar[j];
    const Box fiber = mshift.empty()
                          ? fiber_parameter_box(N, anchor, bounds)
                          : fiber_parameter_box(N, anchor, sbounds, mshift.data());
    if (fiber.empty()) return 0.0;
    BoxFn inner = [&](const double* t) -> Cmplx {
      double g[kMaxDim], n[kMaxDim];
      N.include(t, n);
      G->mul(anchor, n, g);
      if (!G->domain.contains(g)) return 0.0;
      const Cmplx p = phi(g);
      if (p == Cmplx(0.0)) return 0.0;
      return p * haar_density(*N.sub, t);
    };
    return scale * integrate_box(inner, fiber, integ).value;
  };
  return psi;
}

TestFunction fiber_average(const TestFunction& nu, const HomogeneousSpace& S,
                           const Integrator& fiber_integ) {
  if (nu.dim != S.G->dim)
    throw Error("fiber_average: function dimension does not match the group " + S.G->name);

  TestFunction alpha;
  alpha.dim = S.base_dim();
  alpha.support.iv.reserve(S.base.size());
  for (int c : S.base) alpha.support.iv.push_back(nu.support.iv[static_cast<size_t>(c)]);
  alpha.desc = "fiber average of " + nu.desc + " over " + S.H.name;

  std::vector<std::optional<Interval>> bounds;
  bounds.reserve(nu.support.iv.size());
  for (const auto& iv : nu.support.iv) bounds.emplace_back(iv);

  const ChartPtr G = S.G;
  const SubgroupEmbedding H = S.H;
  const std::vector<int> base = S.base;
  const BoxFn nueval = nu.eval;
  const Integrator integ = fiber_integ;
  alpha.eval = [G, H, base, bounds, nueval, integ](const double* b) -> Cmplx {
    double anchor[kMaxDim];
    for (int i = 0; i < G->dim; ++i) anchor[i] = G->identity[i];
    for (size_t j = 0; j < base.size(); ++j) anchor[base[j]] = b[j];
    if (!G->domain.contains(anchor)) return 0.0;
    const Box fiber = fiber_parameter_box(H, anchor, bounds);
    if (fiber.empty()) return 0.0;
    BoxFn inner = [&](const double* t) -> Cmplx {
      double g[kMaxDim], h[kMaxDim];
      H.include(t, h);
      G->mul(anchor, h, g);
      if (!G->domain.contains(g)) return 0.0;
      const Cmplx v = nueval(g);
      if (v == Cmplx(0.0)) return 0.0;
      return v * haar_density(*H.sub, t);
    };
    return integrate_box(inner, fiber, integ).value;
  };
  return alpha;
}

Density right_translate(const Density& mu, const Coords& hprime) {
  if (!mu.chart) throw Error("right_translate: density has no chart");
  const ChartPtr G = mu.chart;
  const int n = G->dim;
  if (static_cast<int>(hprime.size()) != n)
    throw Error("right_translate: element dimension does not match chart " + G->name);
  if (!G->domain.contains(hprime.data()))
    throw Error("right_translate: element lies outside the chart domain of " + G->name);

  // Support transport: supp(phi(. h')) = supp(phi) * h'^{-1}, the image of
  // the old support under the affine map w -> w * hinv. The per-coordinate
  // hull of that image feeds outer enclosures; the exact sheared description
  // (original bounds, read at g * h') rides along for fiber boxes and
  // pairings.
  const Coords hinv = inverse(*G, hprime);

  Density out;
  out.chart = G;
  out.bound = translate_bounds(*G, mu.bound, hinv);
  bool all_compact = true;
  for (const auto& b : out.bound)
    if (!b || !b->finite()) all_compact = false;
  out.shape = all_compact ? DensityShape::CompactBox : DensityShape::ProductForm;
  out.scale = mu.scale;
  if (mu.support_shift.empty()) {
    out.support_shift = hprime;
    out.shifted_bound = mu.bound;
  } else {
    // Composing translations: phi(g h') vanishes unless (g h') s lies in the
    // original bounds, i.e. unless g (h' s) does.
    out.support_shift = multiply(*G, hprime, mu.support_shift);
    out.shifted_bound = mu.shifted_bound;
  }
  {
    std::ostringstream os;
    os << mu.desc << " right-translated by (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << hprime[static_cast<size_t>(i)];
    os << ")";
    out.desc = os.str();
  }

  const BoxFn phi = mu.phi;
  const Coords hp = hprime;
  out.phi = [G, phi, hp](const double* g) -> Cmplx {
    if (!G->domain.contains(g)) return 0.0;
    double gh[kMaxDim];
    G->mul(g, hp.data(), gh);
    if (!G->domain.contains(gh)) return 0.0;
    return phi(gh);
  };
  return out;
}

}  // namespace haarpush
