#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "haarpush/catalog.hpp"
#include "haarpush/verify.hpp"

namespace haarpush {

namespace {

Box default_window(const GroupChart& G) {
  Box w;
  w.iv.reserve(static_cast<size_t>(G.dim));
  for (int i = 0; i < G.dim; ++i) {
    if (G.domain.positive[static_cast<size_t>(i)])
      w.iv.push_back({0.55, 1.85});
    else
      w.iv.push_back({-1.0, 1.0});
  }
  return w;
}

struct LieSpec {
  const char* group;
  std::vector<int> n_coords;
  const char* n_name;
  std::vector<int> h_coords;
  const char* h_name;
};

struct FinSpec {
  std::string group;
  std::string h_name;
  std::string n_name;
};

struct CatalogEntry {
  const char* blurb;
  bool finite;
  LieSpec lie{};
  FinSpec fin{};
  int default_order = 12;        // outer quadrature order
  int default_fiber_order = 12;  // nested fiber order
  double default_rel_tol = 1e-5;
};

const std::map<std::string, CatalogEntry>& catalog() {
  static const std::map<std::string, CatalogEntry> entries = {
      {"heis3-center",
       {"Heisenberg group over its center (N = H = z-line); unimodular testbed",
        false,
        {"heis3", {2}, "center", {2}, "center"},
        {},
        12,
        12,
        1e-5}},
      {"borel3-aff-center",
       {"upper-triangular 3x3 chain: N = corner line, H = (a,c) affine slice; "
        "the non-unimodular workhorse",
        false,
        {"borel3", {2}, "corner", {0, 2}, "aff-slice"},
        {},
        6,
        12,
        1e-4}},
      {"borel3-unipotent",
       {"upper-triangular 3x3 over its full unipotent radical (N = H, normal, "
        "Heisenberg-isomorphic); quotient is the diagonal torus",
        false,
        {"borel3", {1, 2, 4}, "unipotent", {1, 2, 4}, "unipotent"},
        {},
        6,
        8,
        1e-4}},
      {"aff1-scaling",
       {"affine line with N = {e} and H = the scaling subgroup; exercises the "
        "trivial-N specializations",
        false,
        {"aff1", {}, "trivial", {0}, "scalings"},
        {},
        12,
        12,
        1e-5}},
      {"r2-split",
       {"flat plane with N = H = the x-axis; everything abelian and exact",
        false,
        {"r2", {0}, "x-axis", {0}, "x-axis"},
        {},
        12,
        12,
        1e-5}},
      {"s4-a4-v4",
       {"permutations of 4 letters over the Klein four-group inside the "
        "alternating group; exact rational backend",
        true,
        {},
        {"s4", "a4", "v4"}}},
      {"z8-z4-z2",
       {"cyclic tower Z/8 > Z/4 > Z/2; exact rational backend",
        true,
        {},
        {"z8", "span:2", "span:4"}}},
  };
  return entries;
}

std::shared_ptr<const LieChainPart> build_lie_part(ChartPtr G, std::vector<int> n_coords,
                                                   const std::string& n_name,
                                                   std::vector<int> h_coords,
                                                   const std::string& h_name,
                                                   const std::optional<Box>& window) {
  auto part = std::make_shared<LieChainPart>();
  part->G = std::move(G);
  part->N = coordinate_subgroup(part->G, n_coords, n_name);
  part->H = coordinate_subgroup(part->G, h_coords, h_name);
  for (int c : n_coords)
    if (!std::count(h_coords.begin(), h_coords.end(), c))
      throw Error("chain is invalid: " + n_name + " is not inside " + h_name);
  part->Q = quotient_group(part->G, part->N);
  part->D = descend_map(part->Q, part->H);
  if (window) {
    if (static_cast<int>(window->iv.size()) != part->G->dim)
      throw Error("chain window has " + std::to_string(window->iv.size()) +
                  " intervals but " + part->G->name + " has dimension " +
                  std::to_string(part->G->dim));
    part->window = *window;
  } else {
    part->window = default_window(*part->G);
  }
  return part;
}

std::shared_ptr<const LieChainPart> build_lie_structural(const LieSpec& spec) {
  static std::map<std::string, std::shared_ptr<const LieChainPart>> cache;
  std::ostringstream key;
  key << spec.group << "|" << spec.n_name << "|" << spec.h_name;
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;
  auto part = build_lie_part(find_group(spec.group), spec.n_coords, spec.n_name,
                             spec.h_coords, spec.h_name, std::nullopt);
  cache[key.str()] = part;
  return part;
}

std::shared_ptr<const FinChainPart> build_fin_structural(const FinSpec& spec) {
  static std::map<std::string, std::shared_ptr<const FinChainPart>> cache;
  std::ostringstream key;
  key << spec.group << "|" << spec.h_name << "|" << spec.n_name;
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;

  auto part = std::make_shared<FinChainPart>();
  part->G = find_fin_group(spec.group);
  part->H = fin_named_subgroup(part->G, spec.h_name);
  part->N = fin_named_subgroup(part->G, spec.n_name);
  for (int x : part->N)
    if (!std::binary_search(part->H.begin(), part->H.end(), x))
      throw Error("chain is invalid: " + spec.n_name + " is not inside " +
                  spec.h_name + " in " + part->G.name);
  part->Gbar = fin_quotient_group(part->G, part->N, &part->cosN);
  part->cosH = fin_cosets(part->G, part->H);

  std::set<int> hbar;
  for (int h : part->H) hbar.insert(part->cosN.coset_of[static_cast<size_t>(h)]);
  part->Hbar.assign(hbar.begin(), hbar.end());
  if (!fin_is_subgroup(part->Gbar, part->Hbar))
    throw Error("chain is invalid: the image of " + spec.h_name +
                " is not a subgroup of the quotient");
  part->cosHbar = fin_cosets(part->Gbar, part->Hbar);

  part->g_to_final.resize(static_cast<size_t>(part->G.n));
  for (int i = 0; i < part->G.n; ++i)
    part->g_to_final[static_cast<size_t>(i)] =
        part->cosHbar.coset_of[static_cast<size_t>(part->cosN.coset_of[static_cast<size_t>(i)])];
  part->gmodh_to_final.resize(static_cast<size_t>(part->cosH.count));
  for (int c = 0; c < part->cosH.count; ++c)
    part->gmodh_to_final[static_cast<size_t>(c)] =
        part->g_to_final[static_cast<size_t>(part->cosH.representative[static_cast<size_t>(c)])];
  for (int i = 0; i < part->G.n; ++i)
    if (part->gmodh_to_final[static_cast<size_t>(part->cosH.coset_of[static_cast<size_t>(i)])] !=
        part->g_to_final[static_cast<size_t>(i)])
      throw Error("chain is invalid: quotient maps do not agree on " + part->G.name);

  cache[key.str()] = part;
  return part;
}

std::vector<Density> build_densities(const LieChainPart& part, uint64_t seed) {
  std::vector<Density> out;
  const GroupChart& G = *part.G;
  const int n = G.dim;
  Coords mid(static_cast<size_t>(n)), half(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    mid[static_cast<size_t>(i)] = 0.5 * (part.window.iv[i].lo + part.window.iv[i].hi);
    half[static_cast<size_t>(i)] = 0.5 * (part.window.iv[i].hi - part.window.iv[i].lo);
  }

  // Deterministic bump in the middle of the window.
  Coords r1(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) r1[static_cast<size_t>(i)] = 0.42 * half[static_cast<size_t>(i)];
  out.push_back(bump_density(part.G, mid, r1, Cmplx(1.0, 0.25)));

  // Seeded random bump kept inside the window.
  Rng rng(splitmix64(seed ^ 0x9e3779b97f4a7c15ULL));
  Coords c2(static_cast<size_t>(n)), r2(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double m = mid[static_cast<size_t>(i)], hw = half[static_cast<size_t>(i)];
    c2[static_cast<size_t>(i)] = m + (2.0 * rng.uniform() - 1.0) * 0.40 * hw;
    double r = (0.20 + 0.22 * rng.uniform()) * hw;
    r = std::min({r, c2[static_cast<size_t>(i)] - part.window.iv[i].lo,
                  part.window.iv[i].hi - c2[static_cast<size_t>(i)]});
    r2[static_cast<size_t>(i)] = r;
  }
  out.push_back(bump_density(part.G, c2, r2, Cmplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))));

  // Product form: compact bump on the H coordinates, constant elsewhere.
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (!std::count(part.H.coords.begin(), part.H.coords.end(), i)) rest.push_back(i);
  if (!rest.empty() && !part.H.coords.empty()) {
    Coords ch, rh;
    for (int c : part.H.coords) {
      ch.push_back(mid[static_cast<size_t>(c)]);
      rh.push_back(0.45 * half[static_cast<size_t>(c)]);
    }
    out.push_back(product_density(
        part.G, {constant_factor(rest), bump_factor(part.H.coords, ch, rh, Cmplx(0.8, -0.6))}));
  }
  return out;
}

}  // namespace

std::string Chain::describe() const {
  std::ostringstream os;
  if (finite && fin) {
    os << cfg.chain << ": G = " << fin->G.name << " (order " << fin->G.n << "), |H| = "
       << fin->H.size() << ", |N| = " << fin->N.size() << " [exact backend]";
  } else if (lie) {
    os << cfg.chain << ": G = " << lie->G->name << " (dim " << lie->G->dim << "), H = "
       << lie->H.name << " (dim " << lie->H.dim() << "), N = " << lie->N.name << " (dim "
       << lie->N.dim() << ") [chart backend]";
  } else {
    os << cfg.chain << ": empty chain";
  }
  return os.str();
}

Chain build_chain(const std::string& name, ChainConfig cfg) {
  auto it = catalog().find(name);
  if (it == catalog().end()) {
    std::ostringstream os;
    os << "unknown chain '" << name << "'; known:";
    for (const auto& [k, v] : catalog()) os << " " << k;
    throw Error(os.str());
  }
  const CatalogEntry& entry = it->second;
  cfg.chain = name;

  // Chain defaults apply wherever the caller left the stock settings.
  const ChainConfig stock;
  if (cfg.integ.kind == stock.integ.kind && cfg.integ.order == stock.integ.order)
    cfg.integ.order = entry.default_order;
  if (cfg.fiber_integ.kind == stock.fiber_integ.kind &&
      cfg.fiber_integ.order == stock.fiber_integ.order)
    cfg.fiber_integ.order = entry.default_fiber_order;
  if (cfg.tol.rel_tol == stock.tol.rel_tol)
    cfg.tol.rel_tol = entry.finite ? 0.0 : entry.default_rel_tol;
  if (entry.finite && cfg.tol.abs_floor == stock.tol.abs_floor) cfg.tol.abs_floor = 0.0;

  Chain chain;
  chain.cfg = cfg;
  chain.finite = entry.finite;
  if (entry.finite) {
    chain.fin = build_fin_structural(entry.fin);
  } else {
    auto structural = build_lie_structural(entry.lie);
    auto part = std::make_shared<LieChainPart>(*structural);
    part->densities = build_densities(*part, cfg.seed);
    chain.lie = part;
  }
  return chain;
}

Chain build_chain(const ChainSpec& spec, ChainConfig cfg) {
  if (spec.name.empty()) throw Error("chain spec needs a name");
  cfg.chain = spec.name;
  const ChainConfig stock;
  if (spec.finite) {
    if (cfg.tol.rel_tol == stock.tol.rel_tol) cfg.tol.rel_tol = 0.0;
    if (cfg.tol.abs_floor == stock.tol.abs_floor) cfg.tol.abs_floor = 0.0;
  }

  Chain chain;
  chain.cfg = cfg;
  chain.finite = spec.finite;
  if (spec.finite) {
    if (spec.group.empty() || spec.h_named.empty() || spec.n_named.empty())
      throw Error("chain '" + spec.name + "': exact chains need group, h and n names");
    chain.fin = build_fin_structural({spec.group, spec.h_named, spec.n_named});
  } else {
    if (!spec.chart) throw Error("chain '" + spec.name + "': no group chart given");
    auto part = std::make_shared<LieChainPart>(*build_lie_part(
        spec.chart, spec.n_coords, spec.n_coords.empty() ? "trivial" : "N",
        spec.h_coords, spec.h_coords.empty() ? "trivial" : "H", spec.window));
    if (spec.densities.empty()) {
      part->densities = build_densities(*part, cfg.seed);
    } else {
      for (const Density& mu : spec.densities)
        if (mu.chart != part->G)
          throw Error("chain '" + spec.name + "': density '" + mu.desc +
                      "' lives on a different chart");
      part->densities = spec.densities;
    }
    chain.lie = part;
  }
  return chain;
}

std::vector<std::string> chain_catalog_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : catalog()) names.push_back(k);
  return names;
}

std::string chain_catalog_blurb(const std::string& name) {
  auto it = catalog().find(name);
  if (it == catalog().end()) throw Error("unknown chain '" + name + "'");
  return it->second.blurb;
}

}  // namespace haarpush
