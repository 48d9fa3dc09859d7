#include "haarpush/verify.hpp"

#include <algorithm>
#include <future>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "haarpush/catalog.hpp"

namespace haarpush {

namespace {

// ---------------------------------------------------------------------------
// Report plumbing.
// ---------------------------------------------------------------------------

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string hex64(uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

VerificationReport start_report(const Chain& chain, const std::string& check) {
  VerificationReport r;
  r.check = check;
  r.chain = chain.cfg.chain;
  r.rel_tol = chain.cfg.tol.rel_tol;
  r.abs_floor = chain.cfg.tol.abs_floor;
  r.integrator = chain.cfg.integ.describe() + "; fiber " + chain.cfg.fiber_integ.describe();
  std::ostringstream cfgtext;
  cfgtext << chain.cfg.chain << '|' << check << '|' << chain.cfg.seed << '|' << r.integrator
          << '|' << r.rel_tol << '|' << r.abs_floor << '|' << chain.cfg.n_random_fns;
  r.digest = hex64(fnv1a(cfgtext.str()));
  return r;
}

/// Compare lhs against rhs; `scale` is the natural magnitude of the
/// quantities so that near-zero references can be excluded from ratios.
CheckCase compare_case(const std::string& label, Cmplx lhs, Cmplx rhs, const Tolerances& tol,
                       double scale = 1.0) {
  CheckCase c;
  c.label = label;
  c.lhs = lhs;
  c.rhs = rhs;
  c.abs_err = std::abs(lhs - rhs);
  const double ref = std::max(std::abs(lhs), std::abs(rhs));
  const double floor = std::max(tol.abs_floor, 1e-12 * scale);
  c.informative = ref > floor;
  c.rel_err = c.informative ? c.abs_err / ref : 0.0;
  c.pass = c.informative ? (c.rel_err <= tol.rel_tol || c.abs_err <= tol.abs_floor)
                         : (c.abs_err <= floor);
  return c;
}

CheckCase exact_case(const std::string& label, bool ok, Cmplx lhs = 1.0, Cmplx rhs = 1.0) {
  CheckCase c;
  c.label = label;
  c.lhs = lhs;
  c.rhs = rhs;
  c.abs_err = ok ? 0.0 : std::abs(lhs - rhs);
  c.rel_err = 0.0;
  c.informative = true;
  c.pass = ok;
  return c;
}

void finish_report(VerificationReport& r, const Stopwatch& clock) {
  r.pass = !r.cases.empty();
  for (const CheckCase& c : r.cases) {
    if (!c.pass) r.pass = false;
    if (c.informative) {
      r.max_abs = std::max(r.max_abs, c.abs_err);
      r.max_rel = std::max(r.max_rel, c.rel_err);
    }
  }
  r.wall_ms = clock.ms();
}

Rng check_rng(const Chain& chain, const char* check) {
  return Rng(splitmix64(chain.cfg.seed ^ fnv1a(std::string(check))));
}

// ---------------------------------------------------------------------------
// Lie helpers.
// ---------------------------------------------------------------------------

Box gather_box(const Box& window, const std::vector<int>& coords) {
  Box b;
  for (int c : coords) b.iv.push_back(window.iv[static_cast<size_t>(c)]);
  return b;
}

TestFunction deterministic_bump(const Box& box, Cmplx amp) {
  Coords center, radius;
  for (const auto& iv : box.iv) {
    center.push_back(0.5 * (iv.lo + iv.hi));
    radius.push_back(0.45 * 0.5 * (iv.hi - iv.lo));
  }
  return bump_fn(center, radius, amp);
}

/// Test functions on the base of the final quotient: one deterministic bump
/// plus seeded random ones.
std::vector<TestFunction> base_test_functions(const LieChainPart& L, int n_random, Rng& rng) {
  const Box window = gather_box(L.window, L.D.gmodh.base);
  std::vector<TestFunction> fns;
  fns.push_back(deterministic_bump(window, Cmplx(1.0, -0.5)));
  for (int k = 0; k < n_random; ++k) fns.push_back(random_bump_in(window, rng));
  return fns;
}

struct TwoStep {
  Density psi;             // pushforward density on Gbar
  PropernessCert cert;     // Hbar certificate for psi
  Route bottom;            // Gbar -> Gbar/Hbar
};

TwoStep two_step(const LieChainPart& L, const Density& mu, const Integrator& fiber_integ) {
  auto certH = check_membership(mu, L.H.coords, L.H.name);
  auto certN = restrict_cert(certH, L.N.coords, L.N.name);
  TwoStep ts{pushforward_density(mu, certN, L.Q, fiber_integ), {}, Route::from_homspace(L.D.barmod)};
  ts.cert = check_membership(ts.psi, L.D.Hbar.coords, L.D.Hbar.name);
  return ts;
}

/// Grid over a subgroup's own coordinates: logarithmic {1/4..4} in scaling
/// (positive-domain) directions, linear {-1,0,1} in nilpotent ones.
std::vector<Coords> subgroup_grid(const SubgroupEmbedding& K) {
  static const double kLog[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  static const double kLin[] = {-1.0, 0.0, 1.0};
  std::vector<Coords> grid = {{}};
  for (int j = 0; j < K.dim(); ++j) {
    const bool pos = K.sub->domain.positive[static_cast<size_t>(j)] != 0;
    const double* vals = pos ? kLog : kLin;
    const size_t nvals = pos ? 5 : 3;
    std::vector<Coords> next;
    next.reserve(grid.size() * nvals);
    for (const Coords& g : grid) {
      for (size_t v = 0; v < nvals; ++v) {
        Coords t = g;
        t.push_back(vals[v]);
        next.push_back(std::move(t));
      }
    }
    grid = std::move(next);
  }
  if (K.dim() == 0) grid = {{}};
  return grid;
}

std::string coords_label(const Coords& t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ")";
  return os.str();
}

/// Delta_Hbar at the image of an H element, on the quotient chart.
double modular_descended(const LieChainPart& L, const Coords& hG, Coords* hbar_out = nullptr,
                         double* modular_gbar = nullptr) {
  Coords hbar = L.Q.project(hG);
  if (modular_gbar) *modular_gbar = modular(*L.Q.quotient, hbar);
  Coords tbar(static_cast<size_t>(L.D.Hbar.dim()));
  L.D.Hbar.extract(hbar.data(), tbar.data());
  if (hbar_out) *hbar_out = hbar;
  return modular(*L.D.Hbar.sub, tbar);
}

// ---------------------------------------------------------------------------
// Finite helpers.
// ---------------------------------------------------------------------------

std::vector<int> translate_map(const FinGroup& G, int hprime) {
  std::vector<int> m(static_cast<size_t>(G.n));
  for (int i = 0; i < G.n; ++i) m[static_cast<size_t>(i)] = G.mul(i, hprime);
  return m;
}

/// w'(g) = w(g h') — the weights of the right-translated density.
FinMeasure fin_right_translate(const FinGroup& G, const FinMeasure& mu, int hprime) {
  FinMeasure out;
  out.w.resize(mu.w.size());
  for (int i = 0; i < G.n; ++i)
    out.w[static_cast<size_t>(i)] = mu.w[static_cast<size_t>(G.mul(i, hprime))];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// main1: nested properness certificates.
// ---------------------------------------------------------------------------

VerificationReport verify_main1(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "main1");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    bool nested = true;
    for (int x : F.N)
      if (!std::binary_search(F.H.begin(), F.H.end(), x)) nested = false;
    r.cases.push_back(exact_case("N is a subgroup of H inside " + F.G.name, nested));
    r.cases.push_back(exact_case("finite measures are proper for every projection",
                                 fin_is_subgroup(F.G, F.H) && fin_is_subgroup(F.G, F.N)));
    r.detail = "all finite-set maps are proper; the inclusion of measure classes is automatic";
  } else {
    const LieChainPart& L = *chain.lie;
    int idx = 0;
    for (const Density& mu : L.densities) {
      bool ok = true;
      std::string kind;
      try {
        auto certH = check_membership(mu, L.H.coords, L.H.name);
        auto certN = restrict_cert(certH, L.N.coords, L.N.name);
        kind = (certH.kind == CertKind::CompactSupport) ? "compact support"
                                                        : "product form, compact fiber";
        (void)certN;
      } catch (const Error&) {
        ok = false;
      }
      r.cases.push_back(exact_case("density #" + std::to_string(idx) + " certified for " +
                                       L.H.name + " and restricted to " + L.N.name +
                                       (kind.empty() ? "" : " [" + kind + "]"),
                                   ok));
      ++idx;
    }
    // Adversarial density: compact along N only; must be refused for the
    // H-split whenever H strictly contains N.
    std::vector<int> loose;
    for (int c : L.H.coords)
      if (!std::count(L.N.coords.begin(), L.N.coords.end(), c)) loose.push_back(c);
    if (!loose.empty()) {
      std::vector<int> rest;
      for (int i = 0; i < L.G->dim; ++i)
        if (!std::count(L.N.coords.begin(), L.N.coords.end(), i)) rest.push_back(i);
      std::vector<DensityFactor> factors;
      factors.push_back(constant_factor(rest));
      if (!L.N.coords.empty()) {
        Coords cn, rn;
        for (int c : L.N.coords) {
          cn.push_back(0.5 * (L.window.iv[c].lo + L.window.iv[c].hi));
          rn.push_back(0.4 * 0.5 * (L.window.iv[c].hi - L.window.iv[c].lo));
        }
        factors.push_back(bump_factor(L.N.coords, cn, rn));
      }
      Density bad = product_density(L.G, std::move(factors));
      bool refused = false;
      try {
        check_membership(bad, L.H.coords, L.H.name);
      } catch (const Error& e) {
        refused = std::string(e.what()).find("not certifiably") != std::string::npos;
      }
      r.cases.push_back(
          exact_case("density compact along " + L.N.name + " only is refused for " + L.H.name,
                     refused));
    } else {
      r.detail = "H equals N here, so no adversarial direction exists";
    }
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// main2: one-shot pushforward equals the two-step route.
// ---------------------------------------------------------------------------

VerificationReport verify_main2(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "main2");
  Rng rng = check_rng(chain, "main2");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    const int kMeasures = 60;
    for (int k = 0; k < kMeasures; ++k) {
      FinMeasure mu = fin_random_measure(F.G.n, rng);
      FinMeasure oneshot = fin_pushforward(mu, F.cosH.coset_of, F.cosH.count);
      FinMeasure aligned = fin_pushforward(oneshot, F.gmodh_to_final, F.cosHbar.count);
      FinMeasure viabar = fin_pushforward(fin_pushforward(mu, F.cosN.coset_of, F.Gbar.n),
                                          F.cosHbar.coset_of, F.cosHbar.count);
      std::vector<CRat> alpha = fin_random_function(F.cosHbar.count, rng);
      const CRat pl = fin_pair(aligned, alpha);
      const CRat pr = fin_pair(viabar, alpha);
      r.cases.push_back(exact_case("random measure #" + std::to_string(k),
                                   aligned == viabar && (pl + (pr * Rat(-1))).is_zero(),
                                   Cmplx(pl.real_double(), pl.imag_double()),
                                   Cmplx(pr.real_double(), pr.imag_double())));
    }
    r.detail = "exact rational pushforwards along both routes";
  } else {
    const LieChainPart& L = *chain.lie;
    Route direct = Route::from_homspace(L.D.gmodh);
    auto alphas = base_test_functions(L, chain.cfg.n_random_fns, rng);
    int mi = 0;
    for (const Density& mu : L.densities) {
      auto certH = check_membership(mu, L.H.coords, L.H.name);
      TwoStep ts = two_step(L, mu, chain.cfg.fiber_integ);
      int ai = 0;
      for (const TestFunction& alpha : alphas) {
        auto lhs = pushforward_pair(mu, certH, direct, alpha, chain.cfg.integ);
        auto rhs = pushforward_pair(ts.psi, ts.cert, ts.bottom, alpha, chain.cfg.integ);
        r.evaluations += lhs.evaluations + rhs.evaluations;
        r.cases.push_back(compare_case(
            "density #" + std::to_string(mi) + ", test fn #" + std::to_string(ai), lhs.value,
            rhs.value, chain.cfg.tol, mu.scale));
        ++ai;
      }
      ++mi;
    }
    r.detail = "one-shot route " + direct.name + " against density form through " +
               L.Q.quotient->name;
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// main3: the commuting square.
// ---------------------------------------------------------------------------

VerificationReport verify_main3(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "main3");
  Rng rng = check_rng(chain, "main3");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    const int kMeasures = 60;
    for (int k = 0; k < kMeasures; ++k) {
      FinMeasure mu = fin_random_measure(F.G.n, rng);
      // Route A: down to G/H, then across to Gbar/Hbar.
      FinMeasure a = fin_pushforward(fin_pushforward(mu, F.cosH.coset_of, F.cosH.count),
                                     F.gmodh_to_final, F.cosHbar.count);
      // Route B: across to Gbar, then down to Gbar/Hbar.
      FinMeasure b = fin_pushforward(fin_pushforward(mu, F.cosN.coset_of, F.Gbar.n),
                                     F.cosHbar.coset_of, F.cosHbar.count);
      std::vector<CRat> alpha = fin_random_function(F.cosHbar.count, rng);
      const CRat pa = fin_pair(a, alpha);
      const CRat pb = fin_pair(b, alpha);
      r.cases.push_back(exact_case("random measure #" + std::to_string(k),
                                   a == b && (pa + (pb * Rat(-1))).is_zero(),
                                   Cmplx(pa.real_double(), pa.imag_double()),
                                   Cmplx(pb.real_double(), pb.imag_double())));
    }
    r.detail = "square of exact pushforwards on coset spaces";
  } else {
    const LieChainPart& L = *chain.lie;
    // Coordinate selection G/H base -> Gbar/Hbar base.
    std::vector<int> sel;
    for (int pos : L.D.barmod.base) {
      const int gcoord = L.Q.base[static_cast<size_t>(pos)];
      const auto itp = std::find(L.D.gmodh.base.begin(), L.D.gmodh.base.end(), gcoord);
      if (itp == L.D.gmodh.base.end())
        throw Error("descended bases do not align on chain " + chain.cfg.chain);
      sel.push_back(static_cast<int>(itp - L.D.gmodh.base.begin()));
    }
    Route down = Route::from_homspace(L.D.gmodh);
    Route across = Route::selection(down.target,
                                    {L.D.barmod.name, L.D.barmod.base_dim()}, sel,
                                    down.target.name + " -> " + L.D.barmod.name);
    Route routeA = down.then(across);

    auto alphas = base_test_functions(L, chain.cfg.n_random_fns, rng);
    int mi = 0;
    for (const Density& mu : L.densities) {
      auto certH = check_membership(mu, L.H.coords, L.H.name);
      TwoStep ts = two_step(L, mu, chain.cfg.fiber_integ);
      int ai = 0;
      for (const TestFunction& alpha : alphas) {
        auto lhs = pushforward_pair(mu, certH, routeA, alpha, chain.cfg.integ);
        auto rhs = pushforward_pair(ts.psi, ts.cert, ts.bottom, alpha, chain.cfg.integ);
        r.evaluations += lhs.evaluations + rhs.evaluations;
        r.cases.push_back(compare_case(
            "density #" + std::to_string(mi) + ", test fn #" + std::to_string(ai), lhs.value,
            rhs.value, chain.cfg.tol, mu.scale));
        ++ai;
      }
      ++mi;
    }
    r.detail = "route A: " + routeA.name + "; route B: descend the density through " +
               L.Q.quotient->name + ", then pair on " + L.D.barmod.name + ".";
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// main4: pushforwards stay certified.
// ---------------------------------------------------------------------------

VerificationReport verify_main4(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "main4");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    r.cases.push_back(exact_case(
        "image of H is a subgroup of " + F.Gbar.name + " with " +
            std::to_string(F.cosHbar.count) + " cosets",
        fin_is_subgroup(F.Gbar, F.Hbar)));
    r.detail = "finite pushforwards are unconditionally proper";
  } else {
    const LieChainPart& L = *chain.lie;
    int mi = 0;
    for (const Density& mu : L.densities) {
      bool ok = true;
      std::string kind;
      try {
        TwoStep ts = two_step(L, mu, chain.cfg.fiber_integ);
        kind = (ts.cert.kind == CertKind::CompactSupport) ? "compact support"
                                                          : "product form, compact fiber";
      } catch (const Error&) {
        ok = false;
      }
      r.cases.push_back(exact_case("pushforward of density #" + std::to_string(mi) +
                                       " certified for " + L.D.Hbar.name +
                                       (kind.empty() ? "" : " [" + kind + "]"),
                                   ok));
      ++mi;
    }
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Quotient integration identity.
// ---------------------------------------------------------------------------

VerificationReport verify_quotient_pushforward(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "quotient_pushforward");
  Rng rng = check_rng(chain, "quotient_pushforward");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    const int kPairs = 40;
    for (int k = 0; k < kPairs; ++k) {
      FinMeasure phi = fin_random_measure(F.G.n, rng);
      std::vector<CRat> nu = fin_random_function(F.G.n, rng);
      // LHS: pair the pushforward against the fiber sums of nu.
      FinMeasure push = fin_pushforward(phi, F.cosH.coset_of, F.cosH.count);
      std::vector<CRat> avg(static_cast<size_t>(F.cosH.count), CRat{});
      for (int c = 0; c < F.cosH.count; ++c) {
        const int rep = F.cosH.representative[static_cast<size_t>(c)];
        for (int h : F.H) avg[static_cast<size_t>(c)] += nu[static_cast<size_t>(F.G.mul(rep, h))];
      }
      CRat lhs = fin_pair(push, avg);
      // RHS: sum_g nu(g) * sum_h phi(g h); the modular ratio is 1.
      CRat rhs;
      for (int g = 0; g < F.G.n; ++g) {
        CRat inner;
        for (int h : F.H) inner += phi.w[static_cast<size_t>(F.G.mul(g, h))];
        rhs += nu[static_cast<size_t>(g)] * inner;
      }
      r.cases.push_back(exact_case("random (phi, nu) pair #" + std::to_string(k),
                                   (lhs + (rhs * Rat(-1))).is_zero(),
                                   Cmplx(lhs.real_double(), lhs.imag_double()),
                                   Cmplx(rhs.real_double(), rhs.imag_double())));
    }
    r.detail = "exact coset sums; the modular ratio is identically 1";
  } else {
    const LieChainPart& L = *chain.lie;
    Route direct = Route::from_homspace(L.D.gmodh);
    const int kPairs = std::max(3, chain.cfg.n_random_fns);
    for (int k = 0; k < kPairs; ++k) {
      Density phi = (k == 0) ? L.densities[0] : [&] {
        Coords c, rad;
        for (const auto& iv : L.window.iv) {
          const double mid = 0.5 * (iv.lo + iv.hi), half = 0.5 * (iv.hi - iv.lo);
          const double cc = mid + (2.0 * rng.uniform() - 1.0) * 0.35 * half;
          double rr = (0.25 + 0.2 * rng.uniform()) * half;
          rr = std::min({rr, cc - iv.lo, iv.hi - cc});
          c.push_back(cc);
          rad.push_back(rr);
        }
        return bump_density(L.G, c, rad, Cmplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
      }();
      TestFunction nu = random_bump_in(L.window, rng);

      auto certH = check_membership(phi, L.H.coords, L.H.name);
      TestFunction alpha = fiber_average(nu, L.D.gmodh, chain.cfg.fiber_integ);
      auto lhs = pushforward_pair(phi, certH, direct, alpha, chain.cfg.integ);

      // RHS: integral over supp(nu) of nu(g) K(g) rho_G(g), where
      // K(g) = integral over the H-fiber box of phi(g h) Delta ratio rho_H.
      // Writing g = s(b) h0 via the chart split and left-translating the
      // fiber variable by h0 pulls h0 out of the integral:
      //     K(g) = K(s(b)) / (Delta_G(h0) / Delta_H(h0)),
      // since the fiber measure is left invariant and both modular functions
      // restrict to homomorphisms on H. The expensive fiber integral K(s(b))
      // is therefore evaluated once per base point of the outer grid rather
      // than at every outer node.
      const GroupChart& G = *L.G;
      const SubgroupEmbedding H = L.H;
      const HomogeneousSpace S = L.D.gmodh;
      const auto bounds = phi.bound;
      const BoxFn phiev = phi.phi;
      const Integrator fint = chain.cfg.fiber_integ;
      size_t kernel_evals = 0;
      auto base_cache = std::make_shared<std::map<Coords, Cmplx>>();
      BoxFn kernel = [&G, H, S, bounds, phiev, fint, base_cache,
                      &kernel_evals](const double* g) -> Cmplx {
        if (!G.domain.contains(g)) return 0.0;
        Coords b(static_cast<size_t>(S.base_dim()));
        S.project(g, b.data());
        double anchor[kMaxDim], ainv[kMaxDim], h0[kMaxDim], t0[kMaxDim];
        S.section(b.data(), anchor);
        G.inv(anchor, ainv);
        G.mul(ainv, g, h0);
        H.extract(h0, t0);
        const double split = modular(G, Coords(h0, h0 + G.dim)) /
                             modular(*H.sub, Coords(t0, t0 + H.dim()));
        const auto hit = base_cache->find(b);
        if (hit != base_cache->end()) return hit->second / split;
        Cmplx base_val = 0.0;
        const Box fiber = fiber_parameter_box(H, anchor, bounds);
        if (!fiber.empty()) {
          BoxFn inner = [&](const double* t) -> Cmplx {
            double hG[kMaxDim], gh[kMaxDim];
            H.include(t, hG);
            G.mul(anchor, hG, gh);
            if (!G.domain.contains(gh)) return 0.0;
            const Cmplx p = phiev(gh);
            if (p == Cmplx(0.0)) return 0.0;
            const double ratio = modular(G, Coords(hG, hG + G.dim)) /
                                 modular(*H.sub, Coords(t, t + H.dim()));
            return p * ratio * haar_density(*H.sub, t);
          };
          const IntegralResult res = integrate_box(inner, fiber, fint);
          base_val = res.value;
          kernel_evals += res.evaluations;
        }
        base_cache->emplace(std::move(b), base_val);
        return base_val / split;
      };
      // The outer support: supp(nu), tightened by phi's bounds on the base
      // coordinates (right translation by H never moves the base point, so
      // the kernel vanishes wherever the base point leaves phi's base box).
      Box outer = nu.support;
      for (int pos = 0; pos < L.D.gmodh.base_dim(); ++pos) {
        const int c = L.D.gmodh.base[static_cast<size_t>(pos)];
        if (bounds[static_cast<size_t>(c)])
          outer.iv[static_cast<size_t>(c)] =
              intersect(outer.iv[static_cast<size_t>(c)], *bounds[static_cast<size_t>(c)]);
      }
      IntegralResult rhs{0.0, 0.0, 0};
      if (!outer.empty()) {
        const BoxFn nuev = nu.eval;
        rhs = integrate_box(
            [&G, nuev, kernel](const double* g) -> Cmplx {
              const Cmplx nv = nuev(g);
              if (nv == Cmplx(0.0)) return 0.0;
              const Cmplx kv = kernel(g);
              if (kv == Cmplx(0.0)) return 0.0;
              return nv * kv * haar_density(G, g);
            },
            outer, chain.cfg.integ);
      }
      r.evaluations += lhs.evaluations + rhs.evaluations + kernel_evals;
      r.cases.push_back(compare_case("random (phi, nu) pair #" + std::to_string(k), lhs.value,
                                     rhs.value, chain.cfg.tol, phi.scale));
    }
    r.detail = "pairing against fiber averages versus the modular-ratio kernel integral";
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Modular descent identity.
// ---------------------------------------------------------------------------

VerificationReport verify_modular_identity(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "modular");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    for (size_t k = 0; k < F.H.size(); ++k)
      r.cases.push_back(exact_case(
          "h = " + F.G.labels[static_cast<size_t>(F.H[k])] + ": 1/1 = 1/1", true));
    r.detail = "finite groups are unimodular on every floor";
  } else {
    const LieChainPart& L = *chain.lie;
    for (const Coords& t : subgroup_grid(L.H)) {
      const Coords hG = L.H.include(t);
      double dGbar = 1.0;
      const double dHbar = modular_descended(L, hG, nullptr, &dGbar);
      const double lhs = modular(*L.G, hG) / dGbar;
      const double rhs = modular(*L.H.sub, t) / dHbar;
      r.cases.push_back(
          compare_case("h = " + coords_label(t), lhs, rhs, chain.cfg.tol, 1.0));
    }
    r.detail = "grid over " + L.H.name + ": log-spaced scaling axes, linear nilpotent axes";
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Right-translation scaling of the composite pushforward.
// ---------------------------------------------------------------------------

VerificationReport verify_right_translation_scaling(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "right_translation");
  Rng rng = check_rng(chain, "right_translation");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    const int kMeasures = 20;
    for (int k = 0; k < kMeasures; ++k) {
      FinMeasure mu = fin_random_measure(F.G.n, rng);
      const int hp = F.H[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(F.H.size()) - 1))];
      FinMeasure moved = fin_right_translate(F.G, mu, hp);
      FinMeasure a = fin_pushforward(moved, F.g_to_final, F.cosHbar.count);
      FinMeasure b = fin_pushforward(mu, F.g_to_final, F.cosHbar.count);
      std::vector<CRat> alpha = fin_random_function(F.cosHbar.count, rng);
      const CRat pa = fin_pair(a, alpha);
      const CRat pb = fin_pair(b, alpha);
      r.cases.push_back(exact_case(
          "measure #" + std::to_string(k) + ", h' = " + F.G.labels[static_cast<size_t>(hp)],
          a == b && (pa + (pb * Rat(-1))).is_zero(),
          Cmplx(pa.real_double(), pa.imag_double()),
          Cmplx(pb.real_double(), pb.imag_double())));
    }
    r.detail = "unimodular backend: the scaling factor is identically 1";
  } else {
    const LieChainPart& L = *chain.lie;

    // Sample translations: a scaling element, a nilpotent element, and (when
    // both directions exist) a mixed one.
    std::vector<Coords> hs;
    {
      const Coords idH = L.H.sub->identity;
      int first_pos = -1, first_free = -1;
      for (int j = 0; j < L.H.dim(); ++j) {
        const bool pos = L.H.sub->domain.positive[static_cast<size_t>(j)] != 0;
        if (pos && first_pos < 0) first_pos = j;
        if (!pos && first_free < 0) first_free = j;
      }
      if (first_pos >= 0) {
        Coords t = idH;
        t[static_cast<size_t>(first_pos)] = 2.0;
        hs.push_back(t);
      }
      if (first_free >= 0) {
        Coords t = idH;
        t[static_cast<size_t>(first_free)] = 1.0;
        hs.push_back(t);
      }
      if (first_pos >= 0 && first_free >= 0) {
        Coords t = idH;
        t[static_cast<size_t>(first_pos)] = 0.5;
        t[static_cast<size_t>(first_free)] = -0.5;
        hs.push_back(t);
      }
    }

    // Densities: the deterministic bump everywhere; the rest on cheap charts.
    std::vector<const Density*> mus = {&L.densities[0]};
    if (L.G->dim <= 3)
      for (size_t i = 1; i < L.densities.size(); ++i) mus.push_back(&L.densities[i]);

    const int n_alpha = 1 + std::min(chain.cfg.n_random_fns, 3);

    for (const Density* mup : mus) {
      const Density& mu = *mup;
      TwoStep base = two_step(L, mu, chain.cfg.fiber_integ);
      const double floor = std::max(chain.cfg.tol.abs_floor, 1e-12 * mu.scale);

      // Right translation by h' in H fixes every coset of the bottom space,
      // so a pairing is informative for the numerator exactly when it is for
      // the denominator.  A random bump can miss the pushforward's support
      // entirely; draw extra test functions until three pairings see it.
      auto alphas = base_test_functions(L, n_alpha - 1, rng);
      const Box bottom_window = gather_box(L.window, L.D.gmodh.base);
      std::vector<Cmplx> denom;
      std::vector<uint64_t> denev;
      int informative_fns = 0;
      for (size_t ai = 0; ai < alphas.size() || (informative_fns < 3 && ai < 12); ++ai) {
        if (ai == alphas.size()) alphas.push_back(random_bump_in(bottom_window, rng));
        auto res = pushforward_pair(base.psi, base.cert, base.bottom, alphas[ai],
                                    chain.cfg.integ);
        denom.push_back(res.value);
        denev.push_back(res.evaluations);
        if (std::abs(res.value) > floor) ++informative_fns;
      }
      for (const Coords& t : hs) {
        const Coords hG = L.H.include(t);
        double dGbar = 1.0;
        const double dHbar = modular_descended(L, hG, nullptr, &dGbar);
        const double scalar = dHbar / (dGbar * modular(*L.H.sub, t));

        Density moved = right_translate(mu, hG);
        TwoStep ts = two_step(L, moved, chain.cfg.fiber_integ);
        int informative = 0;
        for (size_t ai = 0; ai < alphas.size(); ++ai) {
          auto num = pushforward_pair(ts.psi, ts.cert, ts.bottom, alphas[ai], chain.cfg.integ);
          r.evaluations += num.evaluations + denev[ai];
          if (std::abs(denom[ai]) <= floor) {
            CheckCase c;
            c.label = "h' = " + coords_label(t) + ", test fn #" + std::to_string(ai) +
                      " [skipped: near-zero pairing]";
            c.informative = false;
            c.pass = true;
            r.cases.push_back(c);
            continue;
          }
          ++informative;
          r.cases.push_back(compare_case("h' = " + coords_label(t) + ", test fn #" +
                                             std::to_string(ai),
                                         num.value / denom[ai], Cmplx(scalar), chain.cfg.tol,
                                         1.0));
        }
        if (informative < 3) {
          CheckCase c;
          c.label = "h' = " + coords_label(t) + ": fewer than 3 informative test functions";
          c.informative = true;
          c.pass = false;
          c.abs_err = 1.0;
          c.rel_err = 1.0;
          r.cases.push_back(c);
        }
      }
    }
    r.detail = "pairing ratios against the modular scaling factor";
    if (L.N.dim() == 0)
      r.detail += "; N = {e}, so the factor reduces to 1/Delta_G(h')";
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Weil normalization, re-derived from fresh functions.
// ---------------------------------------------------------------------------

VerificationReport verify_weil(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "weil");
  Rng rng = check_rng(chain, "weil");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    const int kFns = 40;
    for (int k = 0; k < kFns; ++k) {
      std::vector<CRat> beta = fin_random_function(F.G.n, rng);
      CRat total;
      for (const CRat& v : beta) total += v;
      CRat iterated;
      for (int c = 0; c < F.cosN.count; ++c) {
        const int rep = F.cosN.representative[static_cast<size_t>(c)];
        for (int n : F.N) iterated += beta[static_cast<size_t>(F.G.mul(rep, n))];
      }
      r.cases.push_back(exact_case("random function #" + std::to_string(k),
                                   (total + (iterated * Rat(-1))).is_zero(),
                                   Cmplx(total.real_double(), total.imag_double()),
                                   Cmplx(iterated.real_double(), iterated.imag_double())));
    }
    r.detail = "counting measure on every floor: iterated coset sums are exact";
  } else {
    const LieChainPart& L = *chain.lie;
    for (int k = 0; k < 3; ++k) {
      TestFunction beta = random_bump_in(L.window, rng);
      // The scale is real; use a real positive variant of the bump.
      const BoxFn ev = beta.eval;
      BoxFn positive = [ev](const double* g) -> Cmplx { return std::abs(ev(g)) + 0.0; };
      IntegralResult num, den;
      const double s = weil_normalize(L.Q, positive, beta.support, chain.cfg.integ, &num, &den,
                                      &chain.cfg.fiber_integ);
      r.evaluations += num.evaluations + den.evaluations;
      r.cases.push_back(compare_case("fresh test function #" + std::to_string(k), Cmplx(s),
                                     Cmplx(L.Q.weil_scale), chain.cfg.tol, 1.0));
    }
    std::ostringstream os;
    os << "construction-time scale " << L.Q.weil_scale << " (probe spread "
       << L.Q.weil_scale_spread << ")";
    r.detail = os.str();
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Modular function restricted to a normal subgroup.
// ---------------------------------------------------------------------------

VerificationReport verify_normal_restriction(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "normal_restriction");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    for (size_t k = 0; k < F.N.size(); ++k)
      r.cases.push_back(exact_case(
          "n = " + F.G.labels[static_cast<size_t>(F.N[k])] + ": 1 = 1", true));
    r.detail = "finite backend: both modular functions are identically 1";
  } else {
    const LieChainPart& L = *chain.lie;
    for (const Coords& t : subgroup_grid(L.N)) {
      const Coords nG = L.N.include(t);
      r.cases.push_back(compare_case("n = " + coords_label(t), Cmplx(modular(*L.G, nG)),
                                     Cmplx(modular(*L.N.sub, t)), chain.cfg.tol, 1.0));
    }
    r.detail = "Delta_G restricted to " + L.N.name + " against Delta_N";
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Pushforward functoriality on finite sets (chain-independent property).
// ---------------------------------------------------------------------------

VerificationReport verify_compose(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "compose");
  Rng rng = check_rng(chain, "compose");
  const int kTriples = 200;
  for (int k = 0; k < kTriples; ++k) {
    const int n1 = rng.uniform_int(8, 64);
    const int n2 = rng.uniform_int(2, n1);
    const int n3 = rng.uniform_int(1, n2);
    auto surjection = [&rng](int from, int to) {
      std::vector<int> map(static_cast<size_t>(from));
      for (int i = 0; i < from; ++i) map[static_cast<size_t>(i)] = rng.uniform_int(0, to - 1);
      // Guarantee surjectivity on distinct slots.
      std::vector<int> slots(static_cast<size_t>(from));
      for (int i = 0; i < from; ++i) slots[static_cast<size_t>(i)] = i;
      for (int i = 0; i < to; ++i) {
        const int j = rng.uniform_int(i, from - 1);
        std::swap(slots[static_cast<size_t>(i)], slots[static_cast<size_t>(j)]);
        map[static_cast<size_t>(slots[static_cast<size_t>(i)])] = i;
      }
      return map;
    };
    const std::vector<int> p12 = surjection(n1, n2);
    const std::vector<int> p23 = surjection(n2, n3);
    std::vector<int> p13(static_cast<size_t>(n1));
    for (int i = 0; i < n1; ++i)
      p13[static_cast<size_t>(i)] = p23[static_cast<size_t>(p12[static_cast<size_t>(i)])];

    FinMeasure mu = fin_random_measure(n1, rng);
    FinMeasure once = fin_pushforward(mu, p13, n3);
    FinMeasure twice = fin_pushforward(fin_pushforward(mu, p12, n2), p23, n3);
    bool ok = once == twice;

    // Support transport: supp(p12_* mu) inside p12(supp mu).
    FinMeasure stage = fin_pushforward(mu, p12, n2);
    for (int x = 0; x < n2 && ok; ++x) {
      if (stage.w[static_cast<size_t>(x)].is_zero()) continue;
      bool hit = false;
      for (int i = 0; i < n1; ++i)
        if (p12[static_cast<size_t>(i)] == x && !mu.w[static_cast<size_t>(i)].is_zero()) {
          hit = true;
          break;
        }
      ok = ok && hit;
    }
    r.cases.push_back(exact_case("sizes " + std::to_string(n1) + ">" + std::to_string(n2) +
                                     ">" + std::to_string(n3) + " #" + std::to_string(k),
                                 ok));
  }
  r.detail = "random surjections and rational measures; exact double-sum comparison";
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Structural invariants bundle.
// ---------------------------------------------------------------------------

VerificationReport verify_invariants(const Chain& chain) {
  Stopwatch clock;
  VerificationReport r = start_report(chain, "invariants");
  Rng rng = check_rng(chain, "invariants");
  if (chain.finite) {
    const FinChainPart& F = *chain.fin;
    bool axioms = true;
    try {
      validate_fin_group(F.G);
      validate_fin_group(F.Gbar);
    } catch (const Error&) {
      axioms = false;
    }
    r.cases.push_back(exact_case("group axioms revalidated for " + F.G.name + " and " +
                                     F.Gbar.name,
                                 axioms));
    FinMeasure haar = fin_haar(F.G);
    bool invariant = true;
    for (int k = 0; k < 5; ++k) {
      const int g0 = rng.uniform_int(0, F.G.n - 1);
      invariant = invariant && (fin_pushforward(haar, translate_map(F.G, g0), F.G.n) == haar);
    }
    r.cases.push_back(exact_case("counting measure invariant under 5 random translations",
                                 invariant));
  } else {
    const LieChainPart& L = *chain.lie;
    bool axioms = true;
    try {
      validate_chart(*L.G);
      validate_chart(*L.Q.quotient);
      if (L.H.dim() > 0) validate_chart(*L.H.sub);
      if (L.N.dim() > 0) validate_chart(*L.N.sub);
    } catch (const Error&) {
      axioms = false;
    }
    r.cases.push_back(exact_case("chart group laws revalidated on all floors", axioms));

    r.cases.push_back(compare_case("Haar density normalized at identity",
                                   Cmplx(haar_density(*L.G, L.G->identity)), Cmplx(1.0),
                                   chain.cfg.tol, 1.0));
    r.cases.push_back(compare_case("modular function at identity",
                                   Cmplx(modular(*L.G, L.G->identity)), Cmplx(1.0),
                                   chain.cfg.tol, 1.0));

    for (int k = 0; k < 5; ++k) {
      const Coords a = random_element(*L.G, rng);
      const Coords b = random_element(*L.G, rng);
      r.cases.push_back(compare_case("modular homomorphism, sample #" + std::to_string(k),
                                     Cmplx(modular(*L.G, multiply(*L.G, a, b))),
                                     Cmplx(modular(*L.G, a) * modular(*L.G, b)),
                                     chain.cfg.tol, 1.0));
    }

    // Right translation scales total mass by 1/Delta(h').
    {
      Coords h(static_cast<size_t>(L.G->dim));
      for (int i = 0; i < L.G->dim; ++i) {
        const auto& iv = L.window.iv[i];
        h[static_cast<size_t>(i)] = 0.5 * (iv.lo + iv.hi) + 0.2 * (iv.hi - iv.lo) *
                                        (rng.uniform() - 0.5);
      }
      const Density& mu = L.densities[0];
      Density moved = right_translate(mu, h);
      auto one = [](const double*) { return Cmplx(1.0); };
      auto total = pair_density(mu, one, {}, chain.cfg.integ);
      auto scaled = pair_density(moved, one, {}, chain.cfg.integ);
      r.evaluations += total.evaluations + scaled.evaluations;
      r.cases.push_back(compare_case("total mass scales by 1/Delta under right translation",
                                     scaled.value * modular(*L.G, h), total.value,
                                     chain.cfg.tol, mu.scale));
    }

    {
      CheckCase c;
      c.label = "Weil scale consistent across construction probes";
      c.lhs = Cmplx(L.Q.weil_scale_spread);
      c.rhs = Cmplx(0.0);
      c.abs_err = L.Q.weil_scale_spread;
      c.rel_err = 0.0;
      c.informative = true;
      c.pass = L.Q.weil_scale_spread <= 1e-5;
      r.cases.push_back(c);
    }
  }
  finish_report(r, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Orchestration.
// ---------------------------------------------------------------------------

const std::vector<std::string>& all_check_names() {
  static const std::vector<std::string> names = {
      "main1",       "main2",   "main3",
      "main4",       "quotient_pushforward", "modular",
      "right_translation", "weil", "normal_restriction",
      "compose",     "invariants"};
  return names;
}

std::vector<VerificationReport> run_checks(const Chain& chain,
                                           const std::vector<std::string>& checks) {
  using CheckFn = VerificationReport (*)(const Chain&);
  static const std::map<std::string, CheckFn> table = {
      {"main1", verify_main1},
      {"main2", verify_main2},
      {"main3", verify_main3},
      {"main4", verify_main4},
      {"quotient_pushforward", verify_quotient_pushforward},
      {"modular", verify_modular_identity},
      {"right_translation", verify_right_translation_scaling},
      {"weil", verify_weil},
      {"normal_restriction", verify_normal_restriction},
      {"compose", verify_compose},
      {"invariants", verify_invariants},
  };
  std::vector<std::string> selected = checks.empty() ? all_check_names() : checks;
  std::vector<CheckFn> fns;
  fns.reserve(selected.size());
  for (const std::string& name : selected) {
    auto it = table.find(name);
    if (it == table.end()) {
      std::ostringstream os;
      os << "unknown check '" << name << "'; known:";
      for (const std::string& n : all_check_names()) os << " " << n;
      throw Error(os.str());
    }
    fns.push_back(it->second);
  }

  // Checks are independent deterministic jobs; run them concurrently and
  // merge the reports in selection order.
  std::vector<std::future<VerificationReport>> jobs;
  jobs.reserve(fns.size());
  for (CheckFn fn : fns)
    jobs.push_back(std::async(std::launch::async, [fn, &chain] { return fn(chain); }));
  std::vector<VerificationReport> out;
  out.reserve(jobs.size());
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

}  // namespace haarpush
