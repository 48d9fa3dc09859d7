#pragma once

#include <memory>

#include "haarpush/finite.hpp"
#include "haarpush/pushforward.hpp"

namespace haarpush {

// ---------------------------------------------------------------------------
// Chains: the standing setup N < H < G with N normal in G, on both backends.
// ---------------------------------------------------------------------------

struct Tolerances {
  double rel_tol = 1e-5;
  double abs_floor = 1e-12;
};

struct ChainConfig {
  std::string chain;          // catalog name
  Tolerances tol;
  Integrator integ;           // outer integrals
  Integrator fiber_integ;     // nested fiber integrals
  uint64_t seed = 11;
  int n_random_fns = 5;       // random test functions per measure equality
};

/// Lie-side chain data: coordinate subgroups N <= H of a global chart G, the
/// quotient Gbar = G/N, the descended picture, and a family of densities
/// supported in `window` (one deterministic bump, one seeded random bump and,
/// when the split allows it, one non-compact product-form density).
struct LieChainPart {
  ChartPtr G;
  SubgroupEmbedding N, H;
  QuotientPresentation Q;
  DescendedMaps D;
  Box window;
  std::vector<Density> densities;
};

/// Finite-side chain data: everything is exact rational arithmetic. The two
/// composite maps G -> Gbar/Hbar (via Gbar, via G/H) are checked equal at
/// construction.
struct FinChainPart {
  FinGroup G;
  std::vector<int> H, N;      // sorted element indices, N subset of H
  FinGroup Gbar;              // G/N
  FinCosets cosN;             // G elements -> Gbar indices
  FinCosets cosH;             // G elements -> G/H coset indices
  std::vector<int> Hbar;      // image of H in Gbar
  FinCosets cosHbar;          // Gbar indices -> Gbar/Hbar coset indices
  std::vector<int> g_to_final;      // composed map G -> Gbar/Hbar
  std::vector<int> gmodh_to_final;  // induced map G/H -> Gbar/Hbar
};

struct Chain {
  ChainConfig cfg;
  bool finite = false;
  std::shared_ptr<const LieChainPart> lie;
  std::shared_ptr<const FinChainPart> fin;

  std::string describe() const;
};

/// Catalog chains by name; structural parts are cached, densities and
/// integrator settings follow cfg. cfg.chain is overwritten with `name`.
/// Throws Error("unknown chain ...") listing the catalog.
Chain build_chain(const std::string& name, ChainConfig cfg = {});

/// Explicit chain parts for user-defined (non-catalog) chains. Chart chains
/// give a resolved chart plus the coordinate split; exact chains name a
/// finite group and two of its named subgroups.
struct ChainSpec {
  std::string name;
  bool finite = false;
  ChartPtr chart;                        // chart backend
  std::vector<int> h_coords, n_coords;
  std::string group, h_named, n_named;   // exact backend
  std::optional<Box> window;             // default: the standard window
  std::vector<Density> densities;        // empty: the default family
};
Chain build_chain(const ChainSpec& spec, ChainConfig cfg = {});

std::vector<std::string> chain_catalog_names();
/// One-line description of a catalog chain without building it.
std::string chain_catalog_blurb(const std::string& name);

// ---------------------------------------------------------------------------
// Verification reports.
// ---------------------------------------------------------------------------

struct CheckCase {
  std::string label;
  Cmplx lhs{0.0};
  Cmplx rhs{0.0};
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool informative = true;  // near-zero references are excluded from ratios
  bool pass = true;
};

struct VerificationReport {
  std::string check;
  std::string chain;
  std::string digest;          // hash of the configuration that produced this
  std::vector<CheckCase> cases;
  double max_abs = 0.0;        // over informative cases
  double max_rel = 0.0;
  double rel_tol = 0.0;
  double abs_floor = 0.0;
  bool pass = false;
  std::string detail;
  std::string integrator;
  uint64_t evaluations = 0;    // outer integrand evaluations
  double wall_ms = 0.0;
};

// ---------------------------------------------------------------------------
// The checks. Each one verifies a single identity on the given chain,
// exactly on the finite backend and within tolerances on the Lie backend.
// ---------------------------------------------------------------------------

/// Nested properness: every density certified for the H-split restricts to a
/// certificate for the N-split; an adversarial density (compact along N
/// only) is refused for the H-split.
VerificationReport verify_main1(const Chain& chain);

/// One-shot pushforward to G/H equals the two-step route through Gbar = G/N
/// (density form to Gbar, weak form down), paired against test functions.
VerificationReport verify_main2(const Chain& chain);

/// Commuting square: pushing to G/H and descending to Gbar/Hbar equals
/// pushing to Gbar and then to Gbar/Hbar.
VerificationReport verify_main3(const Chain& chain);

/// The pushforward to Gbar of an H-certified density is Hbar-certified.
VerificationReport verify_main4(const Chain& chain);

/// Quotient integration identity: for compact nu and certified phi dg,
///   <p_* (phi dg), (b -> integral_H nu(s(b) h) dh)>
///     = integral_G nu(g) [ integral_H phi(g h) Delta_G(h)/Delta_H(h) dh ] dg.
VerificationReport verify_quotient_pushforward(const Chain& chain);

/// Modular descent: Delta_G(h)/Delta_Gbar(hbar) = Delta_H(h)/Delta_Hbar(hbar)
/// over a grid of h in H (log-spaced in scaling coordinates, linear in
/// nilpotent ones).
VerificationReport verify_modular_identity(const Chain& chain);

/// Right-translation scaling: pushing phi(g h') dg to Gbar/Hbar multiplies
/// the pairings by Delta_Hbar(hbar') / (Delta_Gbar(hbar') Delta_H(h')).
/// Requires at least 3 informative test functions per sampled h'.
VerificationReport verify_right_translation_scaling(const Chain& chain);

/// Quotient-Haar normalization: fresh test functions reproduce the chain's
/// Weil scale.
VerificationReport verify_weil(const Chain& chain);

/// For the normal subgroup N itself: Delta_G restricted to N equals Delta_N.
VerificationReport verify_normal_restriction(const Chain& chain);

/// Pushforward functoriality on finite sets: (p2 o p1)_* = p2_* o p1_* and
/// supp(p_* mu) inside p(supp mu), exactly, over random surjections and
/// random rational measures. Chain-independent apart from the seed.
VerificationReport verify_compose(const Chain& chain);

/// Structural invariants bundle: chart/group axioms revalidated, density
/// normalization at identity, modular homomorphism property, translation
/// scaling of total mass, Weil-scale spread.
VerificationReport verify_invariants(const Chain& chain);

// ---------------------------------------------------------------------------
// Orchestration.
// ---------------------------------------------------------------------------

const std::vector<std::string>& all_check_names();

/// Run the named checks (all applicable when empty) on one chain.
/// Throws Error("unknown check ...") for a name outside the list.
std::vector<VerificationReport> run_checks(const Chain& chain,
                                           const std::vector<std::string>& checks = {});

}  // namespace haarpush
