#pragma once

#include <optional>

#include "haarpush/group.hpp"
#include "haarpush/integrate.hpp"

namespace haarpush {

/// A closed subgroup carved out of a parent chart by coordinates: the
/// subgroup is parameterized by a subset of the parent's coordinates, with
/// every remaining coordinate frozen at its identity value. All catalog
/// subgroups are of this form, which is what makes sections, projections and
/// support bookkeeping exact coordinate gathers/scatters.
struct SubgroupEmbedding {
  ChartPtr parent;
  ChartPtr sub;              // the subgroup's own chart (restricted law)
  std::vector<int> coords;   // strictly increasing parent coordinate indices
  std::string name;

  int dim() const { return static_cast<int>(coords.size()); }

  /// Subgroup coordinates -> parent coordinates (identity elsewhere).
  void include(const double* h, double* g) const {
    for (int i = 0; i < parent->dim; ++i) g[i] = parent->identity[i];
    for (int j = 0; j < dim(); ++j) g[coords[j]] = h[j];
  }
  /// Parent coordinates (assumed in the image) -> subgroup coordinates.
  void extract(const double* g, double* h) const {
    for (int j = 0; j < dim(); ++j) h[j] = g[coords[j]];
  }
  Coords include(const Coords& h) const;
  Coords extract(const Coords& g) const;

  /// Is g in the image, i.e. are all frozen coordinates at identity values?
  bool contains(const double* g, double tol = 1e-9) const;
};

/// Builds the subgroup spanned by the given parent coordinates and verifies
/// (on seeded samples) that the slice is closed under multiplication and
/// inversion. Throws Error("...not closed under the group law") otherwise.
SubgroupEmbedding coordinate_subgroup(ChartPtr parent, std::vector<int> coords,
                                      std::string name = "", uint64_t seed = 29,
                                      int samples = 25);

// ---------------------------------------------------------------------------
// Quotient by a normal coordinate subgroup.
// ---------------------------------------------------------------------------

/// G/N presented on the complementary coordinates. The section inserts
/// identity values on the fiber coordinates; the projection drops them.
///
/// `weil_scale` calibrates the quotient's Haar normalization against the
/// iterated-integration identity
///     integral_G beta dg
///       = weil_scale * integral_{G/N} integral_N beta(s(gbar) n) dn dgbar
/// where dgbar is the quotient chart's own normalized Haar measure. The scale
/// is computed at construction from several auto-generated bump functions and
/// must agree across them; it is a property of the charts, independent of the
/// function being integrated.
struct QuotientPresentation {
  ChartPtr G;
  SubgroupEmbedding N;
  std::vector<int> base;  // complementary coordinate indices, increasing
  ChartPtr quotient;
  double weil_scale = 1.0;
  double weil_scale_spread = 0.0;  // relative spread across the probe bumps

  int base_dim() const { return static_cast<int>(base.size()); }

  void project(const double* g, double* gbar) const {
    for (int j = 0; j < base_dim(); ++j) gbar[j] = g[base[j]];
  }
  void section(const double* gbar, double* g) const {
    for (int i = 0; i < G->dim; ++i) g[i] = G->identity[i];
    for (int j = 0; j < base_dim(); ++j) g[base[j]] = gbar[j];
  }
  Coords project(const Coords& g) const;
  Coords section(const Coords& gbar) const;
};

/// Construct G/N. Verifies on seeded samples that N is normal, that
/// g = section(project(g)) * n decomposes every sample uniquely, and that the
/// projected law is a well-defined group law; computes the Weil scale.
/// Throws Error on: "subgroup is not normal under the chart split",
/// "chart split does not trivialize the fiber", "quotient law is not well
/// defined in the chart", "Weil scale is inconsistent across test functions".
/// Default rule for the Weil-scale probe integrals: modest order keeps chain
/// construction fast; the probes are analytic on their exact support boxes,
/// so this is still accurate to ~1e-7.
inline Integrator weil_probe_integrator() {
  Integrator g;
  g.order = 8;
  g.panels = 1;
  return g;
}

QuotientPresentation quotient_group(ChartPtr G, const SubgroupEmbedding& N,
                                    const Integrator& weil_integrator = weil_probe_integrator(),
                                    uint64_t seed = 13, int samples = 30);

/// Recompute the Weil scale of Q from one explicit function beta supported in
/// `support` (a box in G coordinates). Reports the numerator and denominator
/// integrals through the optional out-parameters. The fiber integrals inside
/// the denominator use `fiber_integ` when given (so a Monte Carlo outer rule
/// can keep a cheap quadrature inner rule), `integ` otherwise.
double weil_normalize(const QuotientPresentation& Q, const BoxFn& beta, const Box& support,
                      const Integrator& integ, IntegralResult* numerator = nullptr,
                      IntegralResult* denominator = nullptr,
                      const Integrator* fiber_integ = nullptr);

// ---------------------------------------------------------------------------
// Homogeneous space G/H for a (not necessarily normal) subgroup.
// ---------------------------------------------------------------------------

struct HomogeneousSpace {
  ChartPtr G;
  SubgroupEmbedding H;
  std::vector<int> base;  // complementary coordinate indices, increasing
  std::string name;

  int base_dim() const { return static_cast<int>(base.size()); }

  void project(const double* g, double* b) const {
    for (int j = 0; j < base_dim(); ++j) b[j] = g[base[j]];
  }
  void section(const double* b, double* g) const {
    for (int i = 0; i < G->dim; ++i) g[i] = G->identity[i];
    for (int j = 0; j < base_dim(); ++j) g[base[j]] = b[j];
  }
  Coords project(const Coords& g) const;
  Coords section(const Coords& b) const;

  /// Projection with a decomposition proof: checks that
  /// section(project(g))^{-1} g lands in H. Throws
  /// Error("element not decomposable in chart") otherwise.
  Coords project_checked(const Coords& g, double tol = 1e-9) const;
};

/// Verifies (seeded samples) that every element decomposes as
/// g = section(b) * h with h in H and that the base coordinates of
/// section(b) * h never depend on h. Throws Error("chart split does not
/// trivialize the fiber") on failure.
HomogeneousSpace homogeneous_space(ChartPtr G, const SubgroupEmbedding& H, uint64_t seed = 31,
                                   int samples = 30);

// ---------------------------------------------------------------------------
// Descending a subgroup through a quotient.
// ---------------------------------------------------------------------------

/// Given Q = G/N and a subgroup H containing N, the canonical picture
///
///        G ----------> G/N
///        |              |
///        v              v
///       G/H --------> (G/N)/(H/N)
///
/// descends to coordinate selections. The bottom map is the identity on the
/// shared base coordinates; `check` verifies the square closes on samples.
struct DescendedMaps {
  SubgroupEmbedding Hbar;    // H/N inside the quotient chart
  HomogeneousSpace barmod;   // (G/N)/(H/N)
  HomogeneousSpace gmodh;    // G/H
  // Coordinate selections (positions in the source base tuple):
  std::vector<int> gbar_to_barmod;   // quotient base -> double-quotient base
  std::vector<int> g_to_gmodh;       // G coords -> G/H base (= gmodh.base)
};
DescendedMaps descend_map(const QuotientPresentation& Q, const SubgroupEmbedding& H,
                          uint64_t seed = 37, int samples = 30);

// ---------------------------------------------------------------------------
// Exact fiber integration ranges.
// ---------------------------------------------------------------------------

/// Parameter box for integrals over a translated subgroup slice: the set of
/// subgroup parameters t with  anchor * include(t)  — or, when `shift` is
/// given, anchor * include(t) * shift — inside the given per-coordinate
/// bounds (unset entries are unconstrained). The shift form serves densities
/// whose support is a right-translated box.
///
/// The map t -> anchor * include(t) [* shift] is affine because every chart
/// law here is linear in its second argument; this is probed and enforced.
/// Single-parameter constraints invert exactly. Constraints coupling several
/// parameters tighten the box by interval arithmetic over the ranges
/// established so far, sweeping until stable, so triangular couplings resolve
/// completely; any remaining slack only widens the box, which is safe for
/// integrating functions that vanish outside the bounds. Returns an empty box
/// when the slice misses the bounds entirely; throws Error("fiber integration
/// range is unbounded") if some parameter remains unbounded after sweeping.
Box fiber_parameter_box(const SubgroupEmbedding& K, const double* anchor,
                        const std::vector<std::optional<Interval>>& bounds,
                        const double* shift = nullptr);

}  // namespace haarpush
