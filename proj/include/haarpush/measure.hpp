#pragma once

#include <optional>

#include "haarpush/group.hpp"
#include "haarpush/integrate.hpp"

namespace haarpush {

/// Compactly supported continuous function on a coordinate space (a chart or
/// the base tuple of a quotient/homogeneous space). Evaluates to zero outside
/// its support box.
struct TestFunction {
  int dim = 0;
  BoxFn eval;
  Box support;
  std::string desc;
};

/// Product of shifted (1 - u^2)^3 bumps with amplitude `amp`, supported on
/// center +- radius per coordinate. C^2 at the boundary, analytic inside.
TestFunction bump_fn(const Coords& center, const Coords& radius, Cmplx amp = 1.0);

/// Random bump whose support stays inside `window`; complex amplitude.
TestFunction random_bump_in(const Box& window, Rng& rng);

// ---------------------------------------------------------------------------
// Densities.
// ---------------------------------------------------------------------------

/// One multiplicative factor of a density: a function of a subset of the
/// chart coordinates. A factor without a box is unbounded (e.g. constant 1);
/// a factor with a box vanishes outside it.
struct DensityFactor {
  std::vector<int> coords;
  BoxFn eval;                // receives the factor's coordinates, gathered
  std::optional<Box> box;    // support box in the factor's own coordinates
  std::string desc;
  double scale = 1.0;        // sup-norm estimate
};

DensityFactor bump_factor(std::vector<int> coords, const Coords& center, const Coords& radius,
                          Cmplx amp = 1.0);
DensityFactor constant_factor(std::vector<int> coords, Cmplx value = 1.0);

enum class DensityShape { CompactBox, ProductForm };

/// Continuous density phi against the chart's left Haar measure:
/// mu = phi(g) dg = phi(g) rho(g) dLebesgue. Support bookkeeping is
/// per-coordinate: bound[i] set means phi vanishes whenever coordinate i
/// leaves the interval; unset means no control in that direction.
struct Density {
  ChartPtr chart;
  BoxFn phi;
  std::vector<std::optional<Interval>> bound;
  DensityShape shape = DensityShape::CompactBox;
  std::string desc;
  double scale = 1.0;  // sup-norm estimate, used for absolute-error floors

  // Right-translated densities live on a sheared image of an axis box, which
  // is not itself a box. When `support_shift` is nonempty it holds the group
  // element s with  supp(phi) = {g : g * s satisfies `shifted_bound`}, while
  // `bound` keeps the per-coordinate hull of that image for outer enclosures.
  // Fiber boxes and pairings use the exact sheared description, so their
  // quadrature never scans regions where phi is identically zero.
  Coords support_shift;
  std::vector<std::optional<Interval>> shifted_bound;

  bool fully_compact() const {
    for (const auto& b : bound)
      if (!b || !b->finite()) return false;
    return true;
  }
  /// The compact box, when fully compact.
  Box support_box() const;
};

/// Compact bump density on a chart.
Density bump_density(ChartPtr chart, const Coords& center, const Coords& radius,
                     Cmplx amp = 1.0);

/// Product-form density; the factors must partition all chart coordinates.
Density product_density(ChartPtr chart, std::vector<DensityFactor> factors);

// ---------------------------------------------------------------------------
// Properness certificates.
// ---------------------------------------------------------------------------

enum class CertKind { CompactSupport, ProductCompactFiber };

/// Witness that the projection that forgets `fiber` coordinates is proper on
/// the density's support: each fiber coordinate carries a finite support
/// bound, so preimages of compact base boxes meet the support in a compact
/// box.
struct PropernessCert {
  std::string space;        // label of the projection this certifies
  std::vector<int> fiber;   // chart coordinates forgotten by the projection
  CertKind kind = CertKind::CompactSupport;
  std::string detail;
};

/// Certify mu for the projection along the given fiber coordinates (the
/// coordinates of H for p: G -> G/H). Throws
/// Error("... not certifiably in M_H(G) ...") when some fiber coordinate has
/// unbounded support. An empty fiber (H = {e}) certifies unconditionally.
PropernessCert check_membership(const Density& mu, const std::vector<int>& fiber,
                                const std::string& space);

/// Transport a certificate down the inclusion M_H(G) <= M_N(G) for a nested
/// split N inside H. Throws Error("incompatible coordinate splits") when the
/// N coordinates are not among the certified fiber coordinates.
PropernessCert restrict_cert(const PropernessCert& certH, const std::vector<int>& n_coords,
                             const std::string& n_space);

// ---------------------------------------------------------------------------
// Pairing.
// ---------------------------------------------------------------------------

/// <mu, f> = integral of f * phi against the chart Haar measure, over the
/// effective support box (intersection of both supports). Every coordinate
/// must be bounded by at least one side; otherwise
/// Error("unbounded integrand domain").
IntegralResult pair_density(const Density& mu, const BoxFn& f,
                            const std::vector<std::optional<Interval>>& f_bound,
                            const Integrator& integ);
IntegralResult pair_density(const Density& mu, const TestFunction& f, const Integrator& integ);

}  // namespace haarpush
