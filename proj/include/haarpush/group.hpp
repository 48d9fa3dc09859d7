#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "haarpush/numerics.hpp"

namespace haarpush {

/// Chart domain: a coordinate box, possibly unbounded, with a strict-positivity
/// flag per axis (e.g. diagonal entries of triangular matrices).
struct Domain {
  std::vector<Interval> bounds;       // closure of the domain per axis
  std::vector<uint8_t> positive;      // 1 => coordinate must be > 0

  int dim() const { return static_cast<int>(bounds.size()); }

  bool contains(const double* x) const {
    for (int i = 0; i < dim(); ++i) {
      if (!(x[i] >= bounds[i].lo && x[i] <= bounds[i].hi)) return false;
      if (positive[i] && !(x[i] > 0.0)) return false;
    }
    return true;
  }

  static Domain full(int n) {
    Domain d;
    d.bounds.assign(n, Interval{});
    d.positive.assign(n, 0);
    return d;
  }
};

using MulFn = std::function<void(const double*, const double*, double*)>;
using MulDualFn = std::function<void(const Dual*, const Dual*, Dual*)>;
using InvFn = std::function<void(const double*, double*)>;
using EmbedFn = std::function<Mat(const double*)>;

/// A group presented in one global coordinate chart: smooth multiplication and
/// inversion in coordinates, plus (optionally) a faithful matrix realization
/// used as an independent oracle for the coordinate law.
///
/// The same multiplication is exposed twice - on doubles for evaluation and on
/// dual numbers for exact forward-mode Jacobians. Both must be generated from
/// one templated law so they cannot drift apart.
struct GroupChart {
  std::string name;
  int dim = 0;
  Domain domain;
  Coords identity;
  MulFn mul;
  MulDualFn mul_dual;
  InvFn inv;
  EmbedFn embed;  // empty when no matrix model is attached (e.g. quotients)

  bool has_embedding() const { return static_cast<bool>(embed); }
};

using ChartPtr = std::shared_ptr<const GroupChart>;

enum class Side { Left, Right };

/// Domain-checked multiplication; the raw chart closures skip checks.
Coords multiply(const GroupChart& G, const Coords& x, const Coords& y);
Coords inverse(const GroupChart& G, const Coords& x);

/// Jacobian (in chart coordinates) of the translation map
///   Side::Left :  y |-> g * y   differentiated at y = at
///   Side::Right:  y |-> y * g   differentiated at y = at
/// computed by one dual-number pass per column.
Mat translation_jacobian(const GroupChart& G, const Coords& g, Side side, const Coords& at);

/// Same Jacobian by central finite differences with one Richardson step.
/// Slow; used only to cross-check the dual-number path.
Mat translation_jacobian_fd(const GroupChart& G, const Coords& g, Side side, const Coords& at,
                            double step = 1e-4);

/// Probe the chart map w -> w * s assuming it is affine in w (true on all
/// triangular-matrix charts): afterwards v0 = identity * s and M(j, i) is the
/// response of coordinate i to a unit displacement of w_j away from the
/// identity. A joint-displacement cross-check guards the affinity assumption;
/// Error("right translation is not affine ...") when it fails.
void right_translation_rows(const GroupChart& G, const Coords& s, Coords& v0, Mat& M);

/// Per-coordinate interval hull of {w * s : w within `bounds`}, where unset
/// entries of `bounds` mean "unconstrained". Coordinates whose image depends
/// on an unconstrained input coordinate come back unset.
std::vector<std::optional<Interval>> translate_bounds(
    const GroupChart& G, const std::vector<std::optional<Interval>>& bounds, const Coords& s);

/// Left Haar density rho(g) = 1 / |det d(L_g)|_e|, normalized so rho(e) = 1.
/// Raw-pointer overload is the integration hot path and skips domain checks.
double haar_density(const GroupChart& G, const double* g);
double haar_density(const GroupChart& G, const Coords& g);

/// Modular function Delta(h) = |det d(R_h)|_e| / |det d(L_h)|_e|.
/// Convention: Delta(h) * integral f(g) dg = integral f(g h^{-1}) dg for the
/// left Haar measure dg.
double modular(const GroupChart& G, const double* h);
double modular(const GroupChart& G, const Coords& h);

/// Random chart element for property tests and verification grids:
/// positivity-constrained coordinates are drawn log-uniform on [1/4, 4],
/// unconstrained ones uniform on [-window, window] (clipped to the domain).
Coords random_element(const GroupChart& G, Rng& rng, double window = 2.0);

/// Seeded sanity check of the chart's group axioms and of the agreement of
/// the three views on the law (double, dual, matrix model). Throws Error with
/// the first violated property.
void validate_chart(const GroupChart& G, uint64_t seed = 7, int samples = 25, double tol = 1e-9);

}  // namespace haarpush
