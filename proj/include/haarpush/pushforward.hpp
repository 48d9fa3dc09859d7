#pragma once

#include "haarpush/measure.hpp"
#include "haarpush/subgroup.hpp"

namespace haarpush {

/// A space a route can start or end on: a group chart or the base tuple of a
/// quotient / homogeneous space.
struct SpaceRef {
  std::string name;
  int dim = 0;
};

/// A quotient map (or composition of quotient maps) presented as a coordinate
/// selection: target coordinate j reads source coordinate select[j]. Every
/// projection in this library is of this form, which makes pullbacks of
/// support boxes exact.
struct Route {
  SpaceRef source;
  SpaceRef target;
  std::vector<int> select;
  std::string name;

  void apply(const double* s, double* t) const {
    for (size_t j = 0; j < select.size(); ++j) t[j] = s[select[j]];
  }
  Coords apply(const Coords& s) const;

  /// Source coordinates NOT read by the target: the fiber directions.
  std::vector<int> dropped() const;

  /// Composition: this route followed by `next` (next.source == this->target).
  Route then(const Route& next) const;

  static Route identity(const SpaceRef& space);
  static Route from_quotient(const QuotientPresentation& Q);
  static Route from_homspace(const HomogeneousSpace& S);
  /// Selection between two descended bases (positions within base tuples).
  static Route selection(const SpaceRef& source, const SpaceRef& target,
                         std::vector<int> select, std::string name);
};

// ---------------------------------------------------------------------------
// Weak pushforward: pairing against test functions on the target.
// ---------------------------------------------------------------------------

/// <p_* mu, alpha> = <mu, alpha o p>. The certificate must cover every
/// dropped coordinate of the route; the pairing then runs over the exact
/// intersection of the density's support with the pullback of alpha's.
IntegralResult pushforward_pair(const Density& mu, const PropernessCert& cert,
                                const Route& route, const TestFunction& alpha,
                                const Integrator& integ);

// ---------------------------------------------------------------------------
// Density pushforward along a normal quotient G -> G/N.
// ---------------------------------------------------------------------------

/// p_*(phi dg) = psi dgbar with  psi(gbar) = weil_scale * integral_N
/// phi(s(gbar) n) rho_N(n) dn, computed per evaluation over the exact fiber
/// parameter box. Support bounds descend by gathering the base coordinates.
Density pushforward_density(const Density& mu, const PropernessCert& certN,
                            const QuotientPresentation& Q, const Integrator& fiber_integ);

// ---------------------------------------------------------------------------
// Averaging a test function over H-fibers: nu on G -> alpha on G/H.
// ---------------------------------------------------------------------------

/// alpha(b) = integral_H nu(s(b) h) rho_H(h) dh. This is the function paired
/// with a pushforward to G/H in the quotient-integration identity.
TestFunction fiber_average(const TestFunction& nu, const HomogeneousSpace& S,
                           const Integrator& fiber_integ);

// ---------------------------------------------------------------------------
// Right translation of densities.
// ---------------------------------------------------------------------------

/// The density g -> phi(g h'). Support bounds are transported through the
/// affine map g -> g h'^{-1} by interval arithmetic (the exact bounding box
/// of the translated support; coordinates mixing unbounded directions lose
/// their bound honestly).
Density right_translate(const Density& mu, const Coords& hprime);

}  // namespace haarpush
