#pragma once

#include <functional>

#include "haarpush/numerics.hpp"

namespace haarpush {

/// Integrand over a box; coordinates are handed over as a raw pointer whose
/// length is the box dimension.
using BoxFn = std::function<Cmplx(const double*)>;

enum class IntegratorKind { GaussTensor, MonteCarlo };

inline const char* to_string(IntegratorKind k) {
  return k == IntegratorKind::GaussTensor ? "gauss" : "mc";
}

/// Integration policy. One instance describes how *every* integral of a run
/// is evaluated, so reports can state it once.
struct Integrator {
  IntegratorKind kind = IntegratorKind::GaussTensor;
  int order = 12;            // Gauss points per axis per panel (>= 2)
  int panels = 1;            // uniform panels per axis (>= 1)
  long mc_samples = 200000;  // Monte Carlo sample count
  uint64_t seed = 1;         // Monte Carlo stream seed

  std::string describe() const;
};

struct IntegralResult {
  Cmplx value{0.0, 0.0};
  double error_estimate = 0.0;  // Gauss: order-refinement delta; MC: 1 sigma
  long evaluations = 0;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Results are cached per order; the computation is Newton iteration on the
/// Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Integrate f over a finite box.
///
/// Gauss path: tensor-product rule per axis over `panels` uniform panels,
/// evaluated at `order` and again at `order + 2`; the refined value is
/// returned and the difference of the two rules is the error estimate.
/// Monte Carlo path: counter-based uniform sampling, so the result depends
/// only on (seed, mc_samples, box), never on evaluation order.
///
/// A 0-dimensional box integrates to a single evaluation of f (counting
/// measure on a point). Throws Error if the box is unbounded or f returns a
/// non-finite value at a node.
IntegralResult integrate_box(const BoxFn& f, const Box& box, const Integrator& integ);

/// Convenience: real-valued integrand wrappers.
IntegralResult integrate_box(const std::function<double(const double*)>& f, const Box& box,
                             const Integrator& integ);

}  // namespace haarpush
