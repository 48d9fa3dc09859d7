#include "haarpush/integrate.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace haarpush {

std::string Integrator::describe() const {
  std::ostringstream os;
  if (kind == IntegratorKind::GaussTensor) {
    os << "gauss(order=" << order << ",panels=" << panels << ")";
  } else {
    os << "mc(samples=" << mc_samples << ",seed=" << seed << ")";
  }
  return os.str();
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error("Gauss-Legendre order must be >= 1");
  static std::mutex cache_mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  const std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;  // roots come in +/- pairs
    for (int i = 0; i < m; ++i) {
      // Chebyshev-based initial guess, then Newton on P_n.
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::fabs(dz) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
    it = cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

namespace {

std::string node_to_string(const double* x, int dim) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < dim; ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

Cmplx eval_checked(const BoxFn& f, const double* x, int dim) {
  const Cmplx v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error("integrand is not finite at node " + node_to_string(x, dim));
  return v;
}

/// Tensor-product Gauss rule at a fixed per-axis order, over uniform panels.
Cmplx gauss_tensor_pass(const BoxFn& f, const Box& box, int order, int panels, long& evals) {
  const int dim = box.dim();
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);

  // Per-axis flattened node/weight tables across panels.
  const int per_axis = order * panels;
  std::vector<std::vector<double>> ax_x(dim), ax_w(dim);
  for (int d = 0; d < dim; ++d) {
    ax_x[d].resize(per_axis);
    ax_w[d].resize(per_axis);
    const double lo = box.iv[d].lo, hi = box.iv[d].hi;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      const double half = 0.5 * h;
      for (int k = 0; k < order; ++k) {
        ax_x[d][p * order + k] = mid + half * gx[k];
        ax_w[d][p * order + k] = half * gw[k];
      }
    }
  }

  // Odometer over the multi-index.
  std::vector<int> idx(dim, 0);
  double x[kMaxDim];
  Cmplx sum{0.0, 0.0};
  while (true) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      x[d] = ax_x[d][idx[d]];
      w *= ax_w[d][idx[d]];
    }
    sum += w * eval_checked(f, x, dim);
    ++evals;
    int d = 0;
    while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == dim) break;
  }
  return sum;
}

IntegralResult integrate_mc(const BoxFn& f, const Box& box, const Integrator& integ) {
  const int dim = box.dim();
  const long n = integ.mc_samples;
  if (n < 1) throw Error("Monte Carlo sample count must be >= 1");
  const double vol = box.volume();
  double x[kMaxDim];
  Cmplx sum{0.0, 0.0};
  double sum_sq = 0.0;  // sum of |f|^2 for the variance estimate
  for (long i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      const double u = u01_at(integ.seed, static_cast<uint64_t>(i) * dim + d);
      x[d] = box.iv[d].lo + box.iv[d].length() * u;
    }
    const Cmplx v = eval_checked(f, x, dim);
    sum += v;
    sum_sq += std::norm(v);
  }
  const Cmplx mean = sum / static_cast<double>(n);
  double var = 0.0;
  if (n > 1) {
    var = (sum_sq - static_cast<double>(n) * std::norm(mean)) / static_cast<double>(n - 1);
    var = std::max(var, 0.0);
  }
  IntegralResult r;
  r.value = vol * mean;
  r.error_estimate = vol * std::sqrt(var / static_cast<double>(n));
  r.evaluations = n;
  return r;
}

}  // namespace

IntegralResult integrate_box(const BoxFn& f, const Box& box, const Integrator& integ) {
  const int dim = box.dim();
  if (dim > kMaxDim) throw Error("integration dimension exceeds supported maximum");
  if (dim == 0) {
    IntegralResult r;
    r.value = eval_checked(f, nullptr, 0);
    r.error_estimate = 0.0;
    r.evaluations = 1;
    return r;
  }
  if (box.empty()) return IntegralResult{};  // measure-zero slice: exact zero
  for (const auto& iv : box.iv)
    if (!iv.finite()) throw Error("integration box must be bounded on every axis");

  if (integ.kind == IntegratorKind::MonteCarlo) return integrate_mc(f, box, integ);

  if (integ.order < 2) throw Error("Gauss order must be >= 2");
  if (integ.panels < 1) throw Error("panel count must be >= 1");
  IntegralResult r;
  const Cmplx coarse = gauss_tensor_pass(f, box, integ.order, integ.panels, r.evaluations);
  const Cmplx fine = gauss_tensor_pass(f, box, integ.order + 2, integ.panels, r.evaluations);
  r.value = fine;
  r.error_estimate = std::abs(fine - coarse);
  return r;
}

IntegralResult integrate_box(const std::function<double(const double*)>& f, const Box& box,
                             const Integrator& integ) {
  return integrate_box(BoxFn([&f](const double* x) { return Cmplx(f(x), 0.0); }), box, integ);
}

}  // namespace haarpush
