#include "haarpush/catalog.hpp"

#include <algorithm>
#include <map>

namespace haarpush {

namespace {

// Each law is one templated struct so the double and dual evaluators are
// instantiations of identical code. Laws must stay rational in the
// coordinates (+, -, *, / only).

struct Aff1Law {
  static constexpr int dim = 2;
  template <class T>
  static void mul(const T* x, const T* y, T* o) {
    o[0] = x[0] * y[0];
    o[1] = x[0] * y[1] + x[1];
  }
  template <class T>
  static void inv(const T* x, T* o) {
    o[0] = T(1.0) / x[0];
    o[1] = -x[1] / x[0];
  }
};

struct Heis3Law {
  static constexpr int dim = 3;
  template <class T>
  static void mul(const T* x, const T* y, T* o) {
    o[0] = x[0] + y[0];
    o[1] = x[1] + y[1];
    o[2] = x[2] + y[2] + x[0] * y[1];
  }
  template <class T>
  static void inv(const T* x, T* o) {
    o[0] = -x[0];
    o[1] = -x[1];
    o[2] = -x[2] + x[0] * x[1];
  }
};

struct Borel3Law {
  static constexpr int dim = 6;
  // coordinates (a, b, c, d, e, f) <-> [[a, b, c], [0, d, e], [0, 0, f]]
  template <class T>
  static void mul(const T* x, const T* y, T* o) {
    o[0] = x[0] * y[0];
    o[1] = x[0] * y[1] + x[1] * y[3];
    o[2] = x[0] * y[2] + x[1] * y[4] + x[2] * y[5];
    o[3] = x[3] * y[3];
    o[4] = x[3] * y[4] + x[4] * y[5];
    o[5] = x[5] * y[5];
  }
  template <class T>
  static void inv(const T* x, T* o) {
    o[0] = T(1.0) / x[0];
    o[1] = -x[1] / (x[0] * x[3]);
    o[2] = (x[1] * x[4] - x[2] * x[3]) / (x[0] * x[3] * x[5]);
    o[3] = T(1.0) / x[3];
    o[4] = -x[4] / (x[3] * x[5]);
    o[5] = T(1.0) / x[5];
  }
};

template <class Law>
ChartPtr make_chart(std::string name, Domain domain, Coords identity, EmbedFn embed) {
  auto g = std::make_shared<GroupChart>();
  g->name = std::move(name);
  g->dim = Law::dim;
  g->domain = std::move(domain);
  g->identity = std::move(identity);
  g->mul = [](const double* x, const double* y, double* o) { Law::template mul<double>(x, y, o); };
  g->mul_dual = [](const Dual* x, const Dual* y, Dual* o) { Law::template mul<Dual>(x, y, o); };
  g->inv = [](const double* x, double* o) { Law::template inv<double>(x, o); };
  g->embed = std::move(embed);
  validate_chart(*g);
  return g;
}

Domain positive_at(int n, std::initializer_list<int> idx) {
  Domain d = Domain::full(n);
  for (int i : idx) {
    d.positive[i] = 1;
    d.bounds[i].lo = 0.0;
  }
  return d;
}

}  // namespace

ChartPtr make_rn(int n) {
  if (n < 1 || n > kMaxDim) throw Error("r<n>: dimension out of range");
  auto g = std::make_shared<GroupChart>();
  g->name = "r" + std::to_string(n);
  g->dim = n;
  g->domain = Domain::full(n);
  g->identity.assign(n, 0.0);
  g->mul = [n](const double* x, const double* y, double* o) {
    for (int i = 0; i < n; ++i) o[i] = x[i] + y[i];
  };
  g->mul_dual = [n](const Dual* x, const Dual* y, Dual* o) {
    for (int i = 0; i < n; ++i) o[i] = x[i] + y[i];
  };
  g->inv = [n](const double* x, double* o) {
    for (int i = 0; i < n; ++i) o[i] = -x[i];
  };
  g->embed = [n](const double* x) {
    Mat m = Mat::identity(n + 1);  // [[I, v], [0, 1]]
    for (int i = 0; i < n; ++i) m(i, n) = x[i];
    return m;
  };
  validate_chart(*g);
  return g;
}

ChartPtr make_aff1() {
  return make_chart<Aff1Law>("aff1", positive_at(2, {0}), {1.0, 0.0}, [](const double* x) {
    Mat m(2, 2);
    m(0, 0) = x[0];
    m(0, 1) = x[1];
    m(1, 1) = 1.0;
    return m;
  });
}

ChartPtr make_heis3() {
  return make_chart<Heis3Law>("heis3", Domain::full(3), {0.0, 0.0, 0.0}, [](const double* x) {
    Mat m = Mat::identity(3);
    m(0, 1) = x[0];
    m(0, 2) = x[2];
    m(1, 2) = x[1];
    return m;
  });
}

ChartPtr make_borel3() {
  return make_chart<Borel3Law>("borel3", positive_at(6, {0, 3, 5}),
                               {1.0, 0.0, 0.0, 1.0, 0.0, 1.0}, [](const double* x) {
                                 Mat m(3, 3);
                                 m(0, 0) = x[0];
                                 m(0, 1) = x[1];
                                 m(0, 2) = x[2];
                                 m(1, 1) = x[3];
                                 m(1, 2) = x[4];
                                 m(2, 2) = x[5];
                                 return m;
                               });
}

ChartPtr make_product(ChartPtr A, ChartPtr B) {
  const int na = A->dim, nb = B->dim;
  if (na + nb > kMaxDim) throw Error("product: combined dimension exceeds supported maximum");
  auto g = std::make_shared<GroupChart>();
  g->name = A->name + "*" + B->name;
  g->dim = na + nb;
  g->domain.bounds = A->domain.bounds;
  g->domain.bounds.insert(g->domain.bounds.end(), B->domain.bounds.begin(),
                          B->domain.bounds.end());
  g->domain.positive = A->domain.positive;
  g->domain.positive.insert(g->domain.positive.end(), B->domain.positive.begin(),
                            B->domain.positive.end());
  g->identity = A->identity;
  g->identity.insert(g->identity.end(), B->identity.begin(), B->identity.end());
  g->mul = [A, B, na](const double* x, const double* y, double* o) {
    A->mul(x, y, o);
    B->mul(x + na, y + na, o + na);
  };
  g->mul_dual = [A, B, na](const Dual* x, const Dual* y, Dual* o) {
    A->mul_dual(x, y, o);
    B->mul_dual(x + na, y + na, o + na);
  };
  g->inv = [A, B, na](const double* x, double* o) {
    A->inv(x, o);
    B->inv(x + na, o + na);
  };
  if (A->has_embedding() && B->has_embedding()) {
    g->embed = [A, B, na](const double* x) {
      const Mat ma = A->embed(x);
      const Mat mb = B->embed(x + na);
      Mat m(ma.rows + mb.rows, ma.cols + mb.cols);
      for (int i = 0; i < ma.rows; ++i)
        for (int j = 0; j < ma.cols; ++j) m(i, j) = ma(i, j);
      for (int i = 0; i < mb.rows; ++i)
        for (int j = 0; j < mb.cols; ++j) m(ma.rows + i, ma.cols + j) = mb(i, j);
      return m;
    };
  }
  validate_chart(*g);
  return g;
}

ChartPtr find_group(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  static std::map<std::string, ChartPtr> cache;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  ChartPtr g;
  if (key == "aff1") {
    g = make_aff1();
  } else if (key == "heis3") {
    g = make_heis3();
  } else if (key.size() >= 2 && key[0] == 'r' &&
             std::all_of(key.begin() + 1, key.end(), [](unsigned char c) { return std::isdigit(c); })) {
    g = make_rn(std::stoi(key.substr(1)));
  } else if (key.rfind("r^n:", 0) == 0 && key.size() > 4 &&
             std::all_of(key.begin() + 4, key.end(), [](unsigned char c) { return std::isdigit(c); })) {
    g = make_rn(std::stoi(key.substr(4)));
  } else if (key == "borel3") {
    g = make_borel3();
  } else {
    throw Error("unknown group '" + name + "'; known: r<n>, aff1, heis3, borel3");
  }
  cache.emplace(key, g);
  return g;
}

std::vector<std::string> catalog_group_names() {
  return {"r1", "r2", "r3", "aff1", "heis3", "borel3"};
}

}  // namespace haarpush
