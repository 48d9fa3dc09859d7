#include "haarpush/finite.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace haarpush {

void validate_fin_group(const FinGroup& G) {
  const int n = G.n;
  if (n <= 0 || static_cast<int>(G.table.size()) != n * n)
    throw Error("not a group table: size mismatch");
  for (int v : G.table)
    if (v < 0 || v >= n) throw Error("not a group table: entry out of range");

  // Latin square: every row and column is a permutation.
  for (int i = 0; i < n; ++i) {
    std::vector<char> row(n, 0), col(n, 0);
    for (int j = 0; j < n; ++j) {
      if (row[G.mul(i, j)]++) throw Error("not a group table: repeated entry in a row");
      if (col[G.mul(j, i)]++) throw Error("not a group table: repeated entry in a column");
    }
  }

  // Identity.
  int e = -1;
  for (int i = 0; i < n && e < 0; ++i) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) ok = G.mul(i, j) == j && G.mul(j, i) == j;
    if (ok) e = i;
  }
  if (e < 0) throw Error("not a group table: no identity element");
  if (e != G.e) throw Error("not a group table: identity index is wrong");

  // Inverses.
  if (static_cast<int>(G.inv.size()) != n) throw Error("not a group table: inverse list size");
  for (int i = 0; i < n; ++i)
    if (G.mul(i, G.inv[i]) != e || G.mul(G.inv[i], i) != e)
      throw Error("not a group table: inverse list is wrong");

  // Associativity (n^3 checks; catalog orders are tiny).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (G.mul(G.mul(i, j), k) != G.mul(i, G.mul(j, k)))
          throw Error("not a group table: associativity fails");

  if (static_cast<int>(G.labels.size()) != n) throw Error("not a group table: label list size");
}

namespace {

void finish_group(FinGroup& G) {
  const int n = G.n;
  // Locate identity and inverses from the table, then validate everything.
  G.e = -1;
  for (int i = 0; i < n && G.e < 0; ++i) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) ok = G.mul(i, j) == j && G.mul(j, i) == j;
    if (ok) G.e = i;
  }
  if (G.e < 0) throw Error("not a group table: no identity element");
  G.inv.assign(n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (G.mul(i, j) == G.e) G.inv[i] = j;
  if (G.labels.empty()) {
    for (int i = 0; i < n; ++i) G.labels.push_back(std::to_string(i));
  }
  validate_fin_group(G);
}

}  // namespace

FinGroup make_cyclic(int n) {
  if (n < 1) throw Error("cyclic group order must be >= 1");
  FinGroup G;
  G.name = "z" + std::to_string(n);
  G.n = n;
  G.table.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G.table[static_cast<size_t>(i) * n + j] = (i + j) % n;
  finish_group(G);
  return G;
}

FinGroup make_sym4() {
  // Elements: permutations of {0,1,2,3} in lexicographic one-line order.
  // Composition (s * t)(x) = s(t(x)).
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  const int n = static_cast<int>(perms.size());

  auto index_of = [&perms](const std::array<int, 4>& q) {
    return static_cast<int>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
  };

  FinGroup G;
  G.name = "s4";
  G.n = n;
  G.table.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::array<int, 4> q;
      for (int x = 0; x < 4; ++x) q[x] = perms[i][perms[j][x]];
      G.table[static_cast<size_t>(i) * n + j] = index_of(q);
    }
  for (const auto& q : perms) {
    std::string l;
    for (int x : q) l += static_cast<char>('0' + x);
    G.labels.push_back(l);
  }
  finish_group(G);
  return G;
}

FinGroup make_dihedral4() {
  // Symmetries of the square: r^i s^j, i mod 4, j mod 2, with s r = r^{-1} s.
  FinGroup G;
  G.name = "d4";
  G.n = 8;
  auto id = [](int i, int j) { return i + 4 * j; };
  G.table.resize(64);
  for (int i1 = 0; i1 < 4; ++i1)
    for (int j1 = 0; j1 < 2; ++j1)
      for (int i2 = 0; i2 < 4; ++i2)
        for (int j2 = 0; j2 < 2; ++j2) {
          // (r^i1 s^j1)(r^i2 s^j2) = r^(i1 + (-1)^j1 i2) s^(j1+j2)
          const int i = ((i1 + (j1 ? 4 - i2 : i2)) % 4 + 4) % 4;
          const int j = (j1 + j2) % 2;
          G.table[static_cast<size_t>(id(i1, j1)) * 8 + id(i2, j2)] = id(i, j);
        }
  for (int k = 0; k < 8; ++k) {
    const int i = k % 4, j = k / 4;
    std::string l = (i == 0 && j == 0) ? "e" : "";
    if (i > 0) l += "r" + std::string(i > 1 ? std::to_string(i) : "");
    if (j > 0) l += "s";
    G.labels.push_back(l);
  }
  finish_group(G);
  return G;
}

FinGroup make_quaternion8() {
  // {1, -1, i, -i, j, -j, k, -k} with i^2 = j^2 = k^2 = ijk = -1.
  // Encode q = (sign, axis): index = axis*2 + (sign < 0), axis in {1,i,j,k}.
  const char* names[8] = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  // Multiplication on axes: 1*x = x, i*j = k, j*k = i, k*i = j (cyclic), x*x = -1.
  auto mul_axis = [](int a, int b, int& sign) {
    // axes: 0 = 1, 1 = i, 2 = j, 3 = k
    sign = 1;
    if (a == 0) return b;
    if (b == 0) return a;
    if (a == b) {
      sign = -1;
      return 0;
    }
    // remaining axis, with sign from cyclic order (i,j,k)
    const int c = 6 - a - b;
    sign = ((b - a + 3) % 3 == 1) ? 1 : -1;
    return c;
  };
  FinGroup G;
  G.name = "q8";
  G.n = 8;
  G.table.resize(64);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      int s = 0;
      const int axis = mul_axis(x / 2, y / 2, s);
      int neg = (x % 2) ^ (y % 2) ^ (s < 0 ? 1 : 0);
      G.table[static_cast<size_t>(x) * 8 + y] = axis * 2 + neg;
    }
  G.labels.assign(names, names + 8);
  finish_group(G);
  return G;
}

FinGroup load_cayley_table(std::istream& in, const std::string& name) {
  FinGroup G;
  G.name = name;
  std::string line;
  int n = -1;
  std::vector<int> entries;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "n") {
      if (!(ls >> n) || n <= 0) throw Error("not a group table: bad order line");
    } else if (tok == "labels") {
      std::string l;
      while (ls >> l) G.labels.push_back(l);
    } else {
      // a row of numbers; `tok` is the first entry
      entries.push_back(std::stoi(tok));
      int v;
      while (ls >> v) entries.push_back(v);
    }
  }
  if (n <= 0) throw Error("not a group table: missing 'n <order>' line");
  if (static_cast<int>(entries.size()) != n * n)
    throw Error("not a group table: expected " + std::to_string(n * n) + " entries, got " +
                std::to_string(entries.size()));
  if (!G.labels.empty() && static_cast<int>(G.labels.size()) != n)
    throw Error("not a group table: label count differs from order");
  G.n = n;
  G.table = std::move(entries);
  finish_group(G);
  return G;
}

FinGroup find_fin_group(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  static std::map<std::string, FinGroup> cache;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  FinGroup G;
  if (key == "s4") {
    G = make_sym4();
  } else if (key == "d4") {
    G = make_dihedral4();
  } else if (key == "q8") {
    G = make_quaternion8();
  } else if (key.size() >= 2 && key[0] == 'z' &&
             std::all_of(key.begin() + 1, key.end(), [](unsigned char c) { return std::isdigit(c); })) {
    G = make_cyclic(std::stoi(key.substr(1)));
  } else {
    throw Error("unknown finite group '" + name + "'; known: z<n>, s4, d4, q8");
  }
  cache.emplace(key, G);
  return G;
}

std::vector<std::string> fin_catalog_names() { return {"z2", "z4", "z8", "s4", "d4", "q8"}; }

int fin_find_label(const FinGroup& G, const std::string& label) {
  for (int i = 0; i < G.n; ++i)
    if (G.labels[i] == label) return i;
  throw Error(G.name + ": no element labelled '" + label + "'");
}

int fin_element_order(const FinGroup& G, int g) {
  int k = 1, x = g;
  while (x != G.e) {
    x = G.mul(x, g);
    ++k;
    if (k > G.n) throw Error(G.name + ": element order exceeds group order");
  }
  return k;
}

std::vector<int> fin_span(const FinGroup& G, const std::vector<int>& gens) {
  std::set<int> seen{G.e};
  std::vector<int> frontier{G.e};
  for (int g : gens)
    if (seen.insert(g).second) frontier.push_back(g);
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int x : frontier)
      for (int g : gens) {
        for (int y : {G.mul(x, g), G.mul(g, x), G.inv[x]})
          if (seen.insert(y).second) next.push_back(y);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

bool fin_is_subgroup(const FinGroup& G, const std::vector<int>& elems) {
  std::set<int> s(elems.begin(), elems.end());
  if (!s.count(G.e)) return false;
  for (int a : s) {
    if (!s.count(G.inv[a])) return false;
    for (int b : s)
      if (!s.count(G.mul(a, b))) return false;
  }
  return true;
}

bool fin_is_normal(const FinGroup& G, const std::vector<int>& sub) {
  std::set<int> s(sub.begin(), sub.end());
  for (int g = 0; g < G.n; ++g)
    for (int h : sub)
      if (!s.count(G.mul(G.mul(g, h), G.inv[g]))) return false;
  return true;
}

std::vector<int> fin_named_subgroup(const FinGroup& G, const std::string& name) {
  if (name == "a4" && G.name == "s4") {
    // even permutations: parity by inversion count of the one-line label
    std::vector<int> out;
    for (int i = 0; i < G.n; ++i) {
      const std::string& l = G.labels[i];
      int invs = 0;
      for (size_t a = 0; a < l.size(); ++a)
        for (size_t b = a + 1; b < l.size(); ++b)
          if (l[a] > l[b]) ++invs;
      if (invs % 2 == 0) out.push_back(i);
    }
    return out;
  }
  if (name == "v4" && G.name == "s4") {
    return {fin_find_label(G, "0123"), fin_find_label(G, "1032"), fin_find_label(G, "2301"),
            fin_find_label(G, "3210")};
  }
  if (name.rfind("span:", 0) == 0) {
    std::vector<int> gens;
    std::istringstream ss(name.substr(5));
    std::string tok;
    while (std::getline(ss, tok, ',')) gens.push_back(fin_find_label(G, tok));
    return fin_span(G, gens);
  }
  throw Error(G.name + ": unknown subgroup '" + name + "'");
}

FinCosets fin_cosets(const FinGroup& G, const std::vector<int>& H) {
  if (!fin_is_subgroup(G, H)) throw Error(G.name + ": not a subgroup");
  FinCosets C;
  C.coset_of.assign(G.n, -1);
  for (int g = 0; g < G.n; ++g) {
    if (C.coset_of[g] >= 0) continue;
    const int c = C.count++;
    C.representative.push_back(g);
    for (int h : H) C.coset_of[G.mul(g, h)] = c;  // left coset gH
  }
  return C;
}

FinGroup fin_quotient_group(const FinGroup& G, const std::vector<int>& N, FinCosets* cosets) {
  if (!fin_is_subgroup(G, N)) throw Error(G.name + ": not a subgroup");
  if (!fin_is_normal(G, N)) throw Error(G.name + ": subgroup is not normal");
  const FinCosets C = fin_cosets(G, N);
  FinGroup Q;
  Q.name = G.name + "/|" + std::to_string(N.size()) + "|";
  Q.n = C.count;
  Q.table.resize(static_cast<size_t>(C.count) * C.count);
  for (int a = 0; a < C.count; ++a)
    for (int b = 0; b < C.count; ++b)
      Q.table[static_cast<size_t>(a) * C.count + b] =
          C.coset_of[G.mul(C.representative[a], C.representative[b])];
  for (int c = 0; c < C.count; ++c) Q.labels.push_back("[" + G.labels[C.representative[c]] + "]");
  finish_group(Q);
  if (cosets) *cosets = C;
  return Q;
}

FinMeasure fin_haar(const FinGroup& G) {
  FinMeasure mu;
  mu.w.assign(G.n, CRat(1));
  return mu;
}

FinMeasure fin_pushforward(const FinMeasure& mu, const std::vector<int>& map, int target_size) {
  if (map.size() != mu.w.size()) throw Error("pushforward: map length differs from measure size");
  FinMeasure out;
  out.w.assign(target_size, CRat());
  for (size_t i = 0; i < map.size(); ++i) {
    if (map[i] < 0 || map[i] >= target_size) throw Error("pushforward: map value out of range");
    out.w[map[i]] += mu.w[i];
  }
  return out;
}

CRat fin_pair(const FinMeasure& mu, const std::vector<CRat>& alpha) {
  if (alpha.size() != mu.w.size()) throw Error("pairing: function length differs from measure size");
  CRat s;
  for (size_t i = 0; i < mu.w.size(); ++i) s += alpha[i] * mu.w[i];
  return s;
}

namespace {

CRat random_crat(Rng& rng, int num_cap, int den_cap) {
  const Rat re(rng.uniform_int(-num_cap, num_cap), rng.uniform_int(1, den_cap));
  const Rat im(rng.uniform_int(-num_cap, num_cap), rng.uniform_int(1, den_cap));
  return {re, im};
}

}  // namespace

FinMeasure fin_random_measure(int size, Rng& rng, int num_cap, int den_cap) {
  FinMeasure mu;
  mu.w.reserve(size);
  for (int i = 0; i < size; ++i) mu.w.push_back(random_crat(rng, num_cap, den_cap));
  return mu;
}

std::vector<CRat> fin_random_function(int size, Rng& rng, int num_cap, int den_cap) {
  return fin_random_measure(size, rng, num_cap, den_cap).w;
}

}  // namespace haarpush
