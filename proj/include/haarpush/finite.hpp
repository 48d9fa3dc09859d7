#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "haarpush/numerics.hpp"
#include "haarpush/rational.hpp"

namespace haarpush {

/// Finite group as a Cayley table over element indices 0..n-1.
/// Everything downstream (cosets, quotients, measures) is exact arithmetic.
struct FinGroup {
  std::string name;
  int n = 0;
  std::vector<int> table;           // table[i*n + j] = index of g_i * g_j
  std::vector<int> inv;             // index of g^{-1}
  int e = 0;                        // identity index
  std::vector<std::string> labels;  // one label per element

  int mul(int i, int j) const { return table[static_cast<size_t>(i) * n + j]; }
};

/// Full axiom check: Latin square, identity, inverses, associativity.
/// Throws Error("not a group table: ...") on the first violation.
void validate_fin_group(const FinGroup& G);

/// Built-in finite groups:
///   z<n> : cyclic of order n        s4 : permutations of {0,1,2,3}
///   d4   : dihedral of order 8      q8 : quaternion group
FinGroup find_fin_group(const std::string& name);
std::vector<std::string> fin_catalog_names();

FinGroup make_cyclic(int n);
FinGroup make_sym4();
FinGroup make_dihedral4();
FinGroup make_quaternion8();

/// Parse a Cayley table from text. Format: optional '#' comment lines, a line
/// `n <order>`, an optional line `labels <l0> ... <l(n-1)>`, then n rows of n
/// element indices. The table is validated before returning.
FinGroup load_cayley_table(std::istream& in, const std::string& name = "custom");

/// Index of the element carrying `label`; throws if absent.
int fin_find_label(const FinGroup& G, const std::string& label);

/// Smallest k >= 1 with g^k = e.
int fin_element_order(const FinGroup& G, int g);

/// Subgroup generated by `gens` (always a subgroup by construction), sorted.
std::vector<int> fin_span(const FinGroup& G, const std::vector<int>& gens);

/// Checks that `elems` is closed and contains identity/inverses.
bool fin_is_subgroup(const FinGroup& G, const std::vector<int>& elems);
bool fin_is_normal(const FinGroup& G, const std::vector<int>& sub);

/// Distinguished subgroups by name, for chain configuration:
///   in s4: "a4" (even permutations), "v4" (double transpositions + e)
///   in any group: "span:<label>,<label>,..." closure of labelled elements
std::vector<int> fin_named_subgroup(const FinGroup& G, const std::string& name);

/// Left cosets gH of a subgroup.
struct FinCosets {
  std::vector<int> coset_of;        // element index -> coset index
  std::vector<int> representative;  // coset index -> least element index in it
  int count = 0;
};
FinCosets fin_cosets(const FinGroup& G, const std::vector<int>& H);

/// Quotient group G/N on coset indices. Throws Error("not a subgroup") or
/// Error("subgroup is not normal") when the construction is illegal. The
/// coset structure used is returned through `cosets` when non-null.
FinGroup fin_quotient_group(const FinGroup& G, const std::vector<int>& N,
                            FinCosets* cosets = nullptr);

// ---------------------------------------------------------------------------
// Exact measures on finite sets.
// ---------------------------------------------------------------------------

/// Finitely supported measure: one complex-rational weight per point of a
/// finite set (group elements or coset indices).
struct FinMeasure {
  std::vector<CRat> w;

  int size() const { return static_cast<int>(w.size()); }
  friend bool operator==(const FinMeasure& a, const FinMeasure& b) { return a.w == b.w; }
};

/// Haar measure of a finite group: counting measure (weight 1 per element).
/// This normalization makes the quotient integration formula exact with
/// counting measure on every floor of a chain.
FinMeasure fin_haar(const FinGroup& G);

/// Pushforward along a map of finite sets: weights add over fibers.
FinMeasure fin_pushforward(const FinMeasure& mu, const std::vector<int>& map, int target_size);

/// Pairing <mu, alpha> = sum_x alpha(x) mu({x}).
CRat fin_pair(const FinMeasure& mu, const std::vector<CRat>& alpha);

/// Random measure/function with small rational weights, deterministic in rng.
FinMeasure fin_random_measure(int size, Rng& rng, int num_cap = 20, int den_cap = 12);
std::vector<CRat> fin_random_function(int size, Rng& rng, int num_cap = 20, int den_cap = 12);

}  // namespace haarpush
