#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "haarpush/finite.hpp"

using namespace haarpush;

namespace {

std::multiset<int> order_profile(const FinGroup& G) {
  std::multiset<int> out;
  for (int i = 0; i < G.n; ++i) out.insert(fin_element_order(G, i));
  return out;
}

}  // namespace

TEST_CASE("catalog groups pass full axiom validation") {
  for (const auto& name : fin_catalog_names()) CHECK_NOTHROW(find_fin_group(name));
}

TEST_CASE("cyclic group structure") {
  const FinGroup z8 = find_fin_group("z8");
  CHECK(z8.n == 8);
  CHECK(z8.mul(5, 6) == 3);
  CHECK(z8.inv[3] == 5);
  CHECK(fin_element_order(z8, 1) == 8);
  CHECK(fin_element_order(z8, 2) == 4);
  CHECK(fin_element_order(z8, 4) == 2);
}

TEST_CASE("s4 composition and parity subgroups") {
  const FinGroup s4 = find_fin_group("s4");
  CHECK(s4.n == 24);
  // (0 1) o (1 2): apply (1 2) first -> one-line 1032 * 0213
  const int t01 = fin_find_label(s4, "1032");  // wait: this is (01)(23); use true (0 1) = 1023
  (void)t01;
  const int a = fin_find_label(s4, "1023");  // transposition (0 1)
  const int b = fin_find_label(s4, "0213");  // transposition (1 2)
  // s(t(x)): x=0 -> t 0 -> s 1; x=1 -> t 2 -> s 2; x=2 -> t 1 -> s 0
  CHECK(s4.labels[s4.mul(a, b)] == "1203");

  const auto a4 = fin_named_subgroup(s4, "a4");
  CHECK(a4.size() == 12);
  CHECK(fin_is_subgroup(s4, a4));
  CHECK(fin_is_normal(s4, a4));

  const auto v4 = fin_named_subgroup(s4, "v4");
  CHECK(v4.size() == 4);
  CHECK(fin_is_subgroup(s4, v4));
  CHECK(fin_is_normal(s4, v4));
  // v4 sits inside a4
  for (int g : v4) CHECK(std::count(a4.begin(), a4.end(), g) == 1);

  // a transposition generates only {e, itself}; the pair (01),(12) spans s3
  CHECK(fin_span(s4, {a}).size() == 2);
  CHECK(fin_span(s4, {a, b}).size() == 6);
}

TEST_CASE("quotients of s4 have the right structure") {
  const FinGroup s4 = find_fin_group("s4");
  const auto v4 = fin_named_subgroup(s4, "v4");

  FinCosets C;
  const FinGroup q = fin_quotient_group(s4, v4, &C);
  CHECK(q.n == 6);
  // s4 / v4 is isomorphic to s3: element orders {1, 2, 2, 2, 3, 3}
  CHECK(order_profile(q) == std::multiset<int>{1, 2, 2, 2, 3, 3});

  // a4 / v4 is cyclic of order 3
  const auto a4 = fin_named_subgroup(s4, "a4");
  FinGroup a4g;  // restrict s4's table to a4
  a4g.name = "a4";
  a4g.n = 12;
  std::map<int, int> pos;
  for (int i = 0; i < 12; ++i) pos[a4[i]] = i;
  a4g.table.resize(144);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) a4g.table[i * 12 + j] = pos.at(s4.mul(a4[i], a4[j]));
  for (int i = 0; i < 12; ++i) a4g.labels.push_back(s4.labels[a4[i]]);
  a4g.e = pos.at(s4.e);
  a4g.inv.assign(12, 0);
  for (int i = 0; i < 12; ++i) a4g.inv[i] = pos.at(s4.inv[a4[i]]);
  CHECK_NOTHROW(validate_fin_group(a4g));
  std::vector<int> v4_in_a4;
  for (int g : fin_named_subgroup(s4, "v4")) v4_in_a4.push_back(pos.at(g));
  std::sort(v4_in_a4.begin(), v4_in_a4.end());
  const FinGroup q3 = fin_quotient_group(a4g, v4_in_a4);
  CHECK(q3.n == 3);
  CHECK(order_profile(q3) == std::multiset<int>{1, 3, 3});
}

TEST_CASE("z8 chain z8 > z4 > z2") {
  const FinGroup z8 = find_fin_group("z8");
  const auto z4 = fin_span(z8, {2});
  const auto z2 = fin_span(z8, {4});
  CHECK(z4 == std::vector<int>{0, 2, 4, 6});
  CHECK(z2 == std::vector<int>{0, 4});
  const FinGroup q = fin_quotient_group(z8, z2);
  CHECK(q.n == 4);
  CHECK(fin_element_order(q, 1) == 4);  // z8/z2 is z4
}

TEST_CASE("quotient construction rejects illegal inputs") {
  const FinGroup s4 = find_fin_group("s4");
  // {e, (01)} is a subgroup but not normal
  const auto h = fin_span(s4, {fin_find_label(s4, "1023")});
  CHECK(fin_is_subgroup(s4, h));
  CHECK_FALSE(fin_is_normal(s4, h));
  CHECK_THROWS_WITH_AS(fin_quotient_group(s4, h), doctest::Contains("not normal"), Error);
  // {e, c} with c a 3-cycle is not closed (c^2 is missing)
  CHECK_THROWS_WITH_AS(fin_quotient_group(s4, std::vector<int>{0, fin_find_label(s4, "1203")}),
                       doctest::Contains("not a subgroup"), Error);
  CHECK_THROWS_WITH_AS(fin_cosets(s4, std::vector<int>{1, 2}),
                       doctest::Contains("not a subgroup"), Error);
}

TEST_CASE("cosets partition the group") {
  const FinGroup s4 = find_fin_group("s4");
  const auto v4 = fin_named_subgroup(s4, "v4");
  const FinCosets C = fin_cosets(s4, v4);
  CHECK(C.count == 6);
  std::vector<int> sizes(C.count, 0);
  for (int c : C.coset_of) {
    REQUIRE(c >= 0);
    ++sizes[c];
  }
  for (int s : sizes) CHECK(s == 4);
}

TEST_CASE("Cayley table round-trip through the text format") {
  const FinGroup d4 = find_fin_group("d4");
  std::ostringstream os;
  os << "# dihedral group of order 8\n";
  os << "n " << d4.n << "\n";
  os << "labels";
  for (const auto& l : d4.labels) os << " " << l;
  os << "\n";
  for (int i = 0; i < d4.n; ++i) {
    for (int j = 0; j < d4.n; ++j) os << (j ? " " : "") << d4.mul(i, j);
    os << "\n";
  }
  std::istringstream in(os.str());
  const FinGroup back = load_cayley_table(in, "d4-copy");
  CHECK(back.table == d4.table);
  CHECK(back.labels == d4.labels);
  CHECK(back.e == d4.e);
}

TEST_CASE("malformed Cayley tables are rejected") {
  {
    std::istringstream in("n 2\n0 1\n1 1\n");  // repeated entry in a row
    CHECK_THROWS_WITH_AS(load_cayley_table(in), doctest::Contains("not a group table"), Error);
  }
  {
    std::istringstream in("n 3\n0 1 2\n1 2 0\n");  // wrong entry count
    CHECK_THROWS_WITH_AS(load_cayley_table(in), doctest::Contains("entries"), Error);
  }
  {
    // Latin square without associativity does not exist at order <= 4 with
    // identity; take order 5: a quasigroup table that is not a group.
    std::istringstream in(
        "n 5\n"
        "0 1 2 3 4\n"
        "1 0 3 4 2\n"
        "2 4 0 1 3\n"
        "3 2 4 0 1\n"
        "4 3 1 2 0\n");
    CHECK_THROWS_WITH_AS(load_cayley_table(in), doctest::Contains("associativity"), Error);
  }
}

TEST_CASE("q8 has a unique element of order 2") {
  const FinGroup q8 = find_fin_group("q8");
  CHECK(order_profile(q8) == std::multiset<int>{1, 2, 4, 4, 4, 4, 4, 4});
  // center {1, -1} is normal; quotient is the Klein four-group
  const auto center = fin_span(q8, {fin_find_label(q8, "-1")});
  const FinGroup q = fin_quotient_group(q8, center);
  CHECK(order_profile(q) == std::multiset<int>{1, 2, 2, 2});
}

TEST_CASE("exact rational arithmetic on measures") {
  CRat a(Rat(1, 3), Rat(1, 2));
  CRat b(Rat(2, 3), Rat(-1, 2));
  CHECK((a + b) == CRat(Rat(1), Rat(0)));
  // (1/3 + i/2)(2/3 - i/2) = 2/9 + 1/4 + i(1/3 - 1/6)
  CHECK((a * b) == CRat(Rat(2, 9) + Rat(1, 4), Rat(1, 3) - Rat(1, 6)));
  CHECK((Rat(1, 7) * CRat(Rat(7))) == CRat(Rat(1)));
}

TEST_CASE("pushforward of the counting measure along the quotient map") {
  const FinGroup z8 = find_fin_group("z8");
  const auto z2 = fin_span(z8, {4});
  FinCosets C;
  const FinGroup q = fin_quotient_group(z8, z2, &C);
  const FinMeasure pushed = fin_pushforward(fin_haar(z8), C.coset_of, q.n);
  // every fiber has |N| = 2 points
  for (const auto& w : pushed.w) CHECK(w == CRat(2));
}

TEST_CASE("pushforward is the adjoint of pullback, exactly") {
  const FinGroup s4 = find_fin_group("s4");
  const auto v4 = fin_named_subgroup(s4, "v4");
  FinCosets C;
  const FinGroup q = fin_quotient_group(s4, v4, &C);
  Rng rng(2026);
  for (int trial = 0; trial < 25; ++trial) {
    const FinMeasure mu = fin_random_measure(s4.n, rng);
    const std::vector<CRat> alpha = fin_random_function(q.n, rng);
    // <p_* mu, alpha> = <mu, alpha o p>
    std::vector<CRat> pulled(s4.n);
    for (int g = 0; g < s4.n; ++g) pulled[g] = alpha[C.coset_of[g]];
    const CRat lhs = fin_pair(fin_pushforward(mu, C.coset_of, q.n), alpha);
    const CRat rhs = fin_pair(mu, pulled);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("pushforward composes along a chain, exactly") {
  const FinGroup z8 = find_fin_group("z8");
  const auto z2 = fin_span(z8, {4});
  const auto z4 = fin_span(z8, {2});
  FinCosets C2, C4;
  const FinGroup q2 = fin_quotient_group(z8, z2, &C2);  // z8 -> z8/z2
  const FinGroup q4 = fin_quotient_group(z8, z4, &C4);  // z8 -> z8/z4
  // factor map z8/z2 -> z8/z4 via representatives
  std::vector<int> factor(q2.n);
  for (int c = 0; c < q2.n; ++c) factor[c] = C4.coset_of[C2.representative[c]];
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const FinMeasure mu = fin_random_measure(z8.n, rng);
    const FinMeasure via = fin_pushforward(fin_pushforward(mu, C2.coset_of, q2.n), factor, q4.n);
    const FinMeasure direct = fin_pushforward(mu, C4.coset_of, q4.n);
    CHECK(via == direct);
  }
}
