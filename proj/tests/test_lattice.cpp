#include <doctest.h>

#include <random>

#include "ergolab/lattice.hpp"
#include "ergolab/weight_selection.hpp"

using namespace ergolab;

namespace {

GroupElement random_element(std::mt19937_64& rng, std::size_t d, std::int64_t radius) {
  std::uniform_int_distribution<std::int64_t> dist(-radius, radius);
  std::vector<i128> c(d);
  for (auto& x : c) x = dist(rng);
  return GroupElement(std::move(c));
}

}  // namespace

TEST_CASE("past membership on the worked two-dimensional example") {
  const PastWeights w = PastWeights::of({1, 2});
  CHECK_FALSE(phi_contains(w, GroupElement::of({0, 0})));
  CHECK(phi_contains(w, GroupElement::of({-1, 0})));
  // first partial sum cancels, the second decides
  CHECK_FALSE(phi_contains(w, GroupElement::of({2, -1})));
  CHECK(phi_contains(w, GroupElement::of({-2, 1})));
}

TEST_CASE("membership errors") {
  const PastWeights w = PastWeights::of({1, 2});
  CHECK_THROWS_AS(phi_contains(w, GroupElement::of({1})), dimension_mismatch);
  CHECK_THROWS(PastWeights::of({1, 0}));
  CHECK_THROWS(PastWeights::of({}));
}

TEST_CASE("order fixture from the quadratic two-column family") {
  const PastWeights w = PastWeights::of({1, 2});
  const GroupElement a = GroupElement::of({1, -1});
  const GroupElement b = GroupElement::of({3, 8});
  CHECK(phi_compare(w, a, b) == OrderOutcome::Less);
  CHECK(phi_compare(w, b, a) == OrderOutcome::Greater);
  CHECK(phi_compare(w, a, a) == OrderOutcome::Equal);
}

TEST_CASE("order laws hold on random tuples") {
  for (std::size_t d : {1u, 2u, 3u}) {
    std::vector<std::int64_t> wv;
    for (std::size_t i = 0; i < d; ++i) wv.push_back(std::int64_t(1) << (2 * i));
    const PastWeights w{wv};
    std::mt19937_64 rng(0xC0FFEE + d);

    for (int it = 0; it < 2000; ++it) {
      const GroupElement g1 = random_element(rng, d, 1'000'000'000);
      const GroupElement g2 = random_element(rng, d, 1'000'000'000);
      const GroupElement g3 = random_element(rng, d, 1'000'000'000);
      const GroupElement h = random_element(rng, d, 1'000'000'000);

      // trichotomy
      const OrderOutcome ab = phi_compare(w, g1, g2);
      const OrderOutcome ba = phi_compare(w, g2, g1);
      if (g1 == g2) {
        CHECK(ab == OrderOutcome::Equal);
      } else {
        CHECK(ab != OrderOutcome::Equal);
        CHECK(((ab == OrderOutcome::Less && ba == OrderOutcome::Greater) ||
               (ab == OrderOutcome::Greater && ba == OrderOutcome::Less)));
      }

      // transitivity
      if (phi_less(w, g1, g2) && phi_less(w, g2, g3)) CHECK(phi_less(w, g1, g3));

      // left translation invariance
      CHECK(phi_compare(w, g1, g2) == phi_compare(w, g1 + h, g2 + h));

      // inversion
      if (!g1.is_zero()) {
        CHECK((phi_contains(w, g1) || phi_contains(w, -g1)));
        CHECK_FALSE((phi_contains(w, g1) && phi_contains(w, -g1)));
      }
    }
  }
}

TEST_CASE("axiom verification passes on enumerable boxes") {
  SUBCASE("one dimension") {
    AxiomReport r = verify_past_axioms(PastWeights::of({1}), 8);
    CHECK(r.all_pass);
    CHECK(r.phi_count == 8);  // exactly {-8, ..., -1}
  }
  SUBCASE("two dimensions") {
    AxiomReport r = verify_past_axioms(PastWeights::of({1, 2}), 8);
    CHECK(r.all_pass);
    CHECK(r.phi_count == (17 * 17 - 1) / 2);  // cover + disjointness force half
  }
  SUBCASE("three dimensions") {
    AxiomReport r = verify_past_axioms(PastWeights::of({1, 2, 5}), 5);
    CHECK(r.all_pass);
    CHECK(r.phi_count == (11 * 11 * 11 - 1) / 2);
  }
}

TEST_CASE("weight selection on the quadratic two-column family") {
  // columns (3n^2, 8n^2) and (n^2, -n^2)
  PolynomialFamily fam(2, 2,
                       {IntPoly::of({0, 0, 3}), IntPoly::of({0, 0, 1}),
                        IntPoly::of({0, 0, 8}), IntPoly::of({0, 0, -1})});
  WeightSelection sel = select_weights(fam);
  CHECK(sel.candidate_base == 2);  // base 1 dies on the second column sum
  CHECK(sel.weights.weights == std::vector<std::int64_t>{1, 2});
  CHECK(sel.n0 == 0);
  CHECK(sel.n1 == 0);
  CHECK(sel.n2 == 0);
  CHECK(sel.column_order == std::vector<std::size_t>{0, 1});

  // the weighted sums and the pair difference are nonconstant
  CHECK(weighted_column_sum(fam, sel.weights, 0).degree() == 2);
  CHECK(weighted_column_sum(fam, sel.weights, 1).degree() == 2);
  CHECK((weighted_column_sum(fam, sel.weights, 0) - weighted_column_sum(fam, sel.weights, 1))
            .degree() == 2);
}

TEST_CASE("weight selection easy cases") {
  SUBCASE("single linear column") {
    PolynomialFamily fam(1, 1, {IntPoly::of({0, 1})});
    WeightSelection sel = select_weights(fam);
    CHECK(sel.weights.weights == std::vector<std::int64_t>{1});
    CHECK(sel.n2 == 0);
  }
  SUBCASE("coordinate injections need distinct weights") {
    PolynomialFamily fam(2, 2,
                         {IntPoly::of({0, 1}), IntPoly::zero(), IntPoly::zero(), IntPoly::of({0, 1})});
    WeightSelection sel = select_weights(fam);
    CHECK(sel.weights.weights == std::vector<std::int64_t>{1, 2});
  }
  SUBCASE("degenerate families are refused") {
    PolynomialFamily dup(2, 2,
                         {IntPoly::of({0, 1}), IntPoly::of({0, 1}), IntPoly::zero(), IntPoly::zero()});
    CHECK_THROWS_AS(select_weights(dup), degenerate_family_error);
    PolynomialFamily constant(1, 1, {IntPoly::of({5})});
    CHECK_THROWS_AS(select_weights(constant), degenerate_family_error);
  }
}

TEST_CASE("selected weights order the orbit exponents beyond the threshold") {
  PolynomialFamily fam(2, 2,
                       {IntPoly::of({0, 0, 3}), IntPoly::of({0, 0, 1}),
                        IntPoly::of({0, 0, 8}), IntPoly::of({0, 0, -1})});
  WeightSelection sel = select_weights(fam);
  for (std::uint64_t n = sel.n2 + 1; n <= sel.n2 + 100; ++n) {
    const GroupElement first = orbit_exponent(fam, sel.column_order[0], i128(n));
    const GroupElement second = orbit_exponent(fam, sel.column_order[1], i128(n));
    CHECK(phi_compare(sel.weights, second, first) == OrderOutcome::Less);
  }
  CHECK(column_order_threshold(fam, sel.weights) == sel.n2);
}

TEST_CASE("column order threshold detects small-n violations") {
  // columns n^2 and 3n - 2n^2: the second is eventually smaller but wins at n=1
  PolynomialFamily fam(1, 2, {IntPoly::of({0, 0, 1}), IntPoly::of({0, 3, -2})});
  auto threshold = column_order_threshold(fam, PastWeights::of({1}));
  REQUIRE(threshold.has_value());
  CHECK(*threshold >= 1);
  for (std::uint64_t n = *threshold + 1; n < *threshold + 50; ++n) {
    const GroupElement a = orbit_exponent(fam, 0, i128(n));
    const GroupElement b = orbit_exponent(fam, 1, i128(n));
    CHECK(phi_less(PastWeights::of({1}), b, a));
  }

  // reversed order never validates
  PolynomialFamily reversed(1, 2, {IntPoly::of({0, 3, -2}), IntPoly::of({0, 0, 1})});
  CHECK_FALSE(column_order_threshold(reversed, PastWeights::of({1})).has_value());
}
