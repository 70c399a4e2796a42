#include <doctest.h>

#include <chrono>
#include <random>

#include "ergolab/systems.hpp"

using namespace ergolab;

namespace {

BernoulliShiftSystem fair_coin(std::size_t d, std::uint64_t seed) {
  return BernoulliShiftSystem(d, {Rat(1, 2), Rat(1, 2)}, seed);
}

}  // namespace

TEST_CASE("sampling is a pure function of master seed and stream id") {
  const SystemInstance sys = fair_coin(2, 99);
  const Point a = sample_point(sys, 7);
  const Point b = sample_point(sys, 7);
  CHECK(std::get<BernoulliPoint>(a).point_seed == std::get<BernoulliPoint>(b).point_seed);
  const Point c = sample_point(sys, 8);
  CHECK(std::get<BernoulliPoint>(a).point_seed != std::get<BernoulliPoint>(c).point_seed);

  const SystemInstance torus(TorusRotationSystem(1, 2, {0x9E3779B97F4A7C15ull, 123}, 5));
  const Point t1 = sample_point(torus, 3);
  const Point t2 = sample_point(torus, 3);
  CHECK(std::get<TorusPoint>(t1).coords == std::get<TorusPoint>(t2).coords);
}

TEST_CASE("origin symbol frequency sits in the binomial band") {
  const BernoulliShiftSystem sys = fair_coin(2, 20260810);
  const GroupElement origin = GroupElement::zero(2);
  int ones = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s)
    if (sys.symbol_at(sys.sample(std::uint64_t(s)), origin) == 1) ++ones;
  const double freq = double(ones) / trials;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("torus coordinates are uniform on average") {
  const TorusRotationSystem sys(1, 1, {0x9E3779B97F4A7C15ull}, 31337);
  double mean = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) mean += double(sys.sample(std::uint64_t(s)).coords[0]) * 0x1p-64;
  mean /= trials;
  CHECK(mean >= 0.48);
  CHECK(mean <= 0.52);
}

TEST_CASE("skewed coins respect the inverse CDF thresholds") {
  // prob (3/4, 1/4): symbols with hash below 3/4 * 2^64 read 0
  const BernoulliShiftSystem sys(1, {Rat(3, 4), Rat(1, 4)}, 5);
  const GroupElement origin = GroupElement::zero(1);
  int ones = 0;
  const int trials = 20000;
  for (int s = 0; s < trials; ++s)
    if (sys.symbol_at(sys.sample(std::uint64_t(s)), origin) == 1) ++ones;
  const double freq = double(ones) / trials;
  CHECK(freq > 0.22);
  CHECK(freq < 0.28);
}

TEST_CASE("degenerate distribution always emits symbol zero") {
  const BernoulliShiftSystem sys(1, {Rat(1), Rat(0)}, 5);
  for (int s = 0; s < 200; ++s) {
    const BernoulliPoint x = sys.sample(std::uint64_t(s));
    for (long long c = -5; c <= 5; ++c)
      CHECK(sys.symbol_at(x, GroupElement::of({c})) == 0);
  }
}

TEST_CASE("group action axioms") {
  const SystemInstance sys(ProductSystem(fair_coin(2, 1),
                                         TorusRotationSystem(2, 1, {0x9E3779B97F4A7C15ull, 4354685564936845354ull}, 2)));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> dist(-1'000'000, 1'000'000);
  for (int it = 0; it < 1000; ++it) {
    const GroupElement g = GroupElement::of({dist(rng), dist(rng)});
    const GroupElement h = GroupElement::of({dist(rng), dist(rng)});
    const Point x = sample_point(sys, std::uint64_t(it));

    const Point idx = act(sys, GroupElement::zero(2), x);
    CHECK(std::get<ProductPoint>(idx).first.offset == std::get<ProductPoint>(x).first.offset);
    CHECK(std::get<ProductPoint>(idx).second.coords == std::get<ProductPoint>(x).second.coords);

    const Point left = act(sys, g, act(sys, h, x));
    const Point right = act(sys, g + h, x);
    CHECK(std::get<ProductPoint>(left).first.offset == std::get<ProductPoint>(right).first.offset);
    CHECK(std::get<ProductPoint>(left).second.coords == std::get<ProductPoint>(right).second.coords);
  }
}

TEST_CASE("half rotation shifts by one half, wrapping") {
  // alpha = 2^63 is the rational angle 1/2; acting by 3 shifts by 3/2 = 1/2
  const TorusRotationSystem sys(1, 1, {std::uint64_t(1) << 63}, 9);
  const SystemInstance instance(sys);
  const Point x = sample_point(instance, 0);
  const Point y = act(instance, GroupElement::of({3}), x);
  const std::uint64_t expected =
      std::get<TorusPoint>(x).coords[0] + (std::uint64_t(1) << 63);  // wrap is intended
  CHECK(std::get<TorusPoint>(y).coords[0] == expected);
}

TEST_CASE("observable evaluation basics") {
  const SystemInstance sys = fair_coin(2, 42);
  const Observable one = CylinderObservable::constant(Rat(1));
  const Point x = sample_point(sys, 0);
  CHECK(evaluate(one, sys, x) == 1.0);

  const Observable ind = CylinderObservable::indicator({GroupElement::of({0, 0})}, {1}, 2);
  const double v = evaluate(ind, sys, x);
  CHECK((v == 0.0 || v == 1.0));

  // two-coordinate cylinder integral: 1/4 on the fair coin
  const Observable pair = CylinderObservable::indicator(
      {GroupElement::of({0, 0}), GroupElement::of({0, 1})}, {1, 1}, 2);
  CHECK(integral_exact(pair, sys) == Rat(1, 4));
  CHECK(integral(pair, sys) == doctest::Approx(0.25));
}

TEST_CASE("incompatible observables are rejected") {
  const SystemInstance bern = fair_coin(1, 1);
  const Observable box = TorusObservable::box({0}, {std::uint64_t(1) << 63});
  CHECK_THROWS_AS(evaluate(box, bern, sample_point(bern, 0)), incompatible_observable);

  const SystemInstance torus(TorusRotationSystem(1, 1, {1}, 1));
  const Observable cyl = CylinderObservable::indicator({GroupElement::of({0})}, {1}, 2);
  CHECK_THROWS_AS(evaluate(cyl, torus, sample_point(torus, 0)), incompatible_observable);
}

TEST_CASE("box indicators and characters on the torus") {
  const TorusRotationSystem tsys(1, 1, {0x9E3779B97F4A7C15ull}, 77);
  const SystemInstance sys(tsys);
  const Observable half = TorusObservable::box({0}, {std::uint64_t(1) << 63});
  CHECK(integral_exact(half, sys) == Rat(1, 2));

  const Observable wave = TorusObservable::character({1});
  CHECK(integral_exact(wave, sys) == Rat(0));
  const Observable flat = TorusObservable::character({0});
  CHECK(integral_exact(flat, sys) == Rat(1));
  const Point x = sample_point(sys, 4);
  CHECK(evaluate(flat, sys, x) == doctest::Approx(1.0));
  CHECK(std::fabs(evaluate(wave, sys, x)) <= 1.0);
}

TEST_CASE("measure preservation holds exactly for cylinder integrals") {
  const SystemInstance sys = fair_coin(2, 12);
  const BernoulliShiftSystem& b = std::get<BernoulliShiftSystem>(sys);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  for (int it = 0; it < 200; ++it) {
    const CylinderObservable f = CylinderObservable::indicator(
        {GroupElement::of({dist(rng), dist(rng)})}, {int(rng() % 2)}, 2);
    const GroupElement g = GroupElement::of({dist(rng), dist(rng)});
    const CylinderObservable moved = translate_cylinder(f, g);
    CHECK(integral_cylinder_exact(f, b.prob) == integral_cylinder_exact(moved, b.prob));
  }
}

TEST_CASE("projection onto the zero-entropy factor") {
  const ProductSystem sys(fair_coin(2, 3),
                          TorusRotationSystem(2, 1, {0x9E3779B97F4A7C15ull, 4354685564936845354ull}, 4));

  const CylinderObservable u = CylinderObservable::indicator({GroupElement::of({0, 0})}, {1}, 2);
  const TorusObservable v = TorusObservable::box({0}, {std::uint64_t(1) << 63});

  SUBCASE("generic product collapses the first factor to its mean") {
    const TorusObservable projected = pinsker_project(ProductObservable{u, v}, sys);
    CHECK(*projected.scale_exact == Rat(1, 2));
    const SystemInstance instance(sys);
    CHECK(integral_exact(Observable(projected), instance) == Rat(1, 4));
    // conditional expectation preserves the mean
    CHECK(integral_exact(Observable(ProductObservable{u, v}), instance) == Rat(1, 4));
  }
  SUBCASE("constant first factor passes through unchanged") {
    const TorusObservable projected =
        pinsker_project(ProductObservable{CylinderObservable::constant(Rat(1)), v}, sys);
    CHECK(*projected.scale_exact == Rat(1));
  }
  SUBCASE("constant second factor collapses to the mean of the first") {
    const TorusObservable projected =
        pinsker_project(ProductObservable{u, TorusObservable::character({0})}, sys);
    CHECK(*projected.scale_exact == Rat(1, 2));
    for (std::int64_t f : std::get<TorusCharacter>(projected.kind).freq) CHECK(f == 0);
  }
}

TEST_CASE("far translates evaluate in constant time per window coordinate") {
  const SystemInstance sys = fair_coin(2, 5);
  const Observable f = CylinderObservable::indicator(
      {GroupElement::of({0, 0}), GroupElement::of({0, 1})}, {1, 1}, 2);
  const GroupElement far(std::vector<i128>{parse_i128("100000000000000000000"),
                                           parse_i128("-99999999999999999999")});
  Point x = sample_point(sys, 0);
  act_in_place(sys, far, x);
  const auto start = std::chrono::steady_clock::now();
  double acc = 0;
  for (int i = 0; i < 1'000'000; ++i) acc += evaluate(f, sys, x);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(acc >= 0);
  CHECK(std::chrono::duration_cast<std::chrono::seconds>(elapsed).count() < 5);
}

TEST_CASE("translation by huge exponents stays exact") {
  const SystemInstance sys = fair_coin(1, 6);
  const GroupElement huge(std::vector<i128>{parse_i128("100000000000000000000")});
  const Point x = sample_point(sys, 1);
  const Point y = act(sys, huge, x);
  const Point z = act(sys, -huge, y);
  CHECK(std::get<BernoulliPoint>(z).offset == std::get<BernoulliPoint>(x).offset);
}
