#include <algorithm>

#include "doctest.h"

#include "mql/markov.hpp"
#include "mql/selftest.hpp"

using namespace mql;
namespace st = mql::selftest;

namespace {

std::vector<Rational> rvec(std::initializer_list<Rational> init) { return init; }

}  // namespace

TEST_CASE("apply is the column-weighted sum over sources") {
  FiniteKernel k = st::chain_kernel();
  auto out = apply_exact(k, rvec({Rational(0), Rational(1)}));
  CHECK(out == rvec({Rational(0), Rational(1, 2)}));
}

TEST_CASE("apply on an identity map system returns the input") {
  MapSystem system;
  system.space = IntervalGridSpace{Rational(0), Rational(1), 5, InteriorMode::Discrete};
  system.maps.emplace_back(AffineMap{Rational(1), Rational(0)});
  system.weights = {Rational(1)};
  std::vector<double> f{0.5, -2.0, 3.25, 0.0, 7.0};
  CHECK(mql::apply(MarkovModel(system), f) == f);
}

TEST_CASE("apply on a uniform kernel averages") {
  MarkovModel model(st::uniform_model(4));
  std::vector<double> f{1.0, 2.0, 3.0, 6.0};
  auto out = mql::apply(model, f);
  for (double v : out) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("apply rejects a length mismatch") {
  FiniteKernel k = st::chain_kernel();
  CHECK_THROWS_AS(apply_exact(k, rvec({Rational(1)})), dimension_error);
}

TEST_CASE("kernel powers match the hand-squared chain") {
  FiniteKernel k = st::chain_kernel();
  auto out = power_apply_exact(k, rvec({Rational(1), Rational(0)}), 2);
  CHECK(out == rvec({Rational(1), Rational(3, 4)}));

  FiniteKernel squared = kernel_power(k, 2);
  CHECK(squared.kernel[0][1] == Rational(3, 4));
  CHECK(squared.kernel[1][1] == Rational(1, 4));
}

TEST_CASE("a full period of a cycle kernel is the identity") {
  FiniteKernel k = st::cycle_kernel(3);
  auto f = rvec({Rational(2), Rational(-1), Rational(5)});
  CHECK(power_apply_exact(k, f, 3) == f);
}

TEST_CASE("power 0 returns the input unchanged") {
  FiniteKernel k = st::chain_kernel();
  auto f = rvec({Rational(4), Rational(9)});
  CHECK(power_apply_exact(k, f, 0) == f);
}

TEST_CASE("averaging is idempotent: uniform power equals one application") {
  MarkovModel model(st::uniform_model(5));
  std::vector<double> f{0.0, 1.0, 2.0, 3.0, 10.0};
  auto once = mql::apply(model, f);
  for (int n = 1; n <= 4; ++n) CHECK(power_apply(model, f, n) == once);
}

TEST_CASE("support of the chain kernel") {
  MarkovModel model(st::chain_kernel());
  std::vector<std::pair<int, int>> expected{{0, 0}, {0, 1}, {1, 1}};
  CHECK(support(model) == expected);
}

TEST_CASE("support of the reflection system on a 3-point grid") {
  MarkovModel model(st::reflection_system(3));  // grid {0, 1/2, 1}
  auto pairs = support(model);
  std::vector<std::pair<int, int>> expected{{0, 0}, {2, 0}, {1, 1}, {0, 2}, {2, 2}};
  std::sort(expected.begin(), expected.end(),
            [](auto& a, auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
  CHECK(pairs == expected);
}

TEST_CASE("support of a 2-point uniform kernel is the full square") {
  MarkovModel model(st::uniform_model(2));
  CHECK(support(model).size() == 4);
}

TEST_CASE("support of a map system does not depend on the weights") {
  for (int points : {3, 11, 41}) {
    MapSystem a = st::tent_system(points);
    MapSystem b = a;
    b.weights = {Rational(1, 10), Rational(9, 10)};
    CHECK(support(MarkovModel(a)) == support(MarkovModel(b)));
  }
}

TEST_CASE("absorbing subsets of the chain kernel") {
  MarkovModel model(st::chain_kernel());
  CHECK(is_absorbing(model, {0}));
  CHECK(is_absorbing(model, {0, 1}));
  CHECK_FALSE(is_absorbing(model, {1}));
}

TEST_CASE("reflection pairs are absorbing on an odd grid") {
  MarkovModel model(st::reflection_system(11));
  // indices 3 and 7 are the grid points 0.3 and 0.7
  CHECK(is_absorbing(model, {3, 7}));
  CHECK(is_strongly_absorbing(model, {3, 7}));
}

TEST_CASE("unknown labels raise a domain error") {
  FiniteKernel k = st::chain_kernel();
  CHECK_THROWS_AS(indices_for_labels(k.states, {"bogus"}), domain_error);
  CHECK(indices_for_labels(k.states, {"x2"}) == IndexSet{1});
}

TEST_CASE("strongly absorbing examples") {
  MarkovModel chain(st::chain_kernel());
  CHECK(is_strongly_absorbing(chain, {0}));
  CHECK(is_strongly_absorbing(chain, {0, 1}));  // chain is sink-free
  CHECK_FALSE(is_strongly_absorbing(chain, {1}));

  MarkovModel uniform(st::uniform_model(4));
  CHECK(is_strongly_absorbing(uniform, {0, 1, 2, 3}));
  CHECK_FALSE(is_strongly_absorbing(uniform, {1}));
  CHECK_FALSE(is_strongly_absorbing(uniform, {0, 2, 3}));
}

TEST_CASE("strongly absorbing implies absorbing on random models") {
  std::uint64_t state = 99;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(state % 4);
    FiniteKernel k = st::random_kernel(state, n, false);
    MarkovModel model(k);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      IndexSet b;
      for (int v = 0; v < n; ++v) {
        if (mask & (1u << v)) b.push_back(v);
      }
      if (is_strongly_absorbing(model, b)) CHECK(is_absorbing(model, b));
    }
  }
}

TEST_CASE("restriction to an absorbing subset") {
  MarkovModel model(st::chain_kernel());
  MarkovModel restricted = restrict_to(model, {0});
  const auto& k = std::get<FiniteKernel>(restricted);
  CHECK(k.states == std::vector<std::string>{"x1"});
  CHECK(k.kernel == std::vector<std::vector<Rational>>{{Rational(1)}});

  CHECK(restrict_to(model, {0, 1}) == model);
}

TEST_CASE("restriction preconditions") {
  MarkovModel uniform(st::uniform_model(3));
  CHECK_THROWS_AS(restrict_to(uniform, {0}), precondition_error);
  CHECK_THROWS_AS(restrict_to(uniform, {}), domain_error);
  MarkovModel chain(st::chain_kernel());
  CHECK_THROWS_AS(restrict_to(chain, {1}), precondition_error);
}

TEST_CASE("kernel powers stay column-stochastic") {
  std::uint64_t state = 4242;
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(state % 5);
    FiniteKernel k = st::random_kernel(state, n, false);
    for (int p = 1; p <= 6; ++p) {
      CHECK_NOTHROW(kernel_power(k, p).validate());
    }
  }
}

TEST_CASE("grid snapping rounds ties toward the lower point") {
  IntervalGridSpace grid{Rational(0), Rational(1), 5, InteriorMode::Discrete};  // step 1/4
  CHECK(grid.snap(Rational(1, 8)) == 0);   // exact tie between 0 and 1/4
  CHECK(grid.snap(Rational(3, 16)) == 1);  // nearer 1/4
  CHECK(grid.snap(Rational(1)) == 4);
  CHECK(grid.snap(Rational(0)) == 0);
}

TEST_CASE("model validation rejects bad columns and weights") {
  FiniteKernel k = st::chain_kernel();
  k.kernel[0][1] = Rational(2, 5);
  CHECK_THROWS_WITH_AS(k.validate(), "column 1 sums to 9/10, expected 1", validation_error);

  MapSystem escape;
  escape.space = IntervalGridSpace{Rational(0), Rational(1), 3, InteriorMode::Discrete};
  escape.maps.emplace_back(AffineMap{Rational(2), Rational(0)});
  escape.weights = {Rational(1)};
  CHECK_THROWS_AS(escape.validate(), validation_error);

  MapSystem weights = st::tent_system(5);
  weights.weights = {Rational(1, 2), Rational(1, 3)};
  CHECK_THROWS_AS(weights.validate(), validation_error);
}
