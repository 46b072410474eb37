#include <cmath>

#include "doctest.h"

#include "mql/ifs.hpp"
#include "mql/selftest.hpp"

using namespace mql;
namespace st = mql::selftest;

namespace {

IfsSystem half_intervals() {
  // {x/2, x/2 + 1/2}: the attractor is the whole interval
  IfsSystem ifs;
  ifs.lower = Rational(0);
  ifs.upper = Rational(1);
  ifs.maps = {AffineMap{Rational(1, 2), Rational(0)}, AffineMap{Rational(1, 2), Rational(1, 2)}};
  ifs.weights = uniform_weights(2);
  return ifs;
}

IfsSystem overlapping() {
  // {x/2, x/2 + 1/4, x/2 + 1/2}: adjacent images overlap on whole intervals
  // with no branch points (equal slopes never coincide pointwise)
  IfsSystem ifs;
  ifs.lower = Rational(0);
  ifs.upper = Rational(1);
  ifs.maps = {AffineMap{Rational(1, 2), Rational(0)}, AffineMap{Rational(1, 2), Rational(1, 4)},
              AffineMap{Rational(1, 2), Rational(1, 2)}};
  ifs.weights = uniform_weights(3);
  return ifs;
}

}  // namespace

TEST_CASE("ifs validation") {
  CHECK_NOTHROW(st::tent_ifs().validate());
  CHECK_NOTHROW(st::cantor_ifs().validate());

  IfsSystem bad = st::tent_ifs();
  bad.maps[0].slope = Rational(1);  // not a contraction
  CHECK_THROWS_AS(bad.validate(), validation_error);

  IfsSystem single = st::tent_ifs();
  single.maps.pop_back();
  single.weights = {Rational(1)};
  CHECK_THROWS_AS(single.validate(), validation_error);

  // the reflection system is not an IFS
  CHECK_THROWS_AS(IfsSystem::from_map_system(st::reflection_system(11)), validation_error);
}

TEST_CASE("cantor attractor at depth 3 is the 8 level-3 interval endpoints") {
  auto sample = attractor(st::cantor_ifs(), 3);
  REQUIRE(sample.points.size() == 16);
  CHECK(sample.points.front() == doctest::Approx(0.0));
  CHECK(sample.points.back() == doctest::Approx(1.0));
  // endpoints pair up into 8 clusters of width 1/27
  for (std::size_t i = 0; i + 1 < sample.points.size(); i += 2) {
    CHECK(sample.points[i + 1] - sample.points[i] == doctest::Approx(1.0 / 27.0));
  }
}

TEST_CASE("interval-filling systems sample the whole interval") {
  for (int depth : {4, 8}) {
    auto sample = attractor(half_intervals(), depth);
    CHECK(sample.points.front() == doctest::Approx(0.0));
    CHECK(sample.points.back() == doctest::Approx(1.0));
    auto next = hutchinson_step(half_intervals(), sample.points);
    CHECK(hausdorff_distance(sample.points, next) <= std::pow(2.0, 1.0 - depth));
  }
  auto tent = attractor(st::tent_ifs(), 10);
  CHECK(tent.points.front() == doctest::Approx(0.0));
  CHECK(tent.points.back() == doctest::Approx(1.0));
  for (std::size_t i = 0; i + 1 < tent.points.size(); ++i) {
    CHECK(tent.points[i + 1] - tent.points[i] <= 2e-3);  // fills [0, 1]
  }
}

TEST_CASE("branch index counts coinciding map images") {
  IfsSystem tent = st::tent_ifs();
  CHECK(branch_index(tent, 0.5, 1.0) == 2);
  CHECK(branch_index(tent, 0.25, 0.5) == 1);
  CHECK_THROWS_AS(branch_index(tent, 0.9, 0.1), domain_error);

  CHECK(branch_points(tent, 101) == std::vector<double>{0.5});
  CHECK(branch_points(st::cantor_ifs(), 101).empty());
}

TEST_CASE("branch index is at least 1 exactly on the support") {
  IfsSystem tent = st::tent_ifs();
  for (int k = 0; k <= 20; ++k) {
    double y = k / 20.0;
    for (const auto& m : tent.maps) {
      CHECK(branch_index(tent, m.eval(y), y) >= 1);
    }
  }
}

TEST_CASE("weight rescaling preserves inner products") {
  IfsSystem tent = st::tent_ifs();
  std::vector<double> skew{0.3, 0.7};
  CHECK(check_isometry(tent, skew, 50, 3, 1234) <= 1e-9);

  std::vector<double> uniform{0.5, 0.5};
  CHECK(check_isometry(tent, uniform, 50, 3, 1234) <= 1e-12);

  IfsSystem cantor = st::cantor_ifs();
  std::vector<double> quarters{0.25, 0.75};
  CHECK(check_isometry(cantor, quarters, 100, 3, 99) <= 1e-12);
}

TEST_CASE("word fixed points solve the affine composition") {
  IfsSystem cantor = st::cantor_ifs();
  std::vector<int> w12{0, 1};
  CHECK(word_fixed_point(cantor, w12) == doctest::Approx(0.25).epsilon(1e-12));

  IfsSystem tent = st::tent_ifs();
  std::vector<int> w2{1};
  CHECK(word_fixed_point(tent, w2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // one-letter words: intercept / (1 - slope)
  for (const IfsSystem& ifs : {st::tent_ifs(), st::cantor_ifs()}) {
    for (int i = 0; i < ifs.map_count(); ++i) {
      std::vector<int> w{i};
      double expected =
          (ifs.maps[static_cast<std::size_t>(i)].intercept /
           (Rational(1) - ifs.maps[static_cast<std::size_t>(i)].slope))
              .to_double();
      CHECK(word_fixed_point(ifs, w) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("word fixed points lie on the attractor sample") {
  IfsSystem cantor = st::cantor_ifs();
  auto sample = attractor(cantor, 10);
  std::vector<int> word;
  for (int len = 1; len <= 6; ++len) {
    word.assign(static_cast<std::size_t>(len), 0);
    while (true) {
      double x = word_fixed_point(cantor, word);
      auto it = std::lower_bound(sample.points.begin(), sample.points.end(), x);
      double best = 2.0;
      if (it != sample.points.end()) best = std::min(best, *it - x);
      if (it != sample.points.begin()) best = std::min(best, x - *(it - 1));
      CHECK(best <= 2.0 * sample.tolerance);
      int pos = len - 1;
      while (pos >= 0 && word[static_cast<std::size_t>(pos)] == 1) {
        word[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++word[static_cast<std::size_t>(pos)];
    }
  }
}

TEST_CASE("condition (L) certificate counts stay within the word bound") {
  IfsSystem tent = st::tent_ifs();
  auto cert = condition_l_certificate(tent, 8, {11, 101, 1001});
  CHECK(cert.holds);
  CHECK(cert.word_bound == 510);
  CHECK(cert.base_points.size() <= 510);
  REQUIRE(cert.count_by_length.size() == 8);
  for (std::size_t i = 0; i + 1 < cert.count_by_length.size(); ++i) {
    CHECK(cert.count_by_length[i] <= cert.count_by_length[i + 1]);
  }
  for (long long c : cert.counts_at_grids) {
    CHECK(c == static_cast<long long>(cert.base_points.size()));
  }

  IfsSystem cantor = st::cantor_ifs();
  auto short_cert = condition_l_certificate(cantor, 1);
  REQUIRE(short_cert.base_points.size() == 2);
  CHECK(short_cert.base_points[0] == doctest::Approx(0.0));
  CHECK(short_cert.base_points[1] == doctest::Approx(1.0));
}

TEST_CASE("hutchinson iteration contracts toward the attractor") {
  IfsSystem cantor = st::cantor_ifs();
  auto conv = hereditary_triviality_check(cantor, {0.0}, 10);
  CHECK(conv.initial_distance == doctest::Approx(1.0));
  for (int n = 1; n <= 10; ++n) {
    CHECK(conv.distances[static_cast<std::size_t>(n - 1)] <=
          std::pow(3.0, -n) * conv.initial_distance + conv.tolerance);
  }

  auto sample = attractor(cantor, 12);
  auto stable = hereditary_triviality_check(cantor, sample.points, 3, 12);
  for (double d : stable.distances) CHECK(d <= 2.0 * stable.tolerance + kDedupTol);

  IfsSystem tent = st::tent_ifs();
  auto mid = hereditary_triviality_check(tent, {0.5}, 8);
  CHECK(mid.initial_distance == doctest::Approx(0.5));
  for (int n = 1; n <= 8; ++n) {
    CHECK(mid.distances[static_cast<std::size_t>(n - 1)] <=
          std::pow(2.0, -n) * 0.5 + mid.tolerance + kDedupTol);
  }
}

TEST_CASE("ifs classification") {
  CHECK(classify_ifs(st::cantor_ifs(), 101) == IfsClass::TotallyDisconnected);
  CHECK(classify_ifs(st::tent_ifs(), 101) == IfsClass::BranchOverlapOnly);
  CHECK(classify_ifs(overlapping(), 101) == IfsClass::General);
}

TEST_CASE("hausdorff distance basics") {
  std::vector<double> a{0.0, 1.0};
  std::vector<double> b{0.0, 0.5, 1.0};
  std::vector<double> empty;
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5));
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK_THROWS_AS(hausdorff_distance(empty, a), precondition_error);
}
