#include <doctest.h>

#include <cmath>

#include "idr/interdisc.hpp"
#include "idr/random.hpp"

using namespace idr;

namespace {

DistanceMatrix constant(std::size_t k, double d) {
  DistanceMatrix m(k, Provenance::citations);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) m.set(i, j, d);
  }
  return m;
}

}  // namespace

TEST_CASE("Rao-Stirling closed forms") {
  CHECK(rao_stirling(FieldDistribution::unit(4, 2), constant(4, 1.0)) == 0.0);
  CHECK(rao_stirling(FieldDistribution::from_probs({0.5, 0.5}), constant(2, 0.8)) == doctest::Approx(0.4));
  CHECK(rao_stirling(FieldDistribution::from_probs({0.25, 0.25, 0.25, 0.25}), constant(4, 1.0)) ==
        doctest::Approx(0.75));
}

TEST_CASE("Rao-Stirling bound and monotonicity") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.below(8);
    std::vector<double> m(k);
    for (auto& x : m) x = rng.uniform();
    auto p = FieldDistribution::normalize(m);
    DistanceMatrix d(k, Provenance::citations);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) d.set(i, j, rng.uniform());
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) sq += p[i] * p[i];
    const double rs = rao_stirling(p, d);
    CHECK(rs <= 1.0 - sq + 1e-12);
    CHECK(rs >= 0.0);

    const std::size_t i = rng.below(k - 1);
    const std::size_t j = i + 1;
    auto bumped = d;
    bumped.set(i, j, std::min(1.0, d(i, j) + 0.1));
    if (bumped(i, j) > d(i, j)) CHECK(rao_stirling(p, bumped) > rs);
  }
  auto p = FieldDistribution::from_probs({0.2, 0.3, 0.5});
  double sq = 0.04 + 0.09 + 0.25;
  CHECK(rao_stirling(p, constant(3, 1.0)) == doctest::Approx(1.0 - sq));
}

TEST_CASE("Rao-Stirling refuses mass on an unavailable field") {
  auto d = constant(3, 0.5);
  d.set_available(2, false);
  CHECK(rao_stirling(FieldDistribution::from_probs({0.5, 0.5, 0.0}), d) == doctest::Approx(0.25));
  CHECK_THROWS_WITH_AS(rao_stirling(FieldDistribution::from_probs({0.5, 0.25, 0.25}), d),
                       doctest::Contains("field 2"), Error);
  CHECK_THROWS_AS(rao_stirling(FieldDistribution::unit(2, 0), d), Error);
}

TEST_CASE("threshold renormalization") {
  auto r = renormalize(FieldDistribution::from_probs({0.6, 0.3, 0.1}), RenormPolicy::parse("threshold"));
  CHECK(r.probs.vec() == std::vector<double>{1.0, 0.0, 0.0});
  CHECK_FALSE(r.fallback);

  auto kept = renormalize(FieldDistribution::from_probs({0.5, 0.5, 0.0}), RenormPolicy::parse("threshold"));
  CHECK(kept.probs.vec() == std::vector<double>{0.5, 0.5, 0.0});

  auto theta = FieldDistribution::from_probs({0.45, 0.35, 0.2});
  CHECK(renormalize(theta, RenormPolicy::parse("none")).probs == theta);

  auto fb = renormalize(theta, RenormPolicy::parse("threshold", 0.7));
  CHECK(fb.fallback);
  CHECK(fb.probs.vec() == std::vector<double>{1.0, 0.0, 0.0});

  auto top = renormalize(FieldDistribution::from_probs({0.1, 0.4, 0.2, 0.3}), RenormPolicy::parse("top", -1, 2));
  CHECK(top.probs[1] == doctest::Approx(4.0 / 7.0));
  CHECK(top.probs[3] == doctest::Approx(3.0 / 7.0));
  CHECK(top.probs[0] == 0.0);

  CHECK_THROWS_AS(RenormPolicy::parse("median"), Error);
}

TEST_CASE("nearest-rank quantile bins") {
  std::vector<double> s(100);
  for (int i = 0; i < 100; ++i) s[i] = 99 - i;
  auto bins = idr_quantiles(s, quintile_cuts());
  std::vector<int> count(6, 0);
  for (int b : bins) count[b]++;
  CHECK(count == std::vector<int>{0, 20, 20, 20, 20, 20});
  CHECK(bins[0] == 5);
  CHECK(bins[99] == 1);

  std::vector<double> same(10, 0.3);
  for (int b : idr_quantiles(same, quintile_cuts())) CHECK(b == 1);

  std::vector<double> eight{8, 1, 7, 2, 6, 3, 5, 4};
  std::vector<double> cuts{0.25, 0.75};
  auto q = idr_quantiles(eight, cuts);
  CHECK(std::count(q.begin(), q.end(), 3) == 2);
  CHECK(std::count(q.begin(), q.end(), 1) == 2);
  CHECK(q[0] == 3);
  CHECK(q[1] == 1);

  CHECK_THROWS_AS(idr_quantiles(std::vector<double>{}, cuts), Error);
}
