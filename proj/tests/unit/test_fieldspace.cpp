#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "idr/fieldspace.hpp"
#include "idr/random.hpp"

using namespace idr;
using testutil::paper;

namespace {

// Neighbors a0..a2 in field 0, b0 in field 1 and one half/half paper.
CorpusStore neighbor_store(std::vector<Paper> subjects) {
  FieldTaxonomy tax({"A", "B", "C"});
  std::vector<Paper> ps{paper("a0", 1990, {{0, 1.0}}), paper("a1", 1990, {{0, 1.0}}),
                        paper("a2", 1990, {{0, 1.0}}), paper("b0", 1990, {{1, 1.0}}),
                        paper("ab", 1990, {{0, 0.5}, {1, 0.5}})};
  for (auto& p : ps) p.core = false;
  for (auto& s : subjects) ps.push_back(std::move(s));
  return CorpusStore(tax, ps, {}, {});
}

DistanceMatrix from_values(std::size_t k, const std::vector<double>& upper) {
  DistanceMatrix d(k, Provenance::citations);
  std::size_t n = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) d.set(i, j, upper[n++]);
  }
  return d;
}

}  // namespace

TEST_CASE("reference vectors count field fractions") {
  auto s = neighbor_store({paper("x", 2000, {{2, 1.0}}, {"a0", "a1", "a2", "b0"}),
                           paper("y", 2000, {{2, 1.0}}, {"ab", "a0"}),
                           paper("z", 2000, {{2, 1.0}}, {"a0", "a1", "ghost"})});
  auto x = paper_field_vector(*s.find_paper("x"), VectorMode::references, s);
  CHECK(x.probs.vec() == std::vector<double>{0.75, 0.25, 0.0});
  auto y = paper_field_vector(*s.find_paper("y"), VectorMode::references, s);
  CHECK(y.probs.vec() == std::vector<double>{0.75, 0.25, 0.0});
  auto z = paper_field_vector(*s.find_paper("z"), VectorMode::references, s);
  CHECK(z.probs.vec() == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(z.resolved == 2);
  CHECK(z.skipped == 1);
}

TEST_CASE("citation vectors and the no-basis error") {
  auto s = neighbor_store({paper("x", 2000, {{2, 1.0}}, {}, {{"b0", 2001}, {"a0", std::nullopt}}),
                           paper("lonely", 2000, {{2, 1.0}}, {"ghost"})});
  auto x = paper_field_vector(*s.find_paper("x"), VectorMode::citations, s);
  CHECK(x.probs.vec() == std::vector<double>{0.5, 0.5, 0.0});
  CHECK_THROWS_WITH_AS(paper_field_vector(*s.find_paper("lonely"), VectorMode::references, s),
                       doctest::Contains("no basis for vector"), Error);
}

TEST_CASE("paper vectors are permutation-equivariant") {
  auto s = neighbor_store({paper("x", 2000, {{2, 1.0}}, {"a0", "b0", "ab"})});
  FieldTaxonomy tax({"C", "A", "B"});  // field f becomes (f + 1) % 3
  std::vector<Paper> ps;
  for (auto p : s.papers()) {
    for (auto& f : p.fields) f.field = (f.field + 1) % 3;
    std::sort(p.fields.begin(), p.fields.end(), [](auto& a, auto& b) { return a.field < b.field; });
    ps.push_back(p);
  }
  CorpusStore t(tax, ps, {}, {});
  auto a = paper_field_vector(*s.find_paper("x"), VectorMode::references, s).probs;
  auto b = paper_field_vector(*t.find_paper("x"), VectorMode::references, t).probs;
  for (std::size_t f = 0; f < 3; ++f) CHECK(b[(f + 1) % 3] == doctest::Approx(a[f]));
}

TEST_CASE("aggregates sum paper vectors by primary field") {
  auto s = neighbor_store({paper("x", 2000, {{0, 1.0}}, {"a0", "b0"}), paper("y", 2000, {{0, 1.0}}, {"a1"}),
                           paper("z", 2000, {{1, 1.0}}, {"a0", "a1", "a2", "b0"})});
  auto agg = field_aggregates(s, VectorMode::references);
  CHECK(agg.vectors[0] == std::vector<double>{1.5, 0.5, 0.0});
  CHECK(agg.vectors[1] == std::vector<double>{0.75, 0.25, 0.0});  // singleton field
  CHECK(agg.empty(2));
  auto d = field_distance_matrix(agg, Provenance::references);
  CHECK_FALSE(d.available(2));
  CHECK(std::isnan(d(0, 2)));
  CHECK(d(0, 1) == doctest::Approx(1.0 - (1.5 * 0.75 + 0.5 * 0.25) / (std::hypot(1.5, 0.5) * std::hypot(0.75, 0.25))));
}

TEST_CASE("fractional aggregation splits by label weight") {
  auto s = neighbor_store({paper("x", 2000, {{0, 0.5}, {1, 0.5}}, {"a0"})});
  auto agg = field_aggregates(s, VectorMode::references, AggregateAssignment::fractional);
  CHECK(agg.vectors[0] == std::vector<double>{0.5, 0.0, 0.0});
  CHECK(agg.vectors[1] == std::vector<double>{0.5, 0.0, 0.0});
  CHECK(agg.n_papers[1] == 0.5);
}

TEST_CASE("cosine distance hand values") {
  FieldAggregate agg;
  agg.k = 3;
  agg.vectors = {{1, 1, 0}, {1, 0, 0}, {0, 1, 0}};
  agg.n_papers = {1, 1, 1};
  auto d = field_distance_matrix(agg, Provenance::citations);
  CHECK(d(0, 1) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
  CHECK(d(1, 2) == doctest::Approx(1.0));
  CHECK(d(1, 0) == d(0, 1));
  CHECK(d(2, 2) == 0.0);

  agg.vectors[1] = {2, 2, 0};  // parallel to field 0
  CHECK(field_distance_matrix(agg, Provenance::citations)(0, 1) == doctest::Approx(0.0));

  agg.n_papers = {1, 0, 0};
  CHECK_THROWS_AS(field_distance_matrix(agg, Provenance::citations), Error);
}

TEST_CASE("matrix comparison") {
  auto a = from_values(4, {0.1, 0.5, 0.9, 0.3, 0.7, 0.2});
  CHECK(compare_distance_matrices(a, a) == doctest::Approx(1.0));
  auto b = from_values(4, {0.9, 0.5, 0.1, 0.7, 0.3, 0.8});
  CHECK(compare_distance_matrices(a, b) == doctest::Approx(-1.0));
  auto tiny = from_values(2, {0.4});
  CHECK_THROWS_AS(compare_distance_matrices(tiny, tiny), Error);
}

TEST_CASE("grant pair distance") {
  auto g = FieldDistribution::from_probs({0.5, 0.5, 0.0});
  CHECK(grant_pair_distance(g, g) == doctest::Approx(0.0));
  CHECK(grant_pair_distance(g, FieldDistribution::from_probs({0.0, 0.5, 0.5})) == doctest::Approx(0.5));
  CHECK(grant_pair_distance(FieldDistribution::unit(3, 0), FieldDistribution::unit(3, 2)) == 1.0);
}

TEST_CASE("distance matrix TSV round-trip keeps the availability mask") {
  FieldAggregate agg;
  agg.k = 4;
  agg.vectors = {{1, 2, 0, 0}, {0, 1, 3, 0}, {0, 0, 0, 0}, {1, 0, 0, 1}};
  agg.n_papers = {1, 1, 0, 1};
  auto d = field_distance_matrix(agg, Provenance::references);
  d.validate();
  auto text = d.to_tsv();
  CHECK(text.rfind("# provenance: references", 0) == 0);
  auto r = DistanceMatrix::parse_tsv(text);
  CHECK(r.provenance() == Provenance::references);
  CHECK(r.availability() == d.availability());
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (d.available(static_cast<FieldId>(i)) && d.available(static_cast<FieldId>(j))) {
        CHECK(r(i, j) == doctest::Approx(d(i, j)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("random aggregates give valid, scale-invariant matrices") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    FieldAggregate agg;
    agg.k = 5;
    agg.n_papers.assign(5, 1.0);
    for (int i = 0; i < 5; ++i) {
      std::vector<double> v(5);
      for (auto& x : v) x = rng.uniform() + 1e-3;
      agg.vectors.push_back(v);
    }
    auto d = field_distance_matrix(agg, Provenance::citations);
    d.validate();
    auto scaled = agg;
    for (auto& x : scaled.vectors[2]) x *= 10.0;
    auto e = field_distance_matrix(scaled, Provenance::citations);
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(e(2, j) - d(2, j)) < 1e-12);
  }
}
