#include <doctest.h>

#include <cmath>

#include "idr/common.hpp"
#include "idr/random.hpp"
#include "idr/text.hpp"

using namespace idr;

TEST_CASE("tokenize lowercases, drops stop words and stems") {
  CHECK(tokenize("Financial accounting manages corporations.") ==
        std::vector<std::string>{"financi", "account", "manag", "corpor"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("the of and").empty());
  CHECK(tokenize("a b x1 Z").size() == 1);  // only "x1" reaches length 2
}

TEST_CASE("porter stemmer reference pairs") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("hopping") == "hop");
  CHECK(porter_stem("generalizations") == "gener");
  CHECK(porter_stem("sky") == "sky");
}

TEST_CASE("raw word count splits on whitespace") {
  CHECK(raw_word_count("") == 0);
  CHECK(raw_word_count("  one\ttwo\nthree  ") == 3);
}

TEST_CASE("field distributions validate their input") {
  CHECK_THROWS_AS(FieldDistribution::from_probs({0.5, 0.6}), Error);
  CHECK_THROWS_AS(FieldDistribution::from_probs({1.5, -0.5}), Error);
  CHECK_THROWS_AS(FieldDistribution::normalize({0.0, 0.0}), Error);
  auto d = FieldDistribution::normalize({1.0, 3.0});
  CHECK(d[0] == doctest::Approx(0.25));
  CHECK(FieldDistribution::unit(3, 2).vec() == std::vector<double>{0, 0, 1});
  CHECK(FieldDistribution::from_probs({0.4, 0.4, 0.2}).argmax() == 0);
}

TEST_CASE("cosine similarity") {
  std::vector<double> a{1, 1}, b{1, 0};
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("named sub-streams are reproducible and distinct") {
  Rng root(42);
  auto a1 = root.stream("a"), a2 = root.stream("a"), b = root.stream("b");
  const auto x = a1();
  CHECK(x == a2());
  CHECK(x != b());
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("fnv1a matches the published test vector") {
  Fnv1a h;
  h.update("a");
  CHECK(h.digest() == 0xaf63dc4c8601ec8cULL);
}
