#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "idr/fieldspace.hpp"
#include "idr/interdisc.hpp"
#include "idr/synth.hpp"

using namespace idr;

namespace {

LdaSynthConfig small_lda() {
  LdaSynthConfig c;
  c.k = 4;
  c.v = 80;
  c.n_docs = 200;
  c.doc_length = 30;
  c.seed = 3;
  return c;
}

CitationSynthConfig small_citation() {
  CitationSynthConfig c;
  c.n_grants = 150;
  c.background_per_field_year = 8;
  c.refs_per_paper = 15;
  c.citers_per_paper = 4;
  c.abstract_length = 40;
  return c;
}

}  // namespace

TEST_CASE("lda corpus is deterministic under the seed") {
  auto a = gen_lda_corpus(small_lda());
  auto b = gen_lda_corpus(small_lda());
  CHECK(a.truth == b.truth);
  REQUIRE(a.docs.size() == b.docs.size());
  for (std::size_t i = 0; i < a.docs.size(); ++i) CHECK(a.docs[i].text == b.docs[i].text);
  auto cfg = small_lda();
  cfg.seed = 4;
  CHECK_FALSE(gen_lda_corpus(cfg).truth == a.truth);
}

TEST_CASE("disjoint vocabularies stay inside the label blocks") {
  auto cfg = small_lda();
  cfg.k = 2;
  cfg.disjoint_vocab = true;
  cfg.label_multiplicity = {1.0};
  auto c = gen_lda_corpus(cfg);
  const std::size_t block = cfg.v / cfg.k;
  for (const auto& d : c.docs) {
    REQUIRE(d.labels.size() == 1);
    std::size_t pos = 0;
    while (pos < d.text.size()) {
      auto end = d.text.find(' ', pos);
      if (end == std::string::npos) end = d.text.size();
      const auto id = static_cast<std::size_t>(std::stoul(d.text.substr(pos + 1, end - pos - 1)));
      CHECK(id / block == static_cast<std::size_t>(d.labels[0]));
      pos = end + 1;
    }
  }
  CHECK_THROWS_AS(([] {
                    auto bad = small_lda();
                    bad.doc_length = 0;
                    gen_lda_corpus(bad);
                  }()),
                  Error);
}

TEST_CASE("label frequencies match the planted priors") {
  LdaSynthConfig cfg;
  cfg.k = 5;
  cfg.v = 50;
  cfg.n_docs = 2000;
  cfg.doc_length = 5;
  auto c = gen_lda_corpus(cfg);
  const double n = static_cast<double>(cfg.n_docs);
  std::vector<double> mult(3, 0.0), field(cfg.k, 0.0);
  for (const auto& d : c.docs) {
    mult[d.labels.size() - 1] += 1.0;
    for (FieldId f : d.labels) field[static_cast<std::size_t>(f)] += 1.0;
  }
  for (std::size_t m = 0; m < 3; ++m) {
    const double p = cfg.label_multiplicity[m];
    CHECK(std::abs(mult[m] / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  }
  const double mean_m = 1 * 0.5 + 2 * 0.3 + 3 * 0.2;
  const double p = mean_m / static_cast<double>(cfg.k);
  for (double f : field) CHECK(std::abs(f / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("ground truth round-trips through JSON") {
  auto c = gen_lda_corpus(small_lda());
  c.truth.params["x"] = 0.125;
  c.truth.grant_level["g1"] = 0.3;
  testutil::TempDir dir("truth");
  c.truth.save(dir.file("gt.json"));
  CHECK(GroundTruth::load(dir.file("gt.json")) == c.truth);
}

TEST_CASE("generated citation corpora ingest without rejections") {
  auto c = gen_citation_corpus(small_citation());
  testutil::TempDir dir("synth_ingest");
  write_synth_corpus(c.store, c.truth, dir.str());
  IngestOptions o;
  o.year_min = 1980;
  o.year_max = 2020;
  auto r = ingest_directory(dir.str(), o);
  CHECK(r.report.rejections.empty());
  CHECK(r.report.papers.dropped == 0);
  CHECK(r.report.grants.dropped == 0);
  CHECK(r.report.links.dropped == 0);
  CHECK(r.store.links().size() == c.store.links().size());
  CHECK(r.store.core_papers().size() == c.store.core_papers().size());
  CHECK(std::filesystem::exists(dir.file("groundtruth.json")));
}

TEST_CASE("no mixing gives zero paper RS") {
  auto cfg = small_citation();
  cfg.mixing = 0.0;
  auto c = gen_citation_corpus(cfg);
  FieldAggregate agg = field_aggregates(c.store, VectorMode::references);
  auto d = field_distance_matrix(agg, Provenance::references);
  for (const Paper* p : c.store.core_papers()) {
    auto v = paper_field_vector(*p, VectorMode::references, c.store);
    CHECK(rao_stirling(v.probs, d) == 0.0);
  }
}

TEST_CASE("full uniform mixing spreads references over the other fields") {
  auto cfg = small_citation();
  cfg.mixing = 1.0;
  cfg.uniform_cross = true;
  cfg.refs_per_paper = 200;
  cfg.background_per_field_year = 40;
  auto c = gen_citation_corpus(cfg);
  std::vector<double> mean(cfg.k, 0.0);
  std::size_t n = 0;
  for (const Paper* p : c.store.core_papers()) {
    auto v = paper_field_vector(*p, VectorMode::references, c.store).probs;
    CHECK(v[static_cast<std::size_t>(primary_field(*p))] == 0.0);
    const auto own = static_cast<std::size_t>(primary_field(*p));
    for (std::size_t f = 1; f < cfg.k; ++f) mean[f] += v[(own + f) % cfg.k];
    ++n;
  }
  for (std::size_t f = 1; f < cfg.k; ++f) CHECK(mean[f] / n == doctest::Approx(1.0 / (cfg.k - 1)).epsilon(0.05));
}
