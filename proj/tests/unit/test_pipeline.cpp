#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "idr/pipeline.hpp"
#include "idr/synth.hpp"

using namespace idr;

namespace {

struct Fixture {
  CitationSynthCorpus corpus;
  DistanceMatrix d;
  LdaModel model;
  AnalysisInputs in;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    CitationSynthConfig c;
    c.n_grants = 300;
    c.background_per_field_year = 10;
    c.refs_per_paper = 20;
    c.abstract_length = 60;
    x.corpus = gen_citation_corpus(c);
    const auto& store = x.corpus.store;
    x.d = field_distance_matrix(field_aggregates(store, VectorMode::citations), Provenance::citations);

    auto docs = build_training_set(store, 50);
    TrainOptions o;
    o.iterations = 30;
    o.burn_in = 15;
    x.model = train(encode_training_set(docs, 2), store.k(), o);
    InferOptions io;
    io.iterations = 30;
    io.burn_in = 15;
    auto vectors = infer_grant_vectors(store, x.model, RenormPolicy::parse("threshold"), io);

    auto papers = score_papers(store, x.d, VectorMode::references);
    auto cits = score_papers(store, x.d, VectorMode::citations);
    auto grants = score_grants(vectors, x.d);
    x.in.store = &x.corpus.store;
    x.in.scores = papers.rows;
    x.in.scores.insert(x.in.scores.end(), cits.rows.begin(), cits.rows.end());
    x.in.scores.insert(x.in.scores.end(), grants.rows.begin(), grants.rows.end());
    x.in.grant_vectors = vectors;
    x.in.impact = compute_impact(store);
    return x;
  }();
  return f;
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("scores CSV round-trips") {
  std::vector<ScoreRow> rows{{"p1", "paper", ScoreBasis::references, 0.123456789, 2},
                             {"g1", "grant", ScoreBasis::grant_abstract, 0.5, 5}};
  auto text = scores_csv(rows);
  CHECK(text.find("subject_id,subject_type,basis,rs_value,quantile_bin") != std::string::npos);
  CHECK(text.find("0.123456789") != std::string::npos);
  auto back = parse_scores_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].subject == "p1");
  CHECK(back[1].basis == ScoreBasis::grant_abstract);
  CHECK(back[1].bin == 5);
  CHECK_THROWS_AS(parse_scores_csv("subject_id,subject_type,basis,rs_value,quantile_bin\np,paper,refs,x,1\n"), Error);
}

TEST_CASE("quintiles are assigned within type and basis") {
  std::vector<ScoreRow> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({"p" + std::to_string(i), "paper", ScoreBasis::references, i * 0.1, 0});
  for (int i = 0; i < 5; ++i) rows.push_back({"g" + std::to_string(i), "grant", ScoreBasis::grant_abstract, 0.9 - i * 0.1, 0});
  assign_quintiles(rows);
  CHECK(rows[0].bin == 1);
  CHECK(rows[9].bin == 5);
  CHECK(rows[10].bin == 5);
  CHECK(rows[14].bin == 1);
}

TEST_CASE("paper scores cover every core paper with a basis") {
  const auto& f = fixture();
  auto s = score_papers(f.corpus.store, f.d, VectorMode::references);
  std::size_t skipped = 0;
  for (const auto& [k, v] : s.skipped) skipped += v;
  CHECK(s.rows.size() + skipped == f.corpus.store.core_papers().size());
  for (const auto& r : s.rows) {
    CHECK(r.rs >= 0.0);
    CHECK(r.rs < 1.0);
    CHECK((r.bin >= 1 && r.bin <= 5));
  }
}

TEST_CASE("grant vectors do not depend on the thread count and round-trip") {
  const auto& f = fixture();
  InferOptions io;
  io.iterations = 20;
  io.burn_in = 10;
  const auto policy = RenormPolicy::parse("threshold");
  auto one = infer_grant_vectors(f.corpus.store, f.model, policy, io, 1);
  auto three = infer_grant_vectors(f.corpus.store, f.model, policy, io, 3);
  CHECK(grant_vectors_tsv(one) == grant_vectors_tsv(three));

  testutil::TempDir dir("gv");
  testutil::write_file(dir.file("gv.tsv"), grant_vectors_tsv(one));
  auto back = load_grant_vectors(dir.file("gv.tsv"));
  REQUIRE(back.rows.size() == one.rows.size());
  CHECK(back.unscorable == one.unscorable);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(back.rows[i].grant == one.rows[i].grant);
    CHECK(back.rows[i].vector.probs == one.rows[i].vector.probs);
  }
}

TEST_CASE("every figure renders from complete inputs") {
  const auto& f = fixture();
  FigureOptions o;
  o.min_cell_n = 2;
  for (const auto& id : figure_ids()) {
    CAPTURE(id);
    std::string csv;
    CHECK_NOTHROW(csv = figure_csv(id, f.in, o));
    CHECK(csv.rfind("# " + id, 0) == 0);
    CHECK(data_rows(csv) > 0);
  }
  CHECK_THROWS_AS(figure_csv("fig9z", f.in, o), Error);
}

TEST_CASE("figures name their missing inputs") {
  const auto& f = fixture();
  FigureOptions o;
  AnalysisInputs empty;
  empty.store = f.in.store;
  CHECK_THROWS_WITH_AS(figure_csv("fig3a", empty, o), doctest::Contains("missing scores input"), Error);
  AnalysisInputs no_impact = f.in;
  no_impact.impact.reset();
  CHECK_THROWS_WITH_AS(figure_csv("fig2c", no_impact, o), doctest::Contains("missing impact input"), Error);
  AnalysisInputs no_vectors = f.in;
  no_vectors.grant_vectors.reset();
  CHECK_THROWS_WITH_AS(figure_csv("fig4e", no_vectors, o), doctest::Contains("missing grant vectors input"), Error);
}

TEST_CASE("regression tables") {
  const auto& f = fixture();
  for (const auto& id : table_ids()) {
    CAPTURE(id);
    auto t = regression_table(id, f.in);
    REQUIRE(t.results.size() == t.models.size());
    CHECK(t.results.size() >= 3);
    const auto n = t.results[0].n;
    for (const auto& r : t.results) {
      CHECK(r.n == n);
      CHECK((r.r2 >= 0.0 && r.r2 <= 1.0));
      for (const auto& [name, v] : r.vif) CHECK(v >= 1.0);
    }
    auto csv = regression_csv(id, t);
    CHECK(csv.find("model,term,estimate,se,t,p,vif") != std::string::npos);
  }
  auto s3 = regression_table("tableS3", f.in);
  bool has_year = false;
  for (const auto& name : s3.results[0].names) has_year |= name.rfind("year=", 0) == 0;
  CHECK(has_year);
}
