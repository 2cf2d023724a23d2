// Acceptance suite: one PASS/FAIL line per primary criterion.
#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "idr/analysis.hpp"
#include "idr/corpus.hpp"
#include "idr/fieldspace.hpp"
#include "idr/impact.hpp"
#include "idr/interdisc.hpp"
#include "idr/lda.hpp"
#include "idr/pipeline.hpp"
#include "idr/random.hpp"
#include "idr/synth.hpp"

#ifndef IDR_CLI_PATH
#error "IDR_CLI_PATH must name the idr executable"
#endif

using namespace idr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> random_simplex(Rng& rng, std::size_t k, bool sparse) {
  std::vector<double> v(k);
  for (auto& x : v) x = (sparse && rng.uniform() < 0.4) ? 0.0 : rng.uniform();
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[rng.below(k)] = 1.0;
  return v;
}

DistanceMatrix random_distances(Rng& rng, std::size_t k) {
  DistanceMatrix d(k, Provenance::citations);
  for (std::size_t i = 0; i < k; ++i) {
    d.set(i, i, 0.0);
    for (std::size_t j = i + 1; j < k; ++j) {
      const double x = rng.uniform();
      d.set(i, j, x);
      d.set(j, i, x);
    }
  }
  return d;
}

double rs_oracle(const FieldDistribution& p, const DistanceMatrix& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i != j) s += p[i] * p[j] * d(i, j);
    }
  }
  return s;
}

Outcome rao_stirling_oracle() {
  const auto t0 = Clock::now();
  Rng rng = Rng(1).stream("rs-oracle");
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.below(9);
    const auto p = FieldDistribution::normalize(random_simplex(rng, k, trial % 2 == 0));
    const auto d = random_distances(rng, k);
    worst = std::max(worst, std::abs(rao_stirling(p, d) - rs_oracle(p, d)));
  }
  bool closed = true;
  double worst_uniform = 0.0;
  for (std::size_t k = 2; k <= 10; ++k) {
    DistanceMatrix ones(k, Provenance::citations);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) ones.set(i, j, i == j ? 0.0 : 1.0);
    }
    for (std::size_t f = 0; f < k; ++f) closed &= rao_stirling(FieldDistribution::unit(k, static_cast<FieldId>(f)), ones) == 0.0;
    const double u = rao_stirling(FieldDistribution::normalize(std::vector<double>(k, 1.0)), ones);
    // 1/K is not representable for most K, so exact means within one ulp of 1 - 1/K.
    const double expected = 1.0 - 1.0 / static_cast<double>(k);
    const double ulp = std::nextafter(expected, 2.0) - expected;
    worst_uniform = std::max(worst_uniform, std::abs(u - expected) / ulp);
  }
  closed &= worst_uniform <= 1.0;
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && closed && secs < 5.0,
          fmt("max |engine - oracle| = %.2e over 1000 cases; unit = 0; uniform = 1-1/K within %.0f ulp; %.3f s", worst,
              worst_uniform, secs)};
}

Outcome distance_matrix_properties() {
  Rng rng = Rng(1).stream("distance-properties");
  bool symmetric = true, zero_diag = true, in_range = true;
  double worst_scale = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(12);
    const std::size_t dim = 2 + rng.below(20);
    FieldAggregate agg;
    agg.k = k;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> v(dim);
      for (auto& x : v) x = rng.uniform() < 0.3 ? 0.0 : 100.0 * rng.uniform();
      v[rng.below(dim)] += 1.0;
      agg.vectors.push_back(v);
      agg.n_papers.push_back(1.0);
    }
    const auto d = field_distance_matrix(agg, Provenance::citations);
    for (std::size_t i = 0; i < k; ++i) {
      zero_diag &= d(i, i) == 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        symmetric &= d(i, j) == d(j, i);
        in_range &= d(i, j) >= 0.0 && d(i, j) <= 1.0;
      }
    }
    for (double c : {0.5, 2.0, 10.0, 1e6}) {
      for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> scaled = agg.vectors[i];
        for (auto& x : scaled) x *= c;
        for (std::size_t j = 0; j < k; ++j) {
          const double dij = 1.0 - cosine_similarity(scaled, agg.vectors[j]);
          worst_scale = std::max(worst_scale, std::abs(dij - d(i, j)));
        }
      }
    }
  }
  return {symmetric && zero_diag && in_range && worst_scale <= 1e-12,
          fmt("symmetric=%d zero_diagonal=%d in_[0,1]=%d; max scale deviation %.2e", symmetric, zero_diag, in_range,
              worst_scale)};
}

Outcome lda_recovery() {
  double sum_tv = 0.0, worst_secs = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    LdaSynthConfig c;
    c.seed = seed;
    const auto corpus = gen_lda_corpus(c);
    const auto t0 = Clock::now();
    const auto enc = encode_training_set(corpus.docs, 5);
    TrainOptions o;
    o.iterations = 500;
    o.burn_in = 250;
    o.seed = seed;
    o.threads = 1;
    const auto model = train(enc, c.k, o);
    worst_secs = std::max(worst_secs, seconds_since(t0));
    const double tv = matched_topic_tv(corpus.truth, model);
    sum_tv += tv;
    per_seed += fmt(" %.3f", tv);
  }
  const double mean_tv = sum_tv / 5.0;
  return {mean_tv < 0.15 && worst_secs < 120.0,
          fmt("mean TV %.4f (seeds:%s) < 0.15; slowest training %.1f s", mean_tv, per_seed.c_str(), worst_secs)};
}

Outcome model_validation() {
  LdaSynthConfig c;
  c.k = 50;
  c.v = 1000;
  c.n_docs = 4000;
  c.label_multiplicity = {0.7, 0.2, 0.1};
  c.seed = 1;
  const auto corpus = gen_lda_corpus(c);
  const std::size_t n_held = corpus.docs.size() / 10;
  std::vector<LabeledDocument> train_docs(corpus.docs.begin(), corpus.docs.end() - static_cast<long>(n_held));
  std::vector<LabeledDocument> held(corpus.docs.end() - static_cast<long>(n_held), corpus.docs.end());
  TrainOptions o;
  o.iterations = 300;
  o.burn_in = 150;
  const auto model = train(encode_training_set(train_docs, 5), c.k, o);
  InferOptions io;
  io.iterations = 200;
  io.burn_in = 100;
  const auto prec = eval_multilabel_precision(model, held, 0, io);
  const auto dist = eval_label_distance(model, held, lda_field_distance(model), io, 200);
  const bool prec_ok = prec.precision >= 20.0 * prec.random_baseline;
  const bool dist_ok = dist.mean_distance < dist.shuffled_baseline && dist.p_value < 0.01;
  return {prec_ok && dist_ok,
          fmt("precision %.3f vs baseline %.4f (%.1fx); label distance %.3f vs shuffled %.3f, p = %.4f (%zu perms)",
              prec.precision, prec.random_baseline, prec.precision / prec.random_baseline, dist.mean_distance,
              dist.shuffled_baseline, dist.p_value, dist.permutations)};
}

Outcome reference_citation_agreement() {
  CitationSynthConfig c;
  c.seed = 1;
  const auto corpus = gen_citation_corpus(c);
  const auto dref = field_distance_matrix(field_aggregates(corpus.store, VectorMode::references), Provenance::references);
  const auto dcit = field_distance_matrix(field_aggregates(corpus.store, VectorMode::citations), Provenance::citations);
  const double r = compare_distance_matrices(dref, dcit);
  return {r > 0.9, fmt("Pearson r = %.4f > 0.9", r)};
}

std::vector<ImpactRecord> stratum(const std::vector<int>& c10s, int year = 2000) {
  std::vector<ImpactRecord> out;
  for (std::size_t i = 0; i < c10s.size(); ++i) {
    ImpactRecord r;
    r.paper_id = "p" + std::to_string(i);
    r.year = year;
    r.stratum = {0, year};
    r.c10 = c10s[i];
    out.push_back(r);
  }
  return out;
}

std::size_t count_hits(const std::vector<ImpactRecord>& records) {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.hit; }));
}

Outcome hit_flag_construction() {
  Rng rng = Rng(1).stream("hit-flags");
  std::vector<int> distinct(1000);
  std::iota(distinct.begin(), distinct.end(), 0);
  std::shuffle(distinct.begin(), distinct.end(), rng);
  auto a = stratum(distinct);
  hit_flags(a);
  const auto distinct_hits = count_hits(a);

  auto tied = stratum(std::vector<int>(1000, 7));
  hit_flags(tied);
  const auto tied_hits = count_hits(tied);

  double worst_excess = -1.0;
  for (int s = 0; s < 200; ++s) {
    const std::size_t n = 1 + rng.below(1500);
    const int range = 1 + static_cast<int>(rng.below(s % 3 == 0 ? 5 : 500));
    std::vector<int> values(n);
    for (auto& v : values) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(range)));
    auto rec = stratum(values, 1990 + s);
    hit_flags(rec);
    const double share = static_cast<double>(count_hits(rec)) / static_cast<double>(n);
    worst_excess = std::max(worst_excess, share - (0.05 + 1.0 / static_cast<double>(n)));
  }
  return {distinct_hits == 50 && tied_hits == 0 && worst_excess <= 0.0,
          fmt("distinct -> %zu hits, tied -> %zu hits; max share - (5%% + 1/n) = %.4f over 200 strata", distinct_hits,
              tied_hits, worst_excess)};
}

// Gauss-Jordan inverse with partial pivoting.
Eigen::MatrixXd brute_inverse(Eigen::MatrixXd a) {
  const auto n = a.rows();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    a.row(c).swap(a.row(piv));
    inv.row(c).swap(inv.row(piv));
    const double pv = a(c, c);
    a.row(c) /= pv;
    inv.row(c) /= pv;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      a.row(r) -= f * a.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv;
}

Outcome ols_oracle() {
  std::mt19937_64 gen(Rng::mix(1));
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 200;
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int p = 1 + inst % 8;
    Eigen::MatrixXd x(n, p + 1);
    Eigen::VectorXd y(n);
    std::vector<std::string> names{"(intercept)"};
    for (int j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      for (int j = 1; j <= p; ++j) x(i, j) = normal(gen) * (1.0 + j);
      y(i) = normal(gen) * 3.0 + 2.0;
    }
    const auto r = ols_matrix(x, y, names, true);
    const Eigen::MatrixXd xtx_inv = brute_inverse(x.transpose() * x);
    const Eigen::VectorXd b = xtx_inv * (x.transpose() * y);
    const Eigen::VectorXd resid = y - x * b;
    const double sigma2 = resid.squaredNorm() / static_cast<double>(n - p - 1);
    for (int j = 0; j <= p; ++j) {
      worst = std::max(worst, std::abs(r.coef[static_cast<std::size_t>(j)] - b(j)));
      worst = std::max(worst, std::abs(r.se[static_cast<std::size_t>(j)] - std::sqrt(sigma2 * xtx_inv(j, j))));
    }
  }

  // Planted recovery: the focal slope of each trial is checked against 2 SE.
  int covered = 0;
  const std::vector<double> beta{1.0, 0.5, -2.0, 0.25};
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd x(n, 4);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      for (int j = 1; j < 4; ++j) x(i, j) = normal(gen);
      y(i) = normal(gen);
      for (int j = 0; j < 4; ++j) y(i) += beta[static_cast<std::size_t>(j)] * x(i, j);
    }
    const auto r = ols_matrix(x, y, {"(intercept)", "x1", "x2", "x3"}, true);
    if (std::abs(r.coef[1] - beta[1]) <= 2.0 * r.se[1]) ++covered;
  }

  // Zero-mean mutually orthogonal columns (Walsh functions on 16 points).
  Eigen::MatrixXd orth(16, 4);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 4; ++j) orth(i, j) = ((i >> j) & 1) ? 1.0 : -1.0;
  }
  const auto v = vif(orth);
  const bool vif_ok = std::all_of(v.begin(), v.end(), [](double x) { return x == 1.0; });

  return {worst <= 1e-8 && covered >= 95 && vif_ok,
          fmt("max |coef/se - normal equations| = %.2e over 50 instances; 2-SE coverage %d/100; orthogonal VIF == 1: %d",
              worst, covered, vif_ok)};
}

Outcome end_to_end_directions() {
  const auto t0 = Clock::now();
  const fs::path dir = fs::temp_directory_path() / ("idr_accept_e2e_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  CitationSynthConfig c;
  c.seed = 1;
  {
    const auto synth = gen_citation_corpus(c);
    write_synth_corpus(synth.store, synth.truth, dir.string());
  }
  const auto ingested = ingest_directory(dir.string());
  fs::remove_all(dir);
  const auto& store = ingested.store;

  TrainOptions to;
  to.iterations = 300;
  to.burn_in = 150;
  to.seed = 1;
  const auto model = train(encode_training_set(build_training_set(store, 100), 5), store.k(), to);
  const auto dcit = field_distance_matrix(field_aggregates(store, VectorMode::citations), Provenance::citations);
  InferOptions io;
  io.iterations = 300;
  io.burn_in = 150;
  io.seed = 1;
  const auto gv = infer_grant_vectors(store, model, RenormPolicy{}, io);

  AnalysisInputs in;
  in.store = &store;
  in.scores = score_papers(store, dcit, VectorMode::references).rows;
  const auto gs = score_grants(gv, dcit).rows;
  in.scores.insert(in.scores.end(), gs.begin(), gs.end());
  assign_quintiles(in.scores);
  in.grant_vectors = gv;
  in.impact = compute_impact(store);
  const auto t = build_analysis_table(in);

  auto rho = [](const BinnedSeries& s) { return spearman(s.x_mean, s.mean); };
  const double rho_2b = rho(bin_curve(t.pair_grant_rs, t.pair_paper_rs, 5));
  const double rho_2d = rho(bin_curve(t.grant_rs, t.grant_papers, 5));
  const double rho_2e = rho(bin_curve(t.grant_rs, t.grant_hit_rate, 5));
  const auto h = quintile_heatmap(t.pair_paper_rs, t.pair_grant_rs, t.pair_hit);
  const auto cell = h.argmax();
  const auto four = fourway_grant_combo(t.multi_grant);
  const bool top_ok = !four.top.ranking.empty() && four.top.ranking[0] == Combo::proximate_disciplinary;
  const double secs = seconds_since(t0);
  const bool ok = rho_2b > 0.0 && rho_2d < 0.0 && rho_2e < 0.0 && cell == std::make_pair(5, 1) && top_ok && secs < 300.0;
  return {ok, fmt("fig2b rho %.2f > 0; fig2d rho %.2f < 0; fig2e rho %.2f < 0; heatmap argmax (%d,%d); fig4e top %s; "
                  "%.1f s",
                  rho_2b, rho_2d, rho_2e, cell.first, cell.second,
                  four.top.ranking.empty() ? "none" : to_string(four.top.ranking[0]).c_str(), secs)};
}

int run_cli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" IDR_CLI_PATH "' " + args + " --seed 5 --threads 1 >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / ("idr_accept_det_" + std::to_string(::getpid()));
  const std::string inputs =
      "--data ing --scores s_ref/scores.csv --scores s_cit/scores.csv --scores s_grant/scores.csv "
      "--impact imp/impact.csv --grant-vectors gv/grant_vectors.tsv";
  const std::vector<std::string> stages{
      "synth --preset lda-recovery --n-docs 300 --out lsyn",
      "synth --preset citation --n-grants 300 --out syn",
      "ingest --data syn --out ing",
      "train --data ing --iterations 40 --burn-in 20 --holdout 0.1 --out model",
      "infer-grants --data ing --model model/model.bin --iterations 40 --burn-in 20 --out gv",
      "distances --data ing --basis citations --out d_cit",
      "distances --data ing --basis references --out d_ref",
      "distances --data ing --basis lda --model model/model.bin --out d_lda",
      "score --data ing --distances d_cit/distances.tsv --basis references --out s_ref",
      "score --data ing --distances d_cit/distances.tsv --basis citations --out s_cit",
      "score --data ing --distances d_cit/distances.tsv --basis grant-abstract --grant-vectors gv/grant_vectors.tsv "
      "--out s_grant",
      "impact --data ing --out imp",
      "analyze all " + inputs + " --out figs",
      "regress tableS2 " + inputs + " --out s2",
      "regress tableS3 " + inputs + " --out s3",
      "eval-model --data ing --model model/model.bin --distances d_cit/distances.tsv --holdout model/holdout.txt "
      "--iterations 40 --burn-in 20 --permutations 50 --out eval",
  };
  std::string failed_stage;
  for (const char* run : {"a", "b"}) {
    fs::create_directories(root / run);
    for (const auto& s : stages) {
      if (run_cli(root / run, s) != 0 && failed_stage.empty()) failed_stage = s;
    }
  }
  std::size_t compared = 0, differing = 0;
  std::string first_diff;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root / "a");
    ++compared;
    if (!fs::exists(root / "b" / rel) || slurp(e.path()) != slurp(root / "b" / rel)) {
      ++differing;
      if (first_diff.empty()) first_diff = rel.string();
    }
  }
  fs::remove_all(root);
  if (!failed_stage.empty()) return {false, "stage failed: " + failed_stage};
  return {differing == 0 && compared > 0,
          fmt("%zu stages x 2 runs; %zu files compared, %zu differ%s%s", stages.size(), compared, differing,
              first_diff.empty() ? "" : "; first: ", first_diff.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"rao-stirling-oracle", rao_stirling_oracle},
      {"distance-matrix-properties", distance_matrix_properties},
      {"labeled-lda-recovery", lda_recovery},
      {"model-validation", model_validation},
      {"reference-citation-agreement", reference_citation_agreement},
      {"hit-flag-construction", hit_flag_construction},
      {"ols-oracle", ols_oracle},
      {"end-to-end-directions", end_to_end_directions},
      {"cli-determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
