// idr: command-line front end for the interdisciplinarity pipeline.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "idr/corpus.hpp"
#include "idr/fieldspace.hpp"
#include "idr/impact.hpp"
#include "idr/interdisc.hpp"
#include "idr/lda.hpp"
#include "idr/pipeline.hpp"
#include "idr/random.hpp"
#include "idr/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  std::string command;
  json config = json::object();
  std::map<std::string, std::string> inputs;  // path -> hash
  std::set<std::string> outputs;
  std::string out_dir;

  void input(const std::string& path) { inputs[path] = idr::file_hash(path); }

  void data_dir(const std::string& dir) {
    for (const char* f : {"papers.jsonl", "grants.jsonl", "links.jsonl", "taxonomy.tsv"}) {
      const auto p = (fs::path(dir) / f).string();
      if (fs::exists(p)) input(p);
    }
  }

  std::string path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw idr::Error("cannot write " + path(name));
    out << content;
    outputs.insert(name);
  }

  void finish() {
    json m;
    m["command"] = command;
    m["config"] = config;
    json in = json::object();
    for (const auto& [p, h] : inputs) in[p] = h;
    m["inputs"] = in;
    m["outputs"] = std::vector<std::string>(outputs.begin(), outputs.end());
    std::ofstream out(path("manifest.json"));
    out << m.dump(2) << '\n';
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw idr::Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct IngestFlags {
  int year_min = 1985;
  int year_max = 2009;
  bool no_filter = false;

  void add(CLI::App* app) {
    app->add_option("--year-min", year_min, "First publication/start year kept")->capture_default_str();
    app->add_option("--year-max", year_max, "Last publication/start year kept")->capture_default_str();
    app->add_flag("--no-analysis-filter", no_filter, "Keep core papers without references or citers");
  }

  idr::IngestOptions options() const { return {year_min, year_max, !no_filter}; }

  void record(Run& run) const {
    run.config["year_min"] = year_min;
    run.config["year_max"] = year_max;
    run.config["analysis_filter"] = !no_filter;
  }
};

idr::IngestResult load(const std::string& data, const IngestFlags& flags, Run& run) {
  run.config["data"] = data;
  flags.record(run);
  run.data_dir(data);
  auto result = idr::ingest_directory(data, flags.options());
  spdlog::info("loaded {} papers ({} core), {} grants, {} links", result.store.papers().size(),
               result.store.core_papers().size(), result.store.grants().size(), result.store.links().size());
  return result;
}

std::vector<std::string> read_ids(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ids.push_back(line);
  }
  return ids;
}

std::string top_words_tsv(const idr::LdaModel& model, const idr::FieldTaxonomy& tax, std::size_t n) {
  std::ostringstream out;
  out << "# top words per field by probability and by FREX\n";
  out << "field_id\tfield\trank\tprobability\tfrex\n";
  for (std::size_t k = 0; k < model.k; ++k) {
    const auto prob = idr::top_words(model, static_cast<idr::FieldId>(k), n, idr::RankMode::probability);
    const auto frex = idr::top_words(model, static_cast<idr::FieldId>(k), n, idr::RankMode::frex);
    for (std::size_t r = 0; r < std::min(prob.size(), frex.size()); ++r) {
      out << k << '\t' << tax.name(static_cast<idr::FieldId>(k)) << '\t' << r + 1 << '\t' << prob[r].token << '\t'
          << frex[r].token << '\n';
    }
  }
  return out.str();
}

idr::AnalysisInputs analysis_inputs(const idr::CorpusStore& store, const std::vector<std::string>& scores,
                                    const std::string& impact, const std::string& grant_vectors, Run& run) {
  idr::AnalysisInputs in;
  in.store = &store;
  for (const auto& s : scores) {
    run.input(s);
    const auto rows = idr::load_scores(s);
    in.scores.insert(in.scores.end(), rows.begin(), rows.end());
  }
  if (!impact.empty()) {
    run.input(impact);
    in.impact = idr::load_impact(impact);
  }
  if (!grant_vectors.empty()) {
    run.input(grant_vectors);
    in.grant_vectors = idr::load_grant_vectors(grant_vectors);
  }
  run.config["scores"] = scores;
  run.config["impact"] = impact;
  run.config["grant_vectors"] = grant_vectors;
  return in;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("idr");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("IDR_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Interdisciplinarity of grants and papers: ingest, train, score, analyze"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "idr 0.1.0");

  Run run;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string data, out, model_path, distances_path, grant_vectors_path, impact_path, holdout_path;
  std::vector<std::string> scores_paths;
  IngestFlags ingest_flags;

  auto common = [&](CLI::App* sub, bool needs_data = true) {
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_option("--seed", seed, "Seed for every random stream")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (1 is deterministic)")->capture_default_str()->check(CLI::PositiveNumber);
    if (needs_data) {
      sub->add_option("--data", data, "Corpus directory (papers/grants/links JSONL, taxonomy.tsv)")->required();
      ingest_flags.add(sub);
    }
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and write the analysis store and report.json");
  std::string slice;
  common(ingest);
  ingest->add_option("--slice", slice, "Filter, e.g. 'agency=NSF,year<2000'");

  // train
  auto* train = app.add_subcommand("train", "Train the labeled topic model on paper abstracts");
  idr::TrainOptions train_opts;
  std::size_t min_words = 100, min_df = 5, n_top = 10;
  double holdout = 0.0;
  common(train);
  train->add_option("--iterations", train_opts.iterations, "Gibbs sweeps")->capture_default_str();
  train->add_option("--burn-in", train_opts.burn_in, "Sweeps discarded before averaging phi")->capture_default_str();
  train->add_option("--alpha", train_opts.alpha, "Document prior (<= 0 means 50/K)")->capture_default_str();
  train->add_option("--eta", train_opts.eta, "Word prior")->capture_default_str();
  train->add_option("--min-words", min_words, "Minimum abstract length in words")->capture_default_str();
  train->add_option("--min-df", min_df, "Minimum document frequency of a vocabulary token")->capture_default_str();
  train->add_option("--holdout", holdout, "Fraction of documents held out for eval-model")->capture_default_str()->check(CLI::Range(0.0, 0.9));
  train->add_option("--top-words", n_top, "Words per field in top_words.tsv")->capture_default_str();

  // infer-grants
  auto* infer = app.add_subcommand("infer-grants", "Infer renormalized field vectors from grant abstracts");
  std::string renorm = "threshold";
  double tau = -1.0;
  std::size_t keep = 3;
  idr::InferOptions infer_opts;
  common(infer);
  infer->add_option("--model", model_path, "model.bin from train")->required();
  infer->add_option("--renorm", renorm, "threshold|top|none")->capture_default_str();
  infer->add_option("--tau", tau, "Threshold (<= 0 means 1/K)")->capture_default_str();
  infer->add_option("--keep", keep, "Fields kept by the top policy")->capture_default_str();
  infer->add_option("--iterations", infer_opts.iterations, "Fold-in sweeps")->capture_default_str();
  infer->add_option("--burn-in", infer_opts.burn_in, "Sweeps before theta averaging")->capture_default_str();

  // distances
  auto* dist = app.add_subcommand("distances", "Field-to-field distance matrix");
  std::string dist_basis = "citations", assign = "primary";
  common(dist);
  dist->add_option("--basis", dist_basis, "citations|references|lda")->capture_default_str();
  dist->add_option("--assign", assign, "primary|fractional aggregation of paper vectors")->capture_default_str();
  dist->add_option("--model", model_path, "model.bin (lda basis)");

  // score
  auto* score = app.add_subcommand("score", "Rao-Stirling scores for papers or grants");
  std::string score_basis = "references";
  common(score);
  score->add_option("--distances", distances_path, "distances.tsv")->required();
  score->add_option("--basis", score_basis, "references|citations|grant-abstract")->capture_default_str();
  score->add_option("--grant-vectors", grant_vectors_path, "grant_vectors.tsv (grant-abstract basis)");

  // impact
  auto* impact = app.add_subcommand("impact", "10-year citations, normalization and hit flags");
  double top_fraction = 0.05;
  common(impact);
  impact->add_option("--top-fraction", top_fraction, "Hit share per (field, year)")->capture_default_str();

  // analyze / regress
  auto* analyze = app.add_subcommand("analyze", "Plot-ready CSV for a figure (fig2a..fig4e, or all)");
  std::string figure;
  idr::FigureOptions fig_opts;
  std::string bin_mode = "quantile", funding = "top-decile", trend_basis = "references";
  common(analyze);
  analyze->add_option("figure", figure, "Figure id")->required();
  analyze->add_option("--scores", scores_paths, "scores.csv files (repeatable)");
  analyze->add_option("--impact", impact_path, "impact.csv");
  analyze->add_option("--grant-vectors", grant_vectors_path, "grant_vectors.tsv");
  analyze->add_option("--bins", fig_opts.n_bins, "Bins per curve")->capture_default_str()->check(CLI::PositiveNumber);
  analyze->add_option("--bin-mode", bin_mode, "quantile|width")->capture_default_str();
  analyze->add_option("--funding", funding, "top-decile|middle-decile|quintile1..5 (fig4b)")->capture_default_str();
  analyze->add_option("--paper-fraction", fig_opts.paper_fraction, "Top/bottom paper-RS share (fig4e)")->capture_default_str();
  analyze->add_option("--quadrant-fraction", fig_opts.quadrant_fraction, "Top/bottom share (fig4d)")->capture_default_str();
  analyze->add_option("--group-by", fig_opts.group_by, "grant-support|team-size|prominence|n-fields (fig2a)")->capture_default_str();
  analyze->add_option("--trend-basis", trend_basis, "references|citations (fig2a)")->capture_default_str();
  analyze->add_option("--min-cell-n", fig_opts.min_cell_n, "Heatmap cells below this are flagged")->capture_default_str();

  auto* regress = app.add_subcommand("regress", "OLS regression table (tableS2, tableS3)");
  std::string table;
  common(regress);
  regress->add_option("table", table, "Table id")->required();
  regress->add_option("--scores", scores_paths, "scores.csv files (repeatable)");
  regress->add_option("--impact", impact_path, "impact.csv");
  regress->add_option("--grant-vectors", grant_vectors_path, "grant_vectors.tsv");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  std::string preset = "citation";
  std::optional<std::size_t> k_override, n_docs, n_grants;
  std::optional<double> mixing;
  bool uniform_cross = false;
  common(synth, false);
  synth->add_option("--preset", preset, "lda-recovery|citation")->capture_default_str();
  synth->add_option("--k", k_override, "Number of fields");
  synth->add_option("--n-docs", n_docs, "Documents (lda-recovery)");
  synth->add_option("--n-grants", n_grants, "Grants (citation)");
  synth->add_option("--mixing", mixing, "Fixed reference mixing in [0,1] (citation)");
  synth->add_flag("--uniform-cross", uniform_cross, "Uniform cross-field targets (citation)");

  // eval-model
  auto* eval = app.add_subcommand("eval-model", "Held-out precision and label-distance checks");
  std::size_t top_m = 0, permutations = 200;
  idr::InferOptions eval_opts;
  common(eval);
  eval->add_option("--model", model_path, "model.bin")->required();
  eval->add_option("--distances", distances_path, "distances.tsv")->required();
  eval->add_option("--holdout", holdout_path, "holdout.txt from train (default: every labeled document)");
  eval->add_option("--top-m", top_m, "Predicted fields per document (0 means |labels|)")->capture_default_str();
  eval->add_option("--permutations", permutations, "Permutations for the shuffled baseline")->capture_default_str();
  eval->add_option("--iterations", eval_opts.iterations, "Fold-in sweeps")->capture_default_str();
  eval->add_option("--burn-in", eval_opts.burn_in, "Sweeps before theta averaging")->capture_default_str();
  eval->add_option("--min-words", min_words, "Minimum abstract length in words")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fs::create_directories(out);
    run.out_dir = out;
    run.config["seed"] = seed;
    run.config["threads"] = threads;
    const idr::Rng root(seed);

    if (ingest->parsed()) {
      run.command = "ingest";
      auto result = load(data, ingest_flags, run);
      idr::CorpusStore store = std::move(result.store);
      if (!slice.empty()) {
        run.config["slice"] = slice;
        store = idr::slice_corpus(store, idr::SliceFilter::parse(slice));
      }
      idr::write_corpus(store, out);
      for (const char* f : {"papers.jsonl", "grants.jsonl", "links.jsonl", "taxonomy.tsv"}) run.outputs.insert(f);
      run.write("report.json", result.report.to_json() + "\n");
    } else if (train->parsed()) {
      run.command = "train";
      const auto result = load(data, ingest_flags, run);
      auto docs = idr::build_training_set(result.store, min_words);
      std::vector<idr::LabeledDocument> held;
      if (holdout > 0.0) {
        std::vector<std::size_t> order(docs.size());
        std::iota(order.begin(), order.end(), 0);
        auto rng = root.stream("holdout");
        std::shuffle(order.begin(), order.end(), rng);
        const auto n_held = static_cast<std::size_t>(holdout * static_cast<double>(docs.size()));
        std::vector<bool> is_held(docs.size(), false);
        for (std::size_t i = 0; i < n_held; ++i) is_held[order[i]] = true;
        std::vector<idr::LabeledDocument> kept;
        for (std::size_t i = 0; i < docs.size(); ++i) (is_held[i] ? held : kept).push_back(std::move(docs[i]));
        docs = std::move(kept);
      }
      const auto corpus = idr::encode_training_set(docs, min_df);
      train_opts.seed = root.stream("train")();
      train_opts.threads = threads;
      run.config["iterations"] = train_opts.iterations;
      run.config["burn_in"] = train_opts.burn_in;
      run.config["alpha"] = train_opts.alpha;
      run.config["eta"] = train_opts.eta;
      run.config["min_words"] = min_words;
      run.config["min_df"] = min_df;
      run.config["holdout"] = holdout;
      if (threads > 1) spdlog::warn("--threads > 1 trains with approximate parallel sweeps; output is not reproducible");
      const auto model = idr::train(corpus, result.store.k(), train_opts);
      model.save(run.path("model.bin"));
      run.outputs.insert("model.bin");
      run.write("model.json", model.provenance_json() + "\n");
      run.write("top_words.tsv", top_words_tsv(model, result.store.taxonomy(), n_top));
      if (!held.empty()) {
        std::ostringstream ids;
        ids << "# held-out document ids\n";
        for (const auto& d : held) ids << d.id << '\n';
        run.write("holdout.txt", ids.str());
      }
    } else if (infer->parsed()) {
      run.command = "infer-grants";
      const auto result = load(data, ingest_flags, run);
      run.input(model_path);
      const auto model = idr::LdaModel::load(model_path);
      const auto policy = idr::RenormPolicy::parse(renorm, tau, keep);
      infer_opts.seed = root.stream("infer-grants")();
      run.config["renorm"] = policy.name();
      run.config["tau"] = tau;
      run.config["keep"] = keep;
      run.config["iterations"] = infer_opts.iterations;
      run.config["burn_in"] = infer_opts.burn_in;
      const auto vectors = idr::infer_grant_vectors(result.store, model, policy, infer_opts, threads);
      if (vectors.unscorable > 0) spdlog::warn("{} grants have no in-vocabulary token", vectors.unscorable);
      run.write("grant_vectors.tsv", idr::grant_vectors_tsv(vectors));
    } else if (dist->parsed()) {
      run.command = "distances";
      run.config["basis"] = dist_basis;
      run.config["assign"] = assign;
      const auto prov = idr::provenance_from_string(dist_basis);
      idr::DistanceMatrix d;
      if (prov == idr::Provenance::lda) {
        if (model_path.empty()) throw idr::Error("the lda basis needs --model");
        run.input(model_path);
        d = idr::lda_field_distance(idr::LdaModel::load(model_path));
      } else {
        const auto result = load(data, ingest_flags, run);
        if (assign != "primary" && assign != "fractional") throw idr::Error("--assign must be primary or fractional");
        const auto agg = idr::field_aggregates(
            result.store, prov == idr::Provenance::references ? idr::VectorMode::references : idr::VectorMode::citations,
            assign == "primary" ? idr::AggregateAssignment::primary : idr::AggregateAssignment::fractional);
        d = idr::field_distance_matrix(agg, prov);
      }
      run.write("distances.tsv", d.to_tsv());
    } else if (score->parsed()) {
      run.command = "score";
      run.config["basis"] = score_basis;
      run.input(distances_path);
      const auto d = idr::DistanceMatrix::load_tsv(distances_path);
      const auto basis = idr::score_basis_from_string(score_basis);
      idr::ScoreSet set;
      if (basis == idr::ScoreBasis::grant_abstract) {
        if (grant_vectors_path.empty()) throw idr::Error("the grant-abstract basis needs --grant-vectors");
        run.config["data"] = data;
        run.input(grant_vectors_path);
        set = idr::score_grants(idr::load_grant_vectors(grant_vectors_path), d);
      } else {
        const auto result = load(data, ingest_flags, run);
        set = idr::score_papers(result.store, d,
                                basis == idr::ScoreBasis::references ? idr::VectorMode::references : idr::VectorMode::citations);
      }
      json skipped = json::object();
      for (const auto& [reason, n] : set.skipped) skipped[reason] = n;
      run.config["skipped"] = skipped;
      run.write("scores.csv", idr::scores_csv(set.rows));
    } else if (impact->parsed()) {
      run.command = "impact";
      run.config["top_fraction"] = top_fraction;
      const auto result = load(data, ingest_flags, run);
      run.write("impact.csv", idr::impact_csv(idr::compute_impact(result.store, top_fraction)));
    } else if (analyze->parsed()) {
      run.command = "analyze";
      const auto result = load(data, ingest_flags, run);
      const auto in = analysis_inputs(result.store, scores_paths, impact_path, grant_vectors_path, run);
      if (bin_mode != "quantile" && bin_mode != "width") throw idr::Error("--bin-mode must be quantile or width");
      fig_opts.bin_mode = bin_mode == "quantile" ? idr::BinMode::quantile : idr::BinMode::width;
      fig_opts.funding = idr::FundingSelector::parse(funding);
      fig_opts.trend_basis = idr::score_basis_from_string(trend_basis);
      run.config["figure"] = figure;
      run.config["bins"] = fig_opts.n_bins;
      run.config["bin_mode"] = bin_mode;
      run.config["funding"] = fig_opts.funding.name();
      run.config["paper_fraction"] = fig_opts.paper_fraction;
      run.config["quadrant_fraction"] = fig_opts.quadrant_fraction;
      run.config["group_by"] = fig_opts.group_by;
      run.config["trend_basis"] = trend_basis;
      run.config["min_cell_n"] = fig_opts.min_cell_n;
      std::vector<std::string> ids{figure};
      if (figure == "all") ids = idr::figure_ids();
      for (const auto& id : ids) run.write(id + ".csv", idr::figure_csv(id, in, fig_opts));
    } else if (regress->parsed()) {
      run.command = "regress";
      const auto result = load(data, ingest_flags, run);
      const auto in = analysis_inputs(result.store, scores_paths, impact_path, grant_vectors_path, run);
      run.config["table"] = table;
      run.config["transform"] = "ln(x + 1) applied after normalizing c10";
      run.write(table + ".csv", idr::regression_csv(table, idr::regression_table(table, in)));
    } else if (synth->parsed()) {
      run.command = "synth";
      run.config["preset"] = preset;
      if (preset == "lda-recovery") {
        idr::LdaSynthConfig c;
        c.seed = seed;
        if (k_override) c.k = *k_override;
        if (n_docs) c.n_docs = *n_docs;
        const auto corpus = idr::gen_lda_corpus(c);
        idr::write_synth_corpus(idr::lda_corpus_store(corpus), corpus.truth, out);
      } else if (preset == "citation") {
        idr::CitationSynthConfig c;
        c.seed = seed;
        if (k_override) c.k = *k_override;
        if (n_grants) c.n_grants = *n_grants;
        c.mixing = mixing;
        c.uniform_cross = uniform_cross;
        const auto corpus = idr::gen_citation_corpus(c);
        idr::write_synth_corpus(corpus.store, corpus.truth, out);
      } else {
        throw idr::Error("unknown preset '" + preset + "' (expected lda-recovery|citation)");
      }
      for (const char* f : {"papers.jsonl", "grants.jsonl", "links.jsonl", "taxonomy.tsv", "groundtruth.json"}) {
        run.outputs.insert(f);
      }
    } else if (eval->parsed()) {
      run.command = "eval-model";
      const auto result = load(data, ingest_flags, run);
      run.input(model_path);
      run.input(distances_path);
      const auto model = idr::LdaModel::load(model_path);
      const auto d = idr::DistanceMatrix::load_tsv(distances_path);
      auto docs = idr::build_training_set(result.store, min_words);
      if (!holdout_path.empty()) {
        run.input(holdout_path);
        const auto ids = read_ids(holdout_path);
        const std::set<std::string> keep_ids(ids.begin(), ids.end());
        std::erase_if(docs, [&](const idr::LabeledDocument& doc) { return !keep_ids.count(doc.id); });
      } else {
        spdlog::warn("no --holdout given; evaluating on every labeled document");
      }
      eval_opts.seed = root.stream("eval-model")();
      run.config["top_m"] = top_m;
      run.config["permutations"] = permutations;
      run.config["iterations"] = eval_opts.iterations;
      run.config["burn_in"] = eval_opts.burn_in;
      const auto prec = idr::eval_multilabel_precision(model, docs, top_m, eval_opts);
      const auto ld = idr::eval_label_distance(model, docs, d, eval_opts, permutations);
      json r;
      r["precision"] = {{"precision", prec.precision}, {"random_baseline", prec.random_baseline},
                        {"scored", prec.scored}, {"unscorable", prec.unscorable}};
      r["label_distance"] = {{"mean_distance", ld.mean_distance}, {"shuffled_baseline", ld.shuffled_baseline},
                             {"p_value", ld.p_value}, {"permutations", ld.permutations},
                             {"scored", ld.scored}, {"unscorable", ld.unscorable}};
      run.write("eval.json", r.dump(2) + "\n");
    }
    run.finish();
  } catch (const idr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
