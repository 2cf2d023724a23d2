#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idr/corpus.hpp"
#include "idr/lda.hpp"

namespace idr {

struct GroundTruth {
  std::size_t k = 0;
  std::size_t v = 0;
  std::vector<std::string> tokens;    // word id -> surface token
  std::vector<double> phi;            // K x V, row-major
  std::vector<std::string> doc_ids;
  std::vector<std::vector<double>> thetas;  // dense K per document
  std::vector<std::vector<FieldId>> labels;
  std::map<std::string, double> params;       // planted effect parameters
  std::map<std::string, double> grant_level;  // latent interdisciplinarity in [0,1]
  std::map<std::string, double> paper_mixing; // per-paper reference mixing level

  double phi_at(std::size_t topic, std::size_t word) const { return phi[topic * v + word]; }

  std::string to_json() const;
  static GroundTruth from_json(const std::string& text);
  void save(const std::string& path) const;
  static GroundTruth load(const std::string& path);

  bool operator==(const GroundTruth&) const = default;
};

struct LdaSynthConfig {
  std::size_t k = 10;
  std::size_t v = 500;
  std::size_t n_docs = 2000;
  std::size_t doc_length = 100;
  std::vector<double> label_multiplicity{0.5, 0.3, 0.2};  // P(|labels| = 1, 2, ...)
  double alpha = 1.0;
  double eta = 0.1;
  bool disjoint_vocab = false;  // topic k draws only from its own V/K block
  std::uint64_t seed = 1;
};

struct LdaSynthCorpus {
  std::vector<LabeledDocument> docs;
  GroundTruth truth;
};

/// phi_k ~ Dir(eta), per document a label set, theta ~ Dir(alpha) over the
/// labels and doc_length tokens from the mixture. Tokens are "w0001"-style.
LdaSynthCorpus gen_lda_corpus(const LdaSynthConfig& config);

/// Mean over fields of 0.5 * sum_v |phi_true - phi_model|, matching fields by
/// label id and words by surface token.
double matched_topic_tv(const GroundTruth& truth, const LdaModel& model);

struct CitationSynthConfig {
  std::size_t k = 6;
  int year_min = 1995;
  int year_max = 2002;  // grant start years; papers follow within two years
  std::size_t n_grants = 2500;
  std::size_t background_per_field_year = 30;
  std::size_t refs_per_paper = 40;
  std::size_t citers_per_paper = 8;
  /// Fixed reference mixing for every paper; unset means the planted model
  /// base + gamma * grant level + trend * (year - year_min) / span + noise.
  std::optional<double> mixing;
  bool uniform_cross = false;  // cross-field targets uniform instead of ring-distance weighted
  double mixing_base = 0.10;
  double mixing_gamma = 0.10;
  double mixing_trend = 0.10;
  double mixing_noise = 0.08;
  double citation_noise = 0.05;  // share of citers drawn from a uniformly random field
  double kernel_scale = 1.0;
  double productivity_lambda = 4.0;  // papers per grant = 1 + Poisson(lambda exp(-beta L))
  double productivity_beta = 1.5;
  double grant_offfield_min = 0.25;  // grant theta puts this plus span * level on the opposite field
  double grant_offfield_span = 0.25;
  double cofund_prob = 0.5;
  double proximate_share = 0.5;  // co-funding grant from the same home field
  double breakout_a = -4.0;
  double breakout_paper = 2.5;
  double breakout_grant = 2.5;
  double breakout_distance = 5.0;
  std::size_t breakout_extra = 30;
  std::size_t v = 400;
  std::size_t abstract_length = 120;
  double eta = 0.05;
  std::uint64_t seed = 1;
};

struct CitationSynthCorpus {
  CorpusStore store;
  GroundTruth truth;
};

/// Citation graph with planted field mixing, grants with latent
/// interdisciplinarity, productivity and breakout-citation effects. Papers
/// carry abstracts generated from the ground-truth phi.
CitationSynthCorpus gen_citation_corpus(const CitationSynthConfig& config);

/// Writes papers/grants/links JSONL, taxonomy.tsv and groundtruth.json.
void write_synth_corpus(const CorpusStore& store, const GroundTruth& truth, const std::string& dir);

/// Writes the documents of an LDA corpus as a labeled corpus directory.
CorpusStore lda_corpus_store(const LdaSynthCorpus& corpus);

}  // namespace idr
