#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "idr/common.hpp"
#include "idr/corpus.hpp"

namespace idr {

class DistanceMatrix;

/// A paper abstract with its field-label set, before tokenization.
struct LabeledDocument {
  std::string id;
  std::vector<FieldId> labels;  // sorted, unique
  std::string text;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  /// tokens must be unique; ids follow the given order.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint32_t> doc_freq);

  /// Keeps tokens appearing in at least `min_df` documents, sorted lexically.
  static Vocabulary build(const std::vector<std::vector<std::string>>& tokenized_docs,
                          std::size_t min_df);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  std::uint32_t doc_freq(std::size_t id) const { return doc_freq_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::uint32_t> find(const std::string& token) const;

  /// In-vocabulary ids of the tokens, dropping unknown ones.
  std::vector<std::uint32_t> encode(const std::vector<std::string>& tokens) const;

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_ && doc_freq_ == o.doc_freq_; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint32_t> doc_freq_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Tokenized training document.
struct EncodedDocument {
  std::string id;
  std::vector<FieldId> labels;
  std::vector<std::uint32_t> words;
};

struct TrainingCorpus {
  Vocabulary vocab;
  std::vector<EncodedDocument> docs;
  std::size_t dropped_empty = 0;  // documents with no in-vocabulary token
};

/// Papers with >= 1 field label and an abstract of at least `min_words`
/// whitespace-delimited words. Throws when nothing qualifies.
std::vector<LabeledDocument> build_training_set(const CorpusStore& store, std::size_t min_words = 100);

/// Tokenizes, builds the vocabulary (min document frequency) and encodes.
TrainingCorpus encode_training_set(const std::vector<LabeledDocument>& docs, std::size_t min_df = 5);

struct TrainOptions {
  double alpha = -1.0;  // <= 0 means 50 / K
  double eta = 0.01;
  int iterations = 1000;
  int burn_in = 500;
  std::uint64_t seed = 1;
  int threads = 1;  // > 1 runs approximate data-parallel sweeps
};

struct LdaModel {
  std::size_t k = 0;
  double alpha = 0.0;
  double eta = 0.0;
  Vocabulary vocab;
  /// Final-sweep assignment counts, row-major K x V.
  std::vector<std::uint64_t> topic_word_counts;
  std::vector<std::uint64_t> topic_totals;
  /// Posterior mean over post-burn-in sweeps of (n_kv + eta) / (n_k + V eta).
  std::vector<double> phi;
  std::uint64_t seed = 0;
  int iterations = 0;
  int burn_in = 0;
  int threads = 1;
  std::uint64_t n_docs = 0;
  std::uint64_t n_tokens = 0;
  std::string corpus_hash;

  std::size_t v() const { return vocab.size(); }
  double phi_at(std::size_t topic, std::size_t word) const { return phi[topic * v() + word]; }
  std::span<const double> phi_row(std::size_t topic) const {
    return std::span<const double>(phi).subspan(topic * v(), v());
  }

  void save(const std::string& path) const;
  static LdaModel load(const std::string& path);
  /// Provenance sidecar (seed, iterations, corpus hash, priors).
  std::string provenance_json() const;
};

/// Per-sweep hook used by tests to check count conservation and label
/// constraints. `assignments[d][i]` is the field of token i in document d.
struct SweepState {
  int sweep;
  const std::vector<std::vector<FieldId>>& assignments;
  const std::vector<std::uint64_t>& topic_word_counts;
  const std::vector<std::uint64_t>& topic_totals;
};
using SweepObserver = std::function<void(const SweepState&)>;

/// Labeled-LDA collapsed Gibbs sampler. Token assignments are restricted
/// to the document's label set.
LdaModel train(const TrainingCorpus& corpus, std::size_t k, const TrainOptions& options,
               const SweepObserver& observer = {});

struct InferOptions {
  int iterations = 2000;
  int burn_in = 1000;
  std::uint64_t seed = 1;
};

/// Fold-in Gibbs sampling over all K fields with phi held fixed. Throws
/// Error("unscorable abstract") when no token is in the vocabulary.
FieldDistribution infer_theta(const LdaModel& model, std::string_view abstract, const InferOptions& options);
FieldDistribution infer_theta_encoded(const LdaModel& model, std::span<const std::uint32_t> words,
                                      const InferOptions& options);

enum class RankMode { probability, frex };

struct RankedWord {
  std::uint32_t word;
  std::string token;
  double score;
};

/// Top-n words of a field by phi or by FREX (weighted harmonic mean of the
/// within-field ECDF of exclusivity and of phi).
std::vector<RankedWord> top_words(const LdaModel& model, FieldId field, std::size_t n,
                                  RankMode mode = RankMode::probability, double frex_weight = 0.5);

struct PrecisionResult {
  double precision = 0.0;
  double random_baseline = 0.0;
  std::size_t scored = 0;
  std::size_t unscorable = 0;
};

/// Predicts the top `top_m` fields per document (0 means |labels|) and
/// reports the mean fraction that are true labels.
PrecisionResult eval_multilabel_precision(const LdaModel& model, const std::vector<LabeledDocument>& held_out,
                                          std::size_t top_m, const InferOptions& options);

struct LabelDistanceResult {
  double mean_distance = 0.0;
  double shuffled_baseline = 0.0;
  double p_value = 1.0;
  std::size_t permutations = 0;
  std::size_t scored = 0;
  std::size_t unscorable = 0;
};

/// Distance between the top-1 predicted field and the nearest true label,
/// against a permutation baseline that shuffles predictions across documents.
LabelDistanceResult eval_label_distance(const LdaModel& model, const std::vector<LabeledDocument>& held_out,
                                        const DistanceMatrix& distances, const InferOptions& options,
                                        std::size_t permutations = 200);

/// Cosine distance between phi rows.
DistanceMatrix lda_field_distance(const LdaModel& model);

}  // namespace idr
