#pragma once

#include <string>
#include <vector>

#include "idr/common.hpp"
#include "idr/corpus.hpp"

namespace idr {

enum class Provenance { references, citations, lda };
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

enum class VectorMode { references, citations };
std::string to_string(VectorMode m);
VectorMode vector_mode_from_string(const std::string& s);

/// Symmetric K x K field distances with a per-field availability mask.
/// Entries involving an unavailable field are undefined (NaN).
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t k, Provenance provenance);

  std::size_t k() const { return k_; }
  Provenance provenance() const { return provenance_; }
  bool available(FieldId i) const { return available_[static_cast<std::size_t>(i)]; }
  const std::vector<bool>& availability() const { return available_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * k_ + j]; }

  /// Sets d_ij and d_ji.
  void set(std::size_t i, std::size_t j, double d);
  void set_available(std::size_t i, bool on);

  /// Throws unless symmetric, zero-diagonal and within [0, 1] on available fields.
  void validate() const;

  /// TSV with a leading `# provenance: ...` comment, a header row of field
  /// ids and 6-decimal entries (`NA` for unavailable fields).
  std::string to_tsv() const;
  void save_tsv(const std::string& path) const;
  static DistanceMatrix load_tsv(const std::string& path);
  static DistanceMatrix parse_tsv(const std::string& text);

 private:
  std::size_t k_ = 0;
  Provenance provenance_ = Provenance::citations;
  std::vector<double> values_;
  std::vector<bool> available_;
};

struct FieldVectorResult {
  FieldDistribution probs;
  std::size_t resolved = 0;
  std::size_t skipped = 0;  // neighbor ids unknown to the store or unlabeled
};

/// Fractions of a paper's references (or citers) per field, neighbors
/// contributing their label weights fractionally. Throws Error("no basis for
/// vector") when no neighbor resolves.
FieldVectorResult paper_field_vector(const Paper& paper, VectorMode mode, const CorpusStore& store);

enum class AggregateAssignment { primary, fractional };

struct FieldAggregate {
  std::size_t k = 0;
  std::vector<std::vector<double>> vectors;  // v_i
  std::vector<double> n_papers;
  std::size_t skipped_papers = 0;  // core papers with no vector basis

  bool empty(FieldId i) const { return n_papers[static_cast<std::size_t>(i)] <= 0.0; }
};

/// v_i = sum of paper vectors over core papers whose primary field is i
/// (or, fractionally, weighted by each paper's label weights).
FieldAggregate field_aggregates(const CorpusStore& store, VectorMode mode,
                                AggregateAssignment assignment = AggregateAssignment::primary);

/// d_ij = 1 - cos(v_i, v_j); empty fields are marked unavailable.
DistanceMatrix field_distance_matrix(const FieldAggregate& agg, Provenance provenance);

/// Pearson r over strictly-upper-triangle pairs available in both matrices.
double compare_distance_matrices(const DistanceMatrix& a, const DistanceMatrix& b);

/// 1 - cosine similarity of two field-probability vectors.
double grant_pair_distance(const FieldDistribution& a, const FieldDistribution& b);

}  // namespace idr
