#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idr/analysis.hpp"
#include "idr/corpus.hpp"
#include "idr/fieldspace.hpp"
#include "idr/impact.hpp"
#include "idr/interdisc.hpp"
#include "idr/lda.hpp"

namespace idr {

// ----------------------------------------------------------------- scores

struct ScoreRow {
  std::string subject;
  std::string type;  // paper | grant
  ScoreBasis basis = ScoreBasis::references;
  double rs = 0.0;
  int bin = 0;  // quintile within (type, basis)
};

struct ScoreSet {
  std::vector<ScoreRow> rows;
  std::map<std::string, std::size_t> skipped;  // reason -> count
};

ScoreBasis score_basis_from_string(const std::string& s);

/// Reference- or citation-based RS for every core paper with a vector basis.
ScoreSet score_papers(const CorpusStore& store, const DistanceMatrix& d, VectorMode mode);

struct GrantVectorRow {
  std::string grant;
  GrantVector vector;
};

struct GrantVectorSet {
  std::vector<GrantVectorRow> rows;
  std::size_t unscorable = 0;
};

/// Fold-in inference for every grant. Each grant gets its own seed derived
/// from options.seed and its position, so the result does not depend on threads.
GrantVectorSet infer_grant_vectors(const CorpusStore& store, const LdaModel& model, const RenormPolicy& policy,
                                   const InferOptions& options, int threads = 1);

std::string grant_vectors_tsv(const GrantVectorSet& set);
GrantVectorSet load_grant_vectors(const std::string& path);

ScoreSet score_grants(const GrantVectorSet& vectors, const DistanceMatrix& d);

/// Assigns quintile bins within each (type, basis) group.
void assign_quintiles(std::vector<ScoreRow>& rows);

std::string scores_csv(const std::vector<ScoreRow>& rows);
std::vector<ScoreRow> parse_scores_csv(const std::string& text);
std::vector<ScoreRow> load_scores(const std::string& path);

std::vector<ImpactRecord> load_impact(const std::string& path);

// --------------------------------------------------------------- figures

struct AnalysisInputs {
  const CorpusStore* store = nullptr;
  std::vector<ScoreRow> scores;
  std::optional<GrantVectorSet> grant_vectors;
  std::optional<std::vector<ImpactRecord>> impact;
};

/// Aligned per-grant, per-pair and per-paper views of the scored corpus.
/// Undefined metrics are NaN.
struct AnalysisTable {
  std::vector<std::string> grant_ids;
  std::vector<double> grant_rs, grant_amount, grant_papers, grant_hit_rate;

  std::vector<double> pair_paper_rs, pair_paper_rs_cit, pair_grant_rs, pair_hit;

  std::vector<std::string> paper_ids;
  std::vector<int> paper_year, paper_n_grants, paper_n_authors, paper_n_fields;
  std::vector<std::optional<long long>> paper_max_author_cites;
  std::vector<double> paper_rs, paper_rs_cit, paper_hit, paper_mean_grant_rs;
  std::vector<std::size_t> paper_impact;  // index into impact records, or npos

  std::vector<MultiGrantPaper> multi_grant;
};

AnalysisTable build_analysis_table(const AnalysisInputs& in);

struct FigureOptions {
  std::size_t n_bins = 5;
  BinMode bin_mode = BinMode::quantile;
  FundingSelector funding;  // fig4b default top decile; fig4c always middle decile
  double paper_fraction = 0.1;
  double quadrant_fraction = 0.25;
  std::string group_by = "grant-support";  // grant-support|team-size|prominence|n-fields
  ScoreBasis trend_basis = ScoreBasis::references;
  std::size_t min_cell_n = 10;
};

const std::vector<std::string>& figure_ids();
const std::vector<std::string>& table_ids();

/// Plot-ready CSV for a figure id (fig2a ... fig4e). Throws Error naming the
/// missing input when scores, impact or grant vectors are absent.
std::string figure_csv(const std::string& id, const AnalysisInputs& in, const FigureOptions& options);

struct RegressionTable {
  std::vector<std::string> models;
  std::vector<RegressionResult> results;
};

/// tableS2: ln(c10_norm + 1) on interdisciplinarity and grant/author
/// conditions. tableS3: standardized ln(c10 + 1) with year and field dummies.
RegressionTable regression_table(const std::string& id, const AnalysisInputs& in);
std::string regression_csv(const std::string& id, const RegressionTable& table);

}  // namespace idr
