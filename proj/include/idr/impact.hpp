#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "idr/corpus.hpp"

namespace idr {

/// (primary field, publication year)
using Stratum = std::pair<FieldId, int>;

struct ImpactRecord {
  std::string paper_id;
  int year = 0;
  Stratum stratum;
  int c10 = 0;
  int missing_year_citers = 0;
  double c10_norm = 0.0;
  bool degenerate_stratum = false;  // stratum mean c10 is 0
  bool hit = false;
  bool small_stratum = false;  // fewer than 1/top_fraction papers; cannot hold a hit
  int in_field = 0;
  int out_field = 0;
  int excluded_citers = 0;  // unknown or unlabeled citers
};

struct C10Count {
  int count = 0;
  int missing_year = 0;
};

/// Citers with citing year in [year, year + 10]; citers without a year are tallied.
C10Count c10(const Paper& paper);

/// One record per core paper with year, stratum, c10 and in/out-field split.
std::vector<ImpactRecord> impact_records(const CorpusStore& store);

/// c10_norm = c10 / mean c10 within the stratum (0 and flagged when the mean is 0).
void normalize_c10(std::vector<ImpactRecord>& records);

/// Hit iff c10 exceeds the nearest-rank (1 - top_fraction) quantile of its stratum.
void hit_flags(std::vector<ImpactRecord>& records, double top_fraction = 0.05);

struct FieldSplit {
  int in_field = 0;
  int out_field = 0;
  int excluded = 0;
};

/// In-field iff the citer's primary field equals the paper's primary field.
FieldSplit infield_outfield(const Paper& paper, const CorpusStore& store);

struct StratumBaseline {
  double in_field = 0.0;
  double out_field = 0.0;
  std::size_t n = 0;
  bool low_n = false;  // single-paper stratum
};

std::map<Stratum, StratumBaseline> stratum_baseline(const std::vector<ImpactRecord>& records);

struct GroupVsBaseline {
  double in_field_diff = 0.0;
  double out_field_diff = 0.0;
  std::size_t n = 0;
};

/// Mean over the selected records of (in/out-field count minus its stratum baseline).
GroupVsBaseline group_vs_baseline(const std::vector<ImpactRecord>& records,
                                  const std::map<Stratum, StratumBaseline>& baselines,
                                  const std::vector<bool>& selected);

/// Full pipeline: records, normalization, hit flags.
std::vector<ImpactRecord> compute_impact(const CorpusStore& store, double top_fraction = 0.05);

std::string impact_csv(const std::vector<ImpactRecord>& records);

}  // namespace idr
