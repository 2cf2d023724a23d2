#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "idr/common.hpp"

namespace idr {

class FieldTaxonomy {
 public:
  FieldTaxonomy() = default;
  /// names[i] is the name of field i. Requires K >= 2 and unique names.
  explicit FieldTaxonomy(std::vector<std::string> names);

  static FieldTaxonomy load_tsv(const std::string& path);
  void save_tsv(const std::string& path) const;

  std::size_t size() const { return names_.size(); }
  const std::string& name(FieldId id) const { return names_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& names() const { return names_; }
  bool contains(FieldId id) const { return id >= 0 && static_cast<std::size_t>(id) < names_.size(); }

  bool operator==(const FieldTaxonomy&) const = default;

 private:
  std::vector<std::string> names_;
};

struct FieldWeight {
  FieldId field = 0;
  double weight = 0.0;
  bool operator==(const FieldWeight&) const = default;
};

struct Citer {
  std::string id;
  std::optional<int> year;
  bool operator==(const Citer&) const = default;
};

struct Paper {
  std::string id;
  std::optional<int> year;
  std::string abstract;
  std::vector<FieldWeight> fields;  // weights sum to 1, sorted by field id
  std::vector<std::string> refs;
  std::vector<Citer> citers;
  int n_authors = 1;
  int n_institutes = 0;
  std::optional<long long> max_author_cites;
  /// Passed the window and the >=1-reference/>=1-citer filter. Other records
  /// stay loaded as neighbors so reference and citation vectors can use them.
  bool core = false;

  bool operator==(const Paper&) const = default;
};

struct Grant {
  std::string id;
  std::string agency;
  std::string country;
  int start_year = 0;
  std::optional<double> amount_usd;
  std::string abstract;
  bool operator==(const Grant&) const = default;
};

struct Link {
  std::string grant;
  std::string paper;
  auto operator<=>(const Link&) const = default;
};

/// Field with the maximum label weight; ties broken by the smallest id.
FieldId primary_field(const Paper& paper);
FieldId primary_field(std::span<const FieldWeight> labels);

class CorpusStore {
 public:
  CorpusStore() = default;
  /// Indexes the given records. Papers must already carry their `core` flag.
  CorpusStore(FieldTaxonomy taxonomy, std::vector<Paper> papers, std::vector<Grant> grants,
              std::vector<Link> links);

  const FieldTaxonomy& taxonomy() const { return taxonomy_; }
  std::size_t k() const { return taxonomy_.size(); }
  const std::vector<Paper>& papers() const { return papers_; }
  const std::vector<Grant>& grants() const { return grants_; }
  const std::vector<Link>& links() const { return links_; }

  const Paper* find_paper(std::string_view id) const;
  const Grant* find_grant(std::string_view id) const;
  std::vector<const Paper*> core_papers() const;

  /// Grant ids supporting a paper, in link order.
  const std::vector<std::string>& grants_of(std::string_view paper_id) const;
  /// Paper ids supported by a grant, in link order.
  const std::vector<std::string>& papers_of(std::string_view grant_id) const;

  /// Canonical JSON-lines serialization; equal stores give equal bytes.
  std::string serialize() const;

 private:
  FieldTaxonomy taxonomy_;
  std::vector<Paper> papers_;
  std::vector<Grant> grants_;
  std::vector<Link> links_;
  std::unordered_map<std::string, std::size_t> paper_index_;
  std::unordered_map<std::string, std::size_t> grant_index_;
  std::unordered_map<std::string, std::vector<std::string>> grants_by_paper_;
  std::unordered_map<std::string, std::vector<std::string>> papers_by_grant_;
};

struct FileCounts {
  std::size_t input_rows = 0;
  std::size_t loaded = 0;
  std::size_t dropped = 0;
  std::map<std::string, std::size_t> dropped_by_rule;
};

struct Rejection {
  std::string file;
  std::string record;
  std::string rule;
};

struct ValidationReport {
  FileCounts papers;
  FileCounts grants;
  FileCounts links;
  /// Loaded papers kept as neighbors only, keyed by reason
  /// (analysis_filter, outside_window, no_field_labels, no_year).
  std::map<std::string, std::size_t> excluded_from_analysis;
  /// Edge-level notes: dropped self references, invalid citer years,
  /// unresolved neighbor ids, duplicate links.
  std::map<std::string, std::size_t> notes;
  std::vector<Rejection> rejections;

  std::string to_json() const;
};

struct IngestOptions {
  int year_min = 1985;
  int year_max = 2009;
  bool analysis_filter = true;
};

struct IngestResult {
  CorpusStore store;
  ValidationReport report;
};

IngestResult ingest_corpus(const std::string& paper_path, const std::string& grant_path,
                           const std::string& link_path, const std::string& taxonomy_path,
                           const IngestOptions& options = {});

/// Same as `ingest_corpus` on `dir/{papers,grants,links}.jsonl` and `dir/taxonomy.tsv`.
IngestResult ingest_directory(const std::string& dir, const IngestOptions& options = {});

/// Predicate over grant agency/country, year range and discipline group.
/// Textual form: comma-separated clauses `attr op value`, e.g.
/// `agency=NSF,year<2000`. Attributes: agency, country, year, field.
/// `=` and `!=` accept `|`-separated alternatives.
struct SliceFilter {
  std::vector<std::string> agencies;
  std::vector<std::string> excluded_agencies;
  std::vector<std::string> countries;
  std::vector<std::string> excluded_countries;
  std::optional<int> year_min;  // inclusive
  std::optional<int> year_max;  // inclusive
  std::vector<FieldId> fields;  // primary fields of core papers

  static SliceFilter parse(std::string_view text);
  bool restricts_grants() const;
};

CorpusStore slice_corpus(const CorpusStore& store, const SliceFilter& filter);

/// Writes the store back out in the ingest schema.
void write_corpus(const CorpusStore& store, const std::string& dir);
void write_papers_jsonl(const std::vector<Paper>& papers, const std::string& path);
void write_grants_jsonl(const std::vector<Grant>& grants, const std::string& path);
void write_links_jsonl(const std::vector<Link>& links, const std::string& path);

}  // namespace idr
