#include "idr/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace idr {

using nlohmann::json;

namespace {

struct RecordError {
  std::string rule;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string id_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw RecordError{"invalid_id"};
}

std::optional<int> optional_int(const json& obj, const char* key, const char* rule) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw RecordError{rule};
  return it->get<int>();
}

std::vector<FieldWeight> parse_fields(const json& arr, const FieldTaxonomy& taxonomy) {
  if (!arr.is_array()) throw RecordError{"invalid_fields"};
  std::map<FieldId, double> acc;
  for (const auto& e : arr) {
    FieldId fid = 0;
    double w = 1.0;  // bare ids get uniform weight
    if (e.is_number_integer()) {
      fid = e.get<FieldId>();
    } else if (e.is_array() && e.size() == 2 && e[0].is_number_integer() && e[1].is_number()) {
      fid = e[0].get<FieldId>();
      w = e[1].get<double>();
    } else {
      throw RecordError{"invalid_fields"};
    }
    if (!taxonomy.contains(fid)) throw RecordError{"unknown_field"};
    if (!(w >= 0.0)) throw RecordError{"negative_field_weight"};
    acc[fid] += w;
  }
  double total = 0.0;
  for (const auto& [fid, w] : acc) total += w;
  if (!acc.empty() && total <= 0.0) throw RecordError{"zero_field_weight"};
  std::vector<FieldWeight> out;
  for (const auto& [fid, w] : acc) {
    if (w > 0.0) out.push_back({fid, w / total});
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

void reject(ValidationReport& report, FileCounts& counts, const char* file, std::string record,
            const std::string& rule) {
  counts.dropped++;
  counts.dropped_by_rule[rule]++;
  report.rejections.push_back({file, std::move(record), rule});
}

json paper_to_json(const Paper& p) {
  json fields = json::array();
  for (const auto& f : p.fields) fields.push_back({f.field, f.weight});
  json cites = json::array();
  for (const auto& c : p.citers) {
    cites.push_back({c.id, c.year ? json(*c.year) : json(nullptr)});
  }
  json j = {{"id", p.id},
            {"year", p.year ? json(*p.year) : json(nullptr)},
            {"abstract", p.abstract},
            {"fields", fields},
            {"refs", p.refs},
            {"cites", cites},
            {"n_authors", p.n_authors},
            {"n_institutes", p.n_institutes},
            {"max_author_cites", p.max_author_cites ? json(*p.max_author_cites) : json(nullptr)}};
  return j;
}

json grant_to_json(const Grant& g) {
  return {{"id", g.id},
          {"agency", g.agency},
          {"country", g.country},
          {"year", g.start_year},
          {"amount_usd", g.amount_usd ? json(*g.amount_usd) : json(nullptr)},
          {"abstract", g.abstract}};
}

json counts_to_json(const FileCounts& c) {
  return {{"input_rows", c.input_rows},
          {"loaded", c.loaded},
          {"dropped", c.dropped},
          {"dropped_by_rule", c.dropped_by_rule}};
}

const std::vector<std::string> kEmpty;

}  // namespace

FieldTaxonomy::FieldTaxonomy(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw Error("taxonomy needs at least 2 fields");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error("taxonomy has an empty field name");
    if (!seen.insert(n).second) throw Error("taxonomy has duplicate field name '" + n + "'");
  }
}

FieldTaxonomy FieldTaxonomy::load_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open taxonomy file " + path);
  std::map<long long, std::string> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("taxonomy line " + std::to_string(lineno) + " has no tab");
    const auto id = parse_int(trim(line.substr(0, tab)));
    if (!id) {
      if (entries.empty() && lineno == 1) continue;  // header row
      throw Error("taxonomy line " + std::to_string(lineno) + " has a non-integer field id");
    }
    if (!entries.emplace(*id, trim(line.substr(tab + 1))).second) {
      throw Error("taxonomy repeats field id " + std::to_string(*id));
    }
  }
  std::vector<std::string> names;
  for (const auto& [id, name] : entries) {
    if (id != static_cast<long long>(names.size())) {
      throw Error("taxonomy field ids are not dense 0..K-1");
    }
    names.push_back(name);
  }
  return FieldTaxonomy(std::move(names));
}

void FieldTaxonomy::save_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (std::size_t i = 0; i < names_.size(); ++i) out << i << '\t' << names_[i] << '\n';
}

FieldId primary_field(std::span<const FieldWeight> labels) {
  if (labels.empty()) throw Error("paper has no field labels");
  const FieldWeight* best = &labels.front();
  for (const auto& l : labels) {
    if (l.weight > best->weight || (l.weight == best->weight && l.field < best->field)) best = &l;
  }
  return best->field;
}

FieldId primary_field(const Paper& paper) { return primary_field(paper.fields); }

CorpusStore::CorpusStore(FieldTaxonomy taxonomy, std::vector<Paper> papers,
                         std::vector<Grant> grants, std::vector<Link> links)
    : taxonomy_(std::move(taxonomy)),
      papers_(std::move(papers)),
      grants_(std::move(grants)),
      links_(std::move(links)) {
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    if (!paper_index_.emplace(papers_[i].id, i).second) {
      throw Error("duplicate paper id " + papers_[i].id);
    }
  }
  for (std::size_t i = 0; i < grants_.size(); ++i) {
    if (!grant_index_.emplace(grants_[i].id, i).second) {
      throw Error("duplicate grant id " + grants_[i].id);
    }
  }
  for (const auto& l : links_) {
    grants_by_paper_[l.paper].push_back(l.grant);
    papers_by_grant_[l.grant].push_back(l.paper);
  }
}

const Paper* CorpusStore::find_paper(std::string_view id) const {
  auto it = paper_index_.find(std::string(id));
  return it == paper_index_.end() ? nullptr : &papers_[it->second];
}

const Grant* CorpusStore::find_grant(std::string_view id) const {
  auto it = grant_index_.find(std::string(id));
  return it == grant_index_.end() ? nullptr : &grants_[it->second];
}

std::vector<const Paper*> CorpusStore::core_papers() const {
  std::vector<const Paper*> out;
  for (const auto& p : papers_) {
    if (p.core) out.push_back(&p);
  }
  return out;
}

const std::vector<std::string>& CorpusStore::grants_of(std::string_view paper_id) const {
  auto it = grants_by_paper_.find(std::string(paper_id));
  return it == grants_by_paper_.end() ? kEmpty : it->second;
}

const std::vector<std::string>& CorpusStore::papers_of(std::string_view grant_id) const {
  auto it = papers_by_grant_.find(std::string(grant_id));
  return it == papers_by_grant_.end() ? kEmpty : it->second;
}

std::string CorpusStore::serialize() const {
  std::ostringstream out;
  out << json{{"taxonomy", taxonomy_.names()}}.dump() << '\n';
  for (const auto& p : papers_) {
    json j = paper_to_json(p);
    j["core"] = p.core;
    out << j.dump() << '\n';
  }
  for (const auto& g : grants_) out << grant_to_json(g).dump() << '\n';
  for (const auto& l : links_) out << json{{"grant", l.grant}, {"paper", l.paper}}.dump() << '\n';
  return out.str();
}

std::string ValidationReport::to_json() const {
  json rej = json::array();
  for (const auto& r : rejections) {
    rej.push_back({{"file", r.file}, {"record", r.record}, {"rule", r.rule}});
  }
  json j = {{"files",
             {{"papers", counts_to_json(papers)},
              {"grants", counts_to_json(grants)},
              {"links", counts_to_json(links)}}},
            {"excluded_from_analysis", excluded_from_analysis},
            {"notes", notes},
            {"rejections", rej}};
  return j.dump(2);
}

IngestResult ingest_corpus(const std::string& paper_path, const std::string& grant_path,
                           const std::string& link_path, const std::string& taxonomy_path,
                           const IngestOptions& options) {
  if (options.year_min > options.year_max) throw Error("year window is empty");
  FieldTaxonomy taxonomy = FieldTaxonomy::load_tsv(taxonomy_path);
  ValidationReport report;

  std::vector<Paper> papers;
  std::unordered_set<std::string> paper_ids;
  for (const auto& line : read_lines(paper_path)) {
    report.papers.input_rows++;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      reject(report, report.papers, "papers", "line " + std::to_string(report.papers.input_rows),
             "malformed_json");
      continue;
    }
    std::string id;
    bool inserted = false;
    try {
      if (!j.is_object() || !j.contains("id")) throw RecordError{"missing_id"};
      id = id_of(j["id"]);
      if (!paper_ids.insert(id).second) throw Error("duplicate paper id " + id);
      inserted = true;
      Paper p;
      p.id = id;
      p.year = optional_int(j, "year", "invalid_year");
      if (auto it = j.find("abstract"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw RecordError{"invalid_abstract"};
        p.abstract = it->get<std::string>();
      }
      if (auto it = j.find("fields"); it != j.end() && !it->is_null()) {
        p.fields = parse_fields(*it, taxonomy);
      }
      std::set<std::string> seen_refs;
      if (auto it = j.find("refs"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw RecordError{"invalid_refs"};
        for (const auto& r : *it) {
          std::string rid = id_of(r);
          if (rid == id) {
            report.notes["self_reference"]++;
            continue;
          }
          if (seen_refs.insert(rid).second) p.refs.push_back(std::move(rid));
        }
      }
      std::set<std::string> seen_cites;
      if (auto it = j.find("cites"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw RecordError{"invalid_cites"};
        for (const auto& c : *it) {
          Citer citer;
          if (c.is_array() && c.size() == 2) {
            citer.id = id_of(c[0]);
            if (c[1].is_number_integer()) {
              citer.year = c[1].get<int>();
            } else if (!c[1].is_null()) {
              throw RecordError{"invalid_cites"};
            }
          } else {
            citer.id = id_of(c);
          }
          if (citer.id == id) {
            report.notes["self_citation"]++;
            continue;
          }
          if (p.year && citer.year && *citer.year < *p.year) {
            report.notes["citer_before_publication"]++;
            report.rejections.push_back({"papers", id + ">" + citer.id, "citer_before_publication"});
            continue;
          }
          if (seen_cites.insert(citer.id).second) p.citers.push_back(std::move(citer));
        }
      }
      p.n_authors = optional_int(j, "n_authors", "invalid_n_authors").value_or(1);
      if (p.n_authors < 1) throw RecordError{"invalid_n_authors"};
      p.n_institutes = optional_int(j, "n_institutes", "invalid_n_institutes").value_or(0);
      if (p.n_institutes < 0) throw RecordError{"invalid_n_institutes"};
      if (auto it = j.find("max_author_cites"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<long long>() < 0) {
          throw RecordError{"invalid_max_author_cites"};
        }
        p.max_author_cites = it->get<long long>();
      }
      papers.push_back(std::move(p));
      report.papers.loaded++;
    } catch (const RecordError& e) {
      if (inserted) paper_ids.erase(id);
      reject(report, report.papers, "papers", id.empty() ? "line " + std::to_string(report.papers.input_rows) : id,
             e.rule);
    }
  }

  // Core-paper selection needs the full record set first.
  for (auto& p : papers) {
    const char* reason = nullptr;
    if (!p.year) {
      reason = "no_year";
    } else if (*p.year < options.year_min || *p.year > options.year_max) {
      reason = "outside_window";
    } else if (p.fields.empty()) {
      reason = "no_field_labels";
    } else if (options.analysis_filter && (p.refs.empty() || p.citers.empty())) {
      reason = "analysis_filter";
    }
    p.core = reason == nullptr;
    if (reason) report.excluded_from_analysis[reason]++;
  }
  {
    std::unordered_set<std::string> known(paper_ids.begin(), paper_ids.end());
    for (const auto& p : papers) {
      if (!p.core) continue;
      for (const auto& r : p.refs) {
        if (!known.count(r)) report.notes["unresolved_reference"]++;
      }
      for (const auto& c : p.citers) {
        if (!known.count(c.id)) report.notes["unresolved_citer"]++;
      }
    }
  }

  std::vector<Grant> grants;
  std::unordered_set<std::string> grant_ids;
  for (const auto& line : read_lines(grant_path)) {
    report.grants.input_rows++;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      reject(report, report.grants, "grants", "line " + std::to_string(report.grants.input_rows),
             "malformed_json");
      continue;
    }
    std::string id;
    try {
      if (!j.is_object() || !j.contains("id")) throw RecordError{"missing_id"};
      id = id_of(j["id"]);
      if (!grant_ids.insert(id).second) throw Error("duplicate grant id " + id);
      Grant g;
      g.id = id;
      auto text = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return {};
        if (!it->is_string()) throw RecordError{std::string("invalid_") + key};
        return it->get<std::string>();
      };
      g.agency = text("agency");
      g.country = text("country");
      g.abstract = text("abstract");
      auto year = optional_int(j, "year", "invalid_year");
      if (!year) throw RecordError{"missing_year"};
      g.start_year = *year;
      if (auto it = j.find("amount_usd"); it != j.end() && !it->is_null()) {
        if (!it->is_number() || it->get<double>() < 0.0) throw RecordError{"invalid_amount"};
        g.amount_usd = it->get<double>();
      }
      if (g.start_year < options.year_min || g.start_year > options.year_max) {
        throw RecordError{"outside_window"};
      }
      grants.push_back(std::move(g));
      report.grants.loaded++;
    } catch (const RecordError& e) {
      reject(report, report.grants, "grants", id.empty() ? "line " + std::to_string(report.grants.input_rows) : id,
             e.rule);
    }
  }

  std::unordered_set<std::string> core_ids;
  for (const auto& p : papers) {
    if (p.core) core_ids.insert(p.id);
  }
  std::unordered_set<std::string> loaded_grants;
  for (const auto& g : grants) loaded_grants.insert(g.id);

  std::vector<Link> links;
  std::set<Link> seen_links;
  for (const auto& line : read_lines(link_path)) {
    report.links.input_rows++;
    const std::string row = "line " + std::to_string(report.links.input_rows);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      reject(report, report.links, "links", row, "malformed_json");
      continue;
    }
    try {
      if (!j.is_object() || !j.contains("grant") || !j.contains("paper")) {
        throw RecordError{"missing_id"};
      }
      Link l{id_of(j["grant"]), id_of(j["paper"])};
      const std::string rec = l.grant + "/" + l.paper;
      if (!loaded_grants.count(l.grant)) {
        reject(report, report.links, "links", rec, "unknown_grant");
        continue;
      }
      if (!core_ids.count(l.paper)) {
        reject(report, report.links, "links", rec,
               paper_ids.count(l.paper) ? "paper_not_in_analysis" : "unknown_paper");
        continue;
      }
      if (!seen_links.insert(l).second) {
        // duplicates are deduplicated silently and only counted
        report.links.dropped++;
        report.links.dropped_by_rule["duplicate_link"]++;
        report.notes["duplicate_link"]++;
        continue;
      }
      links.push_back(std::move(l));
      report.links.loaded++;
    } catch (const RecordError& e) {
      reject(report, report.links, "links", row, e.rule);
    }
  }
  report.notes["links_loaded"] = links.size();

  return {CorpusStore(std::move(taxonomy), std::move(papers), std::move(grants), std::move(links)),
          std::move(report)};
}

IngestResult ingest_directory(const std::string& dir, const IngestOptions& options) {
  namespace fs = std::filesystem;
  const fs::path d(dir);
  return ingest_corpus((d / "papers.jsonl").string(), (d / "grants.jsonl").string(),
                       (d / "links.jsonl").string(), (d / "taxonomy.tsv").string(), options);
}

SliceFilter SliceFilter::parse(std::string_view text) {
  static const char* kValid = "valid attributes: agency, country, year, field";
  SliceFilter f;
  std::string s(text);
  std::stringstream ss(s);
  std::string clause;
  while (std::getline(ss, clause, ',')) {
    clause = trim(clause);
    if (clause.empty()) continue;
    const auto op_pos = clause.find_first_of("=!<>");
    if (op_pos == std::string::npos) throw Error("filter clause '" + clause + "' has no operator");
    const std::string attr = trim(clause.substr(0, op_pos));
    std::size_t val_pos = op_pos + 1;
    std::string op(1, clause[op_pos]);
    if (val_pos < clause.size() && clause[val_pos] == '=') {
      op += '=';
      ++val_pos;
    }
    const std::string value = trim(clause.substr(val_pos));
    if (op == "!") throw Error("filter clause '" + clause + "' has an invalid operator");
    auto alternatives = [&] {
      std::vector<std::string> out;
      std::stringstream vs(value);
      std::string v;
      while (std::getline(vs, v, '|')) out.push_back(trim(v));
      return out;
    };
    if (attr == "agency" || attr == "country") {
      auto& keep = attr == "agency" ? f.agencies : f.countries;
      auto& drop = attr == "agency" ? f.excluded_agencies : f.excluded_countries;
      if (op == "=" || op == "==") {
        for (auto& v : alternatives()) keep.push_back(v);
      } else if (op == "!=") {
        for (auto& v : alternatives()) drop.push_back(v);
      } else {
        throw Error("attribute '" + attr + "' supports only = and !=");
      }
    } else if (attr == "year") {
      const auto y = parse_int(value);
      if (!y) throw Error("year filter needs an integer, got '" + value + "'");
      const int v = static_cast<int>(*y);
      auto lower = [&](int lo) { f.year_min = f.year_min ? std::max(*f.year_min, lo) : lo; };
      auto upper = [&](int hi) { f.year_max = f.year_max ? std::min(*f.year_max, hi) : hi; };
      if (op == "<") upper(v - 1);
      else if (op == "<=") upper(v);
      else if (op == ">") lower(v + 1);
      else if (op == ">=") lower(v);
      else if (op == "=" || op == "==") { lower(v); upper(v); }
      else throw Error("year filter does not support '" + op + "'");
    } else if (attr == "field") {
      if (op != "=" && op != "==") throw Error("attribute 'field' supports only =");
      for (const auto& v : alternatives()) {
        const auto id = parse_int(v);
        if (!id) throw Error("field filter needs integer field ids, got '" + v + "'");
        f.fields.push_back(static_cast<FieldId>(*id));
      }
    } else {
      throw Error("unknown filter attribute '" + attr + "'; " + kValid);
    }
  }
  return f;
}

bool SliceFilter::restricts_grants() const {
  return !agencies.empty() || !excluded_agencies.empty() || !countries.empty() ||
         !excluded_countries.empty() || year_min || year_max;
}

CorpusStore slice_corpus(const CorpusStore& store, const SliceFilter& filter) {
  auto in = [](const std::vector<std::string>& set, const std::string& v) {
    return std::find(set.begin(), set.end(), v) != set.end();
  };
  auto year_ok = [&](int y) {
    return (!filter.year_min || y >= *filter.year_min) && (!filter.year_max || y <= *filter.year_max);
  };
  for (FieldId f : filter.fields) {
    if (!store.taxonomy().contains(f)) throw Error("filter names unknown field " + std::to_string(f));
  }

  std::vector<Grant> grants;
  std::unordered_set<std::string> kept_grants;
  for (const auto& g : store.grants()) {
    const bool ok = (filter.agencies.empty() || in(filter.agencies, g.agency)) &&
                    !in(filter.excluded_agencies, g.agency) &&
                    (filter.countries.empty() || in(filter.countries, g.country)) &&
                    !in(filter.excluded_countries, g.country) && year_ok(g.start_year);
    if (ok) {
      grants.push_back(g);
      kept_grants.insert(g.id);
    }
  }

  const bool grant_scoped = filter.restricts_grants();
  std::vector<Paper> papers;
  std::unordered_set<std::string> kept_core;
  for (const auto& p : store.papers()) {
    if (!p.core) {
      papers.push_back(p);
      continue;
    }
    bool ok = !p.year || year_ok(*p.year);
    if (ok && !filter.fields.empty()) {
      const FieldId pf = primary_field(p);
      ok = std::find(filter.fields.begin(), filter.fields.end(), pf) != filter.fields.end();
    }
    if (ok && grant_scoped) {
      const auto& gs = store.grants_of(p.id);
      ok = std::any_of(gs.begin(), gs.end(), [&](const std::string& g) { return kept_grants.count(g) > 0; });
    }
    papers.push_back(p);
    if (ok) {
      kept_core.insert(p.id);
    } else {
      papers.back().core = false;  // still a reference/citation neighbor
    }
  }

  std::vector<Link> links;
  for (const auto& l : store.links()) {
    if (kept_grants.count(l.grant) && kept_core.count(l.paper)) links.push_back(l);
  }
  return CorpusStore(store.taxonomy(), std::move(papers), std::move(grants), std::move(links));
}

void write_papers_jsonl(const std::vector<Paper>& papers, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& p : papers) out << paper_to_json(p).dump() << '\n';
}

void write_grants_jsonl(const std::vector<Grant>& grants, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& g : grants) out << grant_to_json(g).dump() << '\n';
}

void write_links_jsonl(const std::vector<Link>& links, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& l : links) out << json{{"grant", l.grant}, {"paper", l.paper}}.dump() << '\n';
}

void write_corpus(const CorpusStore& store, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path d(dir);
  write_papers_jsonl(store.papers(), (d / "papers.jsonl").string());
  write_grants_jsonl(store.grants(), (d / "grants.jsonl").string());
  write_links_jsonl(store.links(), (d / "links.jsonl").string());
  store.taxonomy().save_tsv((d / "taxonomy.tsv").string());
}

}  // namespace idr
