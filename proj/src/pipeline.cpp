#include "idr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "idr/random.hpp"

namespace idr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  if (s == "NA" || s == "nan") return kNaN;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("bad number '" + s + "' in " + what);
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("bad integer '" + s + "' in " + what);
  }
}

void check_id(const std::string& id) {
  if (id.find_first_of(",\t\n") != std::string::npos) throw Error("id '" + id + "' contains a delimiter");
}

std::string fmt(double v, int digits = 6) {
  if (!std::isfinite(v)) return "NA";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      s += x;
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : kNaN;
}

}  // namespace

ScoreBasis score_basis_from_string(const std::string& s) {
  if (s == "references") return ScoreBasis::references;
  if (s == "citations") return ScoreBasis::citations;
  if (s == "grant-abstract") return ScoreBasis::grant_abstract;
  throw Error("unknown score basis '" + s + "' (expected references|citations|grant-abstract)");
}

void assign_quintiles(std::vector<ScoreRow>& rows) {
  std::map<std::pair<std::string, ScoreBasis>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) groups[{rows[i].type, rows[i].basis}].push_back(i);
  const auto cuts = quintile_cuts();
  for (const auto& [key, idx] : groups) {
    if (idx.size() < cuts.size() + 1) {
      for (auto i : idx) rows[i].bin = 0;
      continue;
    }
    std::vector<double> v;
    for (auto i : idx) v.push_back(rows[i].rs);
    const auto bins = idr_quantiles(v, cuts);
    for (std::size_t j = 0; j < idx.size(); ++j) rows[idx[j]].bin = bins[j];
  }
}

ScoreSet score_papers(const CorpusStore& store, const DistanceMatrix& d, VectorMode mode) {
  if (d.k() != store.k()) throw Error("distance matrix K does not match the taxonomy");
  ScoreSet out;
  const ScoreBasis basis = mode == VectorMode::references ? ScoreBasis::references : ScoreBasis::citations;
  for (const Paper* p : store.core_papers()) {
    FieldVectorResult vec;
    try {
      vec = paper_field_vector(*p, mode, store);
    } catch (const Error&) {
      out.skipped["no_basis"]++;
      continue;
    }
    bool ok = true;
    for (std::size_t i = 0; i < vec.probs.size(); ++i) {
      if (vec.probs[i] > 0.0 && !d.available(static_cast<FieldId>(i))) ok = false;
    }
    if (!ok) {
      out.skipped["unavailable_field"]++;
      continue;
    }
    out.rows.push_back({p->id, "paper", basis, rao_stirling(vec.probs, d), 0});
  }
  assign_quintiles(out.rows);
  return out;
}

GrantVectorSet infer_grant_vectors(const CorpusStore& store, const LdaModel& model, const RenormPolicy& policy,
                                   const InferOptions& options, int threads) {
  if (model.k != store.k()) throw Error("model K does not match the taxonomy");
  const auto& grants = store.grants();
  std::vector<std::optional<GrantVector>> results(grants.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < grants.size(); i += step) {
      InferOptions o = options;
      o.seed = Rng::mix(options.seed ^ Rng::mix(i + 1));
      try {
        results[i] = grant_field_vector(grants[i], model, policy, o);
      } catch (const Error&) {
        results[i].reset();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, threads));
  if (n_threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
    for (auto& th : pool) th.join();
  }
  GrantVectorSet out;
  for (std::size_t i = 0; i < grants.size(); ++i) {
    if (results[i]) {
      out.rows.push_back({grants[i].id, *results[i]});
    } else {
      out.unscorable++;
    }
  }
  return out;
}

std::string grant_vectors_tsv(const GrantVectorSet& set) {
  std::ostringstream out;
  out << "# grant field vectors; unscorable grants: " << set.unscorable << '\n';
  const std::size_t k = set.rows.empty() ? 0 : set.rows.front().vector.probs.size();
  out << "grant_id\tfallback";
  for (std::size_t i = 0; i < k; ++i) out << '\t' << i;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& r : set.rows) {
    check_id(r.grant);
    out << r.grant << '\t' << (r.vector.fallback ? 1 : 0);
    for (double p : r.vector.probs.vec()) out << '\t' << p;
    out << '\n';
  }
  return out.str();
}

GrantVectorSet load_grant_vectors(const std::string& path) {
  std::istringstream in(read_file(path));
  GrantVectorSet set;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("unscorable grants: ");
      if (pos != std::string::npos) set.unscorable = static_cast<std::size_t>(std::stoul(line.substr(pos + 19)));
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    const auto cells = split(line, '\t');
    if (cells.size() < 4) throw Error("malformed grant vector row in " + path);
    std::vector<double> probs;
    for (std::size_t i = 2; i < cells.size(); ++i) probs.push_back(parse_double(cells[i], path));
    set.rows.push_back({cells[0], {FieldDistribution::from_probs(std::move(probs)), cells[1] == "1"}});
  }
  return set;
}

ScoreSet score_grants(const GrantVectorSet& vectors, const DistanceMatrix& d) {
  ScoreSet out;
  out.skipped["unscorable_abstract"] = vectors.unscorable;
  for (const auto& r : vectors.rows) {
    if (r.vector.probs.size() != d.k()) throw Error("grant vector K does not match the distance matrix");
    bool ok = true;
    for (std::size_t i = 0; i < r.vector.probs.size(); ++i) {
      if (r.vector.probs[i] > 0.0 && !d.available(static_cast<FieldId>(i))) ok = false;
    }
    if (!ok) {
      out.skipped["unavailable_field"]++;
      continue;
    }
    out.rows.push_back({r.grant, "grant", ScoreBasis::grant_abstract, rao_stirling(r.vector.probs, d), 0});
  }
  assign_quintiles(out.rows);
  return out;
}

std::string scores_csv(const std::vector<ScoreRow>& rows) {
  std::ostringstream out;
  out << "# Rao-Stirling interdisciplinarity scores\n";
  out << "subject_id,subject_type,basis,rs_value,quantile_bin\n";
  for (const auto& r : rows) {
    check_id(r.subject);
    out << r.subject << ',' << r.type << ',' << to_string(r.basis) << ',' << fmt(r.rs, 9) << ',' << r.bin << '\n';
  }
  return out.str();
}

std::vector<ScoreRow> parse_scores_csv(const std::string& text) {
  std::istringstream in(text);
  std::vector<ScoreRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      if (line.rfind("subject_id,", 0) != 0) throw Error("scores file lacks the subject_id header");
      header = false;
      continue;
    }
    const auto c = split(line, ',');
    if (c.size() != 5) throw Error("malformed scores row: " + line);
    if (c[1] != "paper" && c[1] != "grant") throw Error("unknown subject type '" + c[1] + "'");
    rows.push_back({c[0], c[1], score_basis_from_string(c[2]), parse_double(c[3], "scores"), parse_int(c[4], "scores")});
  }
  return rows;
}

std::vector<ScoreRow> load_scores(const std::string& path) { return parse_scores_csv(read_file(path)); }

std::vector<ImpactRecord> load_impact(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ImpactRecord> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto c = split(line, ',');
    if (c.size() != 9) throw Error("malformed impact row: " + line);
    ImpactRecord r;
    r.paper_id = c[0];
    r.year = parse_int(c[1], path);
    r.stratum = {parse_int(c[2], path), r.year};
    r.c10 = parse_int(c[3], path);
    r.c10_norm = parse_double(c[4], path);
    r.hit = c[5] == "1";
    r.in_field = parse_int(c[6], path);
    r.out_field = parse_int(c[7], path);
    r.excluded_citers = parse_int(c[8], path);
    out.push_back(std::move(r));
  }
  return out;
}

// ------------------------------------------------------------ the table

AnalysisTable build_analysis_table(const AnalysisInputs& in) {
  if (in.store == nullptr) throw Error("analysis needs a corpus");
  const CorpusStore& store = *in.store;
  std::unordered_map<std::string, double> paper_rs, paper_rs_cit, grant_rs;
  for (const auto& r : in.scores) {
    if (r.type == "paper" && r.basis == ScoreBasis::references) paper_rs[r.subject] = r.rs;
    if (r.type == "paper" && r.basis == ScoreBasis::citations) paper_rs_cit[r.subject] = r.rs;
    if (r.type == "grant") grant_rs[r.subject] = r.rs;
  }
  std::unordered_map<std::string, std::size_t> impact_of;
  if (in.impact) {
    for (std::size_t i = 0; i < in.impact->size(); ++i) impact_of[(*in.impact)[i].paper_id] = i;
  }
  std::unordered_map<std::string, const FieldDistribution*> vector_of;
  if (in.grant_vectors) {
    for (const auto& r : in.grant_vectors->rows) vector_of[r.grant] = &r.vector.probs;
  }
  auto lookup = [](const auto& m, const std::string& id) {
    auto it = m.find(id);
    return it == m.end() ? kNaN : it->second;
  };
  auto hit_of = [&](const std::string& id) {
    auto it = impact_of.find(id);
    return it == impact_of.end() ? kNaN : ((*in.impact)[it->second].hit ? 1.0 : 0.0);
  };

  AnalysisTable t;
  for (const auto& g : store.grants()) {
    const auto& papers = store.papers_of(g.id);
    std::vector<double> hits;
    for (const auto& p : papers) hits.push_back(hit_of(p));
    t.grant_ids.push_back(g.id);
    t.grant_rs.push_back(lookup(grant_rs, g.id));
    t.grant_amount.push_back(g.amount_usd.value_or(kNaN));
    t.grant_papers.push_back(static_cast<double>(papers.size()));
    t.grant_hit_rate.push_back(mean_of(hits));
  }
  for (const auto& l : store.links()) {
    t.pair_paper_rs.push_back(lookup(paper_rs, l.paper));
    t.pair_paper_rs_cit.push_back(lookup(paper_rs_cit, l.paper));
    t.pair_grant_rs.push_back(lookup(grant_rs, l.grant));
    t.pair_hit.push_back(hit_of(l.paper));
  }
  for (const Paper* p : store.core_papers()) {
    const auto& grants = store.grants_of(p->id);
    std::vector<double> grs;
    MultiGrantPaper m;
    bool all_vectors = true;
    for (const auto& g : grants) {
      grs.push_back(lookup(grant_rs, g));
      auto it = vector_of.find(g);
      if (it == vector_of.end()) {
        all_vectors = false;
      } else {
        m.grant_vectors.push_back(*it->second);
      }
    }
    t.paper_ids.push_back(p->id);
    t.paper_year.push_back(*p->year);
    t.paper_n_grants.push_back(static_cast<int>(grants.size()));
    t.paper_n_authors.push_back(p->n_authors);
    t.paper_n_fields.push_back(static_cast<int>(p->fields.size()));
    t.paper_max_author_cites.push_back(p->max_author_cites);
    t.paper_rs.push_back(lookup(paper_rs, p->id));
    t.paper_rs_cit.push_back(lookup(paper_rs_cit, p->id));
    t.paper_hit.push_back(hit_of(p->id));
    t.paper_mean_grant_rs.push_back(grants.empty() ? kNaN : mean_of(grs));
    auto it = impact_of.find(p->id);
    t.paper_impact.push_back(it == impact_of.end() ? npos : it->second);

    const bool grant_rs_known = std::all_of(grs.begin(), grs.end(), [](double x) { return std::isfinite(x); });
    if (grants.size() >= 2 && all_vectors && grant_rs_known && std::isfinite(t.paper_rs.back()) &&
        std::isfinite(t.paper_hit.back())) {
      m.paper_rs = t.paper_rs.back();
      m.hit = t.paper_hit.back();
      m.grant_rs = grs;
      t.multi_grant.push_back(std::move(m));
    }
  }
  return t;
}

// -------------------------------------------------------------- figures

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig3a",
                                            "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig4e"};
  return ids;
}

const std::vector<std::string>& table_ids() {
  static const std::vector<std::string> ids{"tableS2", "tableS3"};
  return ids;
}

namespace {

bool has_basis(const AnalysisInputs& in, const std::string& type, std::optional<ScoreBasis> basis) {
  return std::any_of(in.scores.begin(), in.scores.end(), [&](const ScoreRow& r) {
    return r.type == type && (!basis || r.basis == *basis);
  });
}

void require_paper_scores(const AnalysisInputs& in, ScoreBasis basis = ScoreBasis::references) {
  if (!has_basis(in, "paper", basis)) throw Error("missing scores input (paper " + to_string(basis) + ")");
}

void require_grant_scores(const AnalysisInputs& in) {
  if (!has_basis(in, "grant", std::nullopt)) throw Error("missing scores input (grant)");
}

void require_impact(const AnalysisInputs& in) {
  if (!in.impact) throw Error("missing impact input");
}

void write_series(std::ostream& out, const std::string& name, const BinnedSeries& s) {
  for (std::size_t b = 0; b < s.mean.size(); ++b) {
    out << name << ',' << b + 1 << ',' << fmt(s.edges[b]) << ',' << fmt(s.edges[b + 1]) << ',' << fmt(s.x_mean[b])
        << ',' << fmt(s.mean[b]) << ',' << fmt(s.se[b]) << ',' << s.n[b] << '\n';
  }
}

const char* kSeriesHeader = "series,bin,x_lo,x_hi,x_mean,mean,se,n\n";

int trend_group(const AnalysisTable& t, std::size_t i, const std::string& group_by) {
  if (group_by == "grant-support") return t.paper_n_grants[i] > 0 ? 1 : 0;
  if (group_by == "team-size") return team_size_bin(t.paper_n_authors[i]);
  if (group_by == "n-fields") return t.paper_n_fields[i];
  if (group_by == "prominence") {
    const auto& c = t.paper_max_author_cites[i];
    if (!c) return -1;
    return *c < 100 ? 0 : (*c < 1000 ? 1 : 2);
  }
  throw Error("unknown group-by '" + group_by + "' (expected grant-support|team-size|prominence|n-fields)");
}

std::string fig2a(const AnalysisInputs& in, const FigureOptions& o) {
  require_paper_scores(in, o.trend_basis);
  const auto t = build_analysis_table(in);
  const auto& rs = o.trend_basis == ScoreBasis::citations ? t.paper_rs_cit : t.paper_rs;
  std::vector<int> groups;
  for (std::size_t i = 0; i < t.paper_ids.size(); ++i) groups.push_back(trend_group(t, i, o.group_by));
  const auto trend = trend_by_year(t.paper_year, rs, groups);
  std::ostringstream out;
  out << "# fig2a: yearly mean paper RS (" << to_string(o.trend_basis) << ") by " << o.group_by << "\n";
  out << "group,year,mean,se,n\n";
  for (const auto& [g, points] : trend) {
    for (const auto& p : points) {
      out << (g < 0 ? std::string("NA") : std::to_string(g)) << ',' << p.year << ',' << fmt(p.mean) << ','
          << fmt(p.se) << ',' << p.n << '\n';
    }
  }
  return out.str();
}

std::string fig2b(const AnalysisInputs& in, const FigureOptions& o) {
  require_paper_scores(in);
  require_grant_scores(in);
  const auto t = build_analysis_table(in);
  std::ostringstream out;
  out << "# fig2b: paper RS by grant RS bin over grant-paper pairs\n" << kSeriesHeader;
  write_series(out, "references", bin_curve(t.pair_grant_rs, t.pair_paper_rs, o.n_bins, o.bin_mode));
  if (has_basis(in, "paper", ScoreBasis::citations)) {
    write_series(out, "citations", bin_curve(t.pair_grant_rs, t.pair_paper_rs_cit, o.n_bins, o.bin_mode));
  }
  return out.str();
}

std::string fig2c(const AnalysisInputs& in, const FigureOptions& o) {
  require_paper_scores(in);
  require_impact(in);
  const auto t = build_analysis_table(in);
  std::ostringstream out;
  out << "# fig2c: hit rate by paper RS bin\n" << kSeriesHeader;
  write_series(out, "hit_rate", bin_curve(t.paper_rs, t.paper_hit, o.n_bins, o.bin_mode));
  return out.str();
}

std::string fig2d(const AnalysisInputs& in, const FigureOptions& o) {
  require_grant_scores(in);
  const auto t = build_analysis_table(in);
  std::ostringstream out;
  out << "# fig2d: papers per grant by grant RS bin\n" << kSeriesHeader;
  write_series(out, "papers_per_grant", bin_curve(t.grant_rs, t.grant_papers, o.n_bins, o.bin_mode));
  return out.str();
}

std::string fig2e(const AnalysisInputs& in, const FigureOptions& o) {
  require_grant_scores(in);
  require_impact(in);
  const auto t = build_analysis_table(in);
  std::ostringstream out;
  out << "# fig2e: hit rate of supported papers by grant RS bin\n" << kSeriesHeader;
  write_series(out, "hit_rate", bin_curve(t.grant_rs, t.grant_hit_rate, o.n_bins, o.bin_mode));
  return out.str();
}

std::string fig3a(const AnalysisInputs& in, const FigureOptions& o) {
  require_paper_scores(in);
  require_grant_scores(in);
  require_impact(in);
  const auto t = build_analysis_table(in);
  const auto h = quintile_heatmap(t.pair_paper_rs, t.pair_grant_rs, t.pair_hit, o.min_cell_n);
  std::ostringstream out;
  const auto [pq, gq] = h.argmax();
  out << "# fig3a: hit rate by (paper RS quintile, grant RS quintile); pairs=" << h.total << " argmax=(" << pq << ','
      << gq << ")\n";
  out << "paper_q,grant_q,hit_rate,n,low_n\n";
  for (int p = 0; p < 5; ++p) {
    for (int g = 0; g < 5; ++g) {
      const auto& c = h.cells[static_cast<std::size_t>(p)][static_cast<std::size_t>(g)];
      out << p + 1 << ',' << g + 1 << ',' << fmt(c.mean) << ',' << c.n << ',' << (c.low_n ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string fig3b(const AnalysisInputs& in, const FigureOptions& o) {
  require_paper_scores(in);
  require_grant_scores(in);
  require_impact(in);
  const auto t = build_analysis_table(in);
  const auto h = quintile_heatmap(t.pair_paper_rs, t.pair_grant_rs, t.pair_hit, o.min_cell_n);
  std::ostringstream out;
  out << "# fig3b: hit rate by grant RS quintile relative to the paper-quintile mean\n";
  out << "paper_q,grant_q,hit_rate,baseline,diff,n\n";
  for (std::size_t p = 0; p < 5; ++p) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& c : h.cells[p]) {
      if (c.n > 0) {
        sum += c.mean * static_cast<double>(c.n);
        n += c.n;
      }
    }
    const double base = n ? sum / static_cast<double>(n) : kNaN;
    for (std::size_t g = 0; g < 5; ++g) {
      const auto& c = h.cells[p][g];
      out << p + 1 << ',' << g + 1 << ',' << fmt(c.mean) << ',' << fmt(base) << ',' << fmt(c.mean - base) << ','
          << c.n << '\n';
    }
  }
  return out.str();
}

std::string fig4a(const AnalysisInputs& in, const FigureOptions& o) {
  require_grant_scores(in);
  const auto t = build_analysis_table(in);
  std::ostringstream out;
  out << "# fig4a: funding amount (USD) by grant RS bin\n" << kSeriesHeader;
  write_series(out, "amount_usd", bin_curve(t.grant_rs, t.grant_amount, o.n_bins, o.bin_mode));
  return out.str();
}

std::string funding_figure(const std::string& id, const AnalysisInputs& in, const FigureOptions& o,
                           const FundingSelector& sel) {
  require_grant_scores(in);
  require_impact(in);
  const auto t = build_analysis_table(in);
  const auto f = funding_conditioned_curves(t.grant_rs, t.grant_amount, t.grant_papers, t.grant_hit_rate, sel, o.n_bins);
  std::ostringstream out;
  out << "# " << id << ": productivity and hit rate by grant RS bin, funding slice " << sel.name()
      << "; selected=" << f.selected << " missing_amount=" << f.missing_amount << "\n"
      << kSeriesHeader;
  write_series(out, "papers_per_grant", f.productivity);
  write_series(out, "hit_rate", f.hit_rate);
  return out.str();
}

std::string fig4d(const AnalysisInputs& in, const FigureOptions& o) {
  require_paper_scores(in);
  require_grant_scores(in);
  require_impact(in);
  const auto t = build_analysis_table(in);
  std::vector<std::size_t> idx;
  std::vector<double> prs, grs;
  for (std::size_t i = 0; i < t.paper_ids.size(); ++i) {
    if (std::isfinite(t.paper_rs[i]) && std::isfinite(t.paper_mean_grant_rs[i]) && t.paper_impact[i] != npos) {
      idx.push_back(i);
      prs.push_back(t.paper_rs[i]);
      grs.push_back(t.paper_mean_grant_rs[i]);
    }
  }
  const std::vector<double> cuts{o.quadrant_fraction, 1.0 - o.quadrant_fraction};
  const auto pb = idr_quantiles(prs, cuts);
  const auto gb = idr_quantiles(grs, cuts);
  const auto& records = *in.impact;
  const auto baselines = stratum_baseline(records);
  std::ostringstream out;
  out << "# fig4d: in-field and out-field citations relative to the (field, year) mean, top/bottom "
      << fmt(o.quadrant_fraction, 2) << " splits\n";
  out << "paper_rs,grant_rs,in_field_diff,out_field_diff,n\n";
  for (int p : {3, 1}) {
    for (int g : {3, 1}) {
      std::vector<bool> mask(records.size(), false);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (pb[j] == p && gb[j] == g) mask[t.paper_impact[idx[j]]] = true;
      }
      const auto r = group_vs_baseline(records, baselines, mask);
      out << (p == 3 ? "high" : "low") << ',' << (g == 3 ? "high" : "low") << ',' << fmt(r.in_field_diff) << ','
          << fmt(r.out_field_diff) << ',' << r.n << '\n';
    }
  }
  return out.str();
}

std::string fig4e(const AnalysisInputs& in, const FigureOptions& o) {
  require_paper_scores(in);
  require_grant_scores(in);
  require_impact(in);
  if (!in.grant_vectors) throw Error("missing grant vectors input");
  const auto t = build_analysis_table(in);
  const auto r = fourway_grant_combo(t.multi_grant, o.paper_fraction);
  std::ostringstream out;
  out << "# fig4e: hit rate of multi-grant papers by grant combination; eligible=" << r.eligible
      << " rs_median=" << fmt(r.rs_median) << " distance_median=" << fmt(r.distance_median)
      << " rs_split_tied=" << r.rs_split_tied << " distance_split_tied=" << r.distance_split_tied << "\n";
  out << "slice,combo,hit_rate,n,rank\n";
  auto emit = [&](const char* name, const ComboSlice& s) {
    for (std::size_t c = 0; c < 4; ++c) {
      const auto combo = static_cast<Combo>(c);
      const auto pos = std::find(s.ranking.begin(), s.ranking.end(), combo);
      out << name << ',' << to_string(combo) << ',' << fmt(s.cells[c].hit_rate) << ',' << s.cells[c].n << ','
          << (pos == s.ranking.end() ? std::string("NA") : std::to_string(pos - s.ranking.begin() + 1)) << '\n';
    }
  };
  emit("top", r.top);
  emit("bottom", r.bottom);
  return out.str();
}

}  // namespace

std::string figure_csv(const std::string& id, const AnalysisInputs& in, const FigureOptions& o) {
  if (id == "fig2a") return fig2a(in, o);
  if (id == "fig2b") return fig2b(in, o);
  if (id == "fig2c") return fig2c(in, o);
  if (id == "fig2d") return fig2d(in, o);
  if (id == "fig2e") return fig2e(in, o);
  if (id == "fig3a") return fig3a(in, o);
  if (id == "fig3b") return fig3b(in, o);
  if (id == "fig4a") return fig4a(in, o);
  if (id == "fig4b") return funding_figure(id, in, o, o.funding);
  if (id == "fig4c") return funding_figure(id, in, o, FundingSelector::parse("middle-decile"));
  if (id == "fig4d") return fig4d(in, o);
  if (id == "fig4e") return fig4e(in, o);
  throw Error("unknown figure id '" + id + "'");
}

// ------------------------------------------------------------ regression

RegressionTable regression_table(const std::string& id, const AnalysisInputs& in) {
  if (id != "tableS2" && id != "tableS3") throw Error("unknown table id '" + id + "' (expected tableS2|tableS3)");
  require_paper_scores(in);
  require_grant_scores(in);
  require_impact(in);
  if (!in.grant_vectors) throw Error("missing grant vectors input");
  const CorpusStore& store = *in.store;
  const auto t = build_analysis_table(in);
  std::unordered_map<std::string, const FieldDistribution*> vector_of;
  for (const auto& r : in.grant_vectors->rows) vector_of[r.grant] = &r.vector.probs;

  DataTable data;
  auto& num = data.numeric;
  auto& cat = data.categorical;
  for (std::size_t i = 0; i < t.paper_ids.size(); ++i) {
    if (t.paper_n_grants[i] == 0 || t.paper_impact[i] == npos) continue;
    const Paper& p = *store.find_paper(t.paper_ids[i]);
    const auto& rec = (*in.impact)[t.paper_impact[i]];
    const auto& grants = store.grants_of(p.id);

    double sim = 1.0;  // a single grant is maximally similar to itself
    if (grants.size() > 1) {
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t a = 0; a < grants.size() && std::isfinite(sum); ++a) {
        for (std::size_t b = a + 1; b < grants.size(); ++b) {
          auto va = vector_of.find(grants[a]);
          auto vb = vector_of.find(grants[b]);
          if (va == vector_of.end() || vb == vector_of.end()) {
            sum = kNaN;
            break;
          }
          sum += 1.0 - grant_pair_distance(*va->second, *vb->second);
          ++pairs;
        }
      }
      sim = pairs ? sum / static_cast<double>(pairs) : kNaN;
    }
    std::set<std::string> countries;
    double funding = 0.0;
    bool any_amount = false;
    for (const auto& g : grants) {
      const Grant* gr = store.find_grant(g);
      countries.insert(gr->country);
      if (gr->amount_usd) {
        funding += *gr->amount_usd;
        any_amount = true;
      }
    }
    num["c10_norm"].push_back(rec.c10_norm);
    num["c10"].push_back(rec.c10);
    num["paper_rs"].push_back(t.paper_rs[i]);
    num["grant_rs"].push_back(t.paper_mean_grant_rs[i]);
    num["grant_similarity"].push_back(sim);
    num["n_authors"].push_back(p.n_authors);
    num["n_grants"].push_back(static_cast<double>(grants.size()));
    num["n_institutes"].push_back(p.n_institutes);
    num["n_countries"].push_back(static_cast<double>(countries.size()));
    num["total_funding"].push_back(any_amount ? funding : kNaN);
    num["n_refs"].push_back(static_cast<double>(p.refs.size()));
    cat["year"].push_back(std::to_string(rec.year));
    cat["field"].push_back(std::to_string(rec.stratum.first));
  }
  if (data.rows() == 0) throw Error("no grant-supported papers with impact records");

  // one estimation sample for every model in the table
  std::vector<std::string> used{"paper_rs",  "grant_rs",     "grant_similarity", "n_authors",
                                "n_grants",  "n_institutes", "n_countries",      "total_funding",
                                id == "tableS2" ? "c10_norm" : "c10"};
  if (id == "tableS3") used.push_back("n_refs");
  std::vector<bool> keep(data.rows(), true);
  for (const auto& c : used) {
    for (std::size_t r = 0; r < keep.size(); ++r) keep[r] = keep[r] && std::isfinite(num[c][r]);
  }
  for (auto& [name, col] : num) {
    std::vector<double> kept;
    for (std::size_t r = 0; r < keep.size(); ++r) {
      if (keep[r]) kept.push_back(col[r]);
    }
    col = std::move(kept);
  }
  for (auto& [name, col] : cat) {
    std::vector<std::string> kept;
    for (std::size_t r = 0; r < keep.size(); ++r) {
      if (keep[r]) kept.push_back(col[r]);
    }
    col = std::move(kept);
  }

  const std::vector<std::string> idr_terms{"paper_rs", "grant_rs", "grant_similarity"};
  const std::vector<std::string> controls{"n_authors", "n_grants", "n_institutes", "n_countries", "total_funding"};
  std::vector<std::vector<std::string>> models{idr_terms, controls, idr_terms};
  models[2].insert(models[2].end(), controls.begin(), controls.end());
  if (id == "tableS3") {
    models.push_back(models[2]);
    models[3].push_back("n_refs");
  }

  RegressionTable out;
  for (std::size_t m = 0; m < models.size(); ++m) {
    RegressionSpec spec;
    spec.regressors = models[m];
    spec.log1p = {"n_authors", "n_grants", "n_institutes", "n_countries", "total_funding", "n_refs"};
    if (id == "tableS2") {
      spec.response = "c10_norm";
      spec.log1p.insert("c10_norm");
    } else {
      spec.response = "c10";
      spec.log1p.insert("c10");
      spec.standardize = true;
      spec.dummies = {"year", "field"};
    }
    out.models.push_back(std::to_string(m + 1));
    out.results.push_back(ols(spec, data));
  }
  return out;
}

std::string regression_csv(const std::string& id, const RegressionTable& table) {
  std::ostringstream out;
  if (id == "tableS2") {
    out << "# tableS2: OLS of ln(c10_norm + 1); counts and funding enter as ln(x + 1)\n";
  } else {
    out << "# tableS3: OLS of standardized ln(c10 + 1) with year and field dummies; continuous variables z-scored\n";
  }
  out << "model,term,estimate,se,t,p,vif\n";
  for (std::size_t m = 0; m < table.results.size(); ++m) {
    const auto& r = table.results[m];
    const auto& model = table.models[m];
    for (std::size_t j = 0; j < r.names.size(); ++j) {
      const auto v = r.vif.find(r.names[j]);
      out << model << ',' << r.names[j] << ',' << fmt(r.coef[j], 9) << ',' << fmt(r.se[j], 9) << ','
          << fmt(r.t[j], 6) << ',' << fmt(r.p[j], 9) << ',' << (v == r.vif.end() ? "NA" : fmt(v->second)) << '\n';
    }
    out << model << ",N," << r.n << ",NA,NA,NA,NA\n";
    out << model << ",R2," << fmt(r.r2, 9) << ",NA,NA,NA,NA\n";
    out << model << ",adj_R2," << fmt(r.adj_r2, 9) << ",NA,NA,NA,NA\n";
  }
  return out.str();
}

}  // namespace idr
