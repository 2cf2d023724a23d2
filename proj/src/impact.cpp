#include "idr/impact.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace idr {

C10Count c10(const Paper& paper) {
  if (!paper.year) throw Error("paper " + paper.id + " has no publication year");
  C10Count c;
  for (const auto& citer : paper.citers) {
    if (!citer.year) {
      c.missing_year++;
    } else if (*citer.year >= *paper.year && *citer.year <= *paper.year + 10) {
      c.count++;
    }
  }
  return c;
}

FieldSplit infield_outfield(const Paper& paper, const CorpusStore& store) {
  const FieldId own = primary_field(paper);
  FieldSplit s;
  for (const auto& citer : paper.citers) {
    const Paper* c = store.find_paper(citer.id);
    if (c == nullptr || c->fields.empty()) {
      s.excluded++;
    } else if (primary_field(*c) == own) {
      s.in_field++;
    } else {
      s.out_field++;
    }
  }
  return s;
}

std::vector<ImpactRecord> impact_records(const CorpusStore& store) {
  std::vector<ImpactRecord> out;
  for (const Paper* p : store.core_papers()) {
    ImpactRecord r;
    r.paper_id = p->id;
    r.year = *p->year;
    r.stratum = {primary_field(*p), r.year};
    const auto c = c10(*p);
    r.c10 = c.count;
    r.missing_year_citers = c.missing_year;
    const auto split = infield_outfield(*p, store);
    r.in_field = split.in_field;
    r.out_field = split.out_field;
    r.excluded_citers = split.excluded;
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::map<Stratum, std::vector<std::size_t>> group_by_stratum(const std::vector<ImpactRecord>& records) {
  std::map<Stratum, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) groups[records[i].stratum].push_back(i);
  return groups;
}

}  // namespace

void normalize_c10(std::vector<ImpactRecord>& records) {
  for (const auto& [stratum, idx] : group_by_stratum(records)) {
    double sum = 0.0;
    for (auto i : idx) sum += records[i].c10;
    const double mean = sum / static_cast<double>(idx.size());
    for (auto i : idx) {
      records[i].degenerate_stratum = mean == 0.0;
      records[i].c10_norm = mean == 0.0 ? 0.0 : records[i].c10 / mean;
    }
  }
}

void hit_flags(std::vector<ImpactRecord>& records, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction < 1.0)) throw Error("top_fraction must lie in (0,1)");
  for (const auto& [stratum, idx] : group_by_stratum(records)) {
    std::vector<int> values;
    values.reserve(idx.size());
    for (auto i : idx) values.push_back(records[i].c10);
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    // nearest-rank (1 - f) quantile: the (n - floor(f n))-th smallest value
    const auto n_top = std::min(n - 1, static_cast<std::size_t>(std::floor(top_fraction * static_cast<double>(n) + 1e-9)));
    const int threshold = values[n - n_top - 1];
    for (auto i : idx) {
      records[i].hit = records[i].c10 > threshold;
      records[i].small_stratum = n_top == 0;
    }
  }
}

std::map<Stratum, StratumBaseline> stratum_baseline(const std::vector<ImpactRecord>& records) {
  std::map<Stratum, StratumBaseline> out;
  for (const auto& [stratum, idx] : group_by_stratum(records)) {
    StratumBaseline b;
    for (auto i : idx) {
      b.in_field += records[i].in_field;
      b.out_field += records[i].out_field;
    }
    b.n = idx.size();
    b.in_field /= static_cast<double>(b.n);
    b.out_field /= static_cast<double>(b.n);
    b.low_n = b.n == 1;
    out.emplace(stratum, b);
  }
  return out;
}

GroupVsBaseline group_vs_baseline(const std::vector<ImpactRecord>& records,
                                  const std::map<Stratum, StratumBaseline>& baselines,
                                  const std::vector<bool>& selected) {
  if (selected.size() != records.size()) throw Error("selection mask does not match the records");
  GroupVsBaseline g;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!selected[i]) continue;
    const auto& b = baselines.at(records[i].stratum);
    g.in_field_diff += records[i].in_field - b.in_field;
    g.out_field_diff += records[i].out_field - b.out_field;
    g.n++;
  }
  if (g.n > 0) {
    g.in_field_diff /= static_cast<double>(g.n);
    g.out_field_diff /= static_cast<double>(g.n);
  }
  return g;
}

std::vector<ImpactRecord> compute_impact(const CorpusStore& store, double top_fraction) {
  auto records = impact_records(store);
  normalize_c10(records);
  hit_flags(records, top_fraction);
  return records;
}

std::string impact_csv(const std::vector<ImpactRecord>& records) {
  std::ostringstream out;
  out << "# paper impact: 10-year citations normalized within (primary field, year), top-share hit flags\n";
  out << "paper_id,year,primary_field,c10,c10_norm,hit,in_field,out_field,excluded_citers\n";
  out << std::fixed << std::setprecision(9);
  for (const auto& r : records) {
    out << r.paper_id << ',' << r.year << ',' << r.stratum.first << ',' << r.c10 << ',' << r.c10_norm << ','
        << (r.hit ? 1 : 0) << ',' << r.in_field << ',' << r.out_field << ',' << r.excluded_citers << '\n';
  }
  return out.str();
}

}  // namespace idr
