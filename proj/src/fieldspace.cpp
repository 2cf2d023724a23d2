#include "idr/fieldspace.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace idr {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::references: return "references";
    case Provenance::citations: return "citations";
    case Provenance::lda: return "lda";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "references") return Provenance::references;
  if (s == "citations") return Provenance::citations;
  if (s == "lda") return Provenance::lda;
  throw Error("unknown distance provenance '" + s + "' (expected references|citations|lda)");
}

std::string to_string(VectorMode m) { return m == VectorMode::references ? "references" : "citations"; }

VectorMode vector_mode_from_string(const std::string& s) {
  if (s == "references") return VectorMode::references;
  if (s == "citations") return VectorMode::citations;
  throw Error("unknown basis '" + s + "' (expected references|citations)");
}

DistanceMatrix::DistanceMatrix(std::size_t k, Provenance provenance)
    : k_(k), provenance_(provenance), values_(k * k, 0.0), available_(k, true) {}

void DistanceMatrix::set(std::size_t i, std::size_t j, double d) {
  values_[i * k_ + j] = d;
  values_[j * k_ + i] = d;
}

void DistanceMatrix::set_available(std::size_t i, bool on) {
  available_[i] = on;
  if (on) return;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < k_; ++j) set(i, j, nan);
}

void DistanceMatrix::validate() const {
  for (std::size_t i = 0; i < k_; ++i) {
    if (!available_[i]) continue;
    if ((*this)(i, i) != 0.0) throw Error("distance matrix has a nonzero diagonal");
    for (std::size_t j = 0; j < k_; ++j) {
      if (!available_[j]) continue;
      const double d = (*this)(i, j);
      if (!(d >= 0.0 && d <= 1.0)) throw Error("distance matrix entry outside [0,1]");
      if (d != (*this)(j, i)) throw Error("distance matrix is not symmetric");
    }
  }
}

std::string DistanceMatrix::to_tsv() const {
  std::ostringstream out;
  out << "# provenance: " << to_string(provenance_) << '\n';
  out << "field_id";
  for (std::size_t j = 0; j < k_; ++j) out << '\t' << j;
  out << '\n' << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < k_; ++i) {
    out << i;
    for (std::size_t j = 0; j < k_; ++j) {
      out << '\t';
      if (available_[i] && available_[j]) {
        out << (*this)(i, j);
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
  return out.str();
}

void DistanceMatrix::save_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_tsv();
}

DistanceMatrix DistanceMatrix::load_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open distance matrix " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tsv(ss.str());
}

DistanceMatrix DistanceMatrix::parse_tsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Provenance prov = Provenance::citations;
  std::vector<std::vector<std::string>> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# provenance: ";
      if (line.rfind(key, 0) == 0) prov = provenance_from_string(line.substr(key.size()));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  const std::size_t k = rows.size();
  DistanceMatrix d(k, prov);
  for (std::size_t i = 0; i < k; ++i) {
    if (rows[i].size() != k + 1) throw Error("distance matrix row " + std::to_string(i) + " has wrong width");
    if (rows[i][0] != std::to_string(i)) throw Error("distance matrix rows out of order");
  }
  for (std::size_t i = 0; i < k; ++i) {
    bool any_value = false;
    for (std::size_t j = 0; j < k; ++j) {
      if (rows[i][j + 1] != "NA") any_value = true;
    }
    if (!any_value) d.set_available(i, false);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!d.available(static_cast<FieldId>(i))) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (!d.available(static_cast<FieldId>(j))) continue;
      const std::string& cell = rows[i][j + 1];
      if (cell == "NA") throw Error("unexpected NA between available fields");
      d.values_[i * k + j] = std::stod(cell);
    }
  }
  return d;
}

FieldVectorResult paper_field_vector(const Paper& paper, VectorMode mode, const CorpusStore& store) {
  std::vector<double> mass(store.k(), 0.0);
  std::size_t resolved = 0, skipped = 0;
  auto add = [&](const std::string& id) {
    const Paper* n = store.find_paper(id);
    if (n == nullptr || n->fields.empty()) {
      ++skipped;
      return;
    }
    for (const auto& f : n->fields) mass[static_cast<std::size_t>(f.field)] += f.weight;
    ++resolved;
  };
  if (mode == VectorMode::references) {
    for (const auto& r : paper.refs) add(r);
  } else {
    for (const auto& c : paper.citers) add(c.id);
  }
  if (resolved == 0) throw Error("no basis for vector: paper " + paper.id + " has no resolvable " + to_string(mode));
  return {FieldDistribution::normalize(std::move(mass)), resolved, skipped};
}

FieldAggregate field_aggregates(const CorpusStore& store, VectorMode mode, AggregateAssignment assignment) {
  const std::size_t k = store.k();
  FieldAggregate agg;
  agg.k = k;
  agg.vectors.assign(k, std::vector<double>(k, 0.0));
  agg.n_papers.assign(k, 0.0);
  for (const Paper* p : store.core_papers()) {
    std::optional<FieldVectorResult> vec;
    try {
      vec = paper_field_vector(*p, mode, store);
    } catch (const Error&) {
      ++agg.skipped_papers;
      continue;
    }
    if (assignment == AggregateAssignment::primary) {
      const auto f = static_cast<std::size_t>(primary_field(*p));
      for (std::size_t j = 0; j < k; ++j) agg.vectors[f][j] += vec->probs[j];
      agg.n_papers[f] += 1.0;
    } else {
      for (const auto& fw : p->fields) {
        const auto f = static_cast<std::size_t>(fw.field);
        for (std::size_t j = 0; j < k; ++j) agg.vectors[f][j] += fw.weight * vec->probs[j];
        agg.n_papers[f] += fw.weight;
      }
    }
  }
  return agg;
}

DistanceMatrix field_distance_matrix(const FieldAggregate& agg, Provenance provenance) {
  const std::size_t k = agg.k;
  std::vector<bool> ok(k, false);
  std::size_t n_ok = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double norm = 0.0;
    for (double x : agg.vectors[i]) norm += x * x;
    ok[i] = agg.n_papers[i] > 0.0 && norm > 0.0;
    n_ok += ok[i] ? 1 : 0;
  }
  if (n_ok < 2) throw Error("distance matrix needs at least 2 non-empty fields");
  DistanceMatrix d(k, provenance);
  for (std::size_t i = 0; i < k; ++i) {
    if (!ok[i]) d.set_available(i, false);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!ok[i]) continue;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!ok[j]) continue;
      const double dist = 1.0 - cosine_similarity(agg.vectors[i], agg.vectors[j]);
      d.set(i, j, std::clamp(dist, 0.0, 1.0));
    }
  }
  return d;
}

double compare_distance_matrices(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (a.k() != b.k()) throw Error("distance matrices have different K");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < a.k(); ++i) {
    const auto fi = static_cast<FieldId>(i);
    if (!a.available(fi) || !b.available(fi)) continue;
    for (std::size_t j = i + 1; j < a.k(); ++j) {
      const auto fj = static_cast<FieldId>(j);
      if (!a.available(fj) || !b.available(fj)) continue;
      xs.push_back(a(i, j));
      ys.push_back(b(i, j));
    }
  }
  if (xs.size() < 3) throw Error("fewer than 3 shared field pairs to correlate");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("constant distances; correlation undefined");
  return sxy / std::sqrt(sxx * syy);
}

double grant_pair_distance(const FieldDistribution& a, const FieldDistribution& b) {
  return std::clamp(1.0 - cosine_similarity(a.probs(), b.probs()), 0.0, 1.0);
}

}  // namespace idr
