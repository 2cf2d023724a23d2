#include "idr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "idr/random.hpp"

namespace idr {

using nlohmann::json;

namespace {

std::vector<double> dirichlet(Rng& rng, std::size_t n, double a) {
  std::gamma_distribution<double> gamma(a, 1.0);
  std::vector<double> x(n);
  double sum = 0.0;
  for (auto& v : x) {
    v = gamma(rng);
    sum += v;
  }
  if (sum <= 0.0) {
    // every draw underflowed; fall back to one random atom
    std::fill(x.begin(), x.end(), 0.0);
    x[rng.below(n)] = 1.0;
    return x;
  }
  for (auto& v : x) v /= sum;
  return x;
}

std::size_t categorical(Rng& rng, std::span<const double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (u < w[i]) return i;
    u -= w[i];
  }
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return w.size() - 1;
}

std::string word_token(std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%04zu", v);
  return buf;
}

std::vector<std::string> word_tokens(std::size_t v) {
  std::vector<std::string> out;
  out.reserve(v);
  for (std::size_t i = 0; i < v; ++i) out.push_back(word_token(i));
  return out;
}

std::string sample_text(Rng& rng, const GroundTruth& truth, std::span<const double> theta, std::size_t length) {
  std::string text;
  for (std::size_t t = 0; t < length; ++t) {
    const std::size_t z = categorical(rng, theta);
    const std::size_t w = categorical(rng, std::span<const double>(truth.phi).subspan(z * truth.v, truth.v));
    if (!text.empty()) text += ' ';
    text += truth.tokens[w];
  }
  return text;
}

double ring_distance(std::size_t i, std::size_t j, std::size_t k) {
  const std::size_t d = i > j ? i - j : j - i;
  return static_cast<double>(std::min(d, k - d));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double distance(std::span<const double> a, std::span<const double> b) { return 1.0 - cosine_similarity(a, b); }

}  // namespace

std::string GroundTruth::to_json() const {
  json j;
  j["k"] = k;
  j["v"] = v;
  j["tokens"] = tokens;
  j["phi"] = phi;
  j["doc_ids"] = doc_ids;
  j["thetas"] = thetas;
  j["labels"] = labels;
  j["params"] = params;
  j["grant_level"] = grant_level;
  j["paper_mixing"] = paper_mixing;
  return j.dump();
}

GroundTruth GroundTruth::from_json(const std::string& text) {
  GroundTruth t;
  try {
    const json j = json::parse(text);
    t.k = j.at("k").get<std::size_t>();
    t.v = j.at("v").get<std::size_t>();
    t.tokens = j.at("tokens").get<std::vector<std::string>>();
    t.phi = j.at("phi").get<std::vector<double>>();
    t.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    t.thetas = j.at("thetas").get<std::vector<std::vector<double>>>();
    t.labels = j.at("labels").get<std::vector<std::vector<FieldId>>>();
    t.params = j.at("params").get<std::map<std::string, double>>();
    t.grant_level = j.at("grant_level").get<std::map<std::string, double>>();
    t.paper_mixing = j.at("paper_mixing").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed ground truth: ") + e.what());
  }
  if (t.phi.size() != t.k * t.v || t.tokens.size() != t.v) throw Error("ground truth phi does not match K x V");
  return t;
}

void GroundTruth::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << '\n';
}

GroundTruth GroundTruth::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

LdaSynthCorpus gen_lda_corpus(const LdaSynthConfig& c) {
  if (c.doc_length < 1) throw Error("doc_length must be >= 1");
  if (c.k < 2 || c.v < 1 || c.n_docs < 1) throw Error("synthetic LDA corpus needs K >= 2, V >= 1, n_docs >= 1");
  if (c.label_multiplicity.empty() || c.label_multiplicity.size() > c.k) {
    throw Error("label multiplicity distribution must have 1..K entries");
  }
  if (c.disjoint_vocab && c.v < c.k) throw Error("disjoint vocabularies need V >= K");
  const Rng root(c.seed);

  LdaSynthCorpus out;
  GroundTruth& t = out.truth;
  t.k = c.k;
  t.v = c.v;
  t.tokens = word_tokens(c.v);
  t.phi.assign(c.k * c.v, 0.0);
  Rng phi_rng = root.stream("phi");
  for (std::size_t k = 0; k < c.k; ++k) {
    std::size_t lo = 0, hi = c.v;
    if (c.disjoint_vocab) {
      lo = k * c.v / c.k;
      hi = (k + 1) * c.v / c.k;
    }
    const auto row = dirichlet(phi_rng, hi - lo, c.eta);
    std::copy(row.begin(), row.end(), t.phi.begin() + static_cast<std::ptrdiff_t>(k * c.v + lo));
  }
  t.params = {{"k", double(c.k)},       {"v", double(c.v)},       {"n_docs", double(c.n_docs)},
              {"doc_length", double(c.doc_length)}, {"alpha", c.alpha}, {"eta", c.eta},
              {"seed", double(c.seed)}, {"disjoint_vocab", c.disjoint_vocab ? 1.0 : 0.0}};

  Rng doc_rng = root.stream("docs");
  std::vector<FieldId> all(c.k);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t d = 0; d < c.n_docs; ++d) {
    const std::size_t m = categorical(doc_rng, c.label_multiplicity) + 1;
    std::vector<FieldId> pool = all;
    std::vector<FieldId> labels;
    for (std::size_t i = 0; i < m; ++i) {
      const auto pick = doc_rng.below(pool.size());
      labels.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::sort(labels.begin(), labels.end());
    const auto mix = dirichlet(doc_rng, m, c.alpha);
    std::vector<double> theta(c.k, 0.0);
    for (std::size_t i = 0; i < m; ++i) theta[static_cast<std::size_t>(labels[i])] = mix[i];

    char id[24];
    std::snprintf(id, sizeof id, "d%06zu", d);
    out.docs.push_back({id, labels, sample_text(doc_rng, t, theta, c.doc_length)});
    t.doc_ids.emplace_back(id);
    t.thetas.push_back(std::move(theta));
    t.labels.push_back(std::move(labels));
  }
  return out;
}

double matched_topic_tv(const GroundTruth& truth, const LdaModel& model) {
  if (model.k != truth.k) throw Error("model and ground truth have different K");
  std::vector<std::optional<std::uint32_t>> to_model(truth.v);
  for (std::size_t w = 0; w < truth.v; ++w) to_model[w] = model.vocab.find(truth.tokens[w]);
  double total = 0.0;
  for (std::size_t k = 0; k < truth.k; ++k) {
    double tv = 0.0;
    double covered = 0.0;
    for (std::size_t w = 0; w < truth.v; ++w) {
      const double est = to_model[w] ? model.phi_at(k, *to_model[w]) : 0.0;
      if (to_model[w]) covered += est;
      tv += std::abs(truth.phi_at(k, w) - est);
    }
    // model mass on tokens outside the true vocabulary
    tv += std::max(0.0, 1.0 - covered);
    total += 0.5 * tv;
  }
  return total / static_cast<double>(truth.k);
}

CorpusStore lda_corpus_store(const LdaSynthCorpus& corpus) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < corpus.truth.k; ++k) names.push_back("field" + std::to_string(k));
  std::vector<Paper> papers;
  for (const auto& d : corpus.docs) {
    Paper p;
    p.id = d.id;
    p.year = 2000;
    p.abstract = d.text;
    for (FieldId f : d.labels) p.fields.push_back({f, 1.0 / static_cast<double>(d.labels.size())});
    papers.push_back(std::move(p));
  }
  return CorpusStore(FieldTaxonomy(std::move(names)), std::move(papers), {}, {});
}

CitationSynthCorpus gen_citation_corpus(const CitationSynthConfig& c) {
  if (c.k < 3) throw Error("synthetic citation corpus needs K >= 3");
  if (c.year_max < c.year_min) throw Error("year_max precedes year_min");
  if (c.n_grants < 2 || c.refs_per_paper < 1 || c.citers_per_paper < 1 || c.background_per_field_year < 1) {
    throw Error("synthetic citation corpus needs >= 2 grants and >= 1 reference, citer and background paper");
  }
  if (c.grant_offfield_min < 0.0 || c.grant_offfield_min + c.grant_offfield_span > 0.5 || c.grant_offfield_span < 0.0) {
    throw Error("grant off-field mass must stay within [0, 0.5]");
  }
  if (c.mixing && (*c.mixing < 0.0 || *c.mixing > 1.0)) throw Error("mixing must lie in [0,1]");
  for (double p : {c.citation_noise, c.cofund_prob, c.proximate_share}) {
    if (p < 0.0 || p > 1.0) throw Error("probabilities must lie in [0,1]");
  }
  const Rng root(c.seed);
  const std::size_t k = c.k;
  const int paper_year_max = c.year_max + 2;
  const int bg_min = c.year_min - 10;
  const int bg_max = paper_year_max + 10;

  CitationSynthCorpus out;
  GroundTruth& t = out.truth;
  t.k = k;
  t.v = c.v;
  t.tokens = word_tokens(c.v);
  t.phi.assign(k * c.v, 0.0);
  {
    Rng phi_rng = root.stream("phi");
    for (std::size_t f = 0; f < k; ++f) {
      const auto row = dirichlet(phi_rng, c.v, c.eta);
      std::copy(row.begin(), row.end(), t.phi.begin() + static_cast<std::ptrdiff_t>(f * c.v));
    }
  }

  // cross-field target weights per home field
  std::vector<std::vector<double>> cross(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      cross[i][j] = c.uniform_cross ? 1.0 : std::exp(-(ring_distance(i, j, k) - 1.0) / c.kernel_scale);
    }
  }

  std::vector<std::string> names;
  for (std::size_t f = 0; f < k; ++f) names.push_back("field" + std::to_string(f));

  // background pool, indexed [field][year - bg_min]
  std::vector<Paper> papers;
  std::vector<std::vector<std::vector<std::size_t>>> pool(k);
  {
    Rng bg_rng = root.stream("background");
    for (std::size_t f = 0; f < k; ++f) {
      pool[f].resize(static_cast<std::size_t>(bg_max - bg_min + 1));
      for (int y = bg_min; y <= bg_max; ++y) {
        for (std::size_t i = 0; i < c.background_per_field_year; ++i) {
          Paper p;
          char id[48];
          std::snprintf(id, sizeof id, "b%zu_%d_%zu", f, y, i);
          p.id = id;
          p.year = y;
          p.fields = {{static_cast<FieldId>(f), 1.0}};
          p.n_authors = 1 + static_cast<int>(bg_rng.below(4));
          pool[f][static_cast<std::size_t>(y - bg_min)].push_back(papers.size());
          papers.push_back(std::move(p));
        }
      }
    }
  }

  // grants
  struct GrantDraft {
    std::size_t home;
    double level;
    std::vector<double> theta;
  };
  std::vector<Grant> grants;
  std::vector<GrantDraft> drafts;
  std::vector<std::vector<std::size_t>> grants_by_home(k);
  {
    Rng g_rng = root.stream("grants");
    std::lognormal_distribution<double> amount(std::log(5.0e5), 0.8);
    static const char* const countries[] = {"US", "US", "US", "US", "CA", "GB", "DE"};
    for (std::size_t g = 0; g < c.n_grants; ++g) {
      GrantDraft d;
      d.home = g_rng.below(k);
      d.level = g_rng.uniform();
      d.theta.assign(k, 0.0);
      // off-field mass stays in [offfield_min, offfield_min + offfield_span] <= 0.5 so RS grows with the level
      const double off = c.grant_offfield_min + c.grant_offfield_span * d.level;
      d.theta[d.home] = 1.0 - off;
      d.theta[(d.home + k / 2) % k] = off;
      Grant gr;
      char id[24];
      std::snprintf(id, sizeof id, "g%05zu", g);
      gr.id = id;
      gr.agency = g_rng.below(2) == 0 ? "NSF" : "NIH";
      gr.country = countries[g_rng.below(7)];
      gr.start_year = c.year_min + static_cast<int>(g_rng.below(static_cast<std::uint64_t>(c.year_max - c.year_min + 1)));
      gr.amount_usd = std::round(amount(g_rng));
      gr.abstract = sample_text(g_rng, t, d.theta, c.abstract_length);
      t.grant_level[gr.id] = d.level;
      grants_by_home[d.home].push_back(g);
      grants.push_back(std::move(gr));
      drafts.push_back(std::move(d));
    }
  }

  // core papers: grant attachment, year, labels, mixing level
  struct PaperDraft {
    std::size_t home;
    int year;
    std::vector<std::size_t> grants;
    double mixing;
    double mean_level;
    double grant_distance;
  };
  std::vector<PaperDraft> core;
  std::vector<Link> links;
  {
    Rng p_rng = root.stream("papers");
    std::normal_distribution<double> noise(0.0, c.mixing_noise);
    const double span = std::max(1, paper_year_max - c.year_min);
    for (std::size_t g = 0; g < c.n_grants; ++g) {
      std::poisson_distribution<int> extra(c.productivity_lambda * std::exp(-c.productivity_beta * drafts[g].level));
      const int n = 1 + extra(p_rng);
      for (int i = 0; i < n; ++i) {
        PaperDraft p;
        p.home = drafts[g].home;
        p.year = std::min(paper_year_max, grants[g].start_year + static_cast<int>(p_rng.below(3)));
        p.grants = {g};
        if (p_rng.uniform() < c.cofund_prob) {
          const auto& same = grants_by_home[p.home];
          std::size_t other = g;
          if (p_rng.uniform() < c.proximate_share && same.size() > 1) {
            while (other == g) other = same[p_rng.below(same.size())];
          } else {
            while (other == g) other = p_rng.below(c.n_grants);
          }
          p.grants.push_back(other);
        }
        double level = 0.0;
        for (auto gi : p.grants) level += drafts[gi].level;
        p.mean_level = level / static_cast<double>(p.grants.size());
        p.grant_distance = p.grants.size() > 1 ? distance(drafts[p.grants[0]].theta, drafts[p.grants[1]].theta) : 0.0;
        const double drift = noise(p_rng);
        if (c.mixing) {
          p.mixing = *c.mixing;
        } else {
          p.mixing = std::clamp(c.mixing_base + c.mixing_gamma * p.mean_level +
                                    c.mixing_trend * (p.year - c.year_min) / span + drift,
                                0.0, 0.95);
        }
        core.push_back(std::move(p));
      }
    }
  }

  auto zscore = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    std::vector<double> z;
    for (double x : v) z.push_back(sd > 0.0 ? (x - mean) / sd : 0.0);
    return z;
  };
  std::vector<double> mix_v, level_v;
  for (const auto& p : core) {
    mix_v.push_back(p.mixing);
    level_v.push_back(p.mean_level);
  }
  const auto z_mix = zscore(mix_v);
  const auto z_level = zscore(level_v);

  {
    Rng e_rng = root.stream("edges");
    Rng a_rng = root.stream("abstracts");
    std::poisson_distribution<int> base_citers(static_cast<double>(c.citers_per_paper - 1));
    std::poisson_distribution<int> breakout_citers(static_cast<double>(c.breakout_extra));
    std::poisson_distribution<int> authors(3.0), institutes(1.0);
    auto pick_field = [&](std::size_t home, double m) {
      return e_rng.uniform() < m ? categorical(e_rng, cross[home]) : home;
    };
    auto pick_from = [&](std::size_t f, int year) -> const Paper& {
      const auto& cell = pool[f][static_cast<std::size_t>(year - bg_min)];
      return papers[cell[e_rng.below(cell.size())]];
    };
    std::vector<Paper> core_papers;
    for (std::size_t i = 0; i < core.size(); ++i) {
      const auto& d = core[i];
      Paper p;
      char id[24];
      std::snprintf(id, sizeof id, "p%06zu", i);
      p.id = id;
      p.year = d.year;
      const FieldId home = static_cast<FieldId>(d.home);
      std::vector<double> theta(k, 0.0);
      if (a_rng.uniform() < 0.3) {
        const auto second = static_cast<FieldId>((d.home + 1) % k);
        p.fields = {{home, 0.7}, {second, 0.3}};
        std::sort(p.fields.begin(), p.fields.end(), [](const auto& a, const auto& b) { return a.field < b.field; });
        theta[d.home] = 0.7;
        theta[static_cast<std::size_t>(second)] = 0.3;
      } else {
        p.fields = {{home, 1.0}};
        theta[d.home] = 1.0;
      }
      p.abstract = sample_text(a_rng, t, theta, c.abstract_length);
      p.n_authors = 1 + authors(a_rng);
      p.n_institutes = 1 + institutes(a_rng);
      p.max_author_cites = static_cast<long long>(a_rng.below(5000));

      std::set<std::string> refs;
      for (std::size_t r = 0; r < c.refs_per_paper; ++r) {
        const int y = d.year - static_cast<int>(e_rng.below(11));
        refs.insert(pick_from(pick_field(d.home, d.mixing), y).id);
      }
      p.refs.assign(refs.begin(), refs.end());

      const double logit = c.breakout_a + c.breakout_paper * z_mix[i] - c.breakout_grant * z_level[i] -
                           c.breakout_distance * d.grant_distance;
      int n_cite = 1 + base_citers(e_rng);
      if (e_rng.uniform() < logistic(logit)) n_cite += breakout_citers(e_rng);
      std::set<std::string> seen;
      for (int r = 0; r < n_cite; ++r) {
        for (int attempt = 0; attempt < 8; ++attempt) {
          const std::size_t f = e_rng.uniform() < c.citation_noise ? e_rng.below(k) : pick_field(d.home, d.mixing);
          const Paper& citer = pick_from(f, d.year + static_cast<int>(e_rng.below(11)));
          if (seen.insert(citer.id).second) {
            p.citers.push_back({citer.id, citer.year});
            break;
          }
        }
      }
      std::sort(p.citers.begin(), p.citers.end(), [](const Citer& a, const Citer& b) { return a.id < b.id; });

      for (auto g : d.grants) links.push_back({grants[g].id, p.id});
      t.doc_ids.push_back(p.id);
      t.thetas.push_back(theta);
      std::vector<FieldId> labels;
      for (const auto& fw : p.fields) labels.push_back(fw.field);
      t.labels.push_back(std::move(labels));
      t.paper_mixing[p.id] = d.mixing;
      p.core = true;
      core_papers.push_back(std::move(p));
    }
    papers.insert(papers.end(), std::make_move_iterator(core_papers.begin()),
                  std::make_move_iterator(core_papers.end()));
  }

  t.params = {{"k", double(k)},
              {"seed", double(c.seed)},
              {"n_grants", double(c.n_grants)},
              {"mixing", c.mixing.value_or(-1.0)},
              {"uniform_cross", c.uniform_cross ? 1.0 : 0.0},
              {"mixing_base", c.mixing_base},
              {"mixing_gamma", c.mixing_gamma},
              {"mixing_trend", c.mixing_trend},
              {"mixing_noise", c.mixing_noise},
              {"citation_noise", c.citation_noise},
              {"productivity_lambda", c.productivity_lambda},
              {"productivity_beta", c.productivity_beta},
              {"cofund_prob", c.cofund_prob},
              {"proximate_share", c.proximate_share},
              {"breakout_a", c.breakout_a},
              {"breakout_paper", c.breakout_paper},
              {"breakout_grant", c.breakout_grant},
              {"breakout_distance", c.breakout_distance},
              {"breakout_extra", double(c.breakout_extra)},
              {"grant_offfield_min", c.grant_offfield_min},
              {"grant_offfield_span", c.grant_offfield_span},
              {"year_min", double(c.year_min)},
              {"year_max", double(c.year_max)}};

  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
  out.store = CorpusStore(FieldTaxonomy(std::move(names)), std::move(papers), std::move(grants), std::move(links));
  return out;
}

void write_synth_corpus(const CorpusStore& store, const GroundTruth& truth, const std::string& dir) {
  write_corpus(store, dir);
  truth.save((std::filesystem::path(dir) / "groundtruth.json").string());
}

}  // namespace idr
