#include "idr/lda.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "idr/fieldspace.hpp"
#include "idr/random.hpp"
#include "idr/text.hpp"
#include "json.hpp"

namespace idr {

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'L', 'L', 'D', 'A'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("truncated model file");
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw Error("truncated model file");
  return s;
}

std::string corpus_fingerprint(const TrainingCorpus& corpus, std::size_t k) {
  Fnv1a h;
  h.update_pod(static_cast<std::uint64_t>(k));
  for (const auto& t : corpus.vocab.tokens()) {
    h.update(t);
    h.update("\n", 1);
  }
  for (const auto& d : corpus.docs) {
    h.update_pod(static_cast<std::uint64_t>(d.labels.size()));
    for (FieldId l : d.labels) h.update_pod(l);
    h.update_pod(static_cast<std::uint64_t>(d.words.size()));
    h.update(d.words.data(), d.words.size() * sizeof(std::uint32_t));
  }
  return h.hex();
}

// Per-document sampler state for the label-restricted sweep.
struct DocState {
  std::vector<std::uint32_t> slot;   // index into labels per token
  std::vector<std::uint32_t> n_slot; // tokens per label slot
};

struct Counts {
  std::vector<std::uint64_t> word;   // K x V
  std::vector<std::uint64_t> total;  // K
};

void sweep_documents(const TrainingCorpus& corpus, std::size_t begin, std::size_t end, std::vector<DocState>& states,
                     Counts& counts, std::size_t v, double alpha, double eta, Rng& rng,
                     std::vector<double>& weights) {
  const double v_eta = static_cast<double>(v) * eta;
  for (std::size_t d = begin; d < end; ++d) {
    const auto& doc = corpus.docs[d];
    auto& st = states[d];
    const std::size_t n_labels = doc.labels.size();
    weights.resize(n_labels);
    for (std::size_t i = 0; i < doc.words.size(); ++i) {
      const std::uint32_t w = doc.words[i];
      const std::uint32_t old = st.slot[i];
      const auto old_k = static_cast<std::size_t>(doc.labels[old]);
      st.n_slot[old]--;
      counts.word[old_k * v + w]--;
      counts.total[old_k]--;
      if (n_labels == 1) {
        st.n_slot[0]++;
        counts.word[old_k * v + w]++;
        counts.total[old_k]++;
        continue;
      }
      double cum = 0.0;
      for (std::size_t s = 0; s < n_labels; ++s) {
        const auto k = static_cast<std::size_t>(doc.labels[s]);
        cum += (static_cast<double>(st.n_slot[s]) + alpha) *
               (static_cast<double>(counts.word[k * v + w]) + eta) /
               (static_cast<double>(counts.total[k]) + v_eta);
        weights[s] = cum;
      }
      const double u = rng.uniform() * cum;
      std::size_t s = 0;
      while (s + 1 < n_labels && weights[s] <= u) ++s;
      const auto k = static_cast<std::size_t>(doc.labels[s]);
      st.slot[i] = static_cast<std::uint32_t>(s);
      st.n_slot[s]++;
      counts.word[k * v + w]++;
      counts.total[k]++;
    }
  }
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint32_t> doc_freq)
    : tokens_(std::move(tokens)), doc_freq_(std::move(doc_freq)) {
  if (doc_freq_.size() != tokens_.size()) throw Error("vocabulary size mismatch");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& tokenized_docs, std::size_t min_df) {
  std::unordered_map<std::string, std::uint32_t> df;
  for (const auto& doc : tokenized_docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : doc) {
      if (seen.insert(t).second) df[t]++;
    }
  }
  std::vector<std::string> tokens;
  for (const auto& [t, n] : df) {
    if (n >= min_df) tokens.push_back(t);
  }
  std::sort(tokens.begin(), tokens.end());
  std::vector<std::uint32_t> freq;
  freq.reserve(tokens.size());
  for (const auto& t : tokens) freq.push_back(df[t]);
  return Vocabulary(std::move(tokens), std::move(freq));
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::uint32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto id = find(t)) out.push_back(*id);
  }
  return out;
}

std::vector<LabeledDocument> build_training_set(const CorpusStore& store, std::size_t min_words) {
  std::vector<LabeledDocument> out;
  for (const auto& p : store.papers()) {
    if (p.fields.empty()) continue;
    if (raw_word_count(p.abstract) < min_words) continue;
    LabeledDocument d{p.id, {}, p.abstract};
    for (const auto& f : p.fields) d.labels.push_back(f.field);
    out.push_back(std::move(d));
  }
  if (out.empty()) {
    throw Error("no training documents: no labeled abstract has " + std::to_string(min_words) +
                " words; try a smaller min_words");
  }
  return out;
}

TrainingCorpus encode_training_set(const std::vector<LabeledDocument>& docs, std::size_t min_df) {
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(docs.size());
  for (const auto& d : docs) tokenized.push_back(tokenize(d.text));
  TrainingCorpus corpus;
  corpus.vocab = Vocabulary::build(tokenized, min_df);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    EncodedDocument e{docs[i].id, docs[i].labels, corpus.vocab.encode(tokenized[i])};
    std::sort(e.labels.begin(), e.labels.end());
    e.labels.erase(std::unique(e.labels.begin(), e.labels.end()), e.labels.end());
    if (e.words.empty()) {
      corpus.dropped_empty++;
      continue;
    }
    corpus.docs.push_back(std::move(e));
  }
  return corpus;
}

LdaModel train(const TrainingCorpus& corpus, std::size_t k, const TrainOptions& options,
               const SweepObserver& observer) {
  if (k < 2) throw Error("training needs K >= 2");
  if (options.burn_in < 0 || options.iterations <= options.burn_in) {
    throw Error("training needs iterations > burn_in >= 0");
  }
  if (options.eta <= 0.0) throw Error("eta must be positive");
  const std::size_t v = corpus.vocab.size();
  if (v == 0) throw Error("empty vocabulary");
  for (const auto& d : corpus.docs) {
    if (d.labels.empty()) throw Error("document " + d.id + " has an empty label set");
    for (FieldId l : d.labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= k) {
        throw Error("document " + d.id + " has label " + std::to_string(l) + " outside the taxonomy");
      }
    }
    for (auto w : d.words) {
      if (w >= v) throw Error("document " + d.id + " has an out-of-vocabulary word id");
    }
  }

  LdaModel model;
  model.k = k;
  model.alpha = options.alpha > 0.0 ? options.alpha : 50.0 / static_cast<double>(k);
  model.eta = options.eta;
  model.vocab = corpus.vocab;
  model.seed = options.seed;
  model.iterations = options.iterations;
  model.burn_in = options.burn_in;
  model.threads = std::max(1, options.threads);
  model.n_docs = corpus.docs.size();
  model.corpus_hash = corpus_fingerprint(corpus, k);

  const Rng root(options.seed);
  Counts counts{std::vector<std::uint64_t>(k * v, 0), std::vector<std::uint64_t>(k, 0)};
  std::vector<DocState> states(corpus.docs.size());
  {
    Rng init = root.stream("lda-init");
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      const auto& doc = corpus.docs[d];
      auto& st = states[d];
      st.slot.resize(doc.words.size());
      st.n_slot.assign(doc.labels.size(), 0);
      for (std::size_t i = 0; i < doc.words.size(); ++i) {
        const auto s = static_cast<std::uint32_t>(init.below(doc.labels.size()));
        st.slot[i] = s;
        st.n_slot[s]++;
        const auto kk = static_cast<std::size_t>(doc.labels[s]);
        counts.word[kk * v + doc.words[i]]++;
        counts.total[kk]++;
      }
      model.n_tokens += doc.words.size();
    }
  }

  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(model.threads),
                                                      std::max<std::size_t>(1, corpus.docs.size()));
  std::vector<Rng> rngs;
  for (std::size_t t = 0; t < n_threads; ++t) rngs.push_back(root.stream("lda-sweep").stream(t));
  std::vector<std::size_t> bounds(n_threads + 1);
  for (std::size_t t = 0; t <= n_threads; ++t) bounds[t] = corpus.docs.size() * t / n_threads;

  std::vector<double> phi_acc(k * v, 0.0);
  std::vector<std::vector<double>> weights(n_threads);
  std::vector<std::vector<FieldId>> assignments;

  for (int sweep = 0; sweep < options.iterations; ++sweep) {
    if (n_threads == 1) {
      sweep_documents(corpus, 0, corpus.docs.size(), states, counts, v, model.alpha, model.eta, rngs[0], weights[0]);
    } else {
      // Each shard samples against a private copy; deltas are merged after the sweep.
      std::vector<Counts> local(n_threads, counts);
      std::vector<std::thread> workers;
      for (std::size_t t = 0; t < n_threads; ++t) {
        workers.emplace_back([&, t] {
          sweep_documents(corpus, bounds[t], bounds[t + 1], states, local[t], v, model.alpha, model.eta, rngs[t],
                          weights[t]);
        });
      }
      for (auto& w : workers) w.join();
      Counts merged = counts;
      for (std::size_t t = 0; t < n_threads; ++t) {
        for (std::size_t i = 0; i < merged.word.size(); ++i) merged.word[i] += local[t].word[i] - counts.word[i];
        for (std::size_t i = 0; i < k; ++i) merged.total[i] += local[t].total[i] - counts.total[i];
      }
      counts = std::move(merged);
    }

    if (sweep >= options.burn_in) {
      const double v_eta = static_cast<double>(v) * model.eta;
      for (std::size_t t = 0; t < k; ++t) {
        const double denom = static_cast<double>(counts.total[t]) + v_eta;
        const std::uint64_t* row = &counts.word[t * v];
        double* acc = &phi_acc[t * v];
        for (std::size_t w = 0; w < v; ++w) acc[w] += (static_cast<double>(row[w]) + model.eta) / denom;
      }
    }

    if (observer) {
      assignments.resize(corpus.docs.size());
      for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
        const auto& doc = corpus.docs[d];
        assignments[d].resize(doc.words.size());
        for (std::size_t i = 0; i < doc.words.size(); ++i) assignments[d][i] = doc.labels[states[d].slot[i]];
      }
      observer(SweepState{sweep, assignments, counts.word, counts.total});
    }
  }

  const double n_kept = static_cast<double>(options.iterations - options.burn_in);
  for (double& x : phi_acc) x /= n_kept;
  model.topic_word_counts = std::move(counts.word);
  model.topic_totals = std::move(counts.total);
  model.phi = std::move(phi_acc);
  return model;
}

FieldDistribution infer_theta_encoded(const LdaModel& model, std::span<const std::uint32_t> words,
                                      const InferOptions& options) {
  if (words.empty()) throw Error("unscorable abstract: no in-vocabulary tokens");
  if (options.burn_in < 0 || options.iterations <= options.burn_in) {
    throw Error("inference needs iterations > burn_in >= 0");
  }
  const std::size_t k = model.k;
  const std::size_t v = model.v();

  // Gather the phi column of each distinct word once.
  std::vector<std::uint32_t> local(words.size());
  std::unordered_map<std::uint32_t, std::uint32_t> slot_of;
  std::vector<double> cols;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] >= v) throw Error("word id outside the model vocabulary");
    auto [it, fresh] = slot_of.emplace(words[i], static_cast<std::uint32_t>(slot_of.size()));
    if (fresh) {
      for (std::size_t t = 0; t < k; ++t) cols.push_back(model.phi_at(t, words[i]));
    }
    local[i] = it->second;
  }

  Rng rng = Rng(options.seed).stream("lda-infer");
  std::vector<std::uint32_t> z(words.size());
  std::vector<double> n_dk(k, 0.0);
  for (auto& zi : z) {
    zi = static_cast<std::uint32_t>(rng.below(k));
    n_dk[zi] += 1.0;
  }
  std::vector<double> cum(k);
  std::vector<double> theta_acc(k, 0.0);
  const double alpha = model.alpha;
  const double denom = static_cast<double>(words.size()) + static_cast<double>(k) * alpha;
  for (int sweep = 0; sweep < options.iterations; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      n_dk[z[i]] -= 1.0;
      const double* col = &cols[static_cast<std::size_t>(local[i]) * k];
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        acc += (n_dk[t] + alpha) * col[t];
        cum[t] = acc;
      }
      const double u = rng.uniform() * acc;
      const auto pos = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
      const auto t = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(pos, static_cast<std::ptrdiff_t>(k) - 1));
      z[i] = t;
      n_dk[t] += 1.0;
    }
    if (sweep >= options.burn_in) {
      for (std::size_t t = 0; t < k; ++t) theta_acc[t] += (n_dk[t] + alpha) / denom;
    }
  }
  return FieldDistribution::normalize(std::move(theta_acc));
}

FieldDistribution infer_theta(const LdaModel& model, std::string_view abstract, const InferOptions& options) {
  const auto words = model.vocab.encode(tokenize(abstract));
  return infer_theta_encoded(model, words, options);
}

std::vector<RankedWord> top_words(const LdaModel& model, FieldId field, std::size_t n, RankMode mode,
                                  double frex_weight) {
  if (field < 0 || static_cast<std::size_t>(field) >= model.k) {
    throw Error("unknown field id " + std::to_string(field));
  }
  if (!(frex_weight > 0.0 && frex_weight < 1.0)) throw Error("frex_weight must lie in (0, 1)");
  const std::size_t v = model.v();
  const auto row = model.phi_row(static_cast<std::size_t>(field));
  std::vector<double> score(row.begin(), row.end());

  if (mode == RankMode::frex) {
    std::vector<double> excl(v);
    for (std::size_t w = 0; w < v; ++w) {
      double col = 0.0;
      for (std::size_t t = 0; t < model.k; ++t) col += model.phi_at(t, w);
      excl[w] = row[w] / col;
    }
    // ECDF within the field: share of words with value <= x.
    auto ecdf = [v](const std::vector<double>& xs) {
      std::vector<double> sorted(xs);
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> out(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto rank = std::upper_bound(sorted.begin(), sorted.end(), xs[i]) - sorted.begin();
        out[i] = static_cast<double>(rank) / static_cast<double>(v);
      }
      return out;
    };
    const auto e_excl = ecdf(excl);
    const auto e_freq = ecdf(score);
    for (std::size_t w = 0; w < v; ++w) {
      score[w] = 1.0 / (frex_weight / e_excl[w] + (1.0 - frex_weight) / e_freq[w]);
    }
  }

  std::vector<std::uint32_t> order(v);
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t take = std::min(n, v);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (score[a] != score[b]) return score[a] > score[b];
                      return a < b;
                    });
  std::vector<RankedWord> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back({order[i], model.vocab.token(order[i]), score[order[i]]});
  return out;
}

namespace {

InferOptions per_document(const InferOptions& base, std::size_t index) {
  InferOptions o = base;
  o.seed = Rng::mix(base.seed ^ Rng::mix(index + 1));
  return o;
}

std::vector<FieldId> ranked_fields(const FieldDistribution& theta) {
  std::vector<FieldId> order(theta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](FieldId a, FieldId b) {
    return theta[static_cast<std::size_t>(a)] > theta[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace

PrecisionResult eval_multilabel_precision(const LdaModel& model, const std::vector<LabeledDocument>& held_out,
                                          std::size_t top_m, const InferOptions& options) {
  if (held_out.empty()) throw Error("empty held-out set");
  PrecisionResult r;
  double sum_precision = 0.0;
  double sum_labels = 0.0;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    const auto& doc = held_out[i];
    if (doc.labels.empty()) throw Error("held-out document " + doc.id + " has no labels");
    const auto words = model.vocab.encode(tokenize(doc.text));
    if (words.empty()) {
      r.unscorable++;
      continue;
    }
    const auto theta = infer_theta_encoded(model, words, per_document(options, i));
    const auto order = ranked_fields(theta);
    const std::size_t m = std::min(top_m == 0 ? doc.labels.size() : top_m, order.size());
    std::size_t hits = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (std::find(doc.labels.begin(), doc.labels.end(), order[j]) != doc.labels.end()) ++hits;
    }
    sum_precision += static_cast<double>(hits) / static_cast<double>(m);
    sum_labels += static_cast<double>(doc.labels.size());
    r.scored++;
  }
  if (r.scored == 0) throw Error("no held-out document is scorable");
  r.precision = sum_precision / static_cast<double>(r.scored);
  r.random_baseline = sum_labels / static_cast<double>(r.scored) / static_cast<double>(model.k);
  return r;
}

LabelDistanceResult eval_label_distance(const LdaModel& model, const std::vector<LabeledDocument>& held_out,
                                        const DistanceMatrix& distances, const InferOptions& options,
                                        std::size_t permutations) {
  if (held_out.empty()) throw Error("empty held-out set");
  if (distances.k() != model.k) throw Error("distance matrix K does not match the model");
  if (permutations == 0) throw Error("need at least one permutation");
  distances.validate();
  LabelDistanceResult r;
  std::vector<FieldId> predicted;
  std::vector<const std::vector<FieldId>*> truth;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    const auto& doc = held_out[i];
    const auto words = model.vocab.encode(tokenize(doc.text));
    if (words.empty()) {
      r.unscorable++;
      continue;
    }
    predicted.push_back(infer_theta_encoded(model, words, per_document(options, i)).argmax());
    truth.push_back(&doc.labels);
  }
  auto nearest = [&](FieldId pred, const std::vector<FieldId>& labels) {
    double best = std::numeric_limits<double>::infinity();
    if (!distances.available(pred)) return best;
    for (FieldId l : labels) {
      if (!distances.available(l)) continue;
      best = std::min(best, distances(static_cast<std::size_t>(pred), static_cast<std::size_t>(l)));
    }
    return best;
  };
  auto mean_distance = [&](const std::vector<FieldId>& preds) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const double d = nearest(preds[i], *truth[i]);
      if (std::isfinite(d)) {
        sum += d;
        ++n;
      }
    }
    return std::make_pair(n == 0 ? 0.0 : sum / static_cast<double>(n), n);
  };
  const auto [observed, n_scored] = mean_distance(predicted);
  if (n_scored == 0) throw Error("no held-out document has an available predicted/true field pair");
  r.mean_distance = observed;
  r.scored = n_scored;
  r.unscorable += predicted.size() - n_scored;

  Rng rng = Rng(options.seed).stream("label-distance-permutations");
  std::vector<FieldId> shuffled = predicted;
  double sum_perm = 0.0;
  std::size_t at_least_as_small = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    }
    const double m = mean_distance(shuffled).first;
    sum_perm += m;
    if (m <= observed) ++at_least_as_small;
  }
  r.permutations = permutations;
  r.shuffled_baseline = sum_perm / static_cast<double>(permutations);
  r.p_value = static_cast<double>(1 + at_least_as_small) / static_cast<double>(1 + permutations);
  return r;
}

DistanceMatrix lda_field_distance(const LdaModel& model) {
  DistanceMatrix d(model.k, Provenance::lda);
  for (std::size_t i = 0; i < model.k; ++i) {
    for (std::size_t j = i + 1; j < model.k; ++j) {
      const double dist = 1.0 - cosine_similarity(model.phi_row(i), model.phi_row(j));
      d.set(i, j, std::clamp(dist, 0.0, 1.0));
    }
  }
  return d;
}

void LdaModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(k));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(v()));
  put<double>(out, alpha);
  put<double>(out, eta);
  for (std::size_t w = 0; w < v(); ++w) {
    put_string(out, vocab.token(w));
    put<std::uint32_t>(out, vocab.doc_freq(w));
  }
  out.write(reinterpret_cast<const char*>(topic_word_counts.data()),
            static_cast<std::streamsize>(topic_word_counts.size() * sizeof(std::uint64_t)));
  out.write(reinterpret_cast<const char*>(topic_totals.data()),
            static_cast<std::streamsize>(topic_totals.size() * sizeof(std::uint64_t)));
  out.write(reinterpret_cast<const char*>(phi.data()), static_cast<std::streamsize>(phi.size() * sizeof(double)));
  put<std::uint64_t>(out, seed);
  put<std::int32_t>(out, iterations);
  put<std::int32_t>(out, burn_in);
  put<std::int32_t>(out, threads);
  put<std::uint64_t>(out, n_docs);
  put<std::uint64_t>(out, n_tokens);
  put_string(out, corpus_hash);
  if (!out) throw Error("failed writing model " + path);
}

LdaModel LdaModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error(path + " is not an LLDA model file");
  const auto version = get<std::uint32_t>(in);
  if (version != kFormatVersion) throw Error("unsupported LLDA format version " + std::to_string(version));
  LdaModel m;
  m.k = get<std::uint32_t>(in);
  const std::size_t v = get<std::uint32_t>(in);
  m.alpha = get<double>(in);
  m.eta = get<double>(in);
  std::vector<std::string> tokens;
  std::vector<std::uint32_t> df;
  tokens.reserve(v);
  df.reserve(v);
  for (std::size_t w = 0; w < v; ++w) {
    tokens.push_back(get_string(in));
    df.push_back(get<std::uint32_t>(in));
  }
  m.vocab = Vocabulary(std::move(tokens), std::move(df));
  m.topic_word_counts.resize(m.k * v);
  in.read(reinterpret_cast<char*>(m.topic_word_counts.data()),
          static_cast<std::streamsize>(m.topic_word_counts.size() * sizeof(std::uint64_t)));
  m.topic_totals.resize(m.k);
  in.read(reinterpret_cast<char*>(m.topic_totals.data()),
          static_cast<std::streamsize>(m.topic_totals.size() * sizeof(std::uint64_t)));
  m.phi.resize(m.k * v);
  in.read(reinterpret_cast<char*>(m.phi.data()), static_cast<std::streamsize>(m.phi.size() * sizeof(double)));
  if (!in) throw Error("truncated model file");
  m.seed = get<std::uint64_t>(in);
  m.iterations = get<std::int32_t>(in);
  m.burn_in = get<std::int32_t>(in);
  m.threads = get<std::int32_t>(in);
  m.n_docs = get<std::uint64_t>(in);
  m.n_tokens = get<std::uint64_t>(in);
  m.corpus_hash = get_string(in);
  return m;
}

std::string LdaModel::provenance_json() const {
  nlohmann::json j = {{"format", "LLDA"},
                      {"version", kFormatVersion},
                      {"K", k},
                      {"V", v()},
                      {"alpha", alpha},
                      {"eta", eta},
                      {"seed", seed},
                      {"iterations", iterations},
                      {"burn_in", burn_in},
                      {"threads", threads},
                      {"n_docs", n_docs},
                      {"n_tokens", n_tokens},
                      {"corpus_hash", corpus_hash}};
  return j.dump(2);
}

}  // namespace idr
