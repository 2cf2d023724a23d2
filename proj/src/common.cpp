#include "idr/common.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace idr {

FieldDistribution FieldDistribution::from_probs(std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error("field distribution has a negative or NaN entry");
    sum += p;
  }
  if (probs.empty() || std::abs(sum - 1.0) > 1e-9) {
    throw Error("field distribution does not sum to 1 (sum=" + std::to_string(sum) + ")");
  }
  return FieldDistribution(std::move(probs));
}

FieldDistribution FieldDistribution::normalize(std::vector<double> masses) {
  double sum = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw Error("cannot normalize a negative or NaN mass");
    sum += m;
  }
  if (sum <= 0.0) throw Error("cannot normalize an all-zero vector");
  for (double& m : masses) m /= sum;
  return FieldDistribution(std::move(masses));
}

FieldDistribution FieldDistribution::unit(std::size_t k, FieldId field) {
  std::vector<double> p(k, 0.0);
  p.at(static_cast<std::size_t>(field)) = 1.0;
  return FieldDistribution(std::move(p));
}

FieldId FieldDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return static_cast<FieldId>(best);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine similarity of vectors with different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("cosine similarity of a zero vector");
  return dot / std::sqrt(na * nb);  // exact 1 for identical vectors
}

void Fnv1a::update(const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= bytes[i];
    h_ *= 1099511628211ULL;
  }
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  Fnv1a h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

}  // namespace idr
