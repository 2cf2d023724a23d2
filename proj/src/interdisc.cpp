#include "idr/interdisc.hpp"

#include <algorithm>
#include <cmath>

namespace idr {

std::string to_string(ScoreBasis b) {
  switch (b) {
    case ScoreBasis::references: return "references";
    case ScoreBasis::citations: return "citations";
    case ScoreBasis::grant_abstract: return "grant-abstract";
  }
  return "unknown";
}

double rao_stirling(const FieldDistribution& p, const DistanceMatrix& d) {
  if (p.size() != d.k()) throw Error("field distribution and distance matrix sizes differ");
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (!d.available(static_cast<FieldId>(i))) {
      throw Error("field " + std::to_string(i) + " carries probability but has no distance data");
    }
    support.push_back(i);
  }
  // Each unordered pair counted twice.
  double half = 0.0;
  for (std::size_t a = 0; a < support.size(); ++a) {
    const std::size_t i = support[a];
    double row = 0.0;
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      const std::size_t j = support[b];
      row += p[j] * d(i, j);
    }
    half += p[i] * row;
  }
  const double rs = 2.0 * half;
  if (rs > 1.0 + 1e-12) throw Error("Rao-Stirling value exceeds 1; distances outside [0,1]?");
  return rs;
}

RenormPolicy RenormPolicy::parse(const std::string& name, double tau, std::size_t keep) {
  RenormPolicy p;
  p.tau = tau;
  p.keep = keep;
  if (name == "threshold") {
    p.kind = Kind::threshold;
  } else if (name == "top" || name == "top_count" || name == "top-count") {
    p.kind = Kind::top_count;
    if (keep == 0) throw Error("top-count renormalization needs keep >= 1");
  } else if (name == "none") {
    p.kind = Kind::none;
  } else {
    throw Error("unknown renormalization policy '" + name + "' (expected threshold|top|none)");
  }
  return p;
}

std::string RenormPolicy::name() const {
  switch (kind) {
    case Kind::threshold: return "threshold";
    case Kind::top_count: return "top";
    case Kind::none: return "none";
  }
  return "unknown";
}

GrantVector renormalize(const FieldDistribution& theta, const RenormPolicy& policy) {
  const std::size_t k = theta.size();
  if (policy.kind == RenormPolicy::Kind::none) return {theta, false};
  std::vector<double> kept(k, 0.0);
  if (policy.kind == RenormPolicy::Kind::threshold) {
    const double tau = policy.tau > 0.0 ? policy.tau : 1.0 / static_cast<double>(k);
    bool any = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (theta[i] >= tau) {
        kept[i] = theta[i];
        any = true;
      }
    }
    if (!any) return {FieldDistribution::unit(k, theta.argmax()), true};
  } else {
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return theta[a] > theta[b]; });
    for (std::size_t r = 0; r < std::min(policy.keep, k); ++r) kept[order[r]] = theta[order[r]];
  }
  return {FieldDistribution::normalize(std::move(kept)), false};
}

GrantVector grant_field_vector(const Grant& grant, const LdaModel& model, const RenormPolicy& policy,
                               const InferOptions& options) {
  return renormalize(infer_theta(model, grant.abstract, options), policy);
}

std::vector<int> idr_quantiles(std::span<const double> scores, std::span<const double> cuts) {
  if (scores.empty()) throw Error("quantile binning of an empty score list");
  if (scores.size() < cuts.size() + 1) throw Error("fewer subjects than quantile bins");
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!(cuts[i] > 0.0 && cuts[i] < 1.0) || (i > 0 && cuts[i] <= cuts[i - 1])) {
      throw Error("quantile cuts must be increasing fractions in (0,1)");
    }
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> thresholds;
  for (double c : cuts) {
    // nearest rank, guarded against c*n landing a hair above an integer
    auto rank = static_cast<std::size_t>(std::ceil(c * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    thresholds.push_back(sorted[rank - 1]);
  }
  std::vector<int> bins;
  bins.reserve(scores.size());
  for (double s : scores) {
    int b = 1;
    for (double t : thresholds) b += s > t ? 1 : 0;
    bins.push_back(b);
  }
  return bins;
}

std::vector<double> quintile_cuts() { return {0.2, 0.4, 0.6, 0.8}; }

}  // namespace idr
