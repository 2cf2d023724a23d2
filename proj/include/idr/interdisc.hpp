#pragma once

#include <string>
#include <vector>

#include "idr/common.hpp"
#include "idr/fieldspace.hpp"
#include "idr/lda.hpp"

namespace idr {

enum class ScoreBasis { references, citations, grant_abstract };
std::string to_string(ScoreBasis b);

struct RsScore {
  double value = 0.0;
  ScoreBasis basis = ScoreBasis::references;
  std::string subject;
};

/// Rao-Stirling diversity, summed over ordered pairs: sum_{i != j} p_i p_j d_ij.
/// Throws when p puts mass on a field the matrix marks unavailable.
double rao_stirling(const FieldDistribution& p, const DistanceMatrix& d);

/// Which low-probability fields a grant vector drops before renormalizing.
struct RenormPolicy {
  enum class Kind { threshold, top_count, none };
  Kind kind = Kind::threshold;
  double tau = -1.0;     // threshold; <= 0 means 1/K
  std::size_t keep = 3;  // top_count: number of fields kept

  static RenormPolicy parse(const std::string& name, double tau = -1.0, std::size_t keep = 3);
  std::string name() const;
};

struct GrantVector {
  FieldDistribution probs;
  bool fallback = false;  // every field fell below the cutoff; argmax unit vector used
};

GrantVector renormalize(const FieldDistribution& theta, const RenormPolicy& policy);

/// Infers theta from the grant abstract and applies the renormalization policy.
GrantVector grant_field_vector(const Grant& grant, const LdaModel& model, const RenormPolicy& policy,
                               const InferOptions& options);

/// Nearest-rank quantile bins, 1-based. With ascending cuts c_1 < ... < c_m in
/// (0,1), threshold t_c is the ceil(c n)-th smallest value and a subject's bin
/// is 1 + #{c : value > t_c}, so ties share the lower bin.
std::vector<int> idr_quantiles(std::span<const double> scores, std::span<const double> cuts);

std::vector<double> quintile_cuts();

}  // namespace idr
