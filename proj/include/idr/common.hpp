#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace idr {

using FieldId = int;

/// Domain error raised by every module. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability vector over the field taxonomy.
class FieldDistribution {
 public:
  FieldDistribution() = default;

  /// Takes ownership of an already-normalized vector; throws when entries are
  /// negative or the sum is off by more than 1e-9.
  static FieldDistribution from_probs(std::vector<double> probs);

  /// Normalizes nonnegative masses to sum 1. Throws on an all-zero vector.
  static FieldDistribution normalize(std::vector<double> masses);

  static FieldDistribution unit(std::size_t k, FieldId field);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vec() const { return probs_; }

  /// Index of the largest entry; ties go to the smallest index.
  FieldId argmax() const;

  bool operator==(const FieldDistribution&) const = default;

 private:
  explicit FieldDistribution(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// 64-bit FNV-1a, used for corpus and file fingerprints.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n);
  void update(std::string_view s) { update(s.data(), s.size()); }
  template <typename T>
  void update_pod(const T& v) { update(&v, sizeof(T)); }
  std::uint64_t digest() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 14695981039346656037ULL;
};

std::string file_hash(const std::string& path);

}  // namespace idr
