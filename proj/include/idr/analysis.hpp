#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "idr/common.hpp"

namespace idr {

// ---------------------------------------------------------------- curves

enum class BinMode { quantile, width };

struct BinnedSeries {
  std::vector<double> edges;  // n_bins + 1 x-boundaries
  std::vector<double> x_mean;
  std::vector<double> mean;
  std::vector<double> se;
  std::vector<std::size_t> n;
  std::size_t excluded = 0;  // subjects with an undefined (NaN) metric
};

/// Bin index (0-based) of every subject; -1 for undefined x or y.
/// Quantile bins are equal-count over the x ranking (stable on ties).
std::vector<int> bin_membership(std::span<const double> x, std::span<const double> y, std::size_t n_bins,
                                BinMode mode = BinMode::quantile);

/// Mean and standard error of y per x bin.
BinnedSeries bin_curve(std::span<const double> x, std::span<const double> y, std::size_t n_bins,
                       BinMode mode = BinMode::quantile);

/// Spearman rank correlation (average ranks on ties).
double spearman(std::span<const double> x, std::span<const double> y);

// --------------------------------------------------------------- heatmap

struct HeatmapCell {
  double mean = 0.0;
  std::size_t n = 0;
  bool low_n = false;
};

/// cells[paper quintile - 1][grant quintile - 1]
struct Heatmap {
  std::array<std::array<HeatmapCell, 5>, 5> cells{};
  std::size_t total = 0;

  std::pair<int, int> argmax() const;  // 1-based (paper_q, grant_q)
};

/// Mean hit rate per (paper RS quintile, grant RS quintile) over grant-paper pairs.
Heatmap quintile_heatmap(std::span<const double> paper_rs, std::span<const double> grant_rs,
                         std::span<const double> hit, std::size_t min_n = 10);

// --------------------------------------------------------------- funding

struct FundingSelector {
  enum class Kind { top_decile, middle_decile, quintile };
  Kind kind = Kind::top_decile;
  int q = 5;  // quintile 1..5

  static FundingSelector parse(const std::string& s);
  std::string name() const;
  std::pair<double, double> fractions() const;
};

/// Grants whose amount lies in the selector's nearest-rank value slice.
/// NaN amounts are never selected.
std::vector<bool> select_funding(std::span<const double> amounts, const FundingSelector& selector);

struct FundingCurves {
  BinnedSeries productivity;
  BinnedSeries hit_rate;
  std::size_t selected = 0;
  std::size_t missing_amount = 0;
};

FundingCurves funding_conditioned_curves(std::span<const double> grant_rs, std::span<const double> amounts,
                                         std::span<const double> papers_per_grant,
                                         std::span<const double> hit_rate, const FundingSelector& selector,
                                         std::size_t n_bins);

// --------------------------------------------------------- grant combos

struct MultiGrantPaper {
  double paper_rs = 0.0;
  double hit = 0.0;
  std::vector<double> grant_rs;
  std::vector<FieldDistribution> grant_vectors;
};

enum class Combo { proximate_disciplinary = 0, distant_disciplinary, proximate_interdisciplinary, distant_interdisciplinary };
std::string to_string(Combo c);

struct ComboCell {
  double hit_rate = 0.0;
  std::size_t n = 0;
};

struct ComboSlice {
  std::array<ComboCell, 4> cells{};
  std::vector<Combo> ranking;  // populated cells, highest hit rate first
  bool partial = false;        // fewer than 4 populated cells
};

struct FourwayResult {
  ComboSlice top;
  ComboSlice bottom;
  double rs_median = 0.0;
  double distance_median = 0.0;
  bool rs_split_tied = false;
  bool distance_split_tied = false;
  std::size_t eligible = 0;
};

/// Classifies multi-grant papers by median splits of mean grant RS and mean
/// pairwise grant distance, and reports hit rates for the top and bottom
/// paper-RS slices.
FourwayResult fourway_grant_combo(const std::vector<MultiGrantPaper>& papers, double paper_fraction = 0.1);

// ----------------------------------------------------------------- trend

struct TrendPoint {
  int year = 0;
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Yearly mean per group label.
std::map<int, std::vector<TrendPoint>> trend_by_year(std::span<const int> years, std::span<const double> values,
                                                     std::span<const int> groups);

int team_size_bin(int n_authors);  // 0: 1, 1: 2-3, 2: 4-9, 3: 10+

// ------------------------------------------------------------ regression

struct DataTable {
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::vector<std::string>> categorical;
  std::size_t rows() const;
};

struct RegressionSpec {
  std::string response;
  std::vector<std::string> regressors;
  std::set<std::string> log1p;        // ln(x + 1) before fitting; may include the response
  std::vector<std::string> dummies;   // categorical columns, drop-first encoded
  bool standardize = false;           // z-score response and continuous regressors
  bool intercept = true;
};

struct DummyGroup {
  std::string variable;
  std::string reference_level;
  std::vector<std::string> levels;  // encoded (non-reference) levels
};

struct RegressionResult {
  std::vector<std::string> names;
  std::vector<double> coef;
  std::vector<double> se;
  std::vector<double> t;
  std::vector<double> p;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::size_t n = 0;
  std::size_t dropped_rows = 0;
  std::map<std::string, double> vif;
  std::vector<DummyGroup> dummy_groups;
  std::vector<double> residuals;

  double coef_of(const std::string& name) const;
  double t_of(const std::string& name) const;
};

/// Least squares via column-pivoted QR. Throws on rank deficiency naming the
/// dependent columns. `vif_columns` lists columns that get a VIF.
RegressionResult ols_matrix(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                            bool has_intercept, const std::vector<std::string>& vif_columns = {});

RegressionResult ols(const RegressionSpec& spec, const DataTable& data);

/// VIF_j = 1 / (1 - R^2_j) regressing column j on the other columns plus an intercept.
std::vector<double> vif(const Eigen::MatrixXd& regressors);

}  // namespace idr
