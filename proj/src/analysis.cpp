#include "idr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "idr/fieldspace.hpp"
#include "idr/interdisc.hpp"

namespace idr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  if (v.empty()) return {kNaN, kNaN};
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
  }
  return r;
}

// Lower median (nearest rank at 0.5).
double lower_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() + 1) / 2 - 1];
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<int> bin_membership(std::span<const double> x, std::span<const double> y, std::size_t n_bins,
                                BinMode mode) {
  if (x.size() != y.size()) throw Error("x and y have different lengths");
  if (n_bins == 0) throw Error("need at least one bin");
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(x[i]) && std::isfinite(y[i])) valid.push_back(i);
  }
  if (valid.size() < n_bins) {
    throw Error("only " + std::to_string(valid.size()) + " subjects with both metrics for " +
                std::to_string(n_bins) + " bins");
  }
  std::vector<int> bins(x.size(), -1);
  if (mode == BinMode::quantile) {
    std::stable_sort(valid.begin(), valid.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    const std::size_t m = valid.size();
    for (std::size_t b = 0; b < n_bins; ++b) {
      for (std::size_t r = b * m / n_bins; r < (b + 1) * m / n_bins; ++r) bins[valid[r]] = static_cast<int>(b);
    }
  } else {
    double lo = x[valid.front()], hi = lo;
    for (auto i : valid) {
      lo = std::min(lo, x[i]);
      hi = std::max(hi, x[i]);
    }
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (auto i : valid) {
      const auto b = width > 0.0 ? static_cast<std::size_t>((x[i] - lo) / width) : 0;
      bins[i] = static_cast<int>(std::min(b, n_bins - 1));
    }
  }
  return bins;
}

BinnedSeries bin_curve(std::span<const double> x, std::span<const double> y, std::size_t n_bins, BinMode mode) {
  const auto bins = bin_membership(x, y, n_bins, mode);
  std::vector<std::vector<double>> ys(n_bins), xs(n_bins);
  BinnedSeries s;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i] < 0) {
      s.excluded++;
      continue;
    }
    ys[static_cast<std::size_t>(bins[i])].push_back(y[i]);
    xs[static_cast<std::size_t>(bins[i])].push_back(x[i]);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& b : xs) {
    for (double v : b) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    const auto ms = mean_se(ys[b]);
    s.mean.push_back(ms.mean);
    s.se.push_back(ms.se);
    s.n.push_back(ys[b].size());
    s.x_mean.push_back(mean_se(xs[b]).mean);
    if (mode == BinMode::quantile) {
      s.edges.push_back(xs[b].empty() ? kNaN : *std::min_element(xs[b].begin(), xs[b].end()));
    } else {
      s.edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins));
    }
  }
  s.edges.push_back(hi);
  return s;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("spearman needs two equal-length series of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::pair<int, int> Heatmap::argmax() const {
  std::pair<int, int> best{1, 1};
  double best_v = -1.0;
  for (int p = 0; p < 5; ++p) {
    for (int g = 0; g < 5; ++g) {
      const auto& c = cells[static_cast<std::size_t>(p)][static_cast<std::size_t>(g)];
      if (c.n > 0 && c.mean > best_v) {
        best_v = c.mean;
        best = {p + 1, g + 1};
      }
    }
  }
  return best;
}

Heatmap quintile_heatmap(std::span<const double> paper_rs, std::span<const double> grant_rs,
                         std::span<const double> hit, std::size_t min_n) {
  if (paper_rs.size() != grant_rs.size() || paper_rs.size() != hit.size()) {
    throw Error("heatmap inputs are not aligned");
  }
  std::vector<double> prs, grs, h;
  for (std::size_t i = 0; i < paper_rs.size(); ++i) {
    if (std::isfinite(paper_rs[i]) && std::isfinite(grant_rs[i]) && std::isfinite(hit[i])) {
      prs.push_back(paper_rs[i]);
      grs.push_back(grant_rs[i]);
      h.push_back(hit[i]);
    }
  }
  if (prs.size() < 25) throw Error("quintile heatmap needs at least 25 grant-paper pairs");
  const auto cuts = quintile_cuts();
  const auto pq = idr_quantiles(prs, cuts);
  const auto gq = idr_quantiles(grs, cuts);
  Heatmap m;
  std::array<std::array<double, 5>, 5> sums{};
  for (std::size_t i = 0; i < prs.size(); ++i) {
    const auto a = static_cast<std::size_t>(pq[i] - 1);
    const auto b = static_cast<std::size_t>(gq[i] - 1);
    sums[a][b] += h[i];
    m.cells[a][b].n++;
  }
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      auto& c = m.cells[a][b];
      c.mean = c.n > 0 ? sums[a][b] / static_cast<double>(c.n) : kNaN;
      c.low_n = c.n < min_n;
    }
  }
  m.total = prs.size();
  return m;
}

FundingSelector FundingSelector::parse(const std::string& s) {
  FundingSelector f;
  if (s == "top-decile") {
    f.kind = Kind::top_decile;
  } else if (s == "middle-decile") {
    f.kind = Kind::middle_decile;
  } else if (s.rfind("quintile", 0) == 0 && s.size() == 9 && s[8] >= '1' && s[8] <= '5') {
    f.kind = Kind::quintile;
    f.q = s[8] - '0';
  } else {
    throw Error("unknown funding selector '" + s + "' (expected top-decile|middle-decile|quintile1..5)");
  }
  return f;
}

std::string FundingSelector::name() const {
  switch (kind) {
    case Kind::top_decile: return "top-decile";
    case Kind::middle_decile: return "middle-decile";
    case Kind::quintile: return "quintile" + std::to_string(q);
  }
  return "unknown";
}

std::pair<double, double> FundingSelector::fractions() const {
  switch (kind) {
    case Kind::top_decile: return {0.9, 1.0};
    case Kind::middle_decile: return {0.45, 0.55};
    case Kind::quintile: return {(q - 1) / 5.0, q / 5.0};
  }
  return {0.0, 1.0};
}

std::vector<bool> select_funding(std::span<const double> amounts, const FundingSelector& selector) {
  std::vector<double> sorted;
  for (double a : amounts) {
    if (std::isfinite(a)) sorted.push_back(a);
  }
  std::vector<bool> out(amounts.size(), false);
  if (sorted.empty()) return out;
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  const auto [f_lo, f_hi] = selector.fractions();
  const auto first = std::min(sorted.size() - 1, static_cast<std::size_t>(std::floor(f_lo * m + 1e-9)));
  const auto last = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(f_hi * m - 1e-9)), 1, sorted.size()) - 1;
  const double lo = sorted[first];
  const double hi = sorted[std::max(first, last)];
  for (std::size_t i = 0; i < amounts.size(); ++i) {
    out[i] = std::isfinite(amounts[i]) && amounts[i] >= lo && amounts[i] <= hi;
  }
  return out;
}

FundingCurves funding_conditioned_curves(std::span<const double> grant_rs, std::span<const double> amounts,
                                         std::span<const double> papers_per_grant,
                                         std::span<const double> hit_rate, const FundingSelector& selector,
                                         std::size_t n_bins) {
  const std::size_t n = grant_rs.size();
  if (amounts.size() != n || papers_per_grant.size() != n || hit_rate.size() != n) {
    throw Error("funding inputs are not aligned");
  }
  const auto sel = select_funding(amounts, selector);
  FundingCurves out;
  std::vector<double> x, prod, hits;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(amounts[i])) {
      out.missing_amount++;
      continue;
    }
    if (!sel[i]) continue;
    x.push_back(grant_rs[i]);
    prod.push_back(papers_per_grant[i]);
    hits.push_back(hit_rate[i]);
  }
  out.selected = x.size();
  out.productivity = bin_curve(x, prod, n_bins);
  out.hit_rate = bin_curve(x, hits, n_bins);
  return out;
}

std::string to_string(Combo c) {
  switch (c) {
    case Combo::proximate_disciplinary: return "proximate-disciplinary";
    case Combo::distant_disciplinary: return "distant-disciplinary";
    case Combo::proximate_interdisciplinary: return "proximate-interdisciplinary";
    case Combo::distant_interdisciplinary: return "distant-interdisciplinary";
  }
  return "unknown";
}

FourwayResult fourway_grant_combo(const std::vector<MultiGrantPaper>& papers, double paper_fraction) {
  if (!(paper_fraction > 0.0 && paper_fraction < 0.5)) throw Error("paper fraction must lie in (0, 0.5)");
  std::vector<double> prs, mean_rs, mean_dist, hit;
  for (const auto& p : papers) {
    if (p.grant_rs.size() < 2 || p.grant_rs.size() != p.grant_vectors.size()) continue;
    double rs = 0.0;
    for (double g : p.grant_rs) rs += g;
    double dist = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < p.grant_vectors.size(); ++a) {
      for (std::size_t b = a + 1; b < p.grant_vectors.size(); ++b) {
        dist += grant_pair_distance(p.grant_vectors[a], p.grant_vectors[b]);
        ++pairs;
      }
    }
    prs.push_back(p.paper_rs);
    mean_rs.push_back(rs / static_cast<double>(p.grant_rs.size()));
    mean_dist.push_back(dist / static_cast<double>(pairs));
    hit.push_back(p.hit);
  }
  if (prs.size() < 3) throw Error("grant-combination analysis needs at least 3 papers with >= 2 grants");

  FourwayResult r;
  r.eligible = prs.size();
  r.rs_median = lower_median(mean_rs);
  r.distance_median = lower_median(mean_dist);
  const auto [rs_lo, rs_hi] = std::minmax_element(mean_rs.begin(), mean_rs.end());
  const auto [d_lo, d_hi] = std::minmax_element(mean_dist.begin(), mean_dist.end());
  r.rs_split_tied = *rs_lo == *rs_hi;
  r.distance_split_tied = *d_lo == *d_hi;

  const std::vector<double> cuts{paper_fraction, 1.0 - paper_fraction};
  const auto slice = idr_quantiles(prs, cuts);
  std::array<std::array<double, 4>, 2> sums{};
  for (std::size_t i = 0; i < prs.size(); ++i) {
    const bool disciplinary = mean_rs[i] <= r.rs_median;
    const bool proximate = mean_dist[i] <= r.distance_median;
    const auto c = static_cast<std::size_t>(disciplinary ? (proximate ? Combo::proximate_disciplinary : Combo::distant_disciplinary)
                                                          : (proximate ? Combo::proximate_interdisciplinary
                                                                       : Combo::distant_interdisciplinary));
    if (slice[i] == 3) {
      sums[0][c] += hit[i];
      r.top.cells[c].n++;
    } else if (slice[i] == 1) {
      sums[1][c] += hit[i];
      r.bottom.cells[c].n++;
    }
  }
  auto finish = [](ComboSlice& s, const std::array<double, 4>& sum) {
    for (std::size_t c = 0; c < 4; ++c) {
      s.cells[c].hit_rate = s.cells[c].n > 0 ? sum[c] / static_cast<double>(s.cells[c].n) : kNaN;
      if (s.cells[c].n > 0) s.ranking.push_back(static_cast<Combo>(c));
    }
    std::stable_sort(s.ranking.begin(), s.ranking.end(), [&](Combo a, Combo b) {
      return s.cells[static_cast<std::size_t>(a)].hit_rate > s.cells[static_cast<std::size_t>(b)].hit_rate;
    });
    s.partial = s.ranking.size() < 4;
  };
  finish(r.top, sums[0]);
  finish(r.bottom, sums[1]);
  return r;
}

std::map<int, std::vector<TrendPoint>> trend_by_year(std::span<const int> years, std::span<const double> values,
                                                     std::span<const int> groups) {
  if (years.size() != values.size() || years.size() != groups.size()) throw Error("trend inputs are not aligned");
  std::map<int, std::map<int, std::vector<double>>> acc;
  for (std::size_t i = 0; i < years.size(); ++i) {
    if (std::isfinite(values[i])) acc[groups[i]][years[i]].push_back(values[i]);
  }
  std::map<int, std::vector<TrendPoint>> out;
  for (const auto& [g, by_year] : acc) {
    for (const auto& [y, vs] : by_year) {
      const auto ms = mean_se(vs);
      out[g].push_back({y, ms.mean, ms.se, vs.size()});
    }
  }
  return out;
}

int team_size_bin(int n_authors) {
  if (n_authors <= 1) return 0;
  if (n_authors <= 3) return 1;
  if (n_authors <= 9) return 2;
  return 3;
}

std::size_t DataTable::rows() const {
  std::optional<std::size_t> n;
  auto check = [&](std::size_t m) {
    if (n && *n != m) throw Error("data table columns have different lengths");
    n = m;
  };
  for (const auto& [k, v] : numeric) check(v.size());
  for (const auto& [k, v] : categorical) check(v.size());
  return n.value_or(0);
}

double RegressionResult::coef_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return coef[i];
  }
  throw Error("no coefficient named " + name);
}

double RegressionResult::t_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return t[i];
  }
  throw Error("no coefficient named " + name);
}

namespace {

// Centered R^2 of regressing column `target` on `others` (which include a constant).
double auxiliary_r2(const Eigen::MatrixXd& others, const Eigen::VectorXd& target) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(others);
  const Eigen::VectorXd fitted = others * qr.solve(target);
  const double mean = target.mean();
  const double tss = (target.array() - mean).square().sum();
  if (tss == 0.0) return 1.0;
  const double ess = (fitted.array() - mean).square().sum();
  return std::min(1.0, ess / tss);
}

double vif_from_r2(double r2) {
  return r2 >= 1.0 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - r2);
}

}  // namespace

RegressionResult ols_matrix(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                            bool has_intercept, const std::vector<std::string>& vif_columns) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  if (names.size() != p) throw Error("design column names do not match the matrix");
  if (static_cast<std::size_t>(y.size()) != n) throw Error("response length does not match the design");
  if (n <= p) throw Error("need more observations (" + std::to_string(n) + ") than regressors (" + std::to_string(p) + ")");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.rows(), x.cols());
  qr.setThreshold(1e-10);
  qr.compute(x);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < p) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (std::size_t i = rank; i < p; ++i) {
      if (!cols.empty()) cols += ", ";
      cols += names[static_cast<std::size_t>(perm[static_cast<Eigen::Index>(i)])];
    }
    throw Error("rank-deficient design; linearly dependent columns: " + cols);
  }

  RegressionResult r;
  r.names = names;
  r.n = n;
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * beta;
  const double rss = resid.squaredNorm();
  const double tss = has_intercept ? (y.array() - y.mean()).square().sum() : y.squaredNorm();
  r.r2 = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;
  const double nd = static_cast<double>(n), pd = static_cast<double>(p);
  r.adj_r2 = has_intercept ? 1.0 - (1.0 - r.r2) * (nd - 1.0) / (nd - pd) : 1.0 - (1.0 - r.r2) * nd / (nd - pd);

  // (X'X)^{-1} = P R^{-1} R^{-T} P^T
  const Eigen::MatrixXd rmat = qr.matrixR().topLeftCorner(x.cols(), x.cols()).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      rmat.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
  const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * cov_perm * perm.transpose();
  const double sigma2 = rss / (nd - pd);
  const boost::math::students_t dist(nd - pd);
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    r.coef.push_back(beta(jj));
    const double se = std::sqrt(sigma2 * xtx_inv(jj, jj));
    r.se.push_back(se);
    const double t = se > 0.0 ? beta(jj) / se : std::numeric_limits<double>::infinity();
    r.t.push_back(t);
    r.p.push_back(std::isfinite(t) ? 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))) : 0.0);
  }
  r.residuals.assign(resid.data(), resid.data() + resid.size());

  for (const auto& name : vif_columns) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error("no design column named " + name + " for VIF");
    const auto j = static_cast<Eigen::Index>(it - names.begin());
    Eigen::MatrixXd others(x.rows(), x.cols() - 1 + (has_intercept ? 0 : 1));
    Eigen::Index c = 0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      if (k != j) others.col(c++) = x.col(k);
    }
    if (!has_intercept) others.col(c) = Eigen::VectorXd::Ones(x.rows());
    r.vif[name] = vif_from_r2(auxiliary_r2(others, x.col(j)));
  }
  return r;
}

std::vector<double> vif(const Eigen::MatrixXd& regressors) {
  if (regressors.cols() < 1) throw Error("VIF needs at least one regressor");
  std::vector<double> out;
  for (Eigen::Index j = 0; j < regressors.cols(); ++j) {
    Eigen::MatrixXd others(regressors.rows(), regressors.cols());
    Eigen::Index c = 0;
    for (Eigen::Index k = 0; k < regressors.cols(); ++k) {
      if (k != j) others.col(c++) = regressors.col(k);
    }
    others.col(c) = Eigen::VectorXd::Ones(regressors.rows());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> check(regressors.rows(), regressors.cols() + 1);
    check.setThreshold(1e-10);
    Eigen::MatrixXd full(regressors.rows(), regressors.cols() + 1);
    full << regressors, Eigen::VectorXd::Ones(regressors.rows());
    check.compute(full);
    if (check.rank() < full.cols()) throw Error("rank-deficient design; VIF undefined");
    out.push_back(vif_from_r2(auxiliary_r2(others, regressors.col(j))));
  }
  return out;
}

RegressionResult ols(const RegressionSpec& spec, const DataTable& data) {
  const std::size_t rows = data.rows();
  auto numeric = [&](const std::string& name) -> const std::vector<double>& {
    auto it = data.numeric.find(name);
    if (it == data.numeric.end()) throw Error("no numeric column named " + name);
    return it->second;
  };
  std::vector<std::string> continuous{spec.response};
  continuous.insert(continuous.end(), spec.regressors.begin(), spec.regressors.end());
  for (const auto& d : spec.dummies) {
    if (!data.categorical.count(d)) throw Error("no categorical column named " + d);
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < rows; ++i) {
    bool ok = true;
    for (const auto& c : continuous) {
      const double v = numeric(c)[i];
      if (!std::isfinite(v) || (spec.log1p.count(c) && v <= -1.0)) ok = false;
    }
    if (ok) keep.push_back(i);
  }

  std::map<std::string, std::vector<double>> cols;
  for (const auto& c : continuous) {
    std::vector<double> v;
    v.reserve(keep.size());
    for (auto i : keep) v.push_back(spec.log1p.count(c) ? std::log1p(numeric(c)[i]) : numeric(c)[i]);
    if (spec.standardize) {
      const auto ms = mean_se(v);
      const double sd = ms.se * std::sqrt(static_cast<double>(v.size()));
      if (!(sd > 0.0)) throw Error("cannot standardize constant column " + c);
      for (double& x : v) x = (x - ms.mean) / sd;
    }
    cols[c] = std::move(v);
  }

  std::vector<std::string> names;
  std::vector<std::vector<double>> design;
  if (spec.intercept) {
    names.push_back("const");
    design.emplace_back(keep.size(), 1.0);
  }
  for (const auto& c : spec.regressors) {
    names.push_back(c);
    design.push_back(cols[c]);
  }
  std::vector<DummyGroup> groups;
  for (const auto& d : spec.dummies) {
    const auto& values = data.categorical.at(d);
    std::set<std::string> levels;
    for (auto i : keep) levels.insert(values[i]);
    DummyGroup g{d, levels.empty() ? std::string() : *levels.begin(), {}};
    for (auto it = levels.begin(); it != levels.end(); ++it) {
      if (it == levels.begin()) continue;
      g.levels.push_back(*it);
      names.push_back(d + "=" + *it);
      std::vector<double> col;
      col.reserve(keep.size());
      for (auto i : keep) col.push_back(values[i] == *it ? 1.0 : 0.0);
      design.push_back(std::move(col));
    }
    groups.push_back(std::move(g));
  }

  Eigen::MatrixXd x(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(design.size()));
  for (std::size_t j = 0; j < design.size(); ++j) {
    for (std::size_t i = 0; i < keep.size(); ++i) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = design[j][i];
    }
  }
  const auto& yv = cols[spec.response];
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
  auto result = ols_matrix(x, y, names, spec.intercept, spec.regressors);
  result.dropped_rows = rows - keep.size();
  result.dummy_groups = std::move(groups);
  return result;
}

}  // namespace idr
