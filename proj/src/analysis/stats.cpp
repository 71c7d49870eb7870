#include "pointing/analysis/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "pointing/common/error.hpp"

namespace pointing::analysis {

std::string to_string(TestMethod method) { return method == TestMethod::wilcoxon ? "wilcoxon" : "spearman"; }

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

bool constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

StatTestResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::invalid_argument, "spearman inputs differ in length");
  if (x.size() < 3) throw Error(ErrorCode::invalid_argument, "spearman needs at least 3 pairs");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error(ErrorCode::non_finite, "spearman input not finite");
  }
  if (constant(x) || constant(y)) throw Error(ErrorCode::degenerate, "spearman correlation undefined for constant input");

  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  StatTestResult res;
  res.method = TestMethod::spearman;
  res.n = static_cast<int>(x.size());
  res.statistic = std::clamp(pearson(rx, ry), -1.0, 1.0);

  if (res.n <= 9) {
    // Exact permutation distribution of r: every assignment of the y ranks.
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    long total = 0, extreme = 0;
    const double obs = std::abs(res.statistic) - 1e-12;
    do {
      ++total;
      if (std::abs(pearson(rx, perm)) >= obs) ++extreme;
    } while (std::next_permutation(perm.begin(), perm.end()));
    // With tied y ranks each distinct arrangement stands for the same number
    // of orderings, so uniform counting is still exact.
    res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    res.distribution = "permutation";
  } else {
    const double r = res.statistic;
    if (std::abs(r) >= 1.0) {
      res.p_value = 0.0;
    } else {
      const double df = res.n - 2;
      const double t = r * std::sqrt(df / (1.0 - r * r));
      boost::math::students_t dist(df);
      res.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    }
    res.distribution = "t";
  }
  return res;
}

StatTestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::invalid_argument, "wilcoxon inputs differ in length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (!std::isfinite(diff)) throw Error(ErrorCode::non_finite, "wilcoxon input not finite");
    if (diff != 0.0) d.push_back(diff);
  }
  if (d.empty()) throw Error(ErrorCode::degenerate, "all paired differences are zero");
  const int n = static_cast<int>(d.size());
  if (n < kWilcoxonMinPairs) {
    throw Error(ErrorCode::invalid_argument, "wilcoxon needs at least " + std::to_string(kWilcoxonMinPairs) +
                                                 " non-zero differences, got " + std::to_string(n));
  }
  std::vector<double> mags(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mags[i] = std::abs(d[i]);
  const auto ranks = average_ranks(mags);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0.0) w_plus += ranks[i];
  const double total = n * (n + 1) / 2.0;
  const double w_min = std::min(w_plus, total - w_plus);

  StatTestResult res;
  res.method = TestMethod::wilcoxon;
  res.n = n;
  res.statistic = w_min;
  if (n <= kWilcoxonExactMax) {
    // Average ranks are multiples of 1/2; count sign assignments per doubled sum.
    std::vector<int> doubled(ranks.size());
    int max_sum = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
      max_sum += doubled[i];
    }
    std::vector<double> ways(static_cast<std::size_t>(max_sum + 1), 0.0);
    ways[0] = 1.0;
    for (int r : doubled) {
      for (int s = max_sum; s >= r; --s) ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
    }
    const int limit = static_cast<int>(std::lround(2.0 * w_min));
    double tail = 0.0;
    for (int s = 0; s <= limit; ++s) tail += ways[static_cast<std::size_t>(s)];
    res.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, n));
    res.distribution = "exact";
  } else {
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
    const double mean = n * (n + 1) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (w_plus - mean) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
    res.distribution = "normal";
  }
  return res;
}

namespace {

void check_p_values(std::span<const double> p, double alpha) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::invalid_argument, "p-values must lie in [0,1]");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in (0,1)");
}

}  // namespace

std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha) {
  check_p_values(p_values, alpha);
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<bool> reject(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (p_values[order[i]] > alpha / static_cast<double>(m - i)) break;
    reject[order[i]] = true;
  }
  return reject;
}

std::vector<bool> bonferroni(std::span<const double> p_values, double alpha) {
  check_p_values(p_values, alpha);
  std::vector<bool> reject(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i) reject[i] = p_values[i] <= alpha / static_cast<double>(p_values.size());
  return reject;
}

}  // namespace pointing::analysis
