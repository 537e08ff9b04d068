#pragma once

// Statistics and table helpers shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "matchlab/results.hpp"

namespace testsupport {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  out.count = static_cast<int>(xs.size());
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (xs.size() - 1)) / std::sqrt(double(xs.size()));
  }
  return out;
}

/// Values of rows passing the filter, keyed by replication.
inline std::map<int, double> by_replication(const matchlab::exp::ResultTable& table,
                                            const std::function<bool(const matchlab::exp::ResultRow&)>& keep) {
  std::map<int, double> out;
  for (const auto& r : table)
    if (keep(r)) out[r.replication] = r.value;
  return out;
}

inline std::vector<double> values_of(const std::map<int, double>& xs) {
  std::vector<double> out;
  for (const auto& [rep, v] : xs) out.push_back(v);
  return out;
}

/// a - b for replications present in both.
inline std::vector<double> paired_difference(const std::map<int, double>& a, const std::map<int, double>& b) {
  std::vector<double> out;
  for (const auto& [rep, v] : a)
    if (auto it = b.find(rep); it != b.end()) out.push_back(v - it->second);
  return out;
}

inline std::vector<double> ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * (i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

/// Kendall tau-a between two rank vectors of equal length.
inline double kendall_tau(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const long s = long(a[i] - a[j]) * long(b[i] - b[j]);
      concordant += s > 0;
      discordant += s < 0;
    }
  return double(concordant - discordant) / (0.5 * double(n) * double(n - 1));
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = xs.size();
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace testsupport
