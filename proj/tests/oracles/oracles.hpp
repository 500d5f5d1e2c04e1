// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent reference computations used only by the tests. Nothing in
// here calls into the library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

/// Central finite differences of f at x.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> x, double eps = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double up = f(x);
    x[i] = orig - eps;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::fabs(a[i]), std::fabs(b[i]), floor});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

// Standardizers written out directly from their textbook definitions.

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline std::vector<double> relative_ratio(const std::vector<double>& d) {
  const double mu = mean_of(d);
  std::vector<double> out;
  for (double x : d) out.push_back(mu > 0.0 ? x / mu : 1.0);
  return out;
}

inline std::vector<double> z_score(const std::vector<double>& d) {
  const double mu = mean_of(d);
  double var = 0.0;
  for (double x : d) var += (x - mu) * (x - mu);
  const double sigma = std::sqrt(var / static_cast<double>(d.size()));
  std::vector<double> out;
  for (double x : d) out.push_back(sigma > 0.0 ? (x - mu) / sigma : 0.0);
  return out;
}

/// Percentile as numpy's default "linear" method.
inline double np_percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const double fl = std::floor(h);
  const auto i = static_cast<std::size_t>(fl);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - fl) * (v[i + 1] - v[i]);
}

inline std::vector<double> robust_scale(const std::vector<double>& d) {
  const double med = np_percentile(d, 0.5);
  const double iqr = np_percentile(d, 0.75) - np_percentile(d, 0.25);
  std::vector<double> out;
  for (double x : d) out.push_back(iqr > 0.0 ? (x - med) / iqr : 0.0);
  return out;
}

// ACC / FR transliterated from their defining sums over a full K x K grid
// (a[i][k] = accuracy on task i after training task k).

inline double acc_literal(const std::vector<std::vector<double>>& a) {
  const std::size_t K = a.size();
  double s = 0.0;
  for (std::size_t i = 1; i <= K; ++i) s += a[i - 1][K - 1];
  return s / static_cast<double>(K);
}

inline double fr_literal(const std::vector<std::vector<double>>& a) {
  const std::size_t K = a.size();
  double s = 0.0;
  for (std::size_t i = 1; i <= K - 1; ++i) {
    double mx = a[i - 1][0];
    for (std::size_t k = 1; k <= K; ++k) mx = std::max(mx, a[i - 1][k - 1]);
    s += mx - a[i - 1][K - 1];
  }
  return s / static_cast<double>(K - 1);
}

/// Dual-layer classifier consolidation written line by line from the
/// algorithm listing. `omega` is the full classifier, one row per class.
struct DcwrTransliteration {
  std::vector<std::vector<double>> Ms, Mc, Ml;
  std::vector<double> P;

  DcwrTransliteration(std::size_t classes, std::size_t row)
      : Ms(classes, std::vector<double>(row, 0.0)),
        Mc(classes, std::vector<double>(row, 0.0)),
        Ml(classes, std::vector<double>(row, 0.0)),
        P(classes, 0.0) {}

  /// One time step. `labels` is the combined batch, eps one draw per
  /// distinct class in ascending order. Returns the classifier after
  /// "omega <- M^l".
  std::vector<std::vector<double>> step(const std::vector<std::vector<double>>& omega, const std::vector<int>& labels,
                                        double p, const std::vector<double>& eps) {
    std::map<int, double> U;
    for (int y : labels) U[y] += 1.0;
    const std::size_t row = omega[0].size();
    std::vector<double> omega_bar(row, 0.0);
    for (const auto& [k, cnt] : U) {
      (void)cnt;
      for (std::size_t i = 0; i < row; ++i) omega_bar[i] += omega[k][i];
    }
    for (double& v : omega_bar) v /= static_cast<double>(U.size());
    std::size_t e = 0;
    for (const auto& [j, Uj] : U) {
      for (std::size_t i = 0; i < row; ++i) Ms[j][i] = omega[j][i] - omega_bar[i];
      const double eta_c = P[j] / Uj;
      const double eta_l = std::sqrt(P[j] / Uj);
      if (!(eps[e++] >= p)) {
        for (std::size_t i = 0; i < row; ++i) Mc[j][i] = (Mc[j][i] * eta_c + Ms[j][i]) / (eta_c + 1);
      }
      for (std::size_t i = 0; i < row; ++i) Ml[j][i] = (Ml[j][i] * eta_l + Mc[j][i]) / (eta_l + 1);
      P[j] = P[j] + Uj;
    }
    return Ml;
  }
};

/// Index (in lexicographic enumeration of all size-k subsets of {0..n-1})
/// of a sorted subset.
inline std::map<std::vector<int>, std::size_t> enumerate_subsets(int n, int k) {
  std::map<std::vector<int>, std::size_t> index;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      index.emplace(pick, index.size());
      return;
    }
    for (int v = start; v < n; ++v) {
      pick[static_cast<std::size_t>(depth)] = v;
      rec(v + 1, depth + 1);
    }
  };
  rec(0, 0);
  return index;
}

}  // namespace oracle
