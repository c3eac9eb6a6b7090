#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "random.hpp"
#include "scoring.hpp"
#include "tsv.hpp"

namespace earlyrank {

inline constexpr std::int64_t kSecondsPerWeek = 7 * 86400;

/// Accounts at most `weeks` old at snapshot time with at least `min_followers` followers.
struct Cohort {
  std::vector<NodeId> accounts;
  int weeks = 0;
  std::size_t min_followers = 0;
  bool active_only = false;
};

/// meta is indexed by dense id, as produced by load_snapshot.
inline Cohort extract_cohort(const FollowGraph& g, std::span<const AccountMeta> meta, std::int64_t snapshot_time,
                             int weeks, std::size_t min_followers, bool active_only) {
  if (meta.size() != g.num_nodes()) throw std::invalid_argument("extract_cohort: meta does not cover the graph");
  Cohort cohort{{}, weeks, min_followers, active_only};
  const std::int64_t max_age = static_cast<std::int64_t>(weeks) * kSecondsPerWeek;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto& m = meta[u];
    const std::int64_t age = snapshot_time - m.created_at;
    if (age < 0 || age > max_age) continue;
    if (g.follower_count(u) < min_followers) continue;
    if (active_only && !m.active_at_horizon) continue;
    cohort.accounts.push_back(u);
  }
  return cohort;
}

/// 1-based ranks in ascending value order; tied values share their average rank.
inline std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Spearman's rho with mid-ranks for ties. Empty when either side is constant.
inline std::optional<double> spearman_rho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman_rho: tables differ in size");
  if (a.size() < 2) throw std::invalid_argument("spearman_rho: need at least 2 accounts");
  const auto ra = mid_ranks(a);
  const auto rb = mid_ranks(b);
  return pearson(ra, rb);
}

/// nDCG@k for gains listed in ranked order; k past the end uses the full list. 0 when the ideal DCG is 0.
inline double ndcg_at_k(std::span<const double> ranked_gains, std::size_t k) {
  if (k < 1) throw std::invalid_argument("ndcg_at_k: k must be >= 1");
  k = std::min(k, ranked_gains.size());
  auto dcg = [k](std::span<const double> gains) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += gains[i] / std::log2(static_cast<double>(i) + 2.0);
    return total;
  };
  std::vector<double> ideal(ranked_gains.begin(), ranked_gains.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>{});
  const double best = dcg(ideal);
  if (best == 0.0) return 0.0;
  return dcg(ranked_gains) / best;
}

/// gain_of is indexed by dense id.
inline double ndcg_at_k(const Ranking& ranking, std::span<const double> gain_of, std::size_t k) {
  std::vector<double> gains;
  gains.reserve(ranking.size());
  for (const auto& e : ranking) gains.push_back(gain_of[e.account]);
  return ndcg_at_k(gains, k);
}

/// 1 iff the gain is strictly above the q-quantile of all gains (linear interpolation; q = 0.5 is the median).
inline std::vector<int> labels_above_quantile(std::span<const double> gains, double q = 0.5) {
  if (gains.empty()) return {};
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must be in [0, 1]");
  std::vector<double> sorted(gains.begin(), gains.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double threshold = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  std::vector<int> labels(gains.size());
  for (std::size_t i = 0; i < gains.size(); ++i) labels[i] = gains[i] > threshold ? 1 : 0;
  return labels;
}

struct LogisticResult {
  /// Out-of-fold predicted probability per account.
  std::vector<double> combined;
  /// Full-data fit: intercept first, then one coefficient per input feature.
  std::vector<double> coefficients;
  /// Input features that were constant and got coefficient 0.
  std::vector<std::size_t> constant_features;
  /// False when some fit hit the iteration cap before the gradient tolerance.
  bool converged = true;
};

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
inline double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Solves (a) x = b in place for a symmetric positive definite a (row-major p x p). False if not SPD.
inline bool cholesky_solve(std::vector<double> a, std::vector<double>& b, std::size_t p) {
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j * p + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * p + j] = d;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a[i * p + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
      a[i * p + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * p + k] * b[k];
    b[i] = s / a[i * p + i];
  }
  for (std::size_t i = p; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < p; ++k) s -= a[k * p + i] * b[k];
    b[i] = s / a[i * p + i];
  }
  return true;
}

struct Fit {
  std::vector<double> beta;  // intercept first
  bool converged = false;
};

// Maximum-likelihood logistic regression by damped Newton steps with backtracking.
// rows holds the selected examples; x is n x p row-major without the intercept column.
inline Fit fit_logistic(std::span<const double> x, std::size_t p, std::span<const int> y,
                        std::span<const std::size_t> rows) {
  constexpr int kMaxIter = 500;
  constexpr double kGradTol = 1e-8;
  const std::size_t q = p + 1;
  Fit fit;
  fit.beta.assign(q, 0.0);
  auto feature = [&](std::size_t r, std::size_t j) { return j == 0 ? 1.0 : x[r * p + j - 1]; };
  auto margin = [&](const std::vector<double>& beta, std::size_t r) {
    double z = 0.0;
    for (std::size_t j = 0; j < q; ++j) z += beta[j] * feature(r, j);
    return z;
  };
  auto loss = [&](const std::vector<double>& beta) {
    double total = 0.0;
    for (const auto r : rows) {
      const double z = margin(beta, r);
      total += y[r] ? softplus(-z) : softplus(z);
    }
    return total;
  };

  double current = loss(fit.beta);
  for (int it = 0; it < kMaxIter; ++it) {
    std::vector<double> grad(q, 0.0);
    std::vector<double> hess(q * q, 0.0);
    for (const auto r : rows) {
      const double prob = sigmoid(margin(fit.beta, r));
      const double w = prob * (1.0 - prob);
      for (std::size_t i = 0; i < q; ++i) {
        grad[i] += (static_cast<double>(y[r]) - prob) * feature(r, i);
        for (std::size_t j = 0; j < q; ++j) hess[i * q + j] += w * feature(r, i) * feature(r, j);
      }
    }
    double gnorm = 0.0;
    for (const double gi : grad) gnorm += gi * gi;
    if (std::sqrt(gnorm) < kGradTol) {
      fit.converged = true;
      return fit;
    }
    std::vector<double> step = grad;
    double ridge = 1e-10;
    while (true) {
      auto damped = hess;
      for (std::size_t i = 0; i < q; ++i) damped[i * q + i] += ridge;
      step = grad;
      if (cholesky_solve(std::move(damped), step, q)) break;
      ridge *= 100.0;
    }
    double scale = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      auto trial = fit.beta;
      for (std::size_t i = 0; i < q; ++i) trial[i] += scale * step[i];
      const double value = loss(trial);
      if (value < current) {
        fit.beta = std::move(trial);
        current = value;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // no descent left at double precision
      fit.converged = std::sqrt(gnorm) < 1e-6;
      return fit;
    }
  }
  return fit;
}

inline std::vector<double> rank_normalize(std::span<const double> values) {
  auto ranks = mid_ranks(values);
  const double n = static_cast<double>(values.size());
  for (double& r : ranks) r = n > 1 ? (r - 1.0) / (n - 1.0) : 0.0;
  return ranks;
}

}  // namespace detail

/**
 * Logistic-regression combination of score tables.
 *
 * Each feature is rank-normalized to [0, 1]. Accounts are split into `folds` groups by a seeded
 * shuffle; every group is scored by a model fitted on the others. Coefficients come from a fit on
 * all accounts. Constant features get coefficient 0.
 */
inline LogisticResult logistic_combine(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                                       int folds, std::uint64_t seed = 42) {
  if (features.empty()) throw std::invalid_argument("logistic_combine: need at least one feature");
  if (folds < 2) throw std::invalid_argument("logistic_combine: folds must be >= 2");
  const std::size_t n = labels.size();
  for (const auto& f : features) {
    if (f.size() != n) throw std::invalid_argument("logistic_combine: feature and label sizes differ");
  }
  for (const int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("logistic_combine: labels must be 0 or 1");
  }

  LogisticResult result;
  std::vector<std::size_t> used;
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto& f = features[j];
    const bool constant = std::all_of(f.begin(), f.end(), [&](double v) { return v == f.front(); });
    if (constant) {
      result.constant_features.push_back(j);
    } else {
      used.push_back(j);
    }
  }
  const std::size_t p = used.size();
  std::vector<double> x(n * p);
  for (std::size_t k = 0; k < p; ++k) {
    const auto normalized = detail::rank_normalize(features[used[k]]);
    for (std::size_t r = 0; r < n; ++r) x[r * p + k] = normalized[r];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<int> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

  result.combined.assign(n, 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t r = 0; r < n; ++r) (fold_of[r] == f ? test : train).push_back(r);
    if (test.empty()) continue;
    const auto fit = detail::fit_logistic(x, p, labels, train);
    result.converged = result.converged && fit.converged;
    for (const auto r : test) {
      double z = fit.beta[0];
      for (std::size_t k = 0; k < p; ++k) z += fit.beta[k + 1] * x[r * p + k];
      result.combined[r] = detail::sigmoid(z);
    }
  }

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto full = detail::fit_logistic(x, p, labels, all);
  result.converged = result.converged && full.converged;
  result.coefficients.assign(features.size() + 1, 0.0);
  result.coefficients[0] = full.beta[0];
  for (std::size_t k = 0; k < p; ++k) result.coefficients[used[k] + 1] = full.beta[k + 1];
  return result;
}

/// TSV of account_id, score_rank, gain_rank (rank 1 = largest, ties share mid-ranks).
inline void scatter_export(std::ostream& out, std::span<const ExternalId> accounts, std::span<const double> scores,
                           std::span<const double> gains) {
  if (accounts.size() != scores.size() || accounts.size() != gains.size()) {
    throw std::invalid_argument("scatter_export: tables are not aligned");
  }
  auto descending = [](std::span<const double> v) {
    std::vector<double> neg(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
    return mid_ranks(neg);
  };
  const auto score_rank = descending(scores);
  const auto gain_rank = descending(gains);
  out << "# account_id\tscore_rank\tgain_rank\n";
  for (std::size_t i = 0; i < accounts.size(); ++i) {
    out << accounts[i] << '\t' << tsv::format_double(score_rank[i]) << '\t' << tsv::format_double(gain_rank[i])
        << '\n';
  }
}

inline void scatter_export(std::ostream& out, const FollowGraph& g, std::span<const NodeId> accounts,
                           std::span<const double> scores, std::span<const double> gains) {
  std::vector<ExternalId> external(accounts.size());
  for (std::size_t i = 0; i < accounts.size(); ++i) external[i] = g.external_id(accounts[i]);
  scatter_export(out, external, scores, gains);
}

}  // namespace earlyrank
