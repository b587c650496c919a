#include "resonant/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace resonant {

PlanePartition cluster_resonances(const std::vector<Complex>& points, double d_th) {
  if (points.empty()) throw std::invalid_argument("cluster_resonances: empty input");
  if (!(d_th > 0.0)) throw std::invalid_argument("cluster_resonances: d_th must be > 0");
  for (Complex z : points)
    if (!is_finite(z)) throw std::invalid_argument("cluster_resonances: non-finite point");

  const int Q = static_cast<int>(points.size());
  std::vector<std::vector<int>> members(static_cast<std::size_t>(Q));
  std::vector<bool> active(static_cast<std::size_t>(Q), true);
  for (int i = 0; i < Q; ++i) members[static_cast<std::size_t>(i)] = {i};

  // Complete-linkage distances, updated in place by the Lance-Williams
  // max rule on each merge.
  std::vector<std::vector<double>> dist(static_cast<std::size_t>(Q),
                                        std::vector<double>(static_cast<std::size_t>(Q), 0.0));
  for (int i = 0; i < Q; ++i)
    for (int j = i + 1; j < Q; ++j)
      dist[i][j] = dist[j][i] = std::abs(points[static_cast<std::size_t>(i)] -
                                         points[static_cast<std::size_t>(j)]);

  while (true) {
    int best_i = -1, best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < Q; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < Q; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        if (dist[i][j] < best) {
          best = dist[i][j];
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i < 0 || best > d_th) break;

    auto& mi = members[static_cast<std::size_t>(best_i)];
    auto& mj = members[static_cast<std::size_t>(best_j)];
    mi.insert(mi.end(), mj.begin(), mj.end());
    mj.clear();
    active[static_cast<std::size_t>(best_j)] = false;
    for (int k = 0; k < Q; ++k) {
      if (!active[static_cast<std::size_t>(k)] || k == best_i) continue;
      const double d = std::max(dist[best_i][k], dist[best_j][k]);
      dist[best_i][k] = dist[k][best_i] = d;
    }
  }

  PlanePartition partition;
  partition.d_th = d_th;
  for (int i = 0; i < Q; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    Complex sum{0.0, 0.0};
    for (int idx : members[static_cast<std::size_t>(i)]) sum += points[static_cast<std::size_t>(idx)];
    partition.centroids.push_back(sum / static_cast<double>(members[static_cast<std::size_t>(i)].size()));
  }
  return partition;
}

int assign_region(const PlanePartition& partition, Complex z) {
  if (partition.centroids.empty()) throw std::invalid_argument("assign_region: empty partition");
  int best = 0;
  double best_d = std::abs(z - partition.centroids[0]);
  for (int k = 1; k < partition.size(); ++k) {
    const double d = std::abs(z - partition.centroids[static_cast<std::size_t>(k)]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

FeatureVector featurize(const ResonanceSet& rs, const PlanePartition& partition) {
  const std::size_t M = partition.centroids.size();
  FeatureVector fv;
  fv.values.assign(M, Complex{0.0, 0.0});
  fv.mask.assign(M, false);
  std::vector<int> counts(M, 0);
  for (Complex z : rs.freqs) {
    const auto k = static_cast<std::size_t>(assign_region(partition, z));
    fv.values[k] += z;
    ++counts[k];
  }
  for (std::size_t k = 0; k < M; ++k) {
    if (counts[k] > 0) {
      fv.values[k] /= static_cast<double>(counts[k]);
      fv.mask[k] = true;
    }
  }
  return fv;
}

double kruskal_wallis(const std::vector<double>& feature, const std::vector<int>& labels) {
  const std::size_t n = feature.size();
  if (n != labels.size()) throw std::invalid_argument("kruskal_wallis: length mismatch");
  if (n < 2) throw std::invalid_argument("kruskal_wallis: need at least two samples");
  int P = 0;
  for (int l : labels) {
    if (l < 1) throw std::invalid_argument("kruskal_wallis: labels must be >= 1");
    P = std::max(P, l);
  }
  std::vector<int> class_sizes(static_cast<std::size_t>(P), 0);
  for (int l : labels) ++class_sizes[static_cast<std::size_t>(l - 1)];
  if (P < 2 || std::any_of(class_sizes.begin(), class_sizes.end(), [](int c) { return c == 0; }))
    throw std::invalid_argument("kruskal_wallis: every class 1..P must be present (P >= 2)");
  for (double v : feature)
    if (!std::isfinite(v)) throw std::invalid_argument("kruskal_wallis: non-finite value");

  // Midranks with tie groups.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return feature[a] < feature[b]; });
  std::vector<double> rank(n, 0.0);
  double tie_sum = 0.0;  // sum of t^3 - t over tie groups
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && feature[order[j + 1]] == feature[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }

  const double nd = static_cast<double>(n);
  const double correction = 1.0 - tie_sum / (nd * nd * nd - nd);
  if (correction <= 0.0) return 0.0;  // all values tied

  std::vector<double> rank_sum(static_cast<std::size_t>(P), 0.0);
  for (std::size_t k = 0; k < n; ++k)
    rank_sum[static_cast<std::size_t>(labels[k] - 1)] += rank[k];
  double h = 0.0;
  for (int p = 0; p < P; ++p) {
    const double np = class_sizes[static_cast<std::size_t>(p)];
    const double dev = rank_sum[static_cast<std::size_t>(p)] / np - 0.5 * (nd + 1.0);
    h += np * dev * dev;
  }
  h *= 12.0 / (nd * (nd + 1.0));
  return h / correction;
}

std::vector<double> flatten_features(const FeatureVector& fv) {
  const std::size_t M = fv.values.size();
  std::vector<double> flat(2 * M);
  for (std::size_t k = 0; k < M; ++k) {
    flat[k] = fv.values[k].real();
    flat[M + k] = fv.values[k].imag();
  }
  return flat;
}

FeatureRanking select_features(const std::vector<FeatureVector>& train_features,
                               const std::vector<int>& labels, double c_percent) {
  if (train_features.empty()) throw std::invalid_argument("select_features: empty training set");
  if (train_features.size() != labels.size())
    throw std::invalid_argument("select_features: labels length mismatch");
  if (!(c_percent > 0.0) || c_percent > 100.0)
    throw std::invalid_argument("select_features: c_percent must lie in (0, 100]");
  const std::size_t M = train_features.front().values.size();
  for (const FeatureVector& fv : train_features)
    if (fv.values.size() != M) throw std::invalid_argument("select_features: ragged feature vectors");

  const std::size_t n_cols = 2 * M;
  FeatureRanking ranking;
  ranking.scores.resize(n_cols);
  std::vector<double> column(train_features.size());
  for (std::size_t c = 0; c < n_cols; ++c) {
    for (std::size_t l = 0; l < train_features.size(); ++l) {
      const FeatureVector& fv = train_features[l];
      column[l] = c < M ? fv.values[c].real() : fv.values[c - M].imag();
    }
    ranking.scores[c] = kruskal_wallis(column, labels);
  }

  const auto keep = static_cast<std::size_t>(
      std::ceil(c_percent / 100.0 * static_cast<double>(n_cols)));
  std::vector<int> by_score(n_cols);
  std::iota(by_score.begin(), by_score.end(), 0);
  std::stable_sort(by_score.begin(), by_score.end(), [&](int a, int b) {
    return ranking.scores[static_cast<std::size_t>(a)] > ranking.scores[static_cast<std::size_t>(b)];
  });
  ranking.selected.assign(by_score.begin(), by_score.begin() + static_cast<long>(std::min(keep, n_cols)));
  std::sort(ranking.selected.begin(), ranking.selected.end());
  return ranking;
}

}  // namespace resonant
