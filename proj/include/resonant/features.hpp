#ifndef RESONANT_FEATURES_HPP
#define RESONANT_FEATURES_HPP

#include <vector>

#include "resonant/common.hpp"
#include "resonant/spectral.hpp"

namespace resonant {

/// Nearest-centroid partition of the complex plane learned from pooled
/// training resonances. Ties in the nearest-centroid rule go to the lowest
/// index.
struct PlanePartition {
  std::vector<Complex> centroids;
  double d_th = 0.0;

  int size() const { return static_cast<int>(centroids.size()); }
};

/// Per-region complex averages; values[k] is 0 wherever mask[k] is false.
struct FeatureVector {
  std::vector<Complex> values;
  std::vector<bool> mask;
};

/// Kruskal-Wallis scores for the 2M flattened real columns and the retained
/// column index set (ascending).
struct FeatureRanking {
  std::vector<double> scores;
  std::vector<int> selected;
};

/// Complete-linkage agglomerative clustering: merges the closest pair while
/// the complete-linkage distance stays <= d_th, so every final cluster has
/// diameter <= d_th. Equal-distance merges take the lexicographically
/// smallest (min index, max index) pair.
PlanePartition cluster_resonances(const std::vector<Complex>& points, double d_th);

/// Index of the nearest centroid (lowest index on ties).
int assign_region(const PlanePartition& partition, Complex z);

/// Region averages of the resonance set; empty regions stay zero.
FeatureVector featurize(const ResonanceSet& rs, const PlanePartition& partition);

/// Kruskal-Wallis H with midrank ties and the standard tie correction;
/// fully tied samples give H = 0.
double kruskal_wallis(const std::vector<double>& feature, const std::vector<int>& labels);

/// Flattened real representation fed to the classifier: all real parts,
/// then all imaginary parts (length 2M).
std::vector<double> flatten_features(const FeatureVector& fv);

/// Scores every flattened column with Kruskal-Wallis and keeps the top
/// ceil(c_percent/100 * 2M), ties broken by lower column index.
FeatureRanking select_features(const std::vector<FeatureVector>& train_features,
                               const std::vector<int>& labels, double c_percent);

}  // namespace resonant

#endif  // RESONANT_FEATURES_HPP
