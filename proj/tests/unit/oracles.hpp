// Test-only reference computations, deliberately independent of the library
// implementation paths they are used to check.
#ifndef RESONANT_TESTS_ORACLES_HPP
#define RESONANT_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "resonant/common.hpp"

namespace oracles {

using resonant::Complex;
using resonant::TimeSeries;

// Direct per-sample evaluation with std::pow, no running products.
inline TimeSeries synth_direct(const std::vector<Complex>& freqs,
                               const std::vector<Complex>& residues, int T) {
  TimeSeries x(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < freqs.size(); ++i)
      s += residues[i] * std::pow(freqs[i], static_cast<double>(t));
    x[static_cast<std::size_t>(t - 1)] = s;
  }
  return x;
}

// Full-accuracy singular values of a complex matrix (Jacobi SVD).
inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& H) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
  return svd.singularValues();
}

// Smallest achievable max modulus error over all assignments of estimated to
// true frequencies (brute force over permutations; fine for N <= 8).
inline double best_match_error(std::vector<Complex>估, const std::vector<Complex>& truth) {
  if (估.size() != truth.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(truth.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
      worst = std::max(worst, std::abs(估[perm[i]] - truth[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Kruskal-Wallis by counting comparisons instead of sorting: the midrank of
// value v is 1 + #{u < v} + (#{u == v} - 1) / 2.
inline double kruskal_wallis_bruteforce(const std::vector<double>& values,
                                        const std::vector<int>& labels) {
  const std::size_t n = values.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (values[j] < values[i]) ++less;
      if (values[j] == values[i]) ++equal;
    }
    rank[i] = 1.0 + static_cast<double>(less) + (static_cast<double>(equal) - 1.0) / 2.0;
  }
  const int P = *std::max_element(labels.begin(), labels.end());
  std::vector<double> sum(static_cast<std::size_t>(P), 0.0);
  std::vector<double> count(static_cast<std::size_t>(P), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[static_cast<std::size_t>(labels[i] - 1)] += rank[i];
    count[static_cast<std::size_t>(labels[i] - 1)] += 1.0;
  }
  const double nd = static_cast<double>(n);
  double h = 0.0;
  for (int p = 0; p < P; ++p)
    h += count[static_cast<std::size_t>(p)] *
         std::pow(sum[static_cast<std::size_t>(p)] / count[static_cast<std::size_t>(p)] -
                      (nd + 1.0) / 2.0,
                  2.0);
  h *= 12.0 / (nd * (nd + 1.0));

  double tie = 0.0;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    double t = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      if (values[j] == values[i]) {
        t += 1.0;
        seen[j] = true;
      }
    }
    tie += t * t * t - t;
  }
  const double corr = 1.0 - tie / (nd * nd * nd - nd);
  if (corr <= 0.0) return 0.0;
  return h / corr;
}

// Global maximum of the SVM dual by projected gradient ascent with an exact
// projection onto {0 <= a <= C, y.a = 0} (bisection on the multiplier).
struct DualSolution {
  Eigen::VectorXd alpha;
  double objective = 0.0;
};

inline double dual_objective(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& K,
                             const std::vector<int>& y) {
  const auto n = alpha.size();
  double quad = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      quad += alpha[i] * alpha[j] * y[static_cast<std::size_t>(i)] *
              y[static_cast<std::size_t>(j)] * K(i, j);
  return alpha.sum() - 0.5 * quad;
}

inline Eigen::VectorXd project_box_hyperplane(Eigen::VectorXd v, const std::vector<int>& y,
                                              double C) {
  const auto n = v.size();
  auto constraint = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double yi = y[static_cast<std::size_t>(i)];
      s += yi * std::clamp(v[i] - mu * yi, 0.0, C);
    }
    return s;
  };
  double lo = -(v.cwiseAbs().maxCoeff() + C + 1.0);
  double hi = -lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (constraint(mid) > 0.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = std::clamp(v[i] - mu * y[static_cast<std::size_t>(i)], 0.0, C);
  return v;
}

inline DualSolution maximize_dual(const Eigen::MatrixXd& K, const std::vector<int>& y, double C,
                                  int iters = 200000) {
  const auto n = K.rows();
  Eigen::MatrixXd Q(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      Q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] * K(i, j);
  const double L = std::max(1e-9, Q.cwiseAbs().rowwise().sum().maxCoeff());
  const double eta = 1.0 / L;
  Eigen::VectorXd alpha = project_box_hyperplane(Eigen::VectorXd::Zero(n), y, C);
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - Q * alpha;
    alpha = project_box_hyperplane(alpha + eta * grad, y, C);
  }
  return {alpha, dual_objective(alpha, K, y)};
}

}  // namespace oracles

#endif  // RESONANT_TESTS_ORACLES_HPP
