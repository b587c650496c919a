#ifndef RESONANT_SPECTRAL_HPP
#define RESONANT_SPECTRAL_HPP

#include <Eigen/Core>

#include <string>
#include <vector>

#include "resonant/common.hpp"

namespace resonant {

/// K x J matrix with entry (k, j) = y(k + j - 1), K + J - 1 = T.
using HankelMatrix = Eigen::MatrixXcd;

/// Unordered set of complex natural-frequency estimates.
struct ResonanceSet {
  std::vector<Complex> freqs;

  int order() const { return static_cast<int>(freqs.size()); }
};

enum class OrderMethod { ester, samos, hard_threshold, combined };

struct SpectralConfig {
  OrderMethod order_method = OrderMethod::combined;
  int max_order = 12;
  int denoise_iters = 50;
  double denoise_tol = 1e-8;
  double hankel_rows_fraction = 0.5;  // K = round(fraction * T)
};

HankelMatrix hankel(const TimeSeries& y, int K);

/// Inverse map by anti-diagonal averaging; exact inverse on true Hankel input.
TimeSeries dehankelize(const HankelMatrix& H);

/// Number of Hankel rows used for a length-T series under this config.
int hankel_rows(const SpectralConfig& cfg, int T);

struct DenoiseResult {
  TimeSeries series;
  bool converged = false;
  int iterations = 0;
};

/// Alternating projections between the set of rank-`order` matrices (SVD
/// truncation) and the Hankel structure (anti-diagonal averaging).
DenoiseResult lowrank_denoise(const TimeSeries& y, int order, const SpectralConfig& cfg);

/// Shift-invariance (ESPRIT) frequency estimates at a fixed model order.
ResonanceSet esprit(const TimeSeries& y, int order, const SpectralConfig& cfg);

struct OrderDiagnostics {
  bool low_confidence = false;     // criterion values nearly flat (e.g. pure noise)
  std::vector<double> criterion;   // per candidate order 1..p_max
};

/// ESTER order selection: maximizes the inverse shift-invariance residual
/// J(p) = 1 / ||E(p)||_2^2 over p = 1..max_order.
int ester_order(const TimeSeries& y, const SpectralConfig& cfg,
                OrderDiagnostics* diag = nullptr);

/// SAMOS order selection: minimizes the mean of the p smallest singular
/// values of the stacked subspace matrix [U_p(1..K-1,:)  U_p(2..K,:)].
int samos_order(const TimeSeries& y, const SpectralConfig& cfg,
                OrderDiagnostics* diag = nullptr);

/// Count of singular values of H(y) above omega(beta) * median(singular
/// values), clamped to [0, max_order]; the unknown-noise optimal threshold.
int hard_threshold_order(const TimeSeries& y, const SpectralConfig& cfg);

/// Optimal hard-threshold coefficient for aspect ratio beta in (0, 1]
/// (unknown noise variant; omega(1) ~ 2.858).
double hard_threshold_omega(double beta);

struct EstimateDiagnostics {
  int selected_order = 0;
  int threshold_bracket = 0;
  bool low_confidence = false;
  bool denoise_converged = true;
  std::string note;
};

/// Full single-signal estimator: order selection per cfg.order_method
/// (default: hard threshold brackets ESTER), low-rank denoising at the
/// selected order, then ESPRIT. Zero or too-short signals yield order 0.
ResonanceSet estimate_resonances(const TimeSeries& y, const SpectralConfig& cfg,
                                 EstimateDiagnostics* diag = nullptr);

}  // namespace resonant

#endif  // RESONANT_SPECTRAL_HPP
