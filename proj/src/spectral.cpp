#include "resonant/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace resonant {

namespace {

struct Spectrum {
  Eigen::VectorXd sv;    // all min(K, J) singular values, descending
  Eigen::MatrixXcd U;    // K x r leading left singular vectors
};

// Economy spectrum through the Gram matrix on the shorter side. H H^H is
// K x K; with the near-square defaults K <= J, so the left factor comes out
// directly. Falls back to a full SVD when K > J.
Spectrum spectrum_of(const HankelMatrix& H, int r) {
  const int K = static_cast<int>(H.rows());
  const int J = static_cast<int>(H.cols());
  Spectrum s;
  if (K <= J) {
    Eigen::MatrixXcd G = H * H.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    if (es.info() != Eigen::Success) throw EstimationError("eigendecomposition failed");
    s.sv.resize(K);
    for (int i = 0; i < K; ++i)
      s.sv[i] = std::sqrt(std::max(0.0, es.eigenvalues()[K - 1 - i]));
    r = std::min(r, K);
    s.U.resize(K, r);
    for (int i = 0; i < r; ++i) s.U.col(i) = es.eigenvectors().col(K - 1 - i);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H, Eigen::ComputeThinU);
    s.sv = svd.singularValues();
    s.U = svd.matrixU().leftCols(std::min<int>(r, svd.matrixU().cols()));
  }
  return s;
}

// Leading left singular subspace refined by orthogonal iteration from a warm
// start; used inside the denoising loop where the subspace barely moves
// between iterations.
Eigen::MatrixXcd refine_left_subspace(const HankelMatrix& H, Eigen::MatrixXcd U) {
  const int K = static_cast<int>(H.rows());
  const int r = static_cast<int>(U.cols());
  for (int iter = 0; iter < 40; ++iter) {
    Eigen::MatrixXcd Z = H * (H.adjoint() * U);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
    Eigen::MatrixXcd Unew = qr.householderQ() * Eigen::MatrixXcd::Identity(K, r);
    Eigen::JacobiSVD<Eigen::MatrixXcd> cross(Unew.adjoint() * U);
    const double align = cross.singularValues().minCoeff();
    U = std::move(Unew);
    if (1.0 - align < 1e-12) break;
  }
  return U;
}

// Least-squares rotation between the shifted subspaces: U(1..K-1,:) Psi =
// U(2..K,:). Throws when the shifted block is rank deficient.
Eigen::MatrixXcd shift_invariance_rotation(const Eigen::MatrixXcd& U) {
  const int K = static_cast<int>(U.rows());
  const int p = static_cast<int>(U.cols());
  Eigen::MatrixXcd up = U.topRows(K - 1);
  Eigen::MatrixXcd down = U.bottomRows(K - 1);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(up);
  if (qr.rank() < p) throw EstimationError("esprit: degenerate signal subspace");
  return qr.solve(down);
}

double spectral_norm(const Eigen::MatrixXcd& E) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(E);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

int feasible_order_cap(const SpectralConfig& cfg, int K, int J, int T) {
  int cap = std::min(cfg.max_order, std::min(K - 1, J));
  cap = std::min(cap, (T - 1) / 2);
  return cap;
}

// ESTER criterion values J(p) for p = 1..p_max given the leading left vectors.
std::vector<double> ester_criterion(const Eigen::MatrixXcd& U, int p_max) {
  std::vector<double> J;
  J.reserve(static_cast<std::size_t>(p_max));
  const int K = static_cast<int>(U.rows());
  for (int p = 1; p <= p_max; ++p) {
    Eigen::MatrixXcd Up = U.leftCols(p);
    Eigen::MatrixXcd psi = shift_invariance_rotation(Up);
    Eigen::MatrixXcd E = Up.bottomRows(K - 1) - Up.topRows(K - 1) * psi;
    const double err = spectral_norm(E);
    J.push_back(1.0 / std::max(err * err, std::numeric_limits<double>::min()));
  }
  return J;
}

int argmax_with_flag(const std::vector<double>& J, bool* low_confidence) {
  int best = 0;
  for (std::size_t p = 1; p < J.size(); ++p)
    if (J[p] > J[best]) best = static_cast<int>(p);
  if (low_confidence) {
    std::vector<double> sorted(J);
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    *low_confidence = J[best] < 2.0 * median;
  }
  return best + 1;
}

void check_signal(const TimeSeries& y, const char* what) {
  require_finite(y, what);
  if (y.empty()) throw std::invalid_argument(std::string(what) + ": empty series");
}

}  // namespace

HankelMatrix hankel(const TimeSeries& y, int K) {
  check_signal(y, "hankel");
  const int T = static_cast<int>(y.size());
  if (K < 2 || K > T - 1) throw std::invalid_argument("hankel: K out of range");
  const int J = T - K + 1;
  HankelMatrix H(K, J);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < J; ++j) H(i, j) = y[static_cast<std::size_t>(i + j)];
  return H;
}

TimeSeries dehankelize(const HankelMatrix& H) {
  const int K = static_cast<int>(H.rows());
  const int J = static_cast<int>(H.cols());
  if (K < 1 || J < 1) throw std::invalid_argument("dehankelize: empty matrix");
  const int T = K + J - 1;
  TimeSeries y(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const int i_lo = std::max(0, t - J + 1);
    const int i_hi = std::min(K - 1, t);
    Complex sum{0.0, 0.0};
    for (int i = i_lo; i <= i_hi; ++i) sum += H(i, t - i);
    y[static_cast<std::size_t>(t)] = sum / static_cast<double>(i_hi - i_lo + 1);
  }
  return y;
}

int hankel_rows(const SpectralConfig& cfg, int T) {
  if (cfg.hankel_rows_fraction <= 0.0 || cfg.hankel_rows_fraction >= 1.0)
    throw std::invalid_argument("hankel_rows_fraction must lie in (0, 1)");
  const int K = static_cast<int>(std::lround(cfg.hankel_rows_fraction * T));
  return std::clamp(K, 2, T - 1);
}

DenoiseResult lowrank_denoise(const TimeSeries& y, int order, const SpectralConfig& cfg) {
  check_signal(y, "lowrank_denoise");
  const int T = static_cast<int>(y.size());
  if (T < 3) throw std::invalid_argument("lowrank_denoise: series too short");
  const int K = hankel_rows(cfg, T);
  const int J = T - K + 1;
  if (order < 1 || order > cfg.max_order)
    throw std::invalid_argument("lowrank_denoise: order out of range");
  if (order >= std::min(K, J))
    throw std::invalid_argument("lowrank_denoise: order too large for Hankel shape");

  DenoiseResult out{y, cfg.denoise_iters == 0, 0};
  if (cfg.denoise_iters == 0) return out;

  HankelMatrix H = hankel(y, K);
  Eigen::MatrixXcd U = spectrum_of(H, order).U;
  TimeSeries prev = y;
  for (int iter = 1; iter <= cfg.denoise_iters; ++iter) {
    HankelMatrix truncated = U * (U.adjoint() * H);
    TimeSeries next = dehankelize(truncated);
    const double num = [&] {
      double s = 0.0;
      for (std::size_t t = 0; t < next.size(); ++t) s += std::norm(next[t] - prev[t]);
      return std::sqrt(s);
    }();
    const double den = std::sqrt(energy(prev));
    out.series = next;
    out.iterations = iter;
    if (den > 0.0 && num / den < cfg.denoise_tol) {
      out.converged = true;
      break;
    }
    prev = std::move(next);
    H = hankel(out.series, K);
    U = refine_left_subspace(H, std::move(U));
  }
  return out;
}

ResonanceSet esprit(const TimeSeries& y, int order, const SpectralConfig& cfg) {
  check_signal(y, "esprit");
  const int T = static_cast<int>(y.size());
  if (order < 1 || order > cfg.max_order)
    throw std::invalid_argument("esprit: order out of range");
  if (T < 2 * order + 1) throw std::invalid_argument("esprit: series too short for order");
  const int K = hankel_rows(cfg, T);
  const int J = T - K + 1;
  if (order > std::min(K - 1, J)) throw std::invalid_argument("esprit: order too large for Hankel shape");

  HankelMatrix H = hankel(y, K);
  Spectrum s = spectrum_of(H, order);
  const double scale = s.sv[0];
  if (!(scale > 0.0) || s.sv[order - 1] <= scale * std::max(K, J) * 1e-15)
    throw EstimationError("esprit: order exceeds numerical rank capacity");

  Eigen::MatrixXcd psi = shift_invariance_rotation(s.U);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(psi);
  if (eig.info() != Eigen::Success) throw EstimationError("esprit: eigensolver failed");

  ResonanceSet rs;
  rs.freqs.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + order);
  return rs;
}

int ester_order(const TimeSeries& y, const SpectralConfig& cfg, OrderDiagnostics* diag) {
  check_signal(y, "ester_order");
  if (energy(y) == 0.0) throw std::invalid_argument("ester_order: all-zero signal");
  const int T = static_cast<int>(y.size());
  if (T < 4) throw std::invalid_argument("ester_order: series too short");
  const int K = hankel_rows(cfg, T);
  const int J = T - K + 1;
  const int p_max = feasible_order_cap(cfg, K, J, T);
  if (p_max < 1) throw std::invalid_argument("ester_order: no admissible order");

  Spectrum s = spectrum_of(hankel(y, K), p_max);
  std::vector<double> crit = ester_criterion(s.U, p_max);
  bool low = false;
  const int best = argmax_with_flag(crit, &low);
  if (diag) {
    diag->criterion = std::move(crit);
    diag->low_confidence = low;
  }
  return best;
}

int samos_order(const TimeSeries& y, const SpectralConfig& cfg, OrderDiagnostics* diag) {
  check_signal(y, "samos_order");
  if (energy(y) == 0.0) throw std::invalid_argument("samos_order: all-zero signal");
  const int T = static_cast<int>(y.size());
  if (T < 4) throw std::invalid_argument("samos_order: series too short");
  const int K = hankel_rows(cfg, T);
  const int J = T - K + 1;
  int p_max = feasible_order_cap(cfg, K, J, T);
  p_max = std::min(p_max, (K - 1) / 2);  // stacked matrix needs K-1 >= 2p
  if (p_max < 1) throw std::invalid_argument("samos_order: no admissible order");

  Spectrum s = spectrum_of(hankel(y, K), p_max);
  std::vector<double> crit;
  crit.reserve(static_cast<std::size_t>(p_max));
  for (int p = 1; p <= p_max; ++p) {
    Eigen::MatrixXcd Up = s.U.leftCols(p);
    Eigen::MatrixXcd stacked(K - 1, 2 * p);
    stacked << Up.topRows(K - 1), Up.bottomRows(K - 1);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
    double tail = 0.0;
    for (int i = p; i < 2 * p; ++i) tail += svd.singularValues()[i];
    crit.push_back(tail / p);
  }
  int best = 0;
  for (std::size_t p = 1; p < crit.size(); ++p)
    if (crit[p] < crit[best]) best = static_cast<int>(p);
  if (diag) {
    diag->criterion = crit;
    std::vector<double> sorted(crit);
    std::sort(sorted.begin(), sorted.end());
    diag->low_confidence = crit[static_cast<std::size_t>(best)] > 0.5 * sorted[sorted.size() / 2];
  }
  return best + 1;
}

double hard_threshold_omega(double beta) {
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("hard_threshold_omega: beta must lie in (0, 1]");
  const double lo = (1.0 - std::sqrt(beta)) * (1.0 - std::sqrt(beta));
  const double hi = (1.0 + std::sqrt(beta)) * (1.0 + std::sqrt(beta));
  const double half_span = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);

  // Marchenko-Pastur CDF via the substitution t = mid + half_span*sin(theta),
  // which removes the square-root endpoint behavior.
  auto cdf = [&](double x) {
    const double theta_x = std::asin(std::clamp((x - mid) / half_span, -1.0, 1.0));
    const int n = 512;  // composite Simpson, even number of intervals
    const double a = -M_PI / 2.0;
    const double h = (theta_x - a) / n;
    auto f = [&](double theta) {
      const double t = mid + half_span * std::sin(theta);
      if (t <= 0.0) return 0.0;
      const double c = half_span * std::cos(theta);
      return c * c / (2.0 * M_PI * beta * t);
    };
    double sum = f(a) + f(theta_x);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
  };

  double a = lo, b = hi;
  for (int i = 0; i < 80; ++i) {
    const double m = 0.5 * (a + b);
    (cdf(m) < 0.5 ? a : b) = m;
  }
  const double median = 0.5 * (a + b);

  const double lambda_star =
      std::sqrt(2.0 * (beta + 1.0) +
                8.0 * beta / (beta + 1.0 + std::sqrt(beta * beta + 14.0 * beta + 1.0)));
  return lambda_star / std::sqrt(median);
}

int hard_threshold_order(const TimeSeries& y, const SpectralConfig& cfg) {
  check_signal(y, "hard_threshold_order");
  const int T = static_cast<int>(y.size());
  if (T < 4) throw std::invalid_argument("hard_threshold_order: T must be >= 4");
  const int K = hankel_rows(cfg, T);
  const int J = T - K + 1;

  Spectrum s = spectrum_of(hankel(y, K), 0);
  if (s.sv[0] <= 0.0) return 0;

  Eigen::VectorXd sorted = s.sv;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  const int m = static_cast<int>(sorted.size());
  const double median = (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  const double beta = static_cast<double>(std::min(K, J)) / static_cast<double>(std::max(K, J));
  const double cutoff = hard_threshold_omega(beta) * median;
  int count = 0;
  for (int i = 0; i < s.sv.size(); ++i)
    if (s.sv[i] > cutoff) ++count;
  return std::clamp(count, 0, cfg.max_order);
}

ResonanceSet estimate_resonances(const TimeSeries& y, const SpectralConfig& cfg,
                                 EstimateDiagnostics* diag) {
  check_signal(y, "estimate_resonances");
  EstimateDiagnostics local;
  const int T = static_cast<int>(y.size());

  auto give_up = [&](const char* why) {
    local.note = why;
    local.selected_order = 0;
    if (diag) *diag = local;
    return ResonanceSet{};
  };

  if (T < 4) return give_up("series too short for spectral estimation");
  if (energy(y) == 0.0) return give_up("zero signal");

  const int K = hankel_rows(cfg, T);
  const int J = T - K + 1;
  const int p_cap = feasible_order_cap(cfg, K, J, T);
  if (p_cap < 1) return give_up("no admissible model order for this length");

  int selected = 0;
  switch (cfg.order_method) {
    case OrderMethod::ester: {
      OrderDiagnostics od;
      selected = ester_order(y, cfg, &od);
      local.low_confidence = od.low_confidence;
      break;
    }
    case OrderMethod::samos: {
      OrderDiagnostics od;
      selected = samos_order(y, cfg, &od);
      local.low_confidence = od.low_confidence;
      break;
    }
    case OrderMethod::hard_threshold: {
      selected = std::min(hard_threshold_order(y, cfg), p_cap);
      local.threshold_bracket = selected;
      if (selected == 0) return give_up("hard threshold found no modes");
      break;
    }
    case OrderMethod::combined: {
      const int p_hi = std::min(hard_threshold_order(y, cfg), p_cap);
      local.threshold_bracket = p_hi;
      const int bracket = std::max(p_hi, 1);
      Spectrum s = spectrum_of(hankel(y, K), bracket);
      std::vector<double> crit = ester_criterion(s.U, bracket);
      bool low = false;
      selected = argmax_with_flag(crit, &low);
      local.low_confidence = low;
      break;
    }
  }

  local.selected_order = selected;
  TimeSeries working = y;
  if (cfg.denoise_iters > 0 && selected < std::min(K, J)) {
    DenoiseResult dn = lowrank_denoise(y, selected, cfg);
    local.denoise_converged = dn.converged;
    working = std::move(dn.series);
  }

  ResonanceSet rs = esprit(working, selected, cfg);
  if (diag) *diag = local;
  return rs;
}

}  // namespace resonant
