#ifndef RESONANT_PIPELINE_HPP
#define RESONANT_PIPELINE_HPP

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "resonant/features.hpp"
#include "resonant/signal_model.hpp"
#include "resonant/spectral.hpp"
#include "resonant/svm.hpp"

namespace resonant {

/// Column-wise affine map fitted on training data (zero mean, unit variance).
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stdev;

  static Standardizer fit(const Eigen::MatrixXd& rows);
  static Standardizer identity(Eigen::Index dim);
  Eigen::VectorXd transform(const Eigen::VectorXd& v) const;
};

struct Hyperparams {
  double d_th = 0.03;
  double c_percent = 50.0;
  double svm_c = 0.95;
  KernelSpec kernel{KernelKind::polynomial, 2, 1.0};
  bool standardize = true;
  SpectralConfig spectral;
};

/// Everything needed to classify a fresh series: spectral config, the learned
/// partition, the retained columns, their standardization, and the SVM.
struct TrainedPipeline {
  SpectralConfig spectral;
  PlanePartition partition;
  FeatureRanking ranking;
  Standardizer standardizer;  // over the selected columns
  MulticlassSvm svm;
  Hyperparams hyperparams;
  std::vector<std::string> warnings;
};

/// Raw time-domain baseline: the series flattened to [Re y, Im y] feeds the
/// SVM directly.
struct TdBaseline {
  MulticlassSvm svm;
  int T = 0;
};

struct EvalReport {
  double error_rate = 0.0;
  Eigen::MatrixXd confusion;      // P x P, row percentages
  std::vector<bool> row_defined;  // false where a class has no test samples
  int n_test = 0;
};

TrainedPipeline train_pipeline(const Dataset& train, const Hyperparams& hp);

int classify_signal(const TrainedPipeline& pipeline, const TimeSeries& y);

TdBaseline train_td_baseline(const Dataset& train, const Hyperparams& hp);

int classify_td(const TdBaseline& baseline, const TimeSeries& y);

EvalReport evaluate(const TrainedPipeline& pipeline, const Dataset& test);
EvalReport evaluate(const TdBaseline& baseline, const Dataset& test);

/// Report from per-sample true/predicted labels (1..P).
EvalReport report_from_labels(const std::vector<int>& truth, const std::vector<int>& predicted,
                              int num_classes);

struct HyperparamGrid {
  std::vector<double> d_th{0.03};
  std::vector<double> c_percent{50.0};
  std::vector<double> svm_c{0.95};
  std::vector<KernelSpec> kernels{KernelSpec{KernelKind::polynomial, 2, 1.0}};
};

/// Stratified k-fold grid search; returns the point with minimal mean
/// validation error, ties resolved toward the smaller model (smaller
/// c_percent, then smaller C, then smaller d_th, then grid order).
Hyperparams cross_validate(const Dataset& train, const HyperparamGrid& grid, int folds,
                           const Hyperparams& base = {});

struct SweepRow {
  double sweep_value = 0.0;
  std::string method;  // "nf" or "td"
  double mean_error = 0.0;
  double std_error = 0.0;
  int n_seeds = 0;
};

/// Trains and evaluates both strategies for every (sweep value, seed) cell
/// and averages per value. Failed cells are skipped and the row keeps the
/// count of seeds that succeeded.
std::vector<SweepRow> run_scenario_sweep(int scenario, const std::vector<double>& sweep_values,
                                         const std::vector<std::uint64_t>& seeds,
                                         int n_train_per_class, int n_test_per_class,
                                         const Hyperparams& hp);

/// Flattened [Re y, Im y] vector used by the time-domain baseline.
Eigen::VectorXd flatten_series(const TimeSeries& y);

}  // namespace resonant

#endif  // RESONANT_PIPELINE_HPP
