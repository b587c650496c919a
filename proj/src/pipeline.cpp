#include "resonant/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace resonant {

namespace {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void validate_training_set(const Dataset& ds) {
  if (ds.observations.empty()) throw std::invalid_argument("empty training dataset");
  if (ds.num_classes < 2) throw std::invalid_argument("training needs at least two classes");
  const std::size_t T = ds.observations.front().series.size();
  std::vector<int> counts(static_cast<std::size_t>(ds.num_classes), 0);
  for (const LabeledObservation& obs : ds.observations) {
    if (obs.series.size() != T) throw std::invalid_argument("training series lengths differ");
    if (obs.label < 1 || obs.label > ds.num_classes)
      throw std::invalid_argument("training label out of range");
    ++counts[static_cast<std::size_t>(obs.label - 1)];
  }
  for (int c : counts)
    if (c == 0) throw std::invalid_argument("a class has no training samples");
}

Eigen::VectorXd select_columns(const std::vector<double>& flat, const std::vector<int>& selected) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(selected.size()));
  for (std::size_t i = 0; i < selected.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = flat[static_cast<std::size_t>(selected[i])];
  return out;
}

}  // namespace

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  Standardizer s;
  const Eigen::Index n = rows.rows();
  s.mean = rows.colwise().mean();
  Eigen::MatrixXd centered = rows.rowwise() - s.mean.transpose();
  s.stdev = (centered.array().square().colwise().sum() / std::max<Eigen::Index>(n - 1, 1))
                .sqrt()
                .transpose();
  for (Eigen::Index i = 0; i < s.stdev.size(); ++i)
    if (!(s.stdev[i] > 1e-12)) s.stdev[i] = 1.0;  // constant column: leave centered only
  return s;
}

Standardizer Standardizer::identity(Eigen::Index dim) {
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(dim);
  s.stdev = Eigen::VectorXd::Ones(dim);
  return s;
}

Eigen::VectorXd Standardizer::transform(const Eigen::VectorXd& v) const {
  if (v.size() != mean.size()) throw std::invalid_argument("standardizer: dimension mismatch");
  return (v - mean).cwiseQuotient(stdev);
}

TrainedPipeline train_pipeline(const Dataset& train, const Hyperparams& hp) {
  validate_training_set(train);

  TrainedPipeline p;
  p.spectral = hp.spectral;
  p.hyperparams = hp;

  const std::size_t n = train.observations.size();
  std::vector<ResonanceSet> sets(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      sets[i] = estimate_resonances(train.observations[i].series, hp.spectral);
    } catch (const EstimationError&) {
      sets[i] = ResonanceSet{};
    }
  });

  std::vector<Complex> pooled;
  for (std::size_t i = 0; i < n; ++i) {
    if (sets[i].order() == 0)
      p.warnings.push_back("training signal " + std::to_string(i) +
                           ": no resonances estimated, kept with all-zero features");
    pooled.insert(pooled.end(), sets[i].freqs.begin(), sets[i].freqs.end());
  }
  if (pooled.empty())
    throw EstimationError("train_pipeline: no resonances pooled, cannot build a partition");

  p.partition = cluster_resonances(pooled, hp.d_th);

  std::vector<FeatureVector> features(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    features[i] = featurize(sets[i], p.partition);
    labels[i] = train.observations[i].label;
  }
  p.ranking = select_features(features, labels, hp.c_percent);

  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p.ranking.selected.size()));
  for (std::size_t i = 0; i < n; ++i)
    X.row(static_cast<Eigen::Index>(i)) =
        select_columns(flatten_features(features[i]), p.ranking.selected).transpose();

  p.standardizer = hp.standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols());
  Eigen::MatrixXd Xs(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    Xs.row(i) = p.standardizer.transform(X.row(i).transpose()).transpose();

  p.svm = train_multiclass(Xs, labels, hp.svm_c, hp.kernel);
  return p;
}

int classify_signal(const TrainedPipeline& pipeline, const TimeSeries& y) {
  ResonanceSet rs;
  try {
    rs = estimate_resonances(y, pipeline.spectral);
  } catch (const EstimationError&) {
    rs = ResonanceSet{};
  }
  const FeatureVector fv = featurize(rs, pipeline.partition);
  const Eigen::VectorXd x =
      pipeline.standardizer.transform(select_columns(flatten_features(fv), pipeline.ranking.selected));
  return predict(pipeline.svm, x);
}

Eigen::VectorXd flatten_series(const TimeSeries& y) {
  const auto T = static_cast<Eigen::Index>(y.size());
  Eigen::VectorXd flat(2 * T);
  for (Eigen::Index t = 0; t < T; ++t) {
    flat[t] = y[static_cast<std::size_t>(t)].real();
    flat[T + t] = y[static_cast<std::size_t>(t)].imag();
  }
  return flat;
}

TdBaseline train_td_baseline(const Dataset& train, const Hyperparams& hp) {
  validate_training_set(train);
  const std::size_t n = train.observations.size();
  const int T = train.common_length();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2 * T);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    X.row(static_cast<Eigen::Index>(i)) = flatten_series(train.observations[i].series).transpose();
    labels[i] = train.observations[i].label;
  }
  return TdBaseline{train_multiclass(X, labels, hp.svm_c, hp.kernel), T};
}

int classify_td(const TdBaseline& baseline, const TimeSeries& y) {
  if (static_cast<int>(y.size()) != baseline.T)
    throw std::invalid_argument("classify_td: series length differs from training length");
  return predict(baseline.svm, flatten_series(y));
}

EvalReport report_from_labels(const std::vector<int>& truth, const std::vector<int>& predicted,
                              int num_classes) {
  if (truth.size() != predicted.size() || truth.empty())
    throw std::invalid_argument("report_from_labels: bad label vectors");
  const int P = num_classes;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(P, P);
  std::size_t wrong = 0;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    if (truth[s] < 1 || truth[s] > P || predicted[s] < 1 || predicted[s] > P)
      throw std::invalid_argument("report_from_labels: label out of range");
    counts(truth[s] - 1, predicted[s] - 1) += 1.0;
    if (truth[s] != predicted[s]) ++wrong;
  }

  EvalReport report;
  report.n_test = static_cast<int>(truth.size());
  report.error_rate = static_cast<double>(wrong) / static_cast<double>(truth.size());
  report.confusion = Eigen::MatrixXd::Zero(P, P);
  report.row_defined.assign(static_cast<std::size_t>(P), false);
  for (int i = 0; i < P; ++i) {
    const double row_total = counts.row(i).sum();
    if (row_total > 0) {
      report.row_defined[static_cast<std::size_t>(i)] = true;
      report.confusion.row(i) = counts.row(i) * (100.0 / row_total);
    }
  }
  return report;
}

namespace {

template <typename Model, typename Classify>
EvalReport evaluate_with(const Model& model, const Dataset& test, Classify&& classify) {
  if (test.observations.empty()) throw std::invalid_argument("evaluate: empty test set");
  const std::size_t n = test.observations.size();
  std::vector<int> predicted(n), truth(n);
  parallel_for(n, [&](std::size_t i) {
    truth[i] = test.observations[i].label;
    predicted[i] = classify(model, test.observations[i].series);
  });
  return report_from_labels(truth, predicted, test.num_classes);
}

}  // namespace

EvalReport evaluate(const TrainedPipeline& pipeline, const Dataset& test) {
  return evaluate_with(pipeline, test,
                       [](const TrainedPipeline& p, const TimeSeries& y) { return classify_signal(p, y); });
}

EvalReport evaluate(const TdBaseline& baseline, const Dataset& test) {
  return evaluate_with(baseline, test,
                       [](const TdBaseline& b, const TimeSeries& y) { return classify_td(b, y); });
}

Hyperparams cross_validate(const Dataset& train, const HyperparamGrid& grid, int folds,
                           const Hyperparams& base) {
  validate_training_set(train);
  std::vector<int> class_counts(static_cast<std::size_t>(train.num_classes), 0);
  for (const LabeledObservation& obs : train.observations)
    ++class_counts[static_cast<std::size_t>(obs.label - 1)];
  const int min_count = *std::min_element(class_counts.begin(), class_counts.end());
  if (folds < 2 || folds > min_count)
    throw std::invalid_argument("cross_validate: folds must lie in [2, min class count]");

  // Stratified assignment: the k-th occurrence of a class goes to fold k mod folds.
  std::vector<int> fold_of(train.observations.size());
  std::vector<int> seen(static_cast<std::size_t>(train.num_classes), 0);
  for (std::size_t i = 0; i < train.observations.size(); ++i) {
    const int label = train.observations[i].label;
    fold_of[i] = seen[static_cast<std::size_t>(label - 1)]++ % folds;
  }

  struct Candidate {
    double error;
    double c_percent;
    double svm_c;
    double d_th;
    std::size_t kernel_idx;
    Hyperparams hp;
  };
  std::optional<Candidate> best;

  for (double d_th : grid.d_th) {
    for (double c_percent : grid.c_percent) {
      for (double svm_c : grid.svm_c) {
        for (std::size_t ki = 0; ki < grid.kernels.size(); ++ki) {
          Hyperparams hp = base;
          hp.d_th = d_th;
          hp.c_percent = c_percent;
          hp.svm_c = svm_c;
          hp.kernel = grid.kernels[ki];

          std::size_t wrong = 0, total = 0;
          bool failed = false;
          for (int f = 0; f < folds && !failed; ++f) {
            Dataset sub, val;
            sub.num_classes = val.num_classes = train.num_classes;
            for (std::size_t i = 0; i < train.observations.size(); ++i)
              (fold_of[i] == f ? val : sub).observations.push_back(train.observations[i]);
            try {
              const TrainedPipeline p = train_pipeline(sub, hp);
              for (const LabeledObservation& obs : val.observations) {
                wrong += classify_signal(p, obs.series) != obs.label ? 1u : 0u;
                ++total;
              }
            } catch (const std::exception&) {
              failed = true;
            }
          }
          if (failed || total == 0) continue;

          Candidate cand{static_cast<double>(wrong) / static_cast<double>(total),
                         c_percent, svm_c, d_th, ki, hp};
          const auto key = [](const Candidate& c) {
            return std::make_tuple(c.error, c.c_percent, c.svm_c, c.d_th, c.kernel_idx);
          };
          if (!best || key(cand) < key(*best)) best = cand;
        }
      }
    }
  }
  if (!best) throw EstimationError("cross_validate: every grid point failed");
  return best->hp;
}

std::vector<SweepRow> run_scenario_sweep(int scenario, const std::vector<double>& sweep_values,
                                         const std::vector<std::uint64_t>& seeds,
                                         int n_train_per_class, int n_test_per_class,
                                         const Hyperparams& hp) {
  if (sweep_values.empty() || seeds.empty())
    throw std::invalid_argument("run_scenario_sweep: empty sweep");

  std::vector<SweepRow> rows;
  for (double value : sweep_values) {
    std::vector<double> nf_errors, td_errors;
    for (std::uint64_t seed : seeds) {
      try {
        const ScenarioData data =
            generate_scenario(scenario, value, n_train_per_class, n_test_per_class, seed);
        const TrainedPipeline nf = train_pipeline(data.train, hp);
        const TdBaseline td = train_td_baseline(data.train, hp);
        nf_errors.push_back(evaluate(nf, data.test).error_rate);
        td_errors.push_back(evaluate(td, data.test).error_rate);
      } catch (const std::exception&) {
        // failed cell: skip this seed, keep sweeping
      }
    }
    auto make_row = [&](const char* method, const std::vector<double>& errs) {
      SweepRow row;
      row.sweep_value = value;
      row.method = method;
      row.n_seeds = static_cast<int>(errs.size());
      if (!errs.empty()) {
        double sum = 0.0;
        for (double e : errs) sum += e;
        row.mean_error = sum / static_cast<double>(errs.size());
        double ss = 0.0;
        for (double e : errs) ss += (e - row.mean_error) * (e - row.mean_error);
        row.std_error = errs.size() > 1 ? std::sqrt(ss / static_cast<double>(errs.size() - 1)) : 0.0;
      } else {
        row.mean_error = std::numeric_limits<double>::quiet_NaN();
        row.std_error = std::numeric_limits<double>::quiet_NaN();
      }
      return row;
    };
    rows.push_back(make_row("nf", nf_errors));
    rows.push_back(make_row("td", td_errors));
  }
  return rows;
}

}  // namespace resonant
