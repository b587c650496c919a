#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "resonant/io.hpp"
#include "resonant/pipeline.hpp"

namespace {

using namespace resonant;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RESONANT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw IoError("RESONANT_SEED must be an unsigned integer");
    }
  }
  return 1;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void trim_latetime(Dataset& ds, int offset) {
  if (offset == 0) return;
  if (offset < 0) throw IoError("--latetime-offset must be >= 0");
  for (LabeledObservation& obs : ds.observations) {
    if (offset >= static_cast<int>(obs.series.size()))
      throw IoError("--latetime-offset removes an entire signal");
    obs.series.erase(obs.series.begin(), obs.series.begin() + offset);
  }
}

void require_nonempty(const Dataset& ds, const std::string& path) {
  if (ds.observations.empty()) throw IoError(path + ": dataset contains no signals");
}

HyperparamGrid grid_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open grid file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  HyperparamGrid grid;
  if (doc.contains("d_th")) grid.d_th = doc["d_th"].get<std::vector<double>>();
  if (doc.contains("c_percent")) grid.c_percent = doc["c_percent"].get<std::vector<double>>();
  if (doc.contains("svm_c")) grid.svm_c = doc["svm_c"].get<std::vector<double>>();
  if (doc.contains("kernels")) {
    grid.kernels.clear();
    for (const auto& k : doc["kernels"]) grid.kernels.push_back(kernel_from_string(k.get<std::string>()));
  }
  if (grid.d_th.empty() || grid.c_percent.empty() || grid.svm_c.empty() || grid.kernels.empty())
    throw IoError(path + ": grid lists must be nonempty");
  return grid;
}

void print_report(const EvalReport& report, const std::string& method, bool as_json) {
  if (as_json) {
    nlohmann::json doc;
    doc["method"] = method;
    doc["error_rate"] = report.error_rate;
    doc["n_test"] = report.n_test;
    doc["confusion"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < report.confusion.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < report.confusion.cols(); ++j) row.push_back(report.confusion(i, j));
      doc["confusion"].push_back(row);
    }
    doc["row_defined"] = report.row_defined;
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::cout << "method:     " << method << '\n';
  std::cout << "error rate: " << format_double(report.error_rate) << '\n';
  std::cout << "n test:     " << report.n_test << '\n';
  std::cout << "confusion matrix (% of true class):\n";
  const auto P = report.confusion.rows();
  std::cout << std::setw(8) << ' ';
  for (Eigen::Index j = 0; j < P; ++j) std::cout << std::setw(10) << ("pred " + std::to_string(j + 1));
  std::cout << '\n';
  for (Eigen::Index i = 0; i < P; ++i) {
    std::cout << std::setw(8) << ("true " + std::to_string(i + 1));
    if (report.row_defined[static_cast<std::size_t>(i)]) {
      for (Eigen::Index j = 0; j < P; ++j)
        std::cout << std::setw(10) << std::fixed << std::setprecision(2)
                  << report.confusion(i, j);
      std::cout.unsetf(std::ios::fixed);
    } else {
      for (Eigen::Index j = 0; j < P; ++j) std::cout << std::setw(10) << "n/a";
    }
    std::cout << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Classification of sums of complex exponentials by natural-frequency features"};
  app.require_subcommand(1);

  // --- synth ---
  auto* synth = app.add_subcommand("synth", "Generate labeled synthetic scenario datasets");
  int synth_scenario = 1;
  double synth_sweep = 10.0;
  int synth_train = 3, synth_test = 1000;
  std::uint64_t synth_seed = default_seed();
  std::string out_train, out_test;
  synth->add_option("--scenario", synth_scenario, "Scenario id")->check(CLI::Range(1, 3))->required();
  synth->add_option("--sweep", synth_sweep, "Swept value (SNR dB / sigma_alpha / sigma_z)")->required();
  synth->add_option("--train-per-class", synth_train, "Training signals per class")->check(CLI::PositiveNumber);
  synth->add_option("--test-per-class", synth_test, "Test signals per class")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--out-train", out_train, "Training dataset path")->required();
  synth->add_option("--out-test", out_test, "Test dataset path")->required();

  // --- train ---
  auto* train = app.add_subcommand("train", "Train the classifier on a dataset file");
  std::string train_data, train_out, train_kernel = "poly:2", train_grid;
  Hyperparams hp;
  int folds = 3;
  bool no_standardize = false, no_td = false;
  train->add_option("--data", train_data, "Training dataset path")->required();
  train->add_option("--dth", hp.d_th, "Clustering threshold d_th")->check(CLI::PositiveNumber);
  train->add_option("--c-percent", hp.c_percent, "Percent of features kept");
  train->add_option("--svm-c", hp.svm_c, "SVM soft-margin C")->check(CLI::PositiveNumber);
  train->add_option("--kernel", train_kernel, "Kernel: linear | poly:D | rbf:G");
  train->add_option("--cross-validate", train_grid, "JSON grid file for cross-validation");
  train->add_option("--folds", folds, "Cross-validation folds");
  train->add_option("--max-order", hp.spectral.max_order, "Maximum model order")->check(CLI::PositiveNumber);
  train->add_flag("--no-standardize", no_standardize, "Disable feature standardization");
  train->add_flag("--no-td-baseline", no_td, "Skip training the stored time-domain baseline");
  train->add_option("--out", train_out, "Output model path")->required();

  // --- predict ---
  auto* predict_cmd = app.add_subcommand("predict", "Classify every signal in a dataset file");
  std::string pr_model, pr_data, pr_out;
  int pr_latetime = 0;
  predict_cmd->add_option("--model", pr_model, "Model path")->required();
  predict_cmd->add_option("--data", pr_data, "Dataset path")->required();
  predict_cmd->add_option("--latetime-offset", pr_latetime, "Drop this many leading samples per signal");
  predict_cmd->add_option("--out", pr_out, "Output CSV path")->required();

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
  std::string ev_model, ev_data, ev_baseline;
  bool ev_json = false;
  int ev_latetime = 0;
  eval_cmd->add_option("--model", ev_model, "Model path")->required();
  eval_cmd->add_option("--data", ev_data, "Dataset path")->required();
  eval_cmd->add_option("--baseline", ev_baseline, "Evaluate a stored baseline instead (td)");
  eval_cmd->add_option("--latetime-offset", ev_latetime, "Drop this many leading samples per signal");
  eval_cmd->add_flag("--json", ev_json, "Machine-readable output");

  // --- sweep ---
  auto* sweep_cmd = app.add_subcommand("sweep", "Scenario sweep comparing NF and TD strategies");
  int sw_scenario = 1, sw_seeds = 10, sw_train = 3, sw_test = 1000;
  std::uint64_t sw_seed_base = default_seed();
  std::string sw_values, sw_out, sw_kernel = "poly:2";
  Hyperparams sw_hp;
  sweep_cmd->add_option("--scenario", sw_scenario, "Scenario id")->check(CLI::Range(1, 3))->required();
  sweep_cmd->add_option("--values", sw_values, "Comma-separated swept values")->required();
  sweep_cmd->add_option("--seeds", sw_seeds, "Number of seeds per value")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed-base", sw_seed_base, "First seed");
  sweep_cmd->add_option("--train-per-class", sw_train, "Training signals per class")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--test-per-class", sw_test, "Test signals per class")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--dth", sw_hp.d_th, "Clustering threshold d_th")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--c-percent", sw_hp.c_percent, "Percent of features kept");
  sweep_cmd->add_option("--svm-c", sw_hp.svm_c, "SVM soft-margin C")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--kernel", sw_kernel, "Kernel: linear | poly:D | rbf:G");
  sweep_cmd->add_option("--out", sw_out, "Output CSV path")->required();

  // --- inspect ---
  auto* inspect_cmd = app.add_subcommand("inspect", "Print a model summary");
  std::string in_model;
  inspect_cmd->add_option("--model", in_model, "Model path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (synth->parsed()) {
    const ScenarioData data =
        generate_scenario(synth_scenario, synth_sweep, synth_train, synth_test, synth_seed);
    save_dataset(data.train, out_train);
    save_dataset(data.test, out_test);
    std::cout << "wrote " << data.train.observations.size() << " training and "
              << data.test.observations.size() << " test signals\n";
    return kExitOk;
  }

  if (train->parsed()) {
    Dataset data = load_dataset(train_data);
    require_nonempty(data, train_data);
    hp.kernel = kernel_from_string(train_kernel);
    hp.standardize = !no_standardize;
    if (!train_grid.empty()) {
      hp = cross_validate(data, grid_from_file(train_grid), folds, hp);
      std::cout << "cross-validation selected d_th=" << hp.d_th << " c=" << hp.c_percent
                << " C=" << hp.svm_c << " kernel=" << kernel_to_string(hp.kernel) << '\n';
    }
    ModelBundle bundle;
    bundle.pipeline = train_pipeline(data, hp);
    if (!no_td) bundle.td_baseline = train_td_baseline(data, hp);
    save_model(bundle, train_out);
    for (const std::string& w : bundle.pipeline.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "model written to " << train_out << " (M=" << bundle.pipeline.partition.size()
              << " regions, " << bundle.pipeline.ranking.selected.size() << "/"
              << bundle.pipeline.ranking.scores.size() << " features kept)\n";
    return kExitOk;
  }

  if (predict_cmd->parsed()) {
    const ModelBundle bundle = load_model(pr_model);
    Dataset data = load_dataset(pr_data);
    require_nonempty(data, pr_data);
    trim_latetime(data, pr_latetime);
    std::ofstream out(pr_out);
    if (!out) throw IoError(pr_out + ": cannot open for writing");
    out << "index,predicted_label\n";
    for (std::size_t i = 0; i < data.observations.size(); ++i)
      out << i << ',' << classify_signal(bundle.pipeline, data.observations[i].series) << '\n';
    if (!out) throw IoError(pr_out + ": write failed");
    std::cout << "wrote " << data.observations.size() << " predictions to " << pr_out << '\n';
    return kExitOk;
  }

  if (eval_cmd->parsed()) {
    const ModelBundle bundle = load_model(ev_model);
    Dataset data = load_dataset(ev_data);
    require_nonempty(data, ev_data);
    trim_latetime(data, ev_latetime);
    EvalReport report;
    std::string method = "nf";
    if (ev_baseline.empty()) {
      report = evaluate(bundle.pipeline, data);
    } else if (ev_baseline == "td") {
      if (!bundle.td_baseline)
        throw IoError(ev_model + ": model has no stored time-domain baseline");
      report = evaluate(*bundle.td_baseline, data);
      method = "td";
    } else {
      throw IoError("unknown baseline '" + ev_baseline + "' (expected: td)");
    }
    print_report(report, method, ev_json);
    return kExitOk;
  }

  if (sweep_cmd->parsed()) {
    std::vector<double> values;
    std::stringstream ss(sw_values);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw IoError("--values: cannot parse '" + tok + "'");
      }
    }
    if (values.empty()) throw IoError("--values: empty list");
    sw_hp.kernel = kernel_from_string(sw_kernel);
    std::vector<std::uint64_t> seeds;
    for (int s = 0; s < sw_seeds; ++s) seeds.push_back(sw_seed_base + static_cast<std::uint64_t>(s));
    const std::vector<SweepRow> rows =
        run_scenario_sweep(sw_scenario, values, seeds, sw_train, sw_test, sw_hp);
    std::ofstream out(sw_out);
    if (!out) throw IoError(sw_out + ": cannot open for writing");
    out << "sweep_value,method,mean_error,std_error,n_seeds\n";
    for (const SweepRow& row : rows)
      out << format_double(row.sweep_value) << ',' << row.method << ','
          << format_double(row.mean_error) << ',' << format_double(row.std_error) << ','
          << row.n_seeds << '\n';
    if (!out) throw IoError(sw_out + ": write failed");
    std::cout << "wrote sweep table to " << sw_out << '\n';
    return kExitOk;
  }

  if (inspect_cmd->parsed()) {
    const ModelBundle bundle = load_model(in_model);
    const TrainedPipeline& p = bundle.pipeline;
    const std::size_t M = p.partition.centroids.size();
    std::cout << "regions (M):      " << M << "  (d_th=" << p.partition.d_th << ")\n";
    std::cout << "features kept:    " << p.ranking.selected.size() << " of " << 2 * M << '\n';
    std::vector<bool> region_kept(M, false);
    for (int idx : p.ranking.selected) region_kept[static_cast<std::size_t>(idx) % M] = true;
    std::cout << "centroids:\n";
    for (std::size_t k = 0; k < M; ++k) {
      const Complex c = p.partition.centroids[k];
      std::cout << "  [" << k << "] " << format_double(c.real()) << (c.imag() < 0 ? " - " : " + ")
                << format_double(std::abs(c.imag())) << "j" << (region_kept[k] ? "  (kept)" : "")
                << '\n';
    }
    std::cout << "svm:              " << p.svm.num_classes() << " one-vs-all classifiers, kernel "
              << kernel_to_string(p.hyperparams.kernel) << ", C=" << p.hyperparams.svm_c << '\n';
    for (int c = 0; c < p.svm.num_classes(); ++c)
      std::cout << "  class " << c + 1 << ": "
                << p.svm.binaries[static_cast<std::size_t>(c)].support_vectors.rows()
                << " support vectors\n";
    std::cout << "td baseline:      " << (bundle.td_baseline ? "stored" : "absent") << '\n';
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const resonant::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const resonant::EstimationError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
