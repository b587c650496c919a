#include "resonant/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace resonant {

namespace {

using nlohmann::json;

constexpr int kDatasetVersion = 1;
constexpr int kModelVersion = 1;

[[noreturn]] void fail(const std::string& msg) { throw IoError(msg); }

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path + ": " + e.what());
  }
}

void write_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path + ": cannot open file for writing");
  out << doc.dump(2) << '\n';
  if (!out) fail(path + ": write failed");
}

const json& field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

std::vector<double> as_double_vector(const json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where + ": expected an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) fail(where + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd json_to_vector(const json& arr, const std::string& where) {
  const std::vector<double> v = as_double_vector(arr, where);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const char* order_method_name(OrderMethod m) {
  switch (m) {
    case OrderMethod::ester: return "ester";
    case OrderMethod::samos: return "samos";
    case OrderMethod::hard_threshold: return "hard_threshold";
    case OrderMethod::combined: return "combined";
  }
  return "combined";
}

OrderMethod order_method_from(const std::string& s, const std::string& where) {
  if (s == "ester") return OrderMethod::ester;
  if (s == "samos") return OrderMethod::samos;
  if (s == "hard_threshold") return OrderMethod::hard_threshold;
  if (s == "combined") return OrderMethod::combined;
  fail(where + ": unknown order method '" + s + "'");
}

json svm_to_json(const MulticlassSvm& svm) {
  json binaries = json::array();
  for (const BinarySvm& b : svm.binaries) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < b.support_vectors.rows(); ++i)
      rows.push_back(vector_to_json(b.support_vectors.row(i).transpose()));
    binaries.push_back({{"support_vectors", rows},
                        {"dual_coeffs", vector_to_json(b.dual_coeffs)},
                        {"bias", b.bias}});
  }
  const KernelSpec& k = svm.binaries.empty() ? KernelSpec{} : svm.binaries.front().kernel;
  const double C = svm.binaries.empty() ? 1.0 : svm.binaries.front().C;
  return {{"kernel", kernel_to_string(k)}, {"C", C}, {"binaries", binaries}};
}

MulticlassSvm svm_from_json(const json& doc, const std::string& where) {
  MulticlassSvm svm;
  const KernelSpec kernel = kernel_from_string(field(doc, "kernel", where).get<std::string>());
  const double C = field(doc, "C", where).get<double>();
  const json& binaries = field(doc, "binaries", where);
  if (!binaries.is_array() || binaries.empty()) fail(where + ": binaries must be a nonempty array");
  for (std::size_t p = 0; p < binaries.size(); ++p) {
    const std::string bwhere = where + ".binaries[" + std::to_string(p) + "]";
    const json& bj = binaries[p];
    BinarySvm b;
    b.kernel = kernel;
    b.C = C;
    b.bias = field(bj, "bias", bwhere).get<double>();
    b.dual_coeffs = json_to_vector(field(bj, "dual_coeffs", bwhere), bwhere + ".dual_coeffs");
    const json& rows = field(bj, "support_vectors", bwhere);
    if (!rows.is_array()) fail(bwhere + ": support_vectors must be an array");
    if (static_cast<Eigen::Index>(rows.size()) != b.dual_coeffs.size())
      fail(bwhere + ": support_vectors/dual_coeffs size mismatch");
    Eigen::Index dim = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Eigen::VectorXd row = json_to_vector(rows[i], bwhere + ".support_vectors");
      if (dim < 0) {
        dim = row.size();
        b.support_vectors.resize(static_cast<Eigen::Index>(rows.size()), dim);
      } else if (row.size() != dim) {
        fail(bwhere + ": ragged support vectors");
      }
      b.support_vectors.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    if (rows.empty()) b.support_vectors.resize(0, 0);
    svm.binaries.push_back(std::move(b));
  }
  return svm;
}

}  // namespace

std::string kernel_to_string(const KernelSpec& k) {
  switch (k.kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "poly:" + std::to_string(k.degree);
    case KernelKind::rbf: {
      std::ostringstream os;
      os << "rbf:" << k.gamma;
      return os.str();
    }
  }
  return "linear";
}

KernelSpec kernel_from_string(const std::string& text) {
  KernelSpec k;
  if (text == "linear") {
    k.kind = KernelKind::linear;
    return k;
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (head == "poly") {
      k.kind = KernelKind::polynomial;
      k.degree = std::stoi(arg);
      if (k.degree < 1) fail("kernel: polynomial degree must be >= 1");
      return k;
    }
    if (head == "rbf") {
      k.kind = KernelKind::rbf;
      k.gamma = std::stod(arg);
      if (!(k.gamma > 0.0)) fail("kernel: rbf gamma must be > 0");
      return k;
    }
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    fail("kernel: cannot parse '" + text + "'");
  }
  fail("kernel: unknown kind '" + text + "' (expected linear, poly:D or rbf:G)");
}

Dataset load_dataset(const std::string& path) {
  const json doc = parse_file(path);
  if (!doc.is_object()) fail(path + ": expected a JSON object");
  const int version = field(doc, "version", path).get<int>();
  if (version != kDatasetVersion)
    fail(path + ": unsupported dataset version " + std::to_string(version));
  const int T = field(doc, "T", path).get<int>();
  const int num_classes = field(doc, "num_classes", path).get<int>();
  if (T < 1) fail(path + ": T must be >= 1");
  if (num_classes < 1) fail(path + ": num_classes must be >= 1");

  Dataset ds;
  ds.num_classes = num_classes;
  const json& signals = field(doc, "signals", path);
  if (!signals.is_array()) fail(path + ": signals must be an array");
  ds.observations.reserve(signals.size());
  for (std::size_t s = 0; s < signals.size(); ++s) {
    const std::string where = path + ": signals[" + std::to_string(s) + "]";
    const json& sig = signals[s];
    LabeledObservation obs;
    obs.label = field(sig, "label", where).get<int>();
    if (obs.label < 1 || obs.label > num_classes)
      fail(where + ": label " + std::to_string(obs.label) + " outside 1.." +
           std::to_string(num_classes));
    const std::vector<double> re = as_double_vector(field(sig, "re", where), where + ".re");
    const std::vector<double> im = as_double_vector(field(sig, "im", where), where + ".im");
    if (re.size() != static_cast<std::size_t>(T) || im.size() != static_cast<std::size_t>(T))
      fail(where + ": re/im arrays must have length T=" + std::to_string(T));
    obs.series.resize(static_cast<std::size_t>(T));
    for (std::size_t t = 0; t < obs.series.size(); ++t) {
      obs.series[t] = Complex(re[t], im[t]);
      if (!is_finite(obs.series[t])) fail(where + ": non-finite sample");
    }
    ds.observations.push_back(std::move(obs));
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  if (ds.observations.empty()) fail("save_dataset: empty dataset");
  const auto T = ds.observations.front().series.size();
  json signals = json::array();
  for (const LabeledObservation& obs : ds.observations) {
    if (obs.series.size() != T) fail("save_dataset: series lengths differ");
    json re = json::array(), im = json::array();
    for (Complex z : obs.series) {
      re.push_back(z.real());
      im.push_back(z.imag());
    }
    signals.push_back({{"label", obs.label}, {"re", re}, {"im", im}});
  }
  write_file({{"version", kDatasetVersion},
              {"T", static_cast<int>(T)},
              {"num_classes", ds.num_classes},
              {"signals", signals}},
             path);
}

void save_model(const ModelBundle& model, const std::string& path) {
  const TrainedPipeline& p = model.pipeline;
  json doc = {
      {"version", kModelVersion},
      {"spectral",
       {{"order_method", order_method_name(p.spectral.order_method)},
        {"max_order", p.spectral.max_order},
        {"denoise_iters", p.spectral.denoise_iters},
        {"denoise_tol", p.spectral.denoise_tol},
        {"hankel_rows_fraction", p.spectral.hankel_rows_fraction}}},
      {"partition",
       {{"d_th", p.partition.d_th},
        {"centroids_re", json::array()},
        {"centroids_im", json::array()}}},
      {"ranking", {{"scores", p.ranking.scores}, {"selected", p.ranking.selected}}},
      {"standardization",
       {{"mean", vector_to_json(p.standardizer.mean)}, {"std", vector_to_json(p.standardizer.stdev)}}},
      {"svm", svm_to_json(p.svm)},
      {"hyperparams",
       {{"d_th", p.hyperparams.d_th},
        {"c_percent", p.hyperparams.c_percent},
        {"svm_c", p.hyperparams.svm_c},
        {"kernel", kernel_to_string(p.hyperparams.kernel)},
        {"standardize", p.hyperparams.standardize}}}};
  for (Complex c : p.partition.centroids) {
    doc["partition"]["centroids_re"].push_back(c.real());
    doc["partition"]["centroids_im"].push_back(c.imag());
  }
  if (model.td_baseline) {
    doc["td_baseline"] = {{"T", model.td_baseline->T}, {"svm", svm_to_json(model.td_baseline->svm)}};
  }
  write_file(doc, path);
}

ModelBundle load_model(const std::string& path) {
  const json doc = parse_file(path);
  if (!doc.is_object()) fail(path + ": expected a JSON object");
  const int version = field(doc, "version", path).get<int>();
  if (version != kModelVersion)
    fail(path + ": unsupported model version " + std::to_string(version));

  ModelBundle bundle;
  TrainedPipeline& p = bundle.pipeline;

  const json& spec = field(doc, "spectral", path);
  p.spectral.order_method =
      order_method_from(field(spec, "order_method", path).get<std::string>(), path);
  p.spectral.max_order = field(spec, "max_order", path).get<int>();
  p.spectral.denoise_iters = field(spec, "denoise_iters", path).get<int>();
  p.spectral.denoise_tol = field(spec, "denoise_tol", path).get<double>();
  p.spectral.hankel_rows_fraction = field(spec, "hankel_rows_fraction", path).get<double>();
  if (p.spectral.max_order < 1 || p.spectral.denoise_iters < 0 ||
      p.spectral.hankel_rows_fraction <= 0.0 || p.spectral.hankel_rows_fraction >= 1.0)
    fail(path + ": invalid spectral configuration");

  const json& part = field(doc, "partition", path);
  p.partition.d_th = field(part, "d_th", path).get<double>();
  const std::vector<double> cre = as_double_vector(field(part, "centroids_re", path), path);
  const std::vector<double> cim = as_double_vector(field(part, "centroids_im", path), path);
  if (cre.size() != cim.size() || cre.empty()) fail(path + ": invalid centroids");
  for (std::size_t i = 0; i < cre.size(); ++i) p.partition.centroids.emplace_back(cre[i], cim[i]);

  const json& rank = field(doc, "ranking", path);
  p.ranking.scores = as_double_vector(field(rank, "scores", path), path + ".scores");
  for (const auto& v : field(rank, "selected", path)) {
    if (!v.is_number_integer()) fail(path + ": selected indices must be integers");
    const int idx = v.get<int>();
    if (idx < 0 || idx >= static_cast<int>(p.ranking.scores.size()))
      fail(path + ": selected index out of range");
    p.ranking.selected.push_back(idx);
  }
  if (p.ranking.scores.size() != 2 * p.partition.centroids.size())
    fail(path + ": ranking size does not match the partition");

  const json& std_j = field(doc, "standardization", path);
  p.standardizer.mean = json_to_vector(field(std_j, "mean", path), path + ".mean");
  p.standardizer.stdev = json_to_vector(field(std_j, "std", path), path + ".std");
  if (p.standardizer.mean.size() != static_cast<Eigen::Index>(p.ranking.selected.size()) ||
      p.standardizer.stdev.size() != p.standardizer.mean.size())
    fail(path + ": standardization dimension does not match the selected features");

  p.svm = svm_from_json(field(doc, "svm", path), path + ".svm");

  const json& hp = field(doc, "hyperparams", path);
  p.hyperparams.d_th = field(hp, "d_th", path).get<double>();
  p.hyperparams.c_percent = field(hp, "c_percent", path).get<double>();
  p.hyperparams.svm_c = field(hp, "svm_c", path).get<double>();
  p.hyperparams.kernel = kernel_from_string(field(hp, "kernel", path).get<std::string>());
  p.hyperparams.standardize = field(hp, "standardize", path).get<bool>();
  p.hyperparams.spectral = p.spectral;

  if (doc.contains("td_baseline")) {
    const json& td = doc["td_baseline"];
    TdBaseline baseline;
    baseline.T = field(td, "T", path + ".td_baseline").get<int>();
    if (baseline.T < 1) fail(path + ": invalid td_baseline length");
    baseline.svm = svm_from_json(field(td, "svm", path + ".td_baseline"), path + ".td_baseline.svm");
    bundle.td_baseline = std::move(baseline);
  }
  return bundle;
}

}  // namespace resonant
