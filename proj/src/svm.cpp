#include "resonant/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace resonant {

double kernel_eval(const KernelSpec& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw std::invalid_argument("kernel_eval: dimension mismatch");
  switch (k.kind) {
    case KernelKind::linear:
      return u.dot(v);
    case KernelKind::polynomial: {
      if (k.degree < 1) throw std::invalid_argument("kernel_eval: polynomial degree must be >= 1");
      return std::pow(u.dot(v) + 1.0, k.degree);
    }
    case KernelKind::rbf: {
      if (!(k.gamma > 0.0)) throw std::invalid_argument("kernel_eval: rbf gamma must be > 0");
      return std::exp(-k.gamma * (u - v).squaredNorm());
    }
  }
  throw std::invalid_argument("kernel_eval: unknown kernel");
}

double BinarySvm::decision(const Eigen::VectorXd& x) const {
  double f = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
    f += dual_coeffs[i] * kernel_eval(kernel, support_vectors.row(i).transpose(), x);
  return f;
}

BinarySvm train_binary_svm(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                           const KernelSpec& kernel, const SmoOptions& opts) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (X.rows() != n || n < 2) throw std::invalid_argument("train_binary_svm: bad training shape");
  if (!(C > 0.0)) throw std::invalid_argument("train_binary_svm: C must be > 0");
  if (!X.allFinite()) throw std::invalid_argument("train_binary_svm: non-finite features");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw std::invalid_argument("train_binary_svm: labels must be -1/+1");
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("train_binary_svm: single-class input");

  // Dual problem in LIBSVM form: minimize 0.5 a^T Q a - e^T a with
  // Q_ij = y_i y_j K_ij, subject to 0 <= a <= C, y^T a = 0.
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      K(i, j) = K(j, i) = kernel_eval(kernel, X.row(i).transpose(), X.row(j).transpose());

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  const auto yd = [&](Eigen::Index i) { return static_cast<double>(y[static_cast<std::size_t>(i)]); };

  double bias = 0.0;
  for (long iter = 0; iter < opts.max_iter; ++iter) {
    // Maximal violating pair.
    Eigen::Index i_up = -1, j_low = -1;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double yt = yd(t);
      const double g = -yt * grad[t];
      const bool in_up = (yt > 0 && alpha[t] < C) || (yt < 0 && alpha[t] > 0);
      const bool in_low = (yt > 0 && alpha[t] > 0) || (yt < 0 && alpha[t] < C);
      if (in_up && g > m_up) {
        m_up = g;
        i_up = t;
      }
      if (in_low && g < m_low) {
        m_low = g;
        j_low = t;
      }
    }
    bias = 0.5 * (m_up + m_low);  // midpoint of the KKT bias bracket
    if (i_up < 0 || j_low < 0 || m_up - m_low <= opts.tol) break;

    // Move along the equality constraint: a_i += yi*s, a_j -= yj*s. The
    // curvature along this direction is K_ii + K_jj - 2 K_ij regardless of
    // the labels.
    const Eigen::Index i = i_up, j = j_low;
    const double yi = yd(i), yj = yd(j);
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 0.0) quad = 1e-12;
    double step = (m_up - m_low) / quad;
    step = std::min(step, yi > 0 ? C - alpha[i] : alpha[i]);
    step = std::min(step, yj > 0 ? alpha[j] : C - alpha[j]);
    if (step <= 0.0) break;

    const double dai = yi * step;
    const double daj = -yj * step;
    alpha[i] += dai;
    alpha[j] += daj;
    for (Eigen::Index t = 0; t < n; ++t)
      grad[t] += yd(t) * (yi * K(t, i) * dai + yj * K(t, j) * daj);
  }

  BinarySvm model;
  model.kernel = kernel;
  model.C = C;
  model.bias = bias;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha[t] > 1e-12 * C) sv.push_back(t);
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
  model.dual_coeffs.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = X.row(sv[s]);
    model.dual_coeffs[static_cast<Eigen::Index>(s)] = alpha[sv[s]] * yd(sv[s]);
  }
  return model;
}

MulticlassSvm train_multiclass(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                               double C, const KernelSpec& kernel, const SmoOptions& opts) {
  if (static_cast<std::size_t>(X.rows()) != labels.size())
    throw std::invalid_argument("train_multiclass: labels length mismatch");
  int P = 0;
  for (int l : labels) {
    if (l < 1) throw std::invalid_argument("train_multiclass: labels must be >= 1");
    P = std::max(P, l);
  }
  for (int p = 1; p <= P; ++p)
    if (std::none_of(labels.begin(), labels.end(), [&](int l) { return l == p; }))
      throw std::invalid_argument("train_multiclass: class missing from training data");
  if (P < 2) throw std::invalid_argument("train_multiclass: need at least two classes");

  MulticlassSvm model;
  model.binaries.reserve(static_cast<std::size_t>(P));
  std::vector<int> binary_labels(labels.size());
  for (int p = 1; p <= P; ++p) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      binary_labels[i] = labels[i] == p ? 1 : -1;
    model.binaries.push_back(train_binary_svm(X, binary_labels, C, kernel, opts));
  }
  return model;
}

int predict(const MulticlassSvm& model, const Eigen::VectorXd& x) {
  if (model.binaries.empty()) throw std::invalid_argument("predict: untrained model");
  int best = 1;
  double best_f = model.binaries.front().decision(x);
  for (int p = 2; p <= model.num_classes(); ++p) {
    const double f = model.binaries[static_cast<std::size_t>(p - 1)].decision(x);
    if (f > best_f) {
      best_f = f;
      best = p;
    }
  }
  return best;
}

}  // namespace resonant
