#ifndef RESONANT_SVM_HPP
#define RESONANT_SVM_HPP

#include <Eigen/Core>

#include <vector>

#include "resonant/common.hpp"

namespace resonant {

enum class KernelKind { linear, polynomial, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::polynomial;
  int degree = 2;      // polynomial
  double gamma = 1.0;  // rbf
};

double kernel_eval(const KernelSpec& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Soft-margin binary SVM in dual form. dual_coeffs holds alpha_i * y_i for
/// the retained support vectors.
struct BinarySvm {
  Eigen::MatrixXd support_vectors;  // one row per support vector
  Eigen::VectorXd dual_coeffs;
  double bias = 0.0;
  KernelSpec kernel;
  double C = 1.0;

  double decision(const Eigen::VectorXd& x) const;
};

struct MulticlassSvm {
  std::vector<BinarySvm> binaries;  // one-vs-all, class p at index p-1

  int num_classes() const { return static_cast<int>(binaries.size()); }
};

struct SmoOptions {
  double tol = 1e-3;       // KKT violation tolerance
  long max_iter = 200000;  // pair updates
};

/// Trains the dual soft-margin problem with SMO using maximal-violating-pair
/// selection. Labels must be -1/+1 with both present.
BinarySvm train_binary_svm(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                           const KernelSpec& kernel, const SmoOptions& opts = {});

/// One-vs-all composition over labels 1..P.
MulticlassSvm train_multiclass(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                               double C, const KernelSpec& kernel, const SmoOptions& opts = {});

/// argmax over per-class decision values, ties to the lowest class id.
int predict(const MulticlassSvm& model, const Eigen::VectorXd& x);

}  // namespace resonant

#endif  // RESONANT_SVM_HPP
