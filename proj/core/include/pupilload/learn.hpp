#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pupilload/errors.hpp"
#include "pupilload/matrix.hpp"

namespace pupilload {

enum class ModelKind { RF, GNB, LR, SVM, KNN, DA, NNReg };

const char* kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);

/// Free-form hyperparameters; unknown keys are ignored by each learner.
using Hyper = std::map<std::string, double>;

/// Per-column min-max scaler fitted on training ranges; transformed test
/// columns clamp to [0,1]. Constant columns map to 0.5.
struct ColumnScaler {
  std::vector<double> lo, hi;

  static ColumnScaler fit(const Matrix& x);
  Matrix transform(const Matrix& x) const;
};

struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0.0; // goes left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  int leaf_class = -1;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int predict(std::span<const double> row) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
};

struct GnbModel {
  std::vector<double> log_prior;  // per class
  Matrix mean;                    // n_classes x feature_dim
  Matrix var;                     // n_classes x feature_dim, floored
};

/// Shared by the logistic-regression and linear-SVM classifiers:
/// score_c(x) = w_c . x + b_c, predicted class = argmax (smallest index wins ties).
struct LinearModel {
  Matrix weights;  // n_classes x feature_dim
  std::vector<double> bias;
};

struct KnnModel {
  int k = 1;
  Matrix train_x;
  std::vector<int> train_y;
};

struct DaModel {
  std::vector<double> log_prior;
  Matrix means;      // n_classes x feature_dim
  Matrix sigma_inv;  // pooled covariance inverse, feature_dim x feature_dim
};

struct NnRegModel {
  int hidden = 0;
  std::vector<double> params;  // [W1 (H*D), b1 (H), w2 (H), b2 (1)]
  std::vector<double> x_mean;  // per-feature standardization of scaled inputs
  std::vector<double> x_std;
};

/// An immutable fitted learner. Classifier predictions are class indices
/// 0..n_classes-1; the regressor returns raw score predictions.
class TrainedModel {
 public:
  TrainedModel() = default;

  ModelKind kind() const { return kind_; }
  int feature_dim() const { return feature_dim_; }
  int n_classes() const { return n_classes_; }

  std::vector<int> predict(const Matrix& x) const;
  std::vector<double> predict_reg(const Matrix& x) const;

  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

  // Wiring used by the fit functions and the serializer.
  using Impl = std::variant<ForestModel, GnbModel, LinearModel, KnnModel, DaModel, NnRegModel>;
  TrainedModel(ModelKind kind, int feature_dim, int n_classes, ColumnScaler scaler, Impl impl)
      : kind_(kind), feature_dim_(feature_dim), n_classes_(n_classes),
        scaler_(std::move(scaler)), impl_(std::move(impl)) {}
  const Impl& impl() const { return impl_; }
  const ColumnScaler& scaler() const { return scaler_; }

 private:
  ModelKind kind_ = ModelKind::RF;
  int feature_dim_ = 0;
  int n_classes_ = 0;
  ColumnScaler scaler_;
  Impl impl_;
};

/// Trains one of the six classifier kinds. y holds class indices
/// 0..n_classes-1 and every class must appear at least once. Deterministic
/// given (X, y, hyper, seed).
///
/// Defaults: RF 10 trees (bootstrap, Gini, sqrt(D) features per split, grown
/// to purity); GNB variance floor 1e-9; LR multinomial logistic regression by
/// full-batch gradient descent; SVM linear one-vs-rest hinge with C=1 by
/// subgradient descent; KNN k=1 Euclidean; DA linear discriminant analysis
/// with pooled covariance and diagonal ridge 1e-6.
TrainedModel fit_classifier(ModelKind kind, const Matrix& x, const std::vector<int>& y,
                            const Hyper& hyper = {}, std::uint64_t seed = 0);

std::vector<int> predict(const TrainedModel& model, const Matrix& x);

inline constexpr int kDefaultNnEpochs = 2000;
inline constexpr double kDefaultNnLearningRate = 0.01;

/// One-hidden-layer regressor (sigmoid hidden, linear output) trained by
/// full-batch gradient descent on mean squared error. Weights start uniform
/// in [-0.5, 0.5] from the seed.
TrainedModel fit_regressor_nn(const Matrix& x, const std::vector<double>& y, int hidden,
                              std::uint64_t seed, int epochs = kDefaultNnEpochs,
                              double learning_rate = kDefaultNnLearningRate);

std::vector<double> predict_reg(const TrainedModel& model, const Matrix& x);

/// Network geometry for the flat parameter layout [W1, b1, w2, b2].
struct NnShape {
  int input = 0;
  int hidden = 0;

  std::size_t param_count() const {
    return static_cast<std::size_t>(hidden) * input + 2 * static_cast<std::size_t>(hidden) + 1;
  }
};

// MSE loss and its analytic gradient on the flat parameter vector. Exposed so
// the gradient can be checked against finite differences.
double nn_mse_loss(std::span<const double> params, NnShape shape, const Matrix& x,
                   std::span<const double> y);
std::vector<double> nn_mse_gradient(std::span<const double> params, NnShape shape, const Matrix& x,
                                    std::span<const double> y);

}  // namespace pupilload
