#include "pupilload/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "pupilload/rng.hpp"

namespace pupilload {

namespace {

double hyper_get(const Hyper& h, const std::string& key, double fallback) {
  auto it = h.find(key);
  return it == h.end() ? fallback : it->second;
}

int argmax_smallest(std::span<const double> scores) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(scores.size()); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

void check_training_input(const Matrix& x, const std::vector<int>& y, int n_classes) {
  if (x.cols == 0) throw Error("fit: zero feature dimension");
  if (x.rows != y.size()) throw Error("fit: X rows and y length differ");
  if (x.rows < static_cast<std::size_t>(n_classes)) throw Error("fit: fewer rows than classes");
  std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
  for (int label : y) {
    if (label < 0 || label >= n_classes) throw Error("fit: label out of range");
    seen[static_cast<std::size_t>(label)] = true;
  }
  for (int c = 0; c < n_classes; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw Error("fit: class " + std::to_string(c) + " missing from y");
  for (double v : x.data)
    if (!std::isfinite(v)) throw Error("fit: non-finite feature value");
}

int infer_n_classes(const std::vector<int>& y) {
  int hi = -1;
  for (int label : y) hi = std::max(hi, label);
  return hi + 1;
}

// ---------------------------------------------------------------- forest --

struct TreeBuilder {
  const Matrix& x;
  const std::vector<int>& y;
  int n_classes;
  int features_per_split;
  Rng& rng;
  DecisionTree tree;

  int majority(const std::vector<std::size_t>& idx) const {
    std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
    for (auto i : idx) ++counts[static_cast<std::size_t>(y[i])];
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
      if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    return best;
  }

  bool pure(const std::vector<std::size_t>& idx) const {
    for (auto i : idx)
      if (y[i] != y[idx.front()]) return false;
    return true;
  }

  static double gini(std::span<const int> counts, int total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (int c : counts) {
      const double p = static_cast<double>(c) / total;
      g -= p * p;
    }
    return g;
  }

  int build(std::vector<std::size_t> idx) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (idx.size() < 2 || pure(idx)) {
      tree.nodes[static_cast<std::size_t>(node_id)].leaf_class = majority(idx);
      return node_id;
    }

    // Sample a random feature subset for this node.
    std::vector<int> features(x.cols);
    std::iota(features.begin(), features.end(), 0);
    for (int i = 0; i < features_per_split && i < static_cast<int>(features.size()); ++i) {
      const auto j = i + static_cast<int>(rng.below(features.size() - static_cast<std::size_t>(i)));
      std::swap(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)]);
    }
    features.resize(static_cast<std::size_t>(
        std::min<std::size_t>(features.size(), static_cast<std::size_t>(features_per_split))));

    const int total = static_cast<int>(idx.size());
    std::vector<int> total_counts(static_cast<std::size_t>(n_classes), 0);
    for (auto i : idx) ++total_counts[static_cast<std::size_t>(y[i])];
    const double parent_gini = gini(total_counts, total);

    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> vals;
    vals.reserve(idx.size());
    for (int f : features) {
      vals.clear();
      for (auto i : idx) vals.emplace_back(x(i, static_cast<std::size_t>(f)), y[i]);
      std::sort(vals.begin(), vals.end());

      std::vector<int> left_counts(static_cast<std::size_t>(n_classes), 0);
      for (std::size_t pos = 1; pos < vals.size(); ++pos) {
        ++left_counts[static_cast<std::size_t>(vals[pos - 1].second)];
        if (vals[pos].first == vals[pos - 1].first) continue;  // no boundary here
        const int n_left = static_cast<int>(pos);
        const int n_right = total - n_left;
        std::vector<int> right_counts(static_cast<std::size_t>(n_classes), 0);
        for (int c = 0; c < n_classes; ++c)
          right_counts[static_cast<std::size_t>(c)] =
              total_counts[static_cast<std::size_t>(c)] - left_counts[static_cast<std::size_t>(c)];
        const double child =
            (n_left * gini(left_counts, n_left) + n_right * gini(right_counts, n_right)) / total;
        const double gain = parent_gini - child;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          // Split at the observed left value so the tree depends on feature
          // order only; x <= threshold goes left.
          best_threshold = vals[pos - 1].first;
        }
      }
    }

    if (best_feature < 0) {
      tree.nodes[static_cast<std::size_t>(node_id)].leaf_class = majority(idx);
      return node_id;
    }

    std::vector<std::size_t> left_idx, right_idx;
    for (auto i : idx) {
      if (x(i, static_cast<std::size_t>(best_feature)) <= best_threshold)
        left_idx.push_back(i);
      else
        right_idx.push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    const int left = build(std::move(left_idx));
    const int right = build(std::move(right_idx));
    auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return node_id;
  }
};

ForestModel fit_forest(const Matrix& x, const std::vector<int>& y, int n_classes, int n_trees,
                       std::uint64_t seed) {
  ForestModel forest;
  forest.trees.reserve(static_cast<std::size_t>(n_trees));
  const int features_per_split =
      std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(x.cols)))));
  for (int t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, 0xf0e0 + static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> bootstrap(x.rows);
    for (auto& i : bootstrap) i = static_cast<std::size_t>(rng.below(x.rows));
    std::sort(bootstrap.begin(), bootstrap.end());
    TreeBuilder builder{x, y, n_classes, features_per_split, rng, {}};
    builder.build(std::move(bootstrap));
    forest.trees.push_back(std::move(builder.tree));
  }
  return forest;
}

// ------------------------------------------------------------------- gnb --

GnbModel fit_gnb(const Matrix& x, const std::vector<int>& y, int n_classes, double var_floor) {
  GnbModel m;
  m.log_prior.assign(static_cast<std::size_t>(n_classes), 0.0);
  m.mean = Matrix(static_cast<std::size_t>(n_classes), x.cols);
  m.var = Matrix(static_cast<std::size_t>(n_classes), x.cols);

  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    counts[c] += 1.0;
    for (std::size_t j = 0; j < x.cols; ++j) m.mean(c, j) += x(i, j);
  }
  for (std::size_t c = 0; c < static_cast<std::size_t>(n_classes); ++c)
    for (std::size_t j = 0; j < x.cols; ++j) m.mean(c, j) /= counts[c];
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double d = x(i, j) - m.mean(c, j);
      m.var(c, j) += d * d;
    }
  }
  for (std::size_t c = 0; c < static_cast<std::size_t>(n_classes); ++c) {
    m.log_prior[c] = std::log(counts[c] / static_cast<double>(x.rows));
    for (std::size_t j = 0; j < x.cols; ++j)
      m.var(c, j) = std::max(m.var(c, j) / counts[c], var_floor);
  }
  return m;
}

// -------------------------------------------------------- linear models --

LinearModel fit_logistic(const Matrix& x, const std::vector<int>& y, int n_classes, int epochs,
                         double lr) {
  LinearModel m;
  m.weights = Matrix(static_cast<std::size_t>(n_classes), x.cols);
  m.bias.assign(static_cast<std::size_t>(n_classes), 0.0);

  const auto n = static_cast<double>(x.rows);
  std::vector<double> logits(static_cast<std::size_t>(n_classes));
  Matrix grad_w(static_cast<std::size_t>(n_classes), x.cols);
  std::vector<double> grad_b(static_cast<std::size_t>(n_classes));

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad_w.data.begin(), grad_w.data.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < logits.size(); ++c) {
        double z = m.bias[c];
        for (std::size_t j = 0; j < x.cols; ++j) z += m.weights(c, j) * x(i, j);
        logits[c] = z;
        hi = std::max(hi, z);
      }
      double denom = 0.0;
      for (double& z : logits) {
        z = std::exp(z - hi);
        denom += z;
      }
      for (std::size_t c = 0; c < logits.size(); ++c) {
        const double p = logits[c] / denom;
        const double err = (p - (static_cast<int>(c) == y[i] ? 1.0 : 0.0)) / n;
        grad_b[c] += err;
        for (std::size_t j = 0; j < x.cols; ++j) grad_w(c, j) += err * x(i, j);
      }
    }
    for (std::size_t c = 0; c < grad_b.size(); ++c) {
      m.bias[c] -= lr * grad_b[c];
      for (std::size_t j = 0; j < x.cols; ++j) m.weights(c, j) -= lr * grad_w(c, j);
    }
  }
  return m;
}

LinearModel fit_linear_svm(const Matrix& x, const std::vector<int>& y, int n_classes, int epochs,
                           double lr, double c_penalty) {
  // One-vs-rest hinge: per class minimize 0.5*lambda*||w||^2 + C*mean(hinge),
  // lambda = 1/(C*N), by full-batch subgradient descent.
  LinearModel m;
  m.weights = Matrix(static_cast<std::size_t>(n_classes), x.cols);
  m.bias.assign(static_cast<std::size_t>(n_classes), 0.0);

  const auto n = static_cast<double>(x.rows);
  const double lambda = 1.0 / (c_penalty * n);

  std::vector<double> grad_w(x.cols);
  for (int c = 0; c < n_classes; ++c) {
    auto w = m.weights.row(static_cast<std::size_t>(c));
    double& b = m.bias[static_cast<std::size_t>(c)];
    for (int epoch = 0; epoch < epochs; ++epoch) {
      const double step = lr / (1.0 + 0.001 * epoch);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = 0; i < x.rows; ++i) {
        const double target = (y[i] == c) ? 1.0 : -1.0;
        double score = b;
        for (std::size_t j = 0; j < x.cols; ++j) score += w[j] * x(i, j);
        if (target * score < 1.0) {
          const double scale = -target * c_penalty / n;
          grad_b += scale;
          for (std::size_t j = 0; j < x.cols; ++j) grad_w[j] += scale * x(i, j);
        }
      }
      for (std::size_t j = 0; j < x.cols; ++j) w[j] -= step * (lambda * w[j] + grad_w[j]);
      b -= step * grad_b;
    }
  }
  return m;
}

// -------------------------------------------------------------------- da --

// Inverts a symmetric positive-definite matrix via Cholesky; grows the ridge
// until the factorization succeeds.
Matrix spd_inverse(Matrix s, double ridge) {
  const std::size_t d = s.rows;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix a = s;
    for (std::size_t j = 0; j < d; ++j) a(j, j) += ridge;

    Matrix chol(d, d);
    bool ok = true;
    for (std::size_t i = 0; i < d && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double sum = a(i, j);
        for (std::size_t k = 0; k < j; ++k) sum -= chol(i, k) * chol(j, k);
        if (i == j) {
          if (sum <= 0.0) {
            ok = false;
            break;
          }
          chol(i, i) = std::sqrt(sum);
        } else {
          chol(i, j) = sum / chol(j, j);
        }
      }
    }
    if (!ok) {
      ridge *= 10.0;
      continue;
    }

    // inv = L^-T L^-1 via one triangular solve per unit vector.
    Matrix inv(d, d);
    std::vector<double> col(d);
    for (std::size_t e = 0; e < d; ++e) {
      for (std::size_t i = 0; i < d; ++i) {
        double sum = (i == e) ? 1.0 : 0.0;
        for (std::size_t k = 0; k < i; ++k) sum -= chol(i, k) * col[k];
        col[i] = sum / chol(i, i);
      }
      for (std::size_t ii = d; ii-- > 0;) {
        double sum = col[ii];
        for (std::size_t k = ii + 1; k < d; ++k) sum -= chol(k, ii) * col[k];
        col[ii] = sum / chol(ii, ii);
      }
      for (std::size_t i = 0; i < d; ++i) inv(i, e) = col[i];
    }
    return inv;
  }
  throw Error("discriminant analysis: covariance matrix is not invertible");
}

DaModel fit_da(const Matrix& x, const std::vector<int>& y, int n_classes, double ridge) {
  DaModel m;
  m.log_prior.assign(static_cast<std::size_t>(n_classes), 0.0);
  m.means = Matrix(static_cast<std::size_t>(n_classes), x.cols);

  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    counts[c] += 1.0;
    for (std::size_t j = 0; j < x.cols; ++j) m.means(c, j) += x(i, j);
  }
  for (std::size_t c = 0; c < static_cast<std::size_t>(n_classes); ++c) {
    m.log_prior[c] = std::log(counts[c] / static_cast<double>(x.rows));
    for (std::size_t j = 0; j < x.cols; ++j) m.means(c, j) /= counts[c];
  }

  Matrix pooled(x.cols, x.cols);
  std::vector<double> centered(x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    for (std::size_t j = 0; j < x.cols; ++j) centered[j] = x(i, j) - m.means(c, j);
    for (std::size_t j = 0; j < x.cols; ++j)
      for (std::size_t k = j; k < x.cols; ++k) pooled(j, k) += centered[j] * centered[k];
  }
  const double denom = std::max<double>(1.0, static_cast<double>(x.rows) - n_classes);
  for (std::size_t j = 0; j < x.cols; ++j)
    for (std::size_t k = j; k < x.cols; ++k) {
      pooled(j, k) /= denom;
      pooled(k, j) = pooled(j, k);
    }

  m.sigma_inv = spd_inverse(std::move(pooled), ridge);
  return m;
}

// ------------------------------------------------------------------- knn --

int knn_predict_row(const KnnModel& m, std::span<const double> row, int n_classes) {
  // Gather the k smallest distances; equal distances at the cut keep every
  // candidate so the class tie-break below stays deterministic.
  std::vector<std::pair<double, int>> dist;
  dist.reserve(m.train_x.rows);
  for (std::size_t i = 0; i < m.train_x.rows; ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < m.train_x.cols; ++j) {
      const double d = m.train_x(i, j) - row[j];
      d2 += d * d;
    }
    dist.emplace_back(d2, m.train_y[i]);
  }
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(m.k), dist.size());
  std::nth_element(dist.begin(), dist.begin() + static_cast<long>(k - 1), dist.end());
  const double kth = dist[k - 1].first;

  std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
  for (const auto& [d2, label] : dist)
    if (d2 <= kth) ++votes[static_cast<std::size_t>(label)];
  int best = 0;
  for (int c = 1; c < n_classes; ++c)
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
  return best;
}

// ---------------------------------------------------------------- nn-reg --

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct NnView {
  std::span<const double> w1, b1, w2;
  double b2;
};

NnView nn_view(std::span<const double> params, NnShape shape) {
  const auto h = static_cast<std::size_t>(shape.hidden);
  const auto d = static_cast<std::size_t>(shape.input);
  return NnView{params.subspan(0, h * d), params.subspan(h * d, h), params.subspan(h * d + h, h),
                params[h * d + 2 * h]};
}

double nn_forward(const NnView& v, NnShape shape, std::span<const double> row,
                  std::span<double> hidden_out) {
  const auto h = static_cast<std::size_t>(shape.hidden);
  const auto d = static_cast<std::size_t>(shape.input);
  double out = v.b2;
  for (std::size_t u = 0; u < h; ++u) {
    double z = v.b1[u];
    for (std::size_t j = 0; j < d; ++j) z += v.w1[u * d + j] * row[j];
    const double a = sigmoid(z);
    if (!hidden_out.empty()) hidden_out[u] = a;
    out += v.w2[u] * a;
  }
  return out;
}

}  // namespace

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::RF: return "RF";
    case ModelKind::GNB: return "GNB";
    case ModelKind::LR: return "LR";
    case ModelKind::SVM: return "SVM";
    case ModelKind::KNN: return "KNN";
    case ModelKind::DA: return "DA";
    case ModelKind::NNReg: return "NN-reg";
  }
  return "?";
}

ModelKind kind_from_name(const std::string& name) {
  for (ModelKind k : {ModelKind::RF, ModelKind::GNB, ModelKind::LR, ModelKind::SVM, ModelKind::KNN,
                      ModelKind::DA, ModelKind::NNReg})
    if (name == kind_name(k)) return k;
  throw Error("unknown model kind '" + name + "'");
}

ColumnScaler ColumnScaler::fit(const Matrix& x) {
  ColumnScaler s;
  s.lo.assign(x.cols, std::numeric_limits<double>::infinity());
  s.hi.assign(x.cols, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) {
      s.lo[j] = std::min(s.lo[j], x(i, j));
      s.hi[j] = std::max(s.hi[j], x(i, j));
    }
  return s;
}

Matrix ColumnScaler::transform(const Matrix& x) const {
  if (x.cols != lo.size()) throw Error("scaler: feature dimension mismatch");
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) {
      if (hi[j] == lo[j]) {
        out(i, j) = 0.5;
      } else {
        out(i, j) = std::clamp((x(i, j) - lo[j]) / (hi[j] - lo[j]), 0.0, 1.0);
      }
    }
  return out;
}

int DecisionTree::predict(std::span<const double> row) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(node)];
    node = (row[static_cast<std::size_t>(n.feature)] <= n.threshold) ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].leaf_class;
}

TrainedModel fit_classifier(ModelKind kind, const Matrix& x, const std::vector<int>& y,
                            const Hyper& hyper, std::uint64_t seed) {
  if (kind == ModelKind::NNReg) throw Error("fit_classifier: NN-reg is a regressor");
  const int n_classes = infer_n_classes(y);
  if (n_classes < 1) throw Error("fit: empty label vector");
  check_training_input(x, y, n_classes);

  ColumnScaler scaler = ColumnScaler::fit(x);
  const Matrix xs = scaler.transform(x);

  TrainedModel::Impl impl;
  switch (kind) {
    case ModelKind::RF: {
      const int trees = static_cast<int>(hyper_get(hyper, "trees", 10));
      impl = fit_forest(xs, y, n_classes, trees, seed);
      break;
    }
    case ModelKind::GNB:
      impl = fit_gnb(xs, y, n_classes, hyper_get(hyper, "var_floor", 1e-9));
      break;
    case ModelKind::LR:
      impl = fit_logistic(xs, y, n_classes, static_cast<int>(hyper_get(hyper, "epochs", 2000)),
                          hyper_get(hyper, "lr", 0.5));
      break;
    case ModelKind::SVM:
      impl = fit_linear_svm(xs, y, n_classes, static_cast<int>(hyper_get(hyper, "epochs", 3000)),
                            hyper_get(hyper, "lr", 0.5), hyper_get(hyper, "C", 1.0));
      break;
    case ModelKind::KNN: {
      KnnModel m;
      m.k = std::max(1, static_cast<int>(hyper_get(hyper, "k", 1)));
      m.train_x = xs;
      m.train_y = y;
      impl = std::move(m);
      break;
    }
    case ModelKind::DA:
      impl = fit_da(xs, y, n_classes, hyper_get(hyper, "ridge", 1e-6));
      break;
    case ModelKind::NNReg:
      break;  // unreachable
  }
  return TrainedModel(kind, static_cast<int>(x.cols), n_classes, std::move(scaler),
                      std::move(impl));
}

std::vector<int> TrainedModel::predict(const Matrix& x) const {
  if (kind_ == ModelKind::NNReg) throw Error("predict: regression model, use predict_reg");
  if (x.cols != static_cast<std::size_t>(feature_dim_))
    throw Error("predict: expected " + std::to_string(feature_dim_) + " features, got " +
                std::to_string(x.cols));
  const Matrix xs = scaler_.transform(x);
  std::vector<int> out(xs.rows);
  std::vector<double> scores(static_cast<std::size_t>(n_classes_));

  for (std::size_t i = 0; i < xs.rows; ++i) {
    const auto row = xs.row(i);
    switch (kind_) {
      case ModelKind::RF: {
        const auto& forest = std::get<ForestModel>(impl_);
        std::fill(scores.begin(), scores.end(), 0.0);
        for (const auto& tree : forest.trees)
          scores[static_cast<std::size_t>(tree.predict(row))] += 1.0;
        out[i] = argmax_smallest(scores);
        break;
      }
      case ModelKind::GNB: {
        const auto& m = std::get<GnbModel>(impl_);
        for (std::size_t c = 0; c < scores.size(); ++c) {
          double ll = m.log_prior[c];
          for (std::size_t j = 0; j < xs.cols; ++j) {
            const double v = m.var(c, j);
            const double d = row[j] - m.mean(c, j);
            ll += -0.5 * std::log(2.0 * 3.141592653589793238462643383279502884 * v) -
                  d * d / (2.0 * v);
          }
          scores[c] = ll;
        }
        out[i] = argmax_smallest(scores);
        break;
      }
      case ModelKind::LR:
      case ModelKind::SVM: {
        const auto& m = std::get<LinearModel>(impl_);
        for (std::size_t c = 0; c < scores.size(); ++c) {
          double z = m.bias[c];
          for (std::size_t j = 0; j < xs.cols; ++j) z += m.weights(c, j) * row[j];
          scores[c] = z;
        }
        out[i] = argmax_smallest(scores);
        break;
      }
      case ModelKind::KNN:
        out[i] = knn_predict_row(std::get<KnnModel>(impl_), row, n_classes_);
        break;
      case ModelKind::DA: {
        const auto& m = std::get<DaModel>(impl_);
        for (std::size_t c = 0; c < scores.size(); ++c) {
          // delta_c(x) = mu_c' S^-1 x - 0.5 mu_c' S^-1 mu_c + log prior
          double lin = 0.0, quad = 0.0;
          for (std::size_t j = 0; j < xs.cols; ++j) {
            double sj = 0.0;
            for (std::size_t l = 0; l < xs.cols; ++l) sj += m.sigma_inv(j, l) * m.means(c, l);
            lin += sj * row[j];
            quad += sj * m.means(c, j);
          }
          scores[c] = lin - 0.5 * quad + m.log_prior[c];
        }
        out[i] = argmax_smallest(scores);
        break;
      }
      case ModelKind::NNReg:
        break;  // unreachable
    }
  }
  return out;
}

TrainedModel fit_regressor_nn(const Matrix& x, const std::vector<double>& y, int hidden,
                              std::uint64_t seed, int epochs, double learning_rate) {
  if (x.rows < 2) throw Error("fit_regressor_nn: need at least 2 rows");
  if (hidden < 1) throw Error("fit_regressor_nn: hidden size must be >= 1");
  if (x.rows != y.size()) throw Error("fit_regressor_nn: X rows and y length differ");
  if (x.cols == 0) throw Error("fit_regressor_nn: zero feature dimension");

  ColumnScaler scaler = ColumnScaler::fit(x);
  Matrix xs = scaler.transform(x);

  // Standardize the scaled inputs with training statistics.
  NnRegModel m;
  m.hidden = hidden;
  m.x_mean.assign(xs.cols, 0.0);
  m.x_std.assign(xs.cols, 0.0);
  for (std::size_t i = 0; i < xs.rows; ++i)
    for (std::size_t j = 0; j < xs.cols; ++j) m.x_mean[j] += xs(i, j);
  for (double& v : m.x_mean) v /= static_cast<double>(xs.rows);
  for (std::size_t i = 0; i < xs.rows; ++i)
    for (std::size_t j = 0; j < xs.cols; ++j) {
      const double d = xs(i, j) - m.x_mean[j];
      m.x_std[j] += d * d;
    }
  for (double& v : m.x_std) v = std::max(std::sqrt(v / static_cast<double>(xs.rows)), 1e-12);
  for (std::size_t i = 0; i < xs.rows; ++i)
    for (std::size_t j = 0; j < xs.cols; ++j) xs(i, j) = (xs(i, j) - m.x_mean[j]) / m.x_std[j];

  const NnShape shape{static_cast<int>(x.cols), hidden};
  Rng rng(derive_seed(seed, 0x99e6));
  m.params.resize(shape.param_count());
  for (double& p : m.params) p = rng.uniform(-0.5, 0.5);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    const auto grad = nn_mse_gradient(m.params, shape, xs, y);
    bool finite = true;
    for (std::size_t p = 0; p < m.params.size(); ++p) {
      m.params[p] -= learning_rate * grad[p];
      finite = finite && std::isfinite(m.params[p]);
    }
    if (!finite)
      throw Error("fit_regressor_nn: non-finite parameters at epoch " + std::to_string(epoch));
  }
  const double final_loss = nn_mse_loss(m.params, shape, xs, y);
  if (!std::isfinite(final_loss))
    throw Error("fit_regressor_nn: non-finite loss after training");

  return TrainedModel(ModelKind::NNReg, static_cast<int>(x.cols), 0, std::move(scaler),
                      std::move(m));
}

std::vector<double> TrainedModel::predict_reg(const Matrix& x) const {
  if (kind_ != ModelKind::NNReg) throw Error("predict_reg: classifier model, use predict");
  if (x.cols != static_cast<std::size_t>(feature_dim_))
    throw Error("predict_reg: expected " + std::to_string(feature_dim_) + " features, got " +
                std::to_string(x.cols));
  const auto& m = std::get<NnRegModel>(impl_);
  Matrix xs = scaler_.transform(x);
  for (std::size_t i = 0; i < xs.rows; ++i)
    for (std::size_t j = 0; j < xs.cols; ++j) xs(i, j) = (xs(i, j) - m.x_mean[j]) / m.x_std[j];

  const NnShape shape{feature_dim_, m.hidden};
  const NnView v = nn_view(m.params, shape);
  std::vector<double> out(xs.rows);
  for (std::size_t i = 0; i < xs.rows; ++i) out[i] = nn_forward(v, shape, xs.row(i), {});
  return out;
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) { return model.predict(x); }

std::vector<double> predict_reg(const TrainedModel& model, const Matrix& x) {
  return model.predict_reg(x);
}

double nn_mse_loss(std::span<const double> params, NnShape shape, const Matrix& x,
                   std::span<const double> y) {
  const NnView v = nn_view(params, shape);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double e = nn_forward(v, shape, x.row(i), {}) - y[i];
    loss += e * e;
  }
  return loss / static_cast<double>(x.rows);
}

std::vector<double> nn_mse_gradient(std::span<const double> params, NnShape shape, const Matrix& x,
                                    std::span<const double> y) {
  const NnView v = nn_view(params, shape);
  const auto h = static_cast<std::size_t>(shape.hidden);
  const auto d = static_cast<std::size_t>(shape.input);
  std::vector<double> grad(params.size(), 0.0);
  auto g_w1 = std::span<double>(grad).subspan(0, h * d);
  auto g_b1 = std::span<double>(grad).subspan(h * d, h);
  auto g_w2 = std::span<double>(grad).subspan(h * d + h, h);
  double& g_b2 = grad[h * d + 2 * h];

  std::vector<double> hidden(h);
  const auto n = static_cast<double>(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    const double pred = nn_forward(v, shape, row, hidden);
    const double e = 2.0 * (pred - y[i]) / n;
    g_b2 += e;
    for (std::size_t u = 0; u < h; ++u) {
      g_w2[u] += e * hidden[u];
      const double dz = e * v.w2[u] * hidden[u] * (1.0 - hidden[u]);
      g_b1[u] += dz;
      for (std::size_t j = 0; j < d; ++j) g_w1[u * d + j] += dz * row[j];
    }
  }
  return grad;
}

// ---------------------------------------------------------- serialization --

namespace {

constexpr const char* kModelMagic = "pupilload-model";
constexpr int kModelVersion = 1;

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void put_vector(std::string& out, const char* name, std::span<const double> v) {
  out += name;
  for (double x : v) {
    out += ' ';
    put(out, x);
  }
  out += '\n';
}

void put_matrix(std::string& out, const char* name, const Matrix& m) {
  out += name;
  out += ' ';
  out += std::to_string(m.rows);
  out += ' ';
  out += std::to_string(m.cols);
  out += '\n';
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) out += ' ';
      put(out, m(i, j));
    }
    out += '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw Error("model file: unexpected end of input");
    return w;
  }
  void expect(const char* token) {
    const std::string w = word();
    if (w != token) throw Error(std::string("model file: expected '") + token + "', got '" + w + "'");
  }
  double number() {
    double v;
    if (!(in_ >> v)) throw Error("model file: expected a number");
    return v;
  }
  long integer() {
    long v;
    if (!(in_ >> v)) throw Error("model file: expected an integer");
    return v;
  }
  std::vector<double> vector(const char* name, std::size_t n) {
    expect(name);
    std::vector<double> v(n);
    for (double& x : v) x = number();
    return v;
  }
  Matrix matrix(const char* name) {
    expect(name);
    const auto rows = static_cast<std::size_t>(integer());
    const auto cols = static_cast<std::size_t>(integer());
    Matrix m(rows, cols);
    for (double& x : m.data) x = number();
    return m;
  }

 private:
  std::istream& in_;
};

}  // namespace

void TrainedModel::save(const std::filesystem::path& path) const {
  std::string out;
  out += kModelMagic;
  out += ' ';
  out += std::to_string(kModelVersion);
  out += '\n';
  out += "kind ";
  out += kind_name(kind_);
  out += '\n';
  out += "feature_dim " + std::to_string(feature_dim_) + '\n';
  out += "n_classes " + std::to_string(n_classes_) + '\n';
  put_vector(out, "scaler_lo", scaler_.lo);
  put_vector(out, "scaler_hi", scaler_.hi);

  switch (kind_) {
    case ModelKind::RF: {
      const auto& forest = std::get<ForestModel>(impl_);
      out += "trees " + std::to_string(forest.trees.size()) + '\n';
      for (const auto& tree : forest.trees) {
        out += "tree " + std::to_string(tree.nodes.size()) + '\n';
        for (const auto& n : tree.nodes) {
          out += std::to_string(n.feature);
          out += ' ';
          put(out, n.threshold);
          out += ' ' + std::to_string(n.left) + ' ' + std::to_string(n.right) + ' ' +
                 std::to_string(n.leaf_class) + '\n';
        }
      }
      break;
    }
    case ModelKind::GNB: {
      const auto& m = std::get<GnbModel>(impl_);
      put_vector(out, "prior", m.log_prior);
      put_matrix(out, "mean", m.mean);
      put_matrix(out, "var", m.var);
      break;
    }
    case ModelKind::LR:
    case ModelKind::SVM: {
      const auto& m = std::get<LinearModel>(impl_);
      put_matrix(out, "weights", m.weights);
      put_vector(out, "bias", m.bias);
      break;
    }
    case ModelKind::KNN: {
      const auto& m = std::get<KnnModel>(impl_);
      out += "k " + std::to_string(m.k) + '\n';
      put_matrix(out, "train_x", m.train_x);
      out += "train_y";
      for (int label : m.train_y) out += ' ' + std::to_string(label);
      out += '\n';
      break;
    }
    case ModelKind::DA: {
      const auto& m = std::get<DaModel>(impl_);
      put_vector(out, "prior", m.log_prior);
      put_matrix(out, "means", m.means);
      put_matrix(out, "sigma_inv", m.sigma_inv);
      break;
    }
    case ModelKind::NNReg: {
      const auto& m = std::get<NnRegModel>(impl_);
      out += "hidden " + std::to_string(m.hidden) + '\n';
      put_vector(out, "x_mean", m.x_mean);
      put_vector(out, "x_std", m.x_std);
      put_vector(out, "params", m.params);
      break;
    }
  }
  out += "end\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write model file: " + path.string());
  f << out;
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open model file: " + path.string());
  Reader r(f);

  r.expect(kModelMagic);
  const long version = r.integer();
  if (version != kModelVersion)
    throw Error("model file: unsupported version " + std::to_string(version));
  r.expect("kind");
  const ModelKind kind = kind_from_name(r.word());
  r.expect("feature_dim");
  const auto feature_dim = static_cast<int>(r.integer());
  r.expect("n_classes");
  const auto n_classes = static_cast<int>(r.integer());

  ColumnScaler scaler;
  scaler.lo = r.vector("scaler_lo", static_cast<std::size_t>(feature_dim));
  scaler.hi = r.vector("scaler_hi", static_cast<std::size_t>(feature_dim));

  Impl impl;
  switch (kind) {
    case ModelKind::RF: {
      r.expect("trees");
      const auto n_trees = static_cast<std::size_t>(r.integer());
      ForestModel forest;
      forest.trees.resize(n_trees);
      for (auto& tree : forest.trees) {
        r.expect("tree");
        const auto n_nodes = static_cast<std::size_t>(r.integer());
        tree.nodes.resize(n_nodes);
        for (auto& n : tree.nodes) {
          n.feature = static_cast<int>(r.integer());
          n.threshold = r.number();
          n.left = static_cast<int>(r.integer());
          n.right = static_cast<int>(r.integer());
          n.leaf_class = static_cast<int>(r.integer());
        }
      }
      impl = std::move(forest);
      break;
    }
    case ModelKind::GNB: {
      GnbModel m;
      m.log_prior = r.vector("prior", static_cast<std::size_t>(n_classes));
      m.mean = r.matrix("mean");
      m.var = r.matrix("var");
      impl = std::move(m);
      break;
    }
    case ModelKind::LR:
    case ModelKind::SVM: {
      LinearModel m;
      m.weights = r.matrix("weights");
      m.bias = r.vector("bias", static_cast<std::size_t>(n_classes));
      impl = std::move(m);
      break;
    }
    case ModelKind::KNN: {
      KnnModel m;
      r.expect("k");
      m.k = static_cast<int>(r.integer());
      m.train_x = r.matrix("train_x");
      r.expect("train_y");
      m.train_y.resize(m.train_x.rows);
      for (int& label : m.train_y) label = static_cast<int>(r.integer());
      impl = std::move(m);
      break;
    }
    case ModelKind::DA: {
      DaModel m;
      m.log_prior = r.vector("prior", static_cast<std::size_t>(n_classes));
      m.means = r.matrix("means");
      m.sigma_inv = r.matrix("sigma_inv");
      impl = std::move(m);
      break;
    }
    case ModelKind::NNReg: {
      NnRegModel m;
      r.expect("hidden");
      m.hidden = static_cast<int>(r.integer());
      m.x_mean = r.vector("x_mean", static_cast<std::size_t>(feature_dim));
      m.x_std = r.vector("x_std", static_cast<std::size_t>(feature_dim));
      const NnShape shape{feature_dim, m.hidden};
      m.params = r.vector("params", shape.param_count());
      impl = std::move(m);
      break;
    }
  }
  r.expect("end");
  return TrainedModel(kind, feature_dim, n_classes, std::move(scaler), std::move(impl));
}

}  // namespace pupilload
