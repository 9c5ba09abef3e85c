#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "repkit/error.hpp"
#include "repkit/matrix.hpp"
#include "repkit/parallel.hpp"

namespace repkit {

enum class ModelKind { ridge, logistic };
enum class PenaltyKind { l1, l2 };

inline const char* model_kind_name(ModelKind k) { return k == ModelKind::ridge ? "ridge" : "logistic"; }
inline const char* penalty_name(PenaltyKind p) { return p == PenaltyKind::l1 ? "l1" : "l2"; }

/// Per-feature standardization fitted on training data only. Stds below 1e-8
/// are floored at 1e-8 so constant columns stay at zero instead of dividing
/// by zero.
struct StandardScaler {
  std::vector<double> mean;
  std::vector<double> std;

  void fit(const FeatureMatrix& X) {
    mean.assign(X.cols, 0.0);
    std.assign(X.cols, 0.0);
    for (std::size_t r = 0; r < X.rows; ++r) {
      const double* row = X.row(r);
      for (std::size_t c = 0; c < X.cols; ++c) mean[c] += row[c];
    }
    for (auto& m : mean) m /= static_cast<double>(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
      const double* row = X.row(r);
      for (std::size_t c = 0; c < X.cols; ++c) {
        double d = row[c] - mean[c];
        std[c] += d * d;
      }
    }
    for (auto& s : std) s = std::max(std::sqrt(s / static_cast<double>(X.rows)), 1e-8);
  }
};

/// Fitted linear classifier (ridge one-vs-rest or multinomial logistic) with
/// its scaler, optional L1 feature mask and training metadata. Probabilities
/// come from a softmax over the decision values in both cases.
struct LinearModel {
  ModelKind kind = ModelKind::ridge;
  std::vector<std::string> classes;
  Eigen::MatrixXd weights;  // num_classes x num_kept_features
  Eigen::VectorXd biases;   // num_classes
  std::vector<double> scaler_mean;  // original feature width
  std::vector<double> scaler_std;
  double regularization = 1.0;  // alpha for ridge, C for logistic
  PenaltyKind penalty = PenaltyKind::l2;
  std::optional<std::vector<bool>> feature_mask;  // original width; true = kept
  std::uint64_t seed = 0;

  // Training diagnostics (not persisted).
  bool converged = true;
  double final_grad_norm = 0.0;
  std::size_t iterations = 0;
  std::vector<double> objective_history;

  std::size_t input_width() const { return scaler_mean.size(); }
};

namespace detail {

inline std::vector<std::string> sorted_classes(const std::vector<std::string>& labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

inline void check_finite(const FeatureMatrix& X) {
  for (double v : X.data)
    if (!std::isfinite(v)) fail(errc::malformed_input, "feature matrix contains non-finite values");
}

/// Standardize and apply the optional mask, producing a column-major matrix
/// of the kept features.
inline Eigen::MatrixXd standardized_kept(const FeatureMatrix& X, const StandardScaler& scaler,
                                         const std::optional<std::vector<bool>>& mask) {
  if (X.cols != scaler.mean.size())
    fail(errc::dimension_mismatch, "feature width " + std::to_string(X.cols) +
                                       " does not match model width " +
                                       std::to_string(scaler.mean.size()));
  std::vector<std::size_t> kept;
  if (mask) {
    if (mask->size() != X.cols)
      fail(errc::dimension_mismatch, "feature mask width does not match feature width");
    for (std::size_t c = 0; c < X.cols; ++c)
      if ((*mask)[c]) kept.push_back(c);
  } else {
    kept.resize(X.cols);
    for (std::size_t c = 0; c < X.cols; ++c) kept[c] = c;
  }
  Eigen::MatrixXd out(X.rows, kept.size());
  parallel_for(0, X.rows, [&](std::size_t r) {
    const double* row = X.row(r);
    for (std::size_t j = 0; j < kept.size(); ++j) {
      std::size_t c = kept[j];
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          (row[c] - scaler.mean[c]) / scaler.std[c];
    }
  });
  return out;
}

/// G = Xs * Xs^T computed in fixed 64-row blocks so the result is
/// bit-identical for any thread count.
inline Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& Xs, unsigned threads = 0) {
  Eigen::Index n = Xs.rows();
  Eigen::MatrixXd G(n, n);
  constexpr Eigen::Index kBlock = 64;
  std::size_t nblocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  parallel_for(
      0, nblocks,
      [&](std::size_t b) {
        Eigen::Index lo = static_cast<Eigen::Index>(b) * kBlock;
        Eigen::Index len = std::min<Eigen::Index>(kBlock, n - lo);
        G.middleRows(lo, len).noalias() = Xs.middleRows(lo, len) * Xs.transpose();
      },
      threads);
  return G;
}

inline void softmax_rows(Eigen::MatrixXd& Z) {
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    double mx = Z.row(i).maxCoeff();
    Z.row(i) = (Z.row(i).array() - mx).exp();
    Z.row(i) /= Z.row(i).sum();
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ridge regression (closed form)
// ---------------------------------------------------------------------------

/// One-vs-rest ridge on standardized features with +-1 targets and an
/// unpenalized bias. Solves the normal equations directly: the primal form
/// (X^T X + alpha I) when features <= samples, the algebraically identical
/// dual form X^T (X X^T + alpha I)^{-1} otherwise. Deterministic.
inline LinearModel fit_ridge(const FeatureMatrix& X, const std::vector<std::string>& y,
                             double alpha, const std::optional<std::vector<bool>>& mask = {},
                             unsigned threads = 0) {
  if (X.rows != y.size()) fail(errc::dimension_mismatch, "X rows and label count differ");
  if (alpha < 0.0) fail(errc::bad_config, "alpha must be >= 0");
  detail::check_finite(X);

  LinearModel model;
  model.kind = ModelKind::ridge;
  model.classes = detail::sorted_classes(y);
  model.regularization = alpha;
  model.feature_mask = mask;
  if (X.rows < model.classes.size())
    fail(errc::dimension_mismatch, "need at least one sample per class");

  StandardScaler scaler;
  scaler.fit(X);
  model.scaler_mean = scaler.mean;
  model.scaler_std = scaler.std;

  Eigen::MatrixXd Xs = detail::standardized_kept(X, scaler, mask);
  Eigen::Index n = Xs.rows(), p = Xs.cols();
  auto K = static_cast<Eigen::Index>(model.classes.size());

  Eigen::MatrixXd Y(n, K);
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto it = std::lower_bound(model.classes.begin(), model.classes.end(), y[i]);
    for (Eigen::Index k = 0; k < K; ++k) Y(static_cast<Eigen::Index>(i), k) = -1.0;
    Y(static_cast<Eigen::Index>(i),
      static_cast<Eigen::Index>(it - model.classes.begin())) = 1.0;
  }

  model.biases = Y.colwise().mean();
  Eigen::MatrixXd R = Y.rowwise() - model.biases.transpose();

  Eigen::MatrixXd W(p, K);
  if (p <= n) {
    Eigen::MatrixXd A = Xs.transpose() * Xs;
    A.diagonal().array() += alpha;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
      fail(errc::singular_system, "normal equations are singular (alpha too small)");
    W = llt.solve(Xs.transpose() * R);
  } else {
    Eigen::MatrixXd G = detail::gram_matrix(Xs, threads);
    G.diagonal().array() += alpha;
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
      fail(errc::singular_system, "gram system is singular (alpha too small)");
    W = Xs.transpose() * llt.solve(R);
  }
  model.weights = W.transpose();
  return model;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression (proximal gradient)
// ---------------------------------------------------------------------------

/// The (convex) objective minimized by fit_logistic, exposed so tests can
/// evaluate it and its gradient at arbitrary points:
///   f(W, b) = mean cross-entropy + penalty,
///   penalty = ||W||_F^2 / (2 C N)  for l2,  ||W||_1 / (C N)  for l1.
/// Biases are never penalized.
struct MultinomialObjective {
  const Eigen::MatrixXd& Xs;  // n x p, standardized
  Eigen::MatrixXd Y;          // n x k one-hot
  double C = 1.0;
  PenaltyKind penalty = PenaltyKind::l2;

  MultinomialObjective(const Eigen::MatrixXd& features, const std::vector<std::size_t>& labels,
                       std::size_t num_classes, double c, PenaltyKind pen)
      : Xs(features), C(c), penalty(pen) {
    Y = Eigen::MatrixXd::Zero(Xs.rows(), static_cast<Eigen::Index>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i)
      Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) = 1.0;
  }

  double n() const { return static_cast<double>(Xs.rows()); }

  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& W, const Eigen::VectorXd& b) const {
    Eigen::MatrixXd Z = Xs * W.transpose();
    Z.rowwise() += b.transpose();
    detail::softmax_rows(Z);
    return Z;
  }

  /// Mean cross-entropy (the smooth part, without any penalty).
  double cross_entropy(const Eigen::MatrixXd& W, const Eigen::VectorXd& b) const {
    Eigen::MatrixXd Z = Xs * W.transpose();
    Z.rowwise() += b.transpose();
    double loss = 0.0;
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      double mx = Z.row(i).maxCoeff();
      double lse = mx + std::log((Z.row(i).array() - mx).exp().sum());
      loss += lse - Z.row(i).dot(Y.row(i));
    }
    return loss / n();
  }

  double penalty_value(const Eigen::MatrixXd& W) const {
    if (penalty == PenaltyKind::l2) return W.squaredNorm() / (2.0 * C * n());
    return W.lpNorm<1>() / (C * n());
  }

  double value(const Eigen::MatrixXd& W, const Eigen::VectorXd& b) const {
    return cross_entropy(W, b) + penalty_value(W);
  }

  /// Gradient of the smooth part (cross-entropy plus the l2 penalty; the l1
  /// penalty is handled by the proximal step instead).
  void smooth_gradient(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                       Eigen::MatrixXd& grad_w, Eigen::VectorXd& grad_b) const {
    Eigen::MatrixXd P = probabilities(W, b);
    P -= Y;
    grad_w = (P.transpose() * Xs) / n();
    if (penalty == PenaltyKind::l2) grad_w += W / (C * n());
    grad_b = P.colwise().sum().transpose() / n();
  }
};

struct LogisticOptions {
  std::size_t max_iterations = 10000;
  double tolerance = 1e-6;  // inf-norm of the (generalized) gradient
  bool warn_on_nonconvergence = true;
};

namespace detail {

inline void soft_threshold(Eigen::MatrixXd& W, double t) {
  W = W.unaryExpr([t](double w) {
    if (w > t) return w - t;
    if (w < -t) return w + t;
    return 0.0;
  });
}

/// Monotone proximal gradient descent with backtracking step halving.
/// Returns (iterations, final generalized gradient inf-norm, history).
inline std::tuple<std::size_t, double, std::vector<double>> proximal_fit(
    const MultinomialObjective& obj, Eigen::MatrixXd& W, Eigen::VectorXd& b,
    const LogisticOptions& opts) {
  double l1_weight = obj.penalty == PenaltyKind::l1 ? 1.0 / (obj.C * obj.n()) : 0.0;
  double step = 1.0;
  double fval = obj.value(W, b);
  std::vector<double> history{fval};
  Eigen::MatrixXd grad_w;
  Eigen::VectorXd grad_b;
  double grad_norm = 0.0;
  std::size_t iter = 0;

  for (; iter < opts.max_iterations; ++iter) {
    obj.smooth_gradient(W, b, grad_w, grad_b);

    // Generalized gradient: for l1 the proximal residual at unit step.
    if (obj.penalty == PenaltyKind::l1) {
      Eigen::MatrixXd W_prox = W - grad_w;
      soft_threshold(W_prox, l1_weight);
      grad_norm = std::max((W - W_prox).lpNorm<Eigen::Infinity>(),
                           grad_b.lpNorm<Eigen::Infinity>());
    } else {
      grad_norm = std::max(grad_w.lpNorm<Eigen::Infinity>(), grad_b.lpNorm<Eigen::Infinity>());
    }
    if (grad_norm < opts.tolerance) break;

    double smooth_here = fval - (obj.penalty == PenaltyKind::l1 ? obj.penalty_value(W) : 0.0);
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      Eigen::MatrixXd W_new = W - step * grad_w;
      if (obj.penalty == PenaltyKind::l1) soft_threshold(W_new, step * l1_weight);
      Eigen::VectorXd b_new = b - step * grad_b;

      double smooth_new = obj.cross_entropy(W_new, b_new) +
                          (obj.penalty == PenaltyKind::l2
                               ? W_new.squaredNorm() / (2.0 * obj.C * obj.n())
                               : 0.0);
      double dw = (W_new - W).squaredNorm() + (b_new - b).squaredNorm();
      double linear = (grad_w.array() * (W_new - W).array()).sum() +
                      grad_b.dot(b_new - b);
      if (smooth_new <= smooth_here + linear + dw / (2.0 * step)) {
        double fnew = smooth_new +
                      (obj.penalty == PenaltyKind::l1 ? W_new.lpNorm<1>() / (obj.C * obj.n())
                                                      : 0.0);
        if (fnew <= fval) {  // keep the objective monotone
          W = std::move(W_new);
          b = std::move(b_new);
          fval = fnew;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    history.push_back(fval);
    if (!accepted) break;   // step underflow; cannot make progress
    step = std::min(step * 1.5, 1e6);
  }
  return {iter, grad_norm, std::move(history)};
}

}  // namespace detail

/// Multinomial (softmax) logistic regression with penalty weight 1/C,
/// minimized by deterministic proximal gradient descent with backtracking.
/// Non-convergence within max_iterations is reported as a warning, not a
/// failure; the model carries the final gradient norm.
inline LinearModel fit_logistic(const FeatureMatrix& X, const std::vector<std::string>& y,
                                double C, PenaltyKind penalty = PenaltyKind::l2,
                                const LogisticOptions& opts = {},
                                const std::optional<std::vector<bool>>& mask = {}) {
  if (X.rows != y.size()) fail(errc::dimension_mismatch, "X rows and label count differ");
  if (C <= 0.0) fail(errc::bad_config, "C must be positive");
  detail::check_finite(X);

  LinearModel model;
  model.kind = ModelKind::logistic;
  model.classes = detail::sorted_classes(y);
  model.regularization = C;
  model.penalty = penalty;
  model.feature_mask = mask;
  if (X.rows < model.classes.size())
    fail(errc::dimension_mismatch, "need at least one sample per class");

  StandardScaler scaler;
  scaler.fit(X);
  model.scaler_mean = scaler.mean;
  model.scaler_std = scaler.std;

  Eigen::MatrixXd Xs = detail::standardized_kept(X, scaler, mask);
  std::vector<std::size_t> labels(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    labels[i] = static_cast<std::size_t>(
        std::lower_bound(model.classes.begin(), model.classes.end(), y[i]) -
        model.classes.begin());

  MultinomialObjective obj(Xs, labels, model.classes.size(), C, penalty);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.classes.size()),
                                            Xs.cols());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.classes.size()));

  auto [iters, grad_norm, history] = detail::proximal_fit(obj, W, b, opts);
  model.weights = std::move(W);
  model.biases = std::move(b);
  model.iterations = iters;
  model.final_grad_norm = grad_norm;
  model.objective_history = std::move(history);
  model.converged = grad_norm < opts.tolerance;
  if (!model.converged && opts.warn_on_nonconvergence)
    std::cerr << "[classify] warning: logistic fit stopped after " << iters
              << " iterations with gradient norm " << grad_norm << "\n";
  return model;
}

/// L1-based feature selection: fits an L1-penalized one-vs-rest logistic
/// model per class on the (already standardized) features and keeps every
/// feature with |coefficient| > 1e-8 in any class.
inline std::vector<bool> select_features_l1(const FeatureMatrix& X,
                                            const std::vector<std::string>& y, double C,
                                            const LogisticOptions& opts = {}) {
  if (X.rows != y.size()) fail(errc::dimension_mismatch, "X rows and label count differ");
  if (C <= 0.0) fail(errc::bad_config, "C must be positive");
  detail::check_finite(X);

  auto classes = detail::sorted_classes(y);
  Eigen::MatrixXd Xs(X.rows, X.cols);
  for (std::size_t r = 0; r < X.rows; ++r)
    for (std::size_t c = 0; c < X.cols; ++c)
      Xs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = X.at(r, c);

  std::vector<bool> mask(X.cols, false);
  LogisticOptions sel_opts = opts;
  sel_opts.warn_on_nonconvergence = false;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::vector<std::size_t> labels(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) labels[i] = y[i] == classes[k] ? 1 : 0;
    MultinomialObjective obj(Xs, labels, 2, C, PenaltyKind::l1);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2, Xs.cols());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    detail::proximal_fit(obj, W, b, sel_opts);
    for (std::size_t c = 0; c < X.cols; ++c)
      if (std::abs(W(0, static_cast<Eigen::Index>(c))) > 1e-8 ||
          std::abs(W(1, static_cast<Eigen::Index>(c))) > 1e-8)
        mask[c] = true;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

/// Raw decision values (logits): standardizes with the stored scaler, applies
/// the mask, then X W^T + b.
inline Eigen::MatrixXd decision_values(const LinearModel& model, const FeatureMatrix& X) {
  StandardScaler scaler;
  scaler.mean = model.scaler_mean;
  scaler.std = model.scaler_std;
  Eigen::MatrixXd Xs = detail::standardized_kept(X, scaler, model.feature_mask);
  if (Xs.cols() != model.weights.cols())
    fail(errc::dimension_mismatch, "masked feature width does not match model weights");
  Eigen::MatrixXd Z = Xs * model.weights.transpose();
  Z.rowwise() += model.biases.transpose();
  return Z;
}

/// Class probabilities: softmax over the decision values (temperature 1).
/// Rows sum to 1; column order is the model's class order.
inline FeatureMatrix predict_proba(const LinearModel& model, const FeatureMatrix& X) {
  Eigen::MatrixXd Z = decision_values(model, X);
  detail::softmax_rows(Z);
  FeatureMatrix out(static_cast<std::size_t>(Z.rows()), static_cast<std::size_t>(Z.cols()));
  out.column_names = model.classes;
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (Eigen::Index j = 0; j < Z.cols(); ++j)
      out.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Z(i, j);
  return out;
}

/// Argmax labels with ties broken to the lowest class index.
inline std::vector<std::string> predict_labels(const LinearModel& model, const FeatureMatrix& X) {
  Eigen::MatrixXd Z = decision_values(model, X);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(Z.rows()));
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < Z.cols(); ++j)
      if (Z(i, j) > Z(i, best)) best = j;
    out.push_back(model.classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const LinearModel& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["type"] = "repkit.linear_model";
  j["kind"] = model_kind_name(model.kind);
  j["classes"] = model.classes;
  std::vector<std::vector<double>> w(static_cast<std::size_t>(model.weights.rows()));
  for (Eigen::Index r = 0; r < model.weights.rows(); ++r) {
    w[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(model.weights.cols()));
    for (Eigen::Index c = 0; c < model.weights.cols(); ++c)
      w[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = model.weights(r, c);
  }
  j["weights"] = std::move(w);
  j["biases"] = std::vector<double>(model.biases.data(), model.biases.data() + model.biases.size());
  j["scaler_mean"] = model.scaler_mean;
  j["scaler_std"] = model.scaler_std;
  j["regularization"] = model.regularization;
  j["penalty"] = penalty_name(model.penalty);
  if (model.feature_mask) {
    std::vector<int> m(model.feature_mask->size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (*model.feature_mask)[i] ? 1 : 0;
    j["feature_mask"] = std::move(m);
  } else {
    j["feature_mask"] = nullptr;
  }
  j["seed"] = model.seed;
  return j;
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("type") || j["type"] != "repkit.linear_model")
    fail(errc::malformed_input, "not a linear model artifact");
  if (j["format_version"].get<int>() != kModelFormatVersion)
    fail(errc::malformed_input, "unsupported model format version");
  LinearModel model;
  std::string kind = j["kind"].get<std::string>();
  model.kind = kind == "ridge" ? ModelKind::ridge : ModelKind::logistic;
  model.classes = j["classes"].get<std::vector<std::string>>();
  auto w = j["weights"].get<std::vector<std::vector<double>>>();
  model.weights.resize(static_cast<Eigen::Index>(w.size()),
                       w.empty() ? 0 : static_cast<Eigen::Index>(w.front().size()));
  for (std::size_t r = 0; r < w.size(); ++r)
    for (std::size_t c = 0; c < w[r].size(); ++c)
      model.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w[r][c];
  auto b = j["biases"].get<std::vector<double>>();
  model.biases = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  model.scaler_mean = j["scaler_mean"].get<std::vector<double>>();
  model.scaler_std = j["scaler_std"].get<std::vector<double>>();
  model.regularization = j["regularization"].get<double>();
  model.penalty = j["penalty"].get<std::string>() == "l1" ? PenaltyKind::l1 : PenaltyKind::l2;
  if (!j["feature_mask"].is_null()) {
    auto m = j["feature_mask"].get<std::vector<int>>();
    std::vector<bool> mask(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) mask[i] = m[i] != 0;
    model.feature_mask = std::move(mask);
  }
  model.seed = j["seed"].get<std::uint64_t>();
  return model;
}

inline void save_model(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path.string() + "' for writing");
  out << model_to_json(model).dump(1) << '\n';
  if (!out) fail(errc::io_error, "failed writing '" + path.string() + "'");
}

inline LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed_input, "bad model file '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace repkit
