#pragma once

#include <array>
#include <span>
#include <vector>

#include "vforge/candidates.hpp"
#include "vforge/document.hpp"

namespace vforge::ki {

inline constexpr std::size_t kFeatures = onto::FeatureVector::kSize;
/// Weights followed by the bias.
using LogisticParams = std::array<double, kFeatures + 1>;
using StandardizedRow = std::array<double, kFeatures>;

struct ClassifierHyper {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-3;
  double gradient_tolerance = 1e-6;

  Json to_json() const;
  static ClassifierHyper from_json(const Json& doc);
};

/// Logistic regression over z-scored features, trained on soft labels.
struct ClassifierModel {
  std::array<double, kFeatures> weights{};
  double bias = 0.0;
  std::array<double, kFeatures> mean{};
  std::array<double, kFeatures> stddev{1, 1, 1, 1, 1, 1, 1};
  ClassifierHyper hyper;
  int epochs_run = 0;

  StandardizedRow standardize(const onto::FeatureVector& x) const;

  Json to_json() const;
  static ClassifierModel from_json(const Json& doc);
};

/// Cross-entropy against soft labels plus (l2/2)|w|^2; the bias is not regularized.
double logistic_loss(const LogisticParams& params, std::span<const StandardizedRow> x,
                     std::span<const double> q, double l2);

/// Analytic gradient of logistic_loss.
LogisticParams logistic_gradient(const LogisticParams& params, std::span<const StandardizedRow> x,
                                 std::span<const double> q, double l2);

/// Full-batch gradient descent from zero weights; deterministic.
ClassifierModel train_classifier(std::span<const onto::FeatureVector> features,
                                 std::span<const double> soft_labels, ClassifierHyper hyper = {});

double sigmoid(double z);

/// σ(w·standardize(x) + b)
double predict(const ClassifierModel& model, const onto::FeatureVector& x);

/// OpenMP kernel.
std::vector<double> predict_batch(const ClassifierModel& model,
                                  std::span<const onto::FeatureVector> xs);

}  // namespace vforge::ki
