#include "vforge/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "vforge/error.hpp"

namespace vforge::ki {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear(const LogisticParams& p, const StandardizedRow& x) {
  double z = p[kFeatures];
  for (std::size_t k = 0; k < kFeatures; ++k) z += p[k] * x[k];
  return z;
}

}  // namespace

Json ClassifierHyper::to_json() const {
  return {{"learningRate", learning_rate},
          {"epochs", epochs},
          {"l2", l2},
          {"gradientTolerance", gradient_tolerance}};
}

ClassifierHyper ClassifierHyper::from_json(const Json& doc) {
  ClassifierHyper h;
  h.learning_rate = doc.value("learningRate", h.learning_rate);
  h.epochs = doc.value("epochs", h.epochs);
  h.l2 = doc.value("l2", h.l2);
  h.gradient_tolerance = doc.value("gradientTolerance", h.gradient_tolerance);
  return h;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

StandardizedRow ClassifierModel::standardize(const onto::FeatureVector& x) const {
  StandardizedRow out{};
  for (std::size_t k = 0; k < kFeatures; ++k) out[k] = (x[k] - mean[k]) / stddev[k];
  return out;
}

double logistic_loss(const LogisticParams& params, std::span<const StandardizedRow> x,
                     std::span<const double> q, double l2) {
  // -[q log σ(z) + (1-q) log(1-σ(z))] = softplus(z) - q z
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = linear(params, x[i]);
    loss += softplus(z) - q[i] * z;
  }
  double reg = 0.0;
  for (std::size_t k = 0; k < kFeatures; ++k) reg += params[k] * params[k];
  return loss + 0.5 * l2 * reg;
}

LogisticParams logistic_gradient(const LogisticParams& params, std::span<const StandardizedRow> x,
                                 std::span<const double> q, double l2) {
  LogisticParams g{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = sigmoid(linear(params, x[i])) - q[i];
    for (std::size_t k = 0; k < kFeatures; ++k) g[k] += r * x[i][k];
    g[kFeatures] += r;
  }
  for (std::size_t k = 0; k < kFeatures; ++k) g[k] += l2 * params[k];
  return g;
}

ClassifierModel train_classifier(std::span<const onto::FeatureVector> features,
                                 std::span<const double> soft_labels, ClassifierHyper hyper) {
  if (features.size() != soft_labels.size()) {
    fail("InvalidArgument", "features and soft labels differ in length");
  }
  if (features.size() < 2) fail("EmptyTrainingSet", "need at least two training rows");

  ClassifierModel model;
  model.hyper = hyper;
  const double n = static_cast<double>(features.size());
  for (std::size_t k = 0; k < kFeatures; ++k) {
    double sum = 0.0;
    for (const auto& f : features) sum += f[k];
    const double mu = sum / n;
    double var = 0.0;
    for (const auto& f : features) var += (f[k] - mu) * (f[k] - mu);
    var /= n;
    model.mean[k] = mu;
    model.stddev[k] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  std::vector<StandardizedRow> x;
  x.reserve(features.size());
  for (const auto& f : features) x.push_back(model.standardize(f));

  // The step follows the per-row mean gradient so the learning rate does not
  // have to shrink with the table size; the minimizer is the same.
  LogisticParams params{};
  int epoch = 0;
  for (; epoch < hyper.epochs; ++epoch) {
    auto g = logistic_gradient(params, x, soft_labels, hyper.l2);
    double inf_norm = 0.0;
    for (auto& gk : g) {
      gk /= n;
      inf_norm = std::max(inf_norm, std::abs(gk));
    }
    if (inf_norm < hyper.gradient_tolerance) break;
    for (std::size_t k = 0; k <= kFeatures; ++k) params[k] -= hyper.learning_rate * g[k];
  }
  std::copy_n(params.begin(), kFeatures, model.weights.begin());
  model.bias = params[kFeatures];
  model.epochs_run = epoch;
  return model;
}

double predict(const ClassifierModel& model, const onto::FeatureVector& x) {
  const auto s = model.standardize(x);
  double z = model.bias;
  for (std::size_t k = 0; k < kFeatures; ++k) z += model.weights[k] * s[k];
  return sigmoid(z);
}

std::vector<double> predict_batch(const ClassifierModel& model,
                                  std::span<const onto::FeatureVector> xs) {
  std::vector<double> out(xs.size());
  const auto n = static_cast<long long>(xs.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = predict(model, xs[static_cast<std::size_t>(i)]);
  }
  return out;
}

Json ClassifierModel::to_json() const {
  Json feats = Json::array();
  for (std::size_t k = 0; k < kFeatures; ++k) {
    feats.push_back({{"name", onto::FeatureVector::kNames[k]},
                     {"weight", weights[k]},
                     {"mean", mean[k]},
                     {"stddev", stddev[k]}});
  }
  return {{"family", "logistic"},
          {"features", std::move(feats)},
          {"bias", bias},
          {"hyper", hyper.to_json()},
          {"epochsRun", epochs_run}};
}

ClassifierModel ClassifierModel::from_json(const Json& doc) {
  ClassifierModel m;
  const auto& feats = doc.at("features");
  if (feats.size() != kFeatures) fail("MalformedDocument", "classifier needs 7 feature entries");
  for (std::size_t k = 0; k < kFeatures; ++k) {
    m.weights[k] = feats[k].at("weight").get<double>();
    m.mean[k] = feats[k].at("mean").get<double>();
    m.stddev[k] = feats[k].at("stddev").get<double>();
    if (!(m.stddev[k] > 0.0)) fail("MalformedDocument", "classifier stddev must be positive");
  }
  m.bias = doc.at("bias").get<double>();
  if (doc.contains("hyper")) m.hyper = ClassifierHyper::from_json(doc["hyper"]);
  m.epochs_run = doc.value("epochsRun", 0);
  return m;
}

}  // namespace vforge::ki
