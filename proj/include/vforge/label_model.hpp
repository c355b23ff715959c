#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vforge/document.hpp"
#include "vforge/knowledge.hpp"

namespace vforge::ki {

struct EmOptions {
  double init_prior = 0.1;
  double init_accuracy = 0.7;
  double tolerance = 1e-6;  // on the change of observed log-likelihood
  int max_iterations = 100;
  double accuracy_min = 0.05;
  double accuracy_max = 0.95;
  double prior_min = 1e-3;
  double prior_max = 1.0 - 1e-3;
};

/// Naive-Bayes generative model over knowledge-function votes.
///
/// Latent y in {+1,-1} with P(y=+1) = prior. Column j abstains with
/// probability 1-propensity[j]; otherwise it agrees with y with probability
/// accuracy[j].
struct LabelModelParams {
  double prior = 0.1;
  std::vector<double> propensity;
  std::vector<double> accuracy;
  std::vector<std::string> column_ids;
  std::vector<bool> degenerate;  // all-abstain columns, accuracy pinned at 0.5

  std::vector<double> log_likelihood_trace;  // initial value, then one per EM step
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;

  std::size_t cols() const noexcept { return accuracy.size(); }

  Json to_json() const;
  static LabelModelParams from_json(const Json& doc);
};

/// EM fit. Throws DegenerateMatrix only when the matrix has no vote at all;
/// individual all-abstain columns are pinned and reported in `warnings`.
/// Throws EmNotMonotone if an iteration lowers the log-likelihood.
LabelModelParams fit_label_model(const onto::LabelMatrix& matrix, const EmOptions& options = {});

/// P(y = MATCH | votes); equals the prior exactly when every column abstains.
double posterior(const LabelModelParams& params, std::span<const std::int8_t> row);

/// OpenMP kernel over rows.
std::vector<double> posterior_batch(const LabelModelParams& params, const onto::LabelMatrix& matrix);

/// Observed-data log-likelihood, summed over rows in index order.
double log_likelihood(const LabelModelParams& params, const onto::LabelMatrix& matrix);

}  // namespace vforge::ki
