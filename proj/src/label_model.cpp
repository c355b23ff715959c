#include "vforge/label_model.hpp"

#include <algorithm>
#include <cmath>

#include "vforge/error.hpp"

namespace vforge::ki {

namespace {

// log P(vote | y) for one non-abstaining column, up to the shared p_j factor.
inline double vote_log_ratio(double accuracy, std::int8_t vote) {
  // log f(-1) - log f(+1) where f(y) = a if vote==y else 1-a
  const double la = std::log(accuracy);
  const double lna = std::log1p(-accuracy);
  return vote > 0 ? lna - la : la - lna;
}

double row_log_likelihood(const LabelModelParams& p, std::span<const std::int8_t> row) {
  double pos = std::log(p.prior);
  double neg = std::log1p(-p.prior);
  for (std::size_t j = 0; j < row.size(); ++j) {
    const std::int8_t v = row[j];
    if (v == 0) {
      const double l = std::log1p(-p.propensity[j]);
      pos += l;
      neg += l;
      continue;
    }
    const double lp = std::log(p.propensity[j]);
    const double la = std::log(p.accuracy[j]);
    const double lna = std::log1p(-p.accuracy[j]);
    pos += lp + (v > 0 ? la : lna);
    neg += lp + (v < 0 ? la : lna);
  }
  const double hi = std::max(pos, neg);
  const double lo = std::min(pos, neg);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

double posterior(const LabelModelParams& params, std::span<const std::int8_t> row) {
  if (row.size() != params.cols()) fail("InvalidArgument", "vote row length does not match model");
  double d = 0.0;
  bool voted = false;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] == 0) continue;
    voted = true;
    d += vote_log_ratio(params.accuracy[j], row[j]);
  }
  if (!voted) return params.prior;
  const double q = params.prior / (params.prior + (1.0 - params.prior) * std::exp(d));
  return std::clamp(q, 0.0, 1.0);
}

std::vector<double> posterior_batch(const LabelModelParams& params, const onto::LabelMatrix& m) {
  std::vector<double> q(m.rows());
  const auto n = static_cast<long long>(m.rows());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    q[static_cast<std::size_t>(i)] = posterior(params, m.row(static_cast<std::size_t>(i)));
  }
  return q;
}

double log_likelihood(const LabelModelParams& params, const onto::LabelMatrix& m) {
  std::vector<double> per_row(m.rows());
  const auto n = static_cast<long long>(m.rows());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    per_row[static_cast<std::size_t>(i)] = row_log_likelihood(params, m.row(static_cast<std::size_t>(i)));
  }
  // Fixed-order reduction keeps the value bit-stable across thread counts.
  double total = 0.0;
  for (double v : per_row) total += v;
  return total;
}

LabelModelParams fit_label_model(const onto::LabelMatrix& m, const EmOptions& opt) {
  const std::size_t n = m.rows();
  const std::size_t cols = m.cols();
  if (n == 0) fail("EmptyTrainingSet", "label matrix has no rows");
  if (cols == 0) fail("InvalidArgument", "label matrix has no columns");
  if (m.non_abstain_total() == 0) fail("DegenerateMatrix", "every knowledge function abstained on every pair");

  LabelModelParams p;
  p.prior = std::clamp(opt.init_prior, opt.prior_min, opt.prior_max);
  p.propensity.assign(cols, 0.0);
  p.accuracy.assign(cols, opt.init_accuracy);
  p.degenerate.assign(cols, false);
  for (const auto& c : m.columns()) p.column_ids.push_back(c.id);

  // Propensities are closed-form and do not depend on the latent labels.
  const double floor = 1.0 / static_cast<double>(n + 2);
  std::vector<std::size_t> voted(cols, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols; ++j) voted[j] += m.at(i, j) != 0;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (voted[j] == 0) {
      p.degenerate[j] = true;
      p.propensity[j] = floor;
      p.accuracy[j] = 0.5;
      p.warnings.push_back("DegenerateMatrix: column " + p.column_ids[j] +
                           " never votes; accuracy pinned at 0.5");
      continue;
    }
    p.propensity[j] =
        std::clamp(static_cast<double>(voted[j]) / static_cast<double>(n), floor, 1.0 - floor);
  }

  double ll_prev = log_likelihood(p, m);
  p.log_likelihood_trace.push_back(ll_prev);

  std::vector<double> agree(cols);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const auto q = posterior_batch(p, m);

    double q_sum = 0.0;
    std::fill(agree.begin(), agree.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      q_sum += q[i];
      for (std::size_t j = 0; j < cols; ++j) {
        const auto v = m.at(i, j);
        if (v > 0) agree[j] += q[i];
        if (v < 0) agree[j] += 1.0 - q[i];
      }
    }
    p.prior = std::clamp(q_sum / static_cast<double>(n), opt.prior_min, opt.prior_max);
    for (std::size_t j = 0; j < cols; ++j) {
      if (p.degenerate[j]) continue;
      p.accuracy[j] = std::clamp(agree[j] / static_cast<double>(voted[j]), opt.accuracy_min,
                                 opt.accuracy_max);
    }

    const double ll = log_likelihood(p, m);
    p.iterations = it + 1;
    p.log_likelihood_trace.push_back(ll);
    if (ll < ll_prev - 1e-9 * (1.0 + std::abs(ll_prev))) {
      fail("EmNotMonotone", "log-likelihood decreased at iteration " + std::to_string(it + 1));
    }
    if (std::abs(ll - ll_prev) < opt.tolerance) {
      p.converged = true;
      break;
    }
    ll_prev = ll;
  }
  return p;
}

Json LabelModelParams::to_json() const {
  Json cols_json = Json::array();
  for (std::size_t j = 0; j < cols(); ++j) {
    Json c = {{"id", column_ids[j]}, {"propensity", propensity[j]}, {"accuracy", accuracy[j]}};
    if (degenerate[j]) c["degenerate"] = true;
    cols_json.push_back(std::move(c));
  }
  return {{"family", "naive-bayes-em"},
          {"prior", prior},
          {"columns", std::move(cols_json)},
          {"iterations", iterations},
          {"converged", converged},
          {"logLikelihood", log_likelihood_trace},
          {"warnings", warnings}};
}

LabelModelParams LabelModelParams::from_json(const Json& doc) {
  LabelModelParams p;
  p.prior = doc.at("prior").get<double>();
  for (const auto& c : doc.at("columns")) {
    p.column_ids.push_back(c.at("id").get<std::string>());
    p.propensity.push_back(c.at("propensity").get<double>());
    p.accuracy.push_back(c.at("accuracy").get<double>());
    p.degenerate.push_back(c.value("degenerate", false));
  }
  p.iterations = doc.value("iterations", 0);
  p.converged = doc.value("converged", false);
  if (doc.contains("logLikelihood")) {
    p.log_likelihood_trace = doc["logLikelihood"].get<std::vector<double>>();
  }
  if (doc.contains("warnings")) p.warnings = doc["warnings"].get<std::vector<std::string>>();
  return p;
}

}  // namespace vforge::ki
