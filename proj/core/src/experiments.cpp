#include "hyperball/experiments.hpp"

#include <cmath>
#include <map>

#include "hyperball/error.hpp"
#include "hyperball/random.hpp"

namespace hyperball {
namespace {

MixtureModel disc_mixture(std::initializer_list<double> pi,
                          std::initializer_list<std::array<double, 2>> a,
                          std::initializer_list<double> s) {
  std::vector<MoebiusComponent> comps;
  auto ai = a.begin();
  for (double si : s) {
    comps.emplace_back(BallPoint{(*ai)[0], (*ai)[1]}, si);
    ++ai;
  }
  return MixtureModel(std::move(comps), std::vector<double>(pi));
}

MixtureModel ball_mixture(std::initializer_list<double> pi,
                          std::initializer_list<std::array<double, 3>> a,
                          std::initializer_list<double> s) {
  std::vector<MoebiusComponent> comps;
  auto ai = a.begin();
  for (double si : s) {
    comps.emplace_back(BallPoint{(*ai)[0], (*ai)[1], (*ai)[2]}, si);
    ++ai;
  }
  return MixtureModel(std::move(comps), std::vector<double>(pi));
}

double choose2(double v) { return 0.5 * v * (v - 1.0); }

}  // namespace

std::vector<std::string> builtin_names() { return {"A1", "A2", "A3", "B1", "B2"}; }

ExperimentSpec builtin(std::string_view name, std::uint64_t seed) {
  // Disc locations are complex numbers written as (re, im).
  if (name == "A1") {
    return {"A1", 2,
            disc_mixture({3.0 / 10, 3.0 / 10, 1.0 / 4, 3.0 / 20},
                         {{0.0, 0.0}, {0.75, 0.0}, {0.0, -2.0 / 3}, {0.5, 0.5}}, {5, 2, 8, 10}),
            600, seed};
  }
  if (name == "A2") {
    return {"A2", 2,
            disc_mixture({1.0 / 5, 1.0 / 4, 3.0 / 20, 2.0 / 5},
                         {{0.95, 0.0}, {0.9, -0.15}, {0.0, 0.0}, {-0.5, 0.0}}, {7, 9, 4, 1.5}),
            600, seed};
  }
  if (name == "A3") {
    return {"A3", 2,
            disc_mixture({7.0 / 20, 1.0 / 5, 9.0 / 20}, {{0.0, 0.0}, {0.25, 0.0}, {1.0 / 3, -1.0 / 3}},
                         {3, 4, 5}),
            600, seed};
  }
  if (name == "B1") {
    return {"B1", 3,
            ball_mixture({0.3, 0.3, 0.4}, {{0.8, 0, 0}, {0, 0.8, 0}, {0, 0, 0.8}}, {5, 4, 3}), 1500,
            seed};
  }
  if (name == "B2") {
    return {"B2", 3,
            ball_mixture({0.35, 0.25, 0.2, 0.2},
                         {{0, -0.4, 0.4}, {-0.4, -0.2, -0.3}, {0.6, -0.6, 0}, {0, 0, 0.85}},
                         {5, 5, 4, 3}),
            1500, seed};
  }
  throw DomainError("unknown experiment '" + std::string(name) + "'");
}

LabeledDataset generate(const ExperimentSpec& spec) {
  const MixtureModel& model = spec.ground_truth;
  if (model.dim() != spec.dim) throw DimensionError("experiment dimension differs from its model");
  if (spec.sample_count == 0) throw DomainError("experiment sample_count must be positive");
  Eigen::MatrixXd pts(spec.dim, static_cast<Eigen::Index>(spec.sample_count));
  std::vector<int> labels(spec.sample_count);
  const auto& pi = model.mixing();
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    Rng rng(spec.seed, i);
    const double u = rng.uniform();
    int m = 0;
    double cumulative = pi[0];
    while (u >= cumulative && m + 1 < model.size()) cumulative += pi[static_cast<std::size_t>(++m)];
    labels[i] = m;
    pts.col(static_cast<Eigen::Index>(i)) =
        sample_one(model.components()[static_cast<std::size_t>(m)], rng).coords();
  }
  return {PointSet(std::move(pts)), std::move(labels)};
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionError("ARI: label vectors differ in length");
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, v] : joint) index += choose2(v);
  double sum_rows = 0.0;
  for (const auto& [key, v] : rows) sum_rows += choose2(v);
  double sum_cols = 0.0;
  for (const auto& [key, v] : cols) sum_cols += choose2(v);
  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

EMResult as_em_result(const PointSet& points, const MixtureModel& model,
                      double undecided_threshold) {
  Eigen::MatrixXd gamma = e_step(points, model);
  std::vector<bool> undecided = undecided_points(gamma, undecided_threshold);
  return EMResult{model, std::move(gamma), {log_likelihood(points, model)}, std::move(undecided),
                  0, true, 0, std::vector<bool>(static_cast<std::size_t>(model.size()), false), {}};
}

namespace {

std::vector<BallPoint> locations(const MixtureModel& model) {
  std::vector<BallPoint> out;
  for (const auto& c : model.components()) out.push_back(c.location());
  return out;
}

// Maps fitted labels onto truth indices through the matching permutation.
std::vector<int> relabel(std::span<const int> fitted, const std::vector<int>& perm) {
  std::vector<int> inverse(perm.size());
  for (std::size_t t = 0; t < perm.size(); ++t) inverse[static_cast<std::size_t>(perm[t])] = static_cast<int>(t);
  std::vector<int> out(fitted.size());
  for (std::size_t i = 0; i < fitted.size(); ++i) out[i] = inverse[static_cast<std::size_t>(fitted[i])];
  return out;
}

}  // namespace

EvaluationReport evaluate(const EMResult& result, const LabeledDataset& truth,
                          const MixtureModel& truth_model, bool include_undecided) {
  const auto count = truth.points.size();
  if (static_cast<std::size_t>(result.responsibilities.rows()) != count || truth.labels.size() != count) {
    throw DimensionError("evaluate: result and dataset sizes differ");
  }
  if (result.model.size() != truth_model.size()) {
    throw DimensionError("evaluate: fitted and true component counts differ");
  }
  const std::vector<BallPoint> fitted = locations(result.model);
  const std::vector<BallPoint> real = locations(truth_model);
  const std::vector<int> perm = match_by_distance(fitted, real);

  EvaluationReport report;
  for (std::size_t t = 0; t < perm.size(); ++t) {
    const auto f = static_cast<std::size_t>(perm[t]);
    const auto& fc = result.model.components()[f];
    const auto& tc = truth_model.components()[t];
    report.components.push_back(
        {static_cast<int>(t), perm[t], hyperbolic_distance(fc.location(), tc.location()),
         std::abs(result.model.mixing()[f] - truth_model.mixing()[t]),
         std::abs(fc.concentration() - tc.concentration()) / tc.concentration()});
  }
  const std::vector<int> labels = relabel(hard_labels(result.responsibilities), perm);
  std::vector<int> kept_fit;
  std::vector<int> kept_true;
  std::size_t undecided = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const bool gray = i < result.undecided.size() && result.undecided[i];
    undecided += gray ? 1 : 0;
    if (gray && !include_undecided) continue;
    kept_fit.push_back(labels[i]);
    kept_true.push_back(truth.labels[i]);
  }
  report.ari = adjusted_rand_index(kept_fit, kept_true);
  report.scored_points = kept_fit.size();
  report.undecided_fraction = static_cast<double>(undecided) / static_cast<double>(count);
  report.final_value = result.loglik_trace.empty() ? 0.0 : result.loglik_trace.back();
  return report;
}

EvaluationReport evaluate(const KMeansResult& result, const LabeledDataset& truth,
                          const MixtureModel& truth_model) {
  const auto count = truth.points.size();
  if (result.assignments.size() != count || truth.labels.size() != count) {
    throw DimensionError("evaluate: result and dataset sizes differ");
  }
  const std::vector<BallPoint> real = locations(truth_model);
  if (result.barycenters.size() != real.size()) {
    throw DimensionError("evaluate: fitted and true component counts differ");
  }
  const std::vector<int> perm = match_by_distance(result.barycenters, real);
  std::vector<double> proportion(real.size(), 0.0);
  for (int a : result.assignments) proportion[static_cast<std::size_t>(a)] += 1.0 / static_cast<double>(count);

  EvaluationReport report;
  for (std::size_t t = 0; t < perm.size(); ++t) {
    const auto f = static_cast<std::size_t>(perm[t]);
    report.components.push_back({static_cast<int>(t), perm[t],
                                 hyperbolic_distance(result.barycenters[f], real[t]),
                                 std::abs(proportion[f] - truth_model.mixing()[t]), 0.0});
  }
  const std::vector<int> labels = relabel(result.assignments, perm);
  report.ari = adjusted_rand_index(labels, truth.labels);
  report.scored_points = count;
  report.final_value = result.objective;
  return report;
}

}  // namespace hyperball
