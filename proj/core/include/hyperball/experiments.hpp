#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperball/clustering.hpp"

namespace hyperball {

struct ExperimentSpec {
  std::string name;
  int dim = 2;
  MixtureModel ground_truth;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Names of the built-in experiments: A1, A2, A3 (disc) and B1, B2 (B^3).
std::vector<std::string> builtin_names();

/// Ground-truth mixture of a built-in experiment with the default sample
/// size (600 in the disc, 1500 in B^3). Throws DomainError on unknown names.
ExperimentSpec builtin(std::string_view name, std::uint64_t seed = 0);

struct LabeledDataset {
  PointSet points;
  std::vector<int> labels;
};

/// Point i draws its component from the mixing law and then its location
/// from that component, all from generator stream (seed, i).
LabeledDataset generate(const ExperimentSpec& spec);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

struct ComponentError {
  int truth_index = 0;
  int fitted_index = 0;
  double location_distance = 0.0;        // hyperbolic
  double mixing_error = 0.0;             // |pi_fit - pi_true|
  double concentration_rel_error = 0.0;  // |s_fit - s_true| / s_true
};

struct EvaluationReport {
  std::vector<ComponentError> components;  // ordered by truth index
  double ari = 0.0;
  double undecided_fraction = 0.0;
  std::size_t scored_points = 0;  // points entering the ARI
  double final_value = 0.0;       // EM log-likelihood or k-means objective
};

/// Matches fitted components to the truth by minimum total hyperbolic
/// distance, then scores hard labels against the true labels. Undecided
/// points are left out of the ARI unless include_undecided is set.
EvaluationReport evaluate(const EMResult& result, const LabeledDataset& truth,
                          const MixtureModel& truth_model, bool include_undecided = false);

/// k-means variant; mixing and concentration errors are left at zero, except
/// that mixing_error compares cluster proportions with the true mixing law.
EvaluationReport evaluate(const KMeansResult& result, const LabeledDataset& truth,
                          const MixtureModel& truth_model);

/// Wraps a fixed model as an EM result (responsibilities from one E-step).
EMResult as_em_result(const PointSet& points, const MixtureModel& model,
                      double undecided_threshold = 0.5);

}  // namespace hyperball
