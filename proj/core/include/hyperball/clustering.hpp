#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hyperball/barycenter.hpp"
#include "hyperball/geometry.hpp"
#include "hyperball/moebius_dist.hpp"

namespace hyperball {

/// k Mobius components of one dimension with mixing probabilities summing
/// to one (within 1e-12).
class MixtureModel {
 public:
  MixtureModel(std::vector<MoebiusComponent> components, std::vector<double> mixing);

  const std::vector<MoebiusComponent>& components() const noexcept { return components_; }
  const std::vector<double>& mixing() const noexcept { return mixing_; }
  int size() const noexcept { return static_cast<int>(components_.size()); }
  int dim() const noexcept { return components_.front().dim(); }

 private:
  std::vector<MoebiusComponent> components_;
  std::vector<double> mixing_;
};

// ---------------------------------------------------------------------------
// k-means

/// Index of the nearest center for every point; ties go to the lowest index.
std::vector<int> assign(const PointSet& points, std::span<const BallPoint> centers);

/// sum_i d_hyp(x_i, c_{assignment_i})^2.
double kmeans_objective(const PointSet& points, std::span<const BallPoint> centers,
                        std::span<const int> assignments);

struct KMeansOptions {
  int max_iterations = 100;
  std::uint64_t seed = 0;
  /// Law of the initial centers; Moeb_n(0, n) when empty (Moeb_2(0, 2) in
  /// the disc).
  std::optional<MoebiusComponent> init;
  int restarts = 5;
  BarycenterOptions barycenter;
  /// The conformal barycenter does not minimise a cluster's sum of squared
  /// distances; when set, a cluster keeps its previous center if the
  /// barycenter would raise that sum, so the objective never increases.
  bool keep_better_center = true;
};

struct KMeansResult {
  std::vector<BallPoint> barycenters;
  std::vector<int> assignments;
  double objective = 0.0;
  /// Objective after the initial assignment and after every iteration.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  int empty_cluster_repairs = 0;
  /// objective_trace of every restart, in restart order (kmeans only).
  std::vector<std::vector<double>> restart_traces;
};

/// Lloyd iterations from the given centers until the assignment repeats.
KMeansResult kmeans_from(const PointSet& points, std::vector<BallPoint> centers,
                         const KMeansOptions& opts = {});

/// Best of opts.restarts seeded runs by final objective.
KMeansResult kmeans(const PointSet& points, int k, const KMeansOptions& opts = {});

// ---------------------------------------------------------------------------
// EM for Mobius mixtures

/// N x k matrix of log(pi_m p(x_i; a_m, s_m)).
Eigen::MatrixXd log_joint(const PointSet& points, const MixtureModel& model);

/// Posterior responsibilities (N x k), rows summing to one.
Eigen::MatrixXd e_step(const PointSet& points, const MixtureModel& model);

/// sum_i log sum_m pi_m p(x_i; a_m, s_m).
double log_likelihood(const PointSet& points, const MixtureModel& model);

struct MStepOptions {
  BarycenterOptions barycenter;
  double s_max = 1e4;
  /// Vanishing-mass threshold on sum_i gamma_im.
  double min_mass = 1e-10;
};

/// pi_m = mean responsibility, a_m = gamma-weighted barycenter over all
/// points, s_m = weighted MLE clamped to (n-1, s_max]. `warm_start`, when
/// given, seeds the barycenter solves. Throws CollapseError on a vanished
/// component.
MixtureModel m_step(const PointSet& points, const Eigen::MatrixXd& responsibilities,
                    const MStepOptions& opts = {},
                    const MixtureModel* warm_start = nullptr);

struct EmOptions {
  int max_iterations = 500;
  double tolerance = 1e-8;  // relative log-likelihood improvement
  std::uint64_t seed = 0;
  double s_max = 1e4;
  int restarts = 5;
  /// Fresh initialisations allowed per restart after component collapse.
  int max_collapse_restarts = 10;
  double undecided_threshold = 0.5;
  BarycenterOptions barycenter;
};

struct EMResult {
  MixtureModel model;
  Eigen::MatrixXd responsibilities;
  std::vector<double> loglik_trace;
  std::vector<bool> undecided;
  int iterations = 0;
  bool converged = false;
  int collapse_restarts = 0;
  /// Components whose concentration hit s_max.
  std::vector<bool> saturated;
  /// loglik_trace of every completed restart, in restart order (em_fit only).
  std::vector<std::vector<double>> restart_traces;
};

/// Seeded initialisation: pi = 1/k, a_m ~ Moeb_n(0, n), s_m = n - 1 + X with
/// X ~ Exp(1).
MixtureModel initial_mixture(int dim, int k, Rng& rng);

/// EM iterations from a given model.
EMResult em_from(const PointSet& points, MixtureModel initial, const EmOptions& opts = {});

/// Best of opts.restarts seeded runs by final log-likelihood.
EMResult em_fit(const PointSet& points, int k, const EmOptions& opts = {});

/// Undecided flags: max_m gamma_im < threshold.
std::vector<bool> undecided_points(const Eigen::MatrixXd& responsibilities, double threshold);

/// Hard labels: argmax_m gamma_im (lowest index on ties).
std::vector<int> hard_labels(const Eigen::MatrixXd& responsibilities);

/// Permutation p minimising sum_j d_hyp(fitted[p[j]], truth[j]), searched
/// exhaustively (k <= 8).
std::vector<int> match_by_distance(std::span<const BallPoint> fitted,
                                   std::span<const BallPoint> truth);

}  // namespace hyperball
