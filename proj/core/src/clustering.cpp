#include "hyperball/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hyperball/error.hpp"
#include "hyperball/random.hpp"

namespace hyperball {
namespace {

// R^2 = |x - a|^2 / rho(x, a), monotone in the hyperbolic distance.
double squared_pseudo_distance(const double* x, const double* a, double x2, double a2, int n) {
  double diff2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = x[k] - a[k];
    diff2 += d * d;
  }
  return diff2 / (diff2 + (1.0 - a2) * (1.0 - x2));
}

double distance_raw(const double* x, const double* a, double x2, double a2, int n) {
  const double r = std::sqrt(squared_pseudo_distance(x, a, x2, a2, n));
  if (!(r < 1.0)) throw BoundaryError("points too close to the boundary");
  return std::atanh(r);
}

void require_dims(const PointSet& points, std::span<const BallPoint> centers) {
  for (const auto& c : centers) {
    if (c.dim() != points.dim()) throw DimensionError("center dimension differs from data");
  }
}

// Reassign empty clusters to the point farthest from its own center.
int repair_empty_clusters(const PointSet& points, std::vector<BallPoint>& centers,
                          std::vector<int>& assignments) {
  const int k = static_cast<int>(centers.size());
  int repairs = 0;
  for (int guard = 0; guard < k; ++guard) {
    std::vector<int> counts(k, 0);
    for (int a : assignments) ++counts[a];
    const auto empty = std::find(counts.begin(), counts.end(), 0);
    if (empty == counts.end()) break;
    const int j = static_cast<int>(empty - counts.begin());
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[assignments[i]] <= 1) continue;  // do not empty another cluster
      const auto& c = centers[assignments[i]];
      const double d = squared_pseudo_distance(points.col(i).data(), c.coords().data(),
                                               points.col(i).squaredNorm(), c.squared_norm(),
                                               points.dim());
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far_d < 0.0) break;
    centers[j] = points.point(far);
    assignments = assign(points, centers);
    ++repairs;
  }
  return repairs;
}

double logsumexp_row(const Eigen::MatrixXd& m, Eigen::Index i) {
  const double top = m.row(i).maxCoeff();
  if (!std::isfinite(top)) {
    throw NumericalError("all component densities underflow at point " + std::to_string(i));
  }
  return top + std::log((m.row(i).array() - top).exp().sum());
}

MoebiusComponent default_init_law(int dim) {
  return MoebiusComponent(BallPoint::origin(dim), static_cast<double>(dim));
}

double squared_distance_sum(const PointSet& points, const BallPoint& center) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = hyperbolic_distance(points.point(i), center);
    sum += d * d;
  }
  return sum;
}

}  // namespace

MixtureModel::MixtureModel(std::vector<MoebiusComponent> components, std::vector<double> mixing)
    : components_(std::move(components)), mixing_(std::move(mixing)) {
  if (components_.empty()) throw DomainError("mixture needs at least one component");
  if (components_.size() != mixing_.size()) {
    throw DimensionError("mixture: components and mixing probabilities differ in count");
  }
  const int n = components_.front().dim();
  double total = 0.0;
  for (std::size_t m = 0; m < components_.size(); ++m) {
    if (components_[m].dim() != n) throw DimensionError("mixture components of mixed dimension");
    if (!(mixing_[m] >= 0.0)) throw DomainError("mixing probabilities must be nonnegative");
    total += mixing_[m];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("mixing probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

std::vector<int> assign(const PointSet& points, std::span<const BallPoint> centers) {
  if (centers.empty()) throw DomainError("assign needs at least one center");
  require_dims(points, centers);
  const int n = points.dim();
  std::vector<int> out(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double* x = points.col(i).data();
    const double x2 = points.col(i).squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double d = squared_pseudo_distance(x, centers[j].coords().data(), x2,
                                               centers[j].squared_norm(), n);
      if (d < best) {
        best = d;
        out[i] = static_cast<int>(j);
      }
    }
  }
  return out;
}

double kmeans_objective(const PointSet& points, std::span<const BallPoint> centers,
                        std::span<const int> assignments) {
  if (assignments.size() != points.size()) throw DimensionError("assignment count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& c = centers[static_cast<std::size_t>(assignments[i])];
    const double d = distance_raw(points.col(i).data(), c.coords().data(),
                                  points.col(i).squaredNorm(), c.squared_norm(), points.dim());
    sum += d * d;
  }
  return sum;
}

KMeansResult kmeans_from(const PointSet& points, std::vector<BallPoint> centers,
                         const KMeansOptions& opts) {
  if (points.empty()) throw DomainError("k-means on an empty point set");
  const int k = static_cast<int>(centers.size());
  if (k < 1) throw DomainError("k must be at least 1");
  if (static_cast<std::size_t>(k) > points.size()) {
    throw DomainError("k = " + std::to_string(k) + " exceeds the number of points");
  }
  require_dims(points, centers);

  KMeansResult result;
  std::vector<int> labels = assign(points, centers);
  result.empty_cluster_repairs += repair_empty_clusters(points, centers, labels);
  result.objective_trace.push_back(kmeans_objective(points, centers, labels));

  for (int it = 1; it <= opts.max_iterations; ++it) {
    for (int j = 0; j < k; ++j) {
      std::vector<Eigen::Index> members;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == j) members.push_back(static_cast<Eigen::Index>(i));
      }
      Eigen::MatrixXd cluster(points.dim(), static_cast<Eigen::Index>(members.size()));
      for (std::size_t m = 0; m < members.size(); ++m) {
        cluster.col(static_cast<Eigen::Index>(m)) = points.matrix().col(members[m]);
      }
      BarycenterOptions bopts = opts.barycenter;
      bopts.initial = centers[j];
      const PointSet members_set(std::move(cluster));
      BallPoint candidate = barycenter(WeightedDataset::unit(members_set), bopts);
      if (!opts.keep_better_center ||
          squared_distance_sum(members_set, candidate) <= squared_distance_sum(members_set, centers[j])) {
        centers[j] = std::move(candidate);
      }
    }
    std::vector<int> next = assign(points, centers);
    result.empty_cluster_repairs += repair_empty_clusters(points, centers, next);
    result.objective_trace.push_back(kmeans_objective(points, centers, next));
    result.iterations = it;
    const bool stable = next == labels;
    labels = std::move(next);
    if (stable) {
      result.converged = true;
      break;
    }
  }
  result.objective = result.objective_trace.back();
  result.barycenters = std::move(centers);
  result.assignments = std::move(labels);
  return result;
}

KMeansResult kmeans(const PointSet& points, int k, const KMeansOptions& opts) {
  if (points.empty()) throw DomainError("k-means on an empty point set");
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) {
    throw DomainError("k must lie in [1, N]");
  }
  const MoebiusComponent law = opts.init ? *opts.init : default_init_law(points.dim());
  if (law.dim() != points.dim()) throw DimensionError("k-means init law dimension");
  std::optional<KMeansResult> best;
  std::vector<std::vector<double>> traces;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(r)));
    std::vector<BallPoint> centers;
    centers.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) centers.push_back(sample_one(law, rng));
    KMeansResult run = kmeans_from(points, std::move(centers), opts);
    traces.push_back(run.objective_trace);
    if (!best || run.objective < best->objective) best = std::move(run);
  }
  best->restart_traces = std::move(traces);
  return std::move(*best);
}

Eigen::MatrixXd log_joint(const PointSet& points, const MixtureModel& model) {
  if (points.dim() != model.dim()) throw DimensionError("model and data dimensions differ");
  const int n = points.dim();
  const int k = model.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), k);
  for (int m = 0; m < k; ++m) {
    const auto& comp = model.components()[static_cast<std::size_t>(m)];
    const double s = comp.concentration();
    const double base = std::log(model.mixing()[static_cast<std::size_t>(m)]) +
                        log_normalizer(n, s);
    const double* a = comp.location().coords().data();
    const double a2 = comp.location().squared_norm();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double lr = detail::log_conformal_ratio(points.col(i).data(), a,
                                                    points.col(i).squaredNorm(), a2, n);
      out(static_cast<Eigen::Index>(i), m) = base + s * std::min(lr, 0.0);
    }
  }
  return out;
}

namespace {

struct EStep {
  Eigen::MatrixXd responsibilities;
  double log_likelihood;
};

EStep e_step_with_likelihood(const PointSet& points, const MixtureModel& model) {
  Eigen::MatrixXd lj = log_joint(points, model);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < lj.rows(); ++i) {
    const double lse = logsumexp_row(lj, i);
    ll += lse;
    lj.row(i) = (lj.row(i).array() - lse).exp();
    lj.row(i) /= lj.row(i).sum();
  }
  return {std::move(lj), ll};
}

}  // namespace

Eigen::MatrixXd e_step(const PointSet& points, const MixtureModel& model) {
  return e_step_with_likelihood(points, model).responsibilities;
}

double log_likelihood(const PointSet& points, const MixtureModel& model) {
  const Eigen::MatrixXd lj = log_joint(points, model);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < lj.rows(); ++i) ll += logsumexp_row(lj, i);
  return ll;
}

MixtureModel m_step(const PointSet& points, const Eigen::MatrixXd& responsibilities,
                    const MStepOptions& opts, const MixtureModel* warm_start) {
  const auto count = static_cast<Eigen::Index>(points.size());
  if (responsibilities.rows() != count) throw DimensionError("responsibility rows != points");
  const int k = static_cast<int>(responsibilities.cols());
  if (k < 1) throw DomainError("responsibilities need at least one column");
  if (warm_start && warm_start->size() != k) throw DimensionError("warm start size mismatch");
  const int n = points.dim();

  std::vector<MoebiusComponent> comps;
  std::vector<double> mixing;
  comps.reserve(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) {
    const Eigen::VectorXd w = responsibilities.col(m);
    const double mass = w.sum();
    if (!(mass >= opts.min_mass)) {
      throw CollapseError("component " + std::to_string(m) + " collapsed (mass " +
                              std::to_string(mass) + ")",
                          0);
    }
    mixing.push_back(mass / static_cast<double>(count));
    const WeightedDataset data(points, w);
    BarycenterOptions bopts = opts.barycenter;
    if (warm_start) bopts.initial = warm_start->components()[static_cast<std::size_t>(m)].location();
    BallPoint a = barycenter(data, bopts);
    const double h = potential(a, data);
    const double s = solve_concentration(n, mass, h, ConcentrationMethod::kAuto, opts.s_max);
    comps.emplace_back(std::move(a), s);
  }
  // Renormalise so the mixture invariant holds to rounding.
  const double total = std::accumulate(mixing.begin(), mixing.end(), 0.0);
  for (double& p : mixing) p /= total;
  return MixtureModel(std::move(comps), std::move(mixing));
}

MixtureModel initial_mixture(int dim, int k, Rng& rng) {
  const MoebiusComponent law = default_init_law(dim);
  std::vector<MoebiusComponent> comps;
  for (int m = 0; m < k; ++m) {
    BallPoint a = sample_one(law, rng);
    comps.emplace_back(std::move(a), dim - 1.0 + rng.exponential() + 1e-6);
  }
  return MixtureModel(std::move(comps), std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

std::vector<bool> undecided_points(const Eigen::MatrixXd& responsibilities, double threshold) {
  std::vector<bool> out(static_cast<std::size_t>(responsibilities.rows()));
  for (Eigen::Index i = 0; i < responsibilities.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = responsibilities.row(i).maxCoeff() < threshold;
  }
  return out;
}

std::vector<int> hard_labels(const Eigen::MatrixXd& responsibilities) {
  std::vector<int> out(static_cast<std::size_t>(responsibilities.rows()));
  for (Eigen::Index i = 0; i < responsibilities.rows(); ++i) {
    Eigen::Index arg = 0;
    responsibilities.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

EMResult em_from(const PointSet& points, MixtureModel model, const EmOptions& opts) {
  if (points.empty()) throw DomainError("EM on an empty point set");
  if (static_cast<std::size_t>(model.size()) > points.size()) {
    throw DomainError("EM needs at least as many points as components");
  }
  const MStepOptions mopts{opts.barycenter, opts.s_max};
  std::vector<double> trace;
  EStep e = e_step_with_likelihood(points, model);
  trace.push_back(e.log_likelihood);
  int it = 0;
  bool converged = false;
  while (it < opts.max_iterations) {
    MixtureModel next = m_step(points, e.responsibilities, mopts, &model);
    EStep e_next = e_step_with_likelihood(points, next);
    ++it;
    const double gain = e_next.log_likelihood - trace.back();
    model = std::move(next);
    e = std::move(e_next);
    trace.push_back(e.log_likelihood);
    if (gain < opts.tolerance * std::abs(e.log_likelihood)) {
      converged = true;
      break;
    }
  }
  std::vector<bool> saturated;
  for (const auto& c : model.components()) saturated.push_back(c.concentration() >= opts.s_max);
  std::vector<bool> undecided = undecided_points(e.responsibilities, opts.undecided_threshold);
  return EMResult{std::move(model), std::move(e.responsibilities), std::move(trace),
                  std::move(undecided), it, converged, 0, std::move(saturated), {}};
}

EMResult em_fit(const PointSet& points, int k, const EmOptions& opts) {
  if (points.empty()) throw DomainError("EM on an empty point set");
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) {
    throw DomainError("k must lie in [1, N]");
  }
  std::optional<EMResult> best;
  std::vector<std::vector<double>> traces;
  int collapses = 0;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    const std::uint64_t restart_seed = derive_seed(opts.seed, static_cast<std::uint64_t>(r));
    for (int attempt = 0; attempt <= opts.max_collapse_restarts; ++attempt) {
      Rng rng(restart_seed, static_cast<std::uint64_t>(attempt));
      try {
        EMResult run = em_from(points, initial_mixture(points.dim(), k, rng), opts);
        traces.push_back(run.loglik_trace);
        if (!best || run.loglik_trace.back() > best->loglik_trace.back()) best = std::move(run);
        break;
      } catch (const CollapseError&) {
        ++collapses;
      }
    }
  }
  if (!best) {
    throw CollapseError("every EM initialisation collapsed a component", collapses);
  }
  best->collapse_restarts = collapses;
  best->restart_traces = std::move(traces);
  return std::move(*best);
}

std::vector<int> match_by_distance(std::span<const BallPoint> fitted,
                                   std::span<const BallPoint> truth) {
  const std::size_t k = truth.size();
  if (fitted.size() != k) throw DimensionError("cannot match component sets of different size");
  if (k > 8) throw DomainError("exhaustive matching supports k <= 8");
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (std::size_t f = 0; f < k; ++f)
    for (std::size_t t = 0; t < k; ++t) cost[f][t] = hyperbolic_distance(fitted[f], truth[t]);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t t = 0; t < k; ++t) c += cost[static_cast<std::size_t>(perm[t])][t];
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace hyperball
