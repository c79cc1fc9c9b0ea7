#include "hyperball/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "hyperball/error.hpp"

namespace hyperball {
namespace {

TEST(Builtin, Names) {
  EXPECT_EQ(builtin_names(), (std::vector<std::string>{"A1", "A2", "A3", "B1", "B2"}));
  EXPECT_THROW(builtin("C9"), DomainError);
}

TEST(Builtin, GroundTruthValues) {
  const auto a1 = builtin("A1");
  EXPECT_EQ(a1.dim, 2);
  EXPECT_EQ(a1.sample_count, 600u);
  EXPECT_EQ(a1.ground_truth.mixing(), (std::vector<double>{0.3, 0.3, 0.25, 0.15}));
  EXPECT_NEAR(a1.ground_truth.components()[2].location()[1], -2.0 / 3, 1e-16);
  EXPECT_EQ(a1.ground_truth.components()[3].concentration(), 10.0);

  const auto a2 = builtin("A2");
  EXPECT_EQ(a2.ground_truth.components()[3].concentration(), 1.5);
  EXPECT_EQ(a2.ground_truth.components()[1].location()[1], -0.15);

  const auto a3 = builtin("A3");
  EXPECT_EQ(a3.ground_truth.components()[0].location().norm(), 0.0);
  EXPECT_EQ(a3.ground_truth.mixing(), (std::vector<double>{0.35, 0.2, 0.45}));

  const auto b1 = builtin("B1");
  EXPECT_EQ(b1.dim, 3);
  EXPECT_EQ(b1.sample_count, 1500u);
  EXPECT_EQ(b1.ground_truth.components()[2].concentration(), 3.0);
  EXPECT_EQ(b1.ground_truth.components()[2].location()[2], 0.8);

  const auto b2 = builtin("B2");
  EXPECT_EQ(b2.ground_truth.size(), 4);
  EXPECT_EQ(b2.ground_truth.components()[3].location()[2], 0.85);
}

TEST(Generate, SingleComponentLabels) {
  ExperimentSpec spec{"one", 2,
                      MixtureModel({MoebiusComponent(BallPoint{0.1, 0.2}, 4.0)}, {1.0}), 200, 3};
  const auto data = generate(spec);
  EXPECT_EQ(data.points.size(), 200u);
  EXPECT_TRUE(std::all_of(data.labels.begin(), data.labels.end(), [](int l) { return l == 0; }));
}

TEST(Generate, ComponentFrequencies) {
  ExperimentSpec spec = builtin("A1", 9);
  spec.sample_count = 10000;
  const auto data = generate(spec);
  for (int m = 0; m < 4; ++m) {
    const double freq = std::count(data.labels.begin(), data.labels.end(), m) / 10000.0;
    EXPECT_NEAR(freq, spec.ground_truth.mixing()[m], 0.02);
  }
}

TEST(Generate, DeterministicPerSeed) {
  const auto a = generate(builtin("B2", 4)), b = generate(builtin("B2", 4)), c = generate(builtin("B2", 5));
  EXPECT_EQ(a.points.matrix(), b.points.matrix());
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.points.matrix(), c.points.matrix());
}

TEST(Generate, PerComponentBarycentersNearTruth) {
  ExperimentSpec spec = builtin("B1", 11);
  spec.sample_count = 3000;
  const auto data = generate(spec);
  for (int m = 0; m < 3; ++m) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (data.labels[i] == m) idx.push_back(static_cast<Eigen::Index>(i));
    }
    Eigen::MatrixXd pts(3, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = data.points.matrix().col(idx[i]);
    EXPECT_LT(hyperbolic_distance(barycenter(WeightedDataset::unit(PointSet(pts))),
                                  spec.ground_truth.components()[m].location()),
              0.1);
  }
}

TEST(AdjustedRandIndex, Examples) {
  const std::vector<int> a{0, 0, 1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, a), 1.0);
  const std::vector<int> relabelled{2, 2, 0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, relabelled), 1.0);
  // Hand-computed: contingency [[1,1],[1,1]] gives index 0 and expected 2/3 over 2.
  const std::vector<int> x{0, 0, 1, 1}, y{0, 1, 0, 1};
  EXPECT_NEAR(adjusted_rand_index(x, y), -0.5, 1e-15);
  EXPECT_THROW(adjusted_rand_index(x, a), DimensionError);
}

TEST(AdjustedRandIndex, RandomAssignmentIsCentred) {
  Rng rng(61);
  std::vector<int> truth(10000), guess(10000);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = static_cast<int>(rng.below(4));
    guess[i] = static_cast<int>(rng.below(4));
  }
  EXPECT_NEAR(adjusted_rand_index(truth, guess), 0.0, 0.02);
}

TEST(Evaluate, GroundTruthRoundTrip) {
  ExperimentSpec spec = builtin("B1", 13);
  spec.sample_count = 3000;
  const auto data = generate(spec);
  const EMResult truth_fit = as_em_result(data.points, spec.ground_truth);
  const auto report = evaluate(truth_fit, data, spec.ground_truth, true);
  for (const auto& c : report.components) {
    EXPECT_EQ(c.truth_index, c.fitted_index);
    EXPECT_EQ(c.location_distance, 0.0);
    EXPECT_EQ(c.mixing_error, 0.0);
    EXPECT_EQ(c.concentration_rel_error, 0.0);
  }
  EXPECT_GT(report.ari, 0.9);
  EXPECT_EQ(report.scored_points, 3000u);
}

TEST(Evaluate, HardenedTruthScoresOne) {
  const auto spec = builtin("A3", 2);
  const auto data = generate(spec);
  KMeansResult hard;
  hard.assignments = data.labels;
  for (const auto& c : spec.ground_truth.components()) hard.barycenters.push_back(c.location());
  EXPECT_DOUBLE_EQ(evaluate(hard, data, spec.ground_truth).ari, 1.0);
}

TEST(Evaluate, PaperBandExample) {
  // A fitted concentration of 6.96783 against a true 8 is a 12.9% error.
  const MoebiusComponent truth(BallPoint{0.0, -2.0 / 3}, 8.0), fit(BallPoint{0.0, -2.0 / 3}, 6.96783);
  const PointSet pts(truth.location().coords());
  LabeledDataset data{pts, {0}};
  const auto report = evaluate(as_em_result(pts, MixtureModel({fit}, {1.0})), data, MixtureModel({truth}, {1.0}));
  EXPECT_NEAR(report.components[0].concentration_rel_error, 0.129, 5e-4);
}

TEST(Evaluate, UndecidedExcludedByDefault) {
  const auto spec = builtin("A3", 3);
  const auto data = generate(spec);
  const EMResult res = as_em_result(data.points, spec.ground_truth);
  const auto excluded = evaluate(res, data, spec.ground_truth);
  const auto included = evaluate(res, data, spec.ground_truth, true);
  const auto undecided = std::count(res.undecided.begin(), res.undecided.end(), true);
  EXPECT_GT(undecided, 0);
  EXPECT_EQ(excluded.scored_points + static_cast<std::size_t>(undecided), included.scored_points);
  EXPECT_NEAR(excluded.undecided_fraction, static_cast<double>(undecided) / data.points.size(), 1e-15);
}

}  // namespace
}  // namespace hyperball
