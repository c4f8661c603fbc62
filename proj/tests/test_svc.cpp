#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "che/rng.hpp"
#include "che/svc.hpp"
#include "oracles.hpp"

using namespace che;

TEST_SUITE_BEGIN("svc");

namespace {

FeatureVector feat(double x, double y) {
  FeatureVector f{};
  f[kFeatX] = x;
  f[kFeatY] = y;
  return f;
}

LabeledDataset toy(const std::vector<std::pair<FeatureVector, int>>& rows) {
  LabeledDataset ds;  // identity normalization: raw space == feature space
  for (const auto& [x, y] : rows) {
    ds.rows.push_back(x);
    ds.labels.push_back(y);
  }
  return ds;
}

double training_accuracy(const SvcModel& m, const LabeledDataset& ds) {
  size_t hits = 0;
  for (size_t i = 0; i < ds.size(); ++i) {
    hits += m.predict_raw(ds.rows[i]) == ds.labels[i];
  }
  return static_cast<double>(hits) / ds.size();
}

void check_dual_feasibility(const SvcModel& m, double c) {
  double sum = 0.0;
  bool has_pos = false, has_neg = false;
  for (double coef : m.dual_coef) {
    CHECK(std::abs(coef) <= c + 1e-9);
    sum += coef;
    (coef > 0 ? has_pos : has_neg) = true;
  }
  CHECK(std::abs(sum) <= 1e-3);
  CHECK(has_pos);
  CHECK(has_neg);
}

}  // namespace

TEST_CASE("decision_value closed forms") {
  SvcModel m;
  m.bias = 0.37;
  m.gamma = 1.0;
  CHECK(m.decision_value(feat(1.0, 2.0)) == 0.37);

  m.bias = 0.0;
  m.support_vectors.push_back(feat(0.5, -0.25));
  m.dual_coef.push_back(1.0);
  CHECK(m.decision_value(feat(0.5, -0.25)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("decision_value matches an independent kernel sum") {
  Rng rng(8);
  SvcModel m;
  m.gamma = 0.73;
  m.bias = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    FeatureVector sv;
    for (auto& v : sv) v = rng.uniform(-2.0, 2.0);
    m.support_vectors.push_back(sv);
    m.dual_coef.push_back(rng.uniform(-3.0, 3.0));
  }
  for (int trial = 0; trial < 50; ++trial) {
    FeatureVector x;
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    double expected = m.bias;
    for (size_t i = 0; i < m.support_vectors.size(); ++i) {
      double d2 = 0.0;
      for (int j = 0; j < kFeatureCount; ++j) {
        const double d = m.support_vectors[i][j] - x[j];
        d2 += d * d;
      }
      expected += m.dual_coef[i] * std::exp(-m.gamma * d2);
    }
    CHECK(m.decision_value(x) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("decision_value is invariant under support vector permutation") {
  Rng rng(21);
  SvcModel m;
  m.gamma = 1.1;
  for (int i = 0; i < 8; ++i) {
    m.support_vectors.push_back(feat(rng.uniform(), rng.uniform()));
    m.dual_coef.push_back(rng.uniform(-1.0, 1.0));
  }
  SvcModel shuffled = m;
  std::reverse(shuffled.support_vectors.begin(), shuffled.support_vectors.end());
  std::reverse(shuffled.dual_coef.begin(), shuffled.dual_coef.end());
  for (int t = 0; t < 20; ++t) {
    const FeatureVector x = feat(rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 2.0));
    CHECK(m.decision_value(x) == doctest::Approx(shuffled.decision_value(x)).epsilon(1e-12));
  }
}

TEST_CASE("two separable points put the boundary at the midpoint") {
  const LabeledDataset ds = toy({{feat(-1.0, 0.0), 0}, {feat(1.0, 0.0), 1}});
  const SvcModel m = train(ds, 10.0, 0.6);
  CHECK(m.train_report.converged);
  CHECK(m.support_vectors.size() == 2);
  CHECK(std::abs(m.decision_value(feat(0.0, 0.0))) < 1e-3);
  CHECK(m.decision_value(feat(1.0, 0.0)) > 0.0);   // covered side is positive
  CHECK(m.decision_value(feat(-1.0, 0.0)) < 0.0);  // hole side is negative
}

TEST_CASE("xor becomes separable under the rbf kernel") {
  const LabeledDataset ds = toy({{feat(0.0, 0.0), 0},
                                 {feat(1.0, 1.0), 0},
                                 {feat(0.0, 1.0), 1},
                                 {feat(1.0, 0.0), 1}});
  const SvcModel m = train(ds, 10.0, 1.0);
  CHECK(m.train_report.converged);
  CHECK(training_accuracy(m, ds) == 1.0);
  check_dual_feasibility(m, 10.0);
}

TEST_CASE("ring versus core reaches 98 percent training accuracy") {
  Rng rng(14);
  std::vector<std::pair<FeatureVector, int>> rows;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    const double r_core = 0.8 * std::sqrt(rng.uniform());
    rows.push_back({feat(r_core * std::cos(a), r_core * std::sin(a)), 0});
    const double b = rng.uniform(0.0, 2.0 * M_PI);
    const double r_ring = rng.uniform(1.3, 2.0);
    rows.push_back({feat(r_ring * std::cos(b), r_ring * std::sin(b)), 1});
  }
  const LabeledDataset ds = toy(rows);
  const SvcModel m = train(ds, 10.0, 1.0);
  CHECK(m.train_report.converged);
  CHECK(training_accuracy(m, ds) >= 0.98);
  check_dual_feasibility(m, 10.0);
}

TEST_CASE("train rejects single-class input and bad hyperparameters") {
  const LabeledDataset ds = toy({{feat(0.0, 0.0), 1}, {feat(1.0, 0.0), 1}});
  CHECK_THROWS(train(ds, 1.0, 1.0));
  const LabeledDataset ok = toy({{feat(0.0, 0.0), 0}, {feat(1.0, 0.0), 1}});
  CHECK_THROWS(train(ok, -1.0, 1.0));
  CHECK_THROWS(train(ok, 1.0, 0.0));
}

TEST_CASE("exhausting the kernel budget reports non-convergence") {
  Rng rng(2);
  std::vector<std::pair<FeatureVector, int>> rows;
  for (int i = 0; i < 60; ++i) {
    rows.push_back({feat(rng.uniform(), rng.uniform()), i % 2});
  }
  TrainOptions opts;
  opts.max_kernel_evals = 100;  // not even one row of 60
  const SvcModel m = train(toy(rows), 10.0, 2.0, opts);
  CHECK_FALSE(m.train_report.converged);
}

TEST_CASE("cross_validate degenerate grids and tie-breaks") {
  Rng rng(5);
  std::vector<std::pair<FeatureVector, int>> rows;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({feat(rng.normal(-2.0, 0.5), rng.normal(0.0, 0.5)), 0});
    rows.push_back({feat(rng.normal(2.0, 0.5), rng.normal(0.0, 0.5)), 1});
  }
  const LabeledDataset ds = toy(rows);

  const auto single = cross_validate(ds, {3.0}, {0.7}, 3, 1);
  CHECK(single.best_c == 3.0);
  CHECK(single.best_gamma == 0.7);

  const auto dup = cross_validate(ds, {3.0, 3.0}, {0.7, 0.7}, 3, 1);
  CHECK(dup.best_c == 3.0);
  CHECK(dup.best_gamma == 0.7);
  CHECK(dup.scores[0][0] == dup.scores[1][1]);
}

TEST_CASE("cross_validate best cell equals the score argmax") {
  Rng rng(6);
  std::vector<std::pair<FeatureVector, int>> rows;
  for (int i = 0; i < 40; ++i) {
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    rows.push_back({feat(0.5 * std::cos(a), 0.5 * std::sin(a)), 0});
    rows.push_back({feat(2.0 * std::cos(a), 2.0 * std::sin(a)), 1});
  }
  const LabeledDataset ds = toy(rows);
  const auto cv = cross_validate(ds, {0.1, 10.0}, {0.5, 2.0}, 4, 3);

  double best = -1.0;
  double best_c = 0.0, best_gamma = 0.0;
  for (size_t ci = 0; ci < cv.c_grid.size(); ++ci) {
    for (size_t gi = 0; gi < cv.gamma_grid.size(); ++gi) {
      if (cv.scores[ci][gi] > best) {
        best = cv.scores[ci][gi];
        best_c = cv.c_grid[ci];
        best_gamma = cv.gamma_grid[gi];
      }
    }
  }
  CHECK(cv.best_c == best_c);
  CHECK(cv.best_gamma == best_gamma);
}

TEST_CASE("cross_validate needs every fold to hold both classes") {
  const LabeledDataset ds = toy({{feat(0, 0), 0}, {feat(1, 0), 1},
                                 {feat(0, 1), 1}, {feat(1, 1), 1}});
  CHECK_THROWS(cross_validate(ds, {1.0}, {1.0}, 2, 0));
}

TEST_CASE("roc on perfectly separated scores") {
  const std::vector<double> scores{-2.0, -1.5, 1.0, 2.0, 3.0};
  const std::vector<int> labels{0, 0, 1, 1, 1};
  const RocCurve roc = roc_from_scores(scores, labels);
  CHECK(roc.auc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(roc.points.front().tpr == 0.0);
  CHECK(roc.points.front().fpr == 0.0);
  CHECK(roc.points.back().tpr == 1.0);
  CHECK(roc.points.back().fpr == 1.0);
}

TEST_CASE("roc sweep is monotone and auc matches mann-whitney") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 120; ++i) {
      const int y = rng.uniform() < 0.3 ? 0 : 1;
      // Correlated but noisy scores; duplicates exercise tie handling.
      double s = (y == 0 ? -0.6 : 0.6) + rng.normal(0.0, 1.0);
      s = std::round(s * 8.0) / 8.0;
      scores.push_back(s);
      labels.push_back(y);
    }
    const RocCurve roc = roc_from_scores(scores, labels);
    CHECK(roc.auc == doctest::Approx(oracle::mann_whitney_auc(scores, labels)).epsilon(1e-12));
    for (size_t k = 1; k < roc.points.size(); ++k) {
      CHECK(roc.points[k].tpr >= roc.points[k - 1].tpr);
      CHECK(roc.points[k].fpr >= roc.points[k - 1].fpr);
    }
  }
}

TEST_CASE("roc on label-independent scores hovers near one half") {
  Rng rng(44);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 4000; ++i) {
    scores.push_back(rng.normal());
    labels.push_back(rng.uniform() < 0.5 ? 0 : 1);
  }
  const RocCurve roc = roc_from_scores(scores, labels);
  CHECK(roc.auc == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(roc.auc - 0.5) < 0.05);
}

TEST_CASE("auc is invariant under strictly monotone score transforms") {
  Rng rng(55);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 300; ++i) {
    const int y = rng.uniform() < 0.4 ? 0 : 1;
    scores.push_back((y == 0 ? -0.5 : 0.5) + rng.normal());
    labels.push_back(y);
  }
  const double base = roc_from_scores(scores, labels).auc;
  std::vector<double> warped(scores.size());
  std::transform(scores.begin(), scores.end(), warped.begin(),
                 [](double s) { return std::tanh(s) * 3.0 + 1.0; });
  CHECK(roc_from_scores(warped, labels).auc == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("roc requires both classes") {
  CHECK_THROWS(roc_from_scores({1.0, 2.0}, {1, 1}));
}

TEST_CASE("operating_point picks the g-mean corner") {
  RocCurve roc;
  roc.points.push_back({1.0, 0.5, 0.0});
  roc.points.push_back({2.0, 1.0, 1.0});
  CHECK(operating_point(roc) == 1.0);
}

TEST_CASE("operating_point equals a brute-force scan") {
  Rng rng(66);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 150; ++i) {
      const int y = rng.uniform() < 0.35 ? 0 : 1;
      scores.push_back((y == 0 ? -0.4 : 0.4) + rng.normal());
      labels.push_back(y);
    }
    const RocCurve roc = roc_from_scores(scores, labels);
    const double chosen = operating_point(roc);

    double best_g = -1.0, best_fpr = 2.0, best_t = 0.0;
    for (const RocPoint& p : roc.points) {
      const double g = std::sqrt(p.tpr * (1.0 - p.fpr));
      if (g > best_g || (g == best_g && p.fpr < best_fpr)) {
        best_g = g;
        best_fpr = p.fpr;
        best_t = p.threshold;
      }
    }
    CHECK(chosen == best_t);
  }
}

TEST_CASE("metrics formulas and undefined rates") {
  ConfusionMatrix cm{3, 0, 5, 1};
  const DetectionMetrics m = metrics(cm);
  CHECK(*m.tpr == doctest::Approx(0.75));
  CHECK(*m.fpr == doctest::Approx(0.0));
  CHECK(*m.fnr == doctest::Approx(0.25));
  CHECK(*m.accuracy == doctest::Approx(8.0 / 9.0));
  CHECK(*m.gmean == doctest::Approx(std::sqrt(0.75)));

  const DetectionMetrics empty = metrics(ConfusionMatrix{0, 0, 0, 0});
  CHECK_FALSE(empty.tpr.has_value());
  CHECK_FALSE(empty.fpr.has_value());
  CHECK_FALSE(empty.accuracy.has_value());

  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    ConfusionMatrix c{rng.uniform_int(20) + 1, rng.uniform_int(20),
                      rng.uniform_int(20) + 1, rng.uniform_int(20)};
    const DetectionMetrics mm = metrics(c);
    CHECK(*mm.tpr == doctest::Approx(double(c.tp) / (c.tp + c.fn)).epsilon(1e-15));
    CHECK(*mm.fpr == doctest::Approx(double(c.fp) / (c.tn + c.fp)).epsilon(1e-15));
    CHECK(*mm.fnr == doctest::Approx(double(c.fn) / (c.tp + c.fn)).epsilon(1e-15));
  }
}

TEST_CASE("model serialization round-trips decision values") {
  Rng rng(88);
  std::vector<std::pair<FeatureVector, int>> rows;
  for (int i = 0; i < 30; ++i) {
    FeatureVector f;
    for (auto& v : f) v = rng.uniform(-1.0, 1.0);
    rows.push_back({f, i % 2});
  }
  LabeledDataset ds = toy(rows);
  ds.norm = fit_normalization(ds);
  SvcModel m = train(ds, 5.0, 1.3);
  m.decision_threshold = -0.123456789;

  const auto dir = std::filesystem::temp_directory_path() / "che_svc_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.svc").string();
  save_model(m, path);
  const SvcModel loaded = load_model(path);

  CHECK(loaded.gamma == m.gamma);
  CHECK(loaded.penalty_c == m.penalty_c);
  CHECK(loaded.decision_threshold == m.decision_threshold);
  CHECK(loaded.support_vectors.size() == m.support_vectors.size());
  for (int t = 0; t < 50; ++t) {
    FeatureVector x;
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    CHECK(std::abs(loaded.decision_value_raw(x) - m.decision_value_raw(x)) <= 1e-12);
  }
}

TEST_SUITE_END();
