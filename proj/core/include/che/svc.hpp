#ifndef CHE_SVC_HPP
#define CHE_SVC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "che/dataset.hpp"

namespace che {

struct TrainOptions {
  double kkt_tol{1e-3};
  uint64_t max_kernel_evals{1000000};
};

struct TrainReport {
  bool converged{false};
  uint64_t kernel_evals{0};
  uint64_t iterations{0};
  double kkt_violation{0.0};  // max violating pair gap at exit
};

/// RBF-kernel soft-margin support vector classifier.
///
/// Internal label convention: covered (class 1) -> +1, coverage hole
/// (class 0) -> -1 in the dual, so low decision values indicate holes and
/// `decision_value <= decision_threshold` predicts the CH class. The CH class
/// stays the positive class in every reported metric.
struct SvcModel {
  std::vector<FeatureVector> support_vectors;  // normalized feature space
  std::vector<double> dual_coef;               // alpha_i * z_i, z in {-1,+1}
  double bias{0.0};
  double gamma{1.0};
  double penalty_c{1.0};
  double decision_threshold{0.0};
  Normalization norm;
  TrainReport train_report;  // not serialized

  /// f(x) = sum_i coef_i exp(-gamma ||sv_i - x||^2) + bias, x normalized.
  double decision_value(const FeatureVector& normalized_x) const;
  double decision_value_raw(const FeatureVector& raw_x) const {
    return decision_value(norm.apply(raw_x));
  }
  /// 0 (hole) iff decision value <= decision_threshold.
  int predict_raw(const FeatureVector& raw_x) const {
    return decision_value_raw(raw_x) <= decision_threshold ? 0 : 1;
  }
};

/// Solves the soft-margin kernel SVM dual by SMO with second-order working
/// set selection to the given KKT tolerance. Deterministic: ties in the
/// working set resolve to the smallest index. Throws on single-class input;
/// a fit that exhausts max_kernel_evals is returned with
/// train_report.converged == false.
SvcModel train(const LabeledDataset& ds, double penalty_c, double gamma,
               const TrainOptions& opts = {});

struct CrossValidationResult {
  double best_c{0.0};
  double best_gamma{0.0};
  /// scores[ci][gi] = mean validation g-mean for (c_grid[ci], gamma_grid[gi]),
  /// grids sorted ascending.
  std::vector<std::vector<double>> scores;
  std::vector<double> c_grid;
  std::vector<double> gamma_grid;
};

/// Stratified L-fold grid search. Cell score is the mean over folds of the
/// best achievable g-mean on the fold ROC. Ties break toward smaller C, then
/// smaller gamma.
CrossValidationResult cross_validate(const LabeledDataset& ds,
                                     const std::vector<double>& c_grid,
                                     const std::vector<double>& gamma_grid,
                                     int folds, uint64_t seed,
                                     const TrainOptions& opts = {});

struct RocPoint {
  double threshold{0.0};
  double tpr{0.0};
  double fpr{0.0};
};

struct RocCurve {
  std::vector<RocPoint> points;  // threshold ascending, (0,0) .. (1,1)
  double auc{0.0};
};

/// Sweeps the prediction threshold over the sorted unique decision values
/// (plus +-infinity) with the CH class as positive: predicted CH iff
/// decision <= threshold. AUC by trapezoidal integration over (FPR, TPR).
/// Throws on a single-class evaluation set.
RocCurve roc_curve(const SvcModel& model, const LabeledDataset& eval_set);

/// Same sweep over precomputed decision values (labels 0/1, CH positive).
RocCurve roc_from_scores(const std::vector<double>& decision_values,
                         const std::vector<int>& labels);

/// Threshold maximizing g-mean = sqrt(TPR * (1 - FPR)); ties take the point
/// with smaller FPR.
double operating_point(const RocCurve& roc);

struct ConfusionMatrix {
  uint64_t tp{0}, fp{0}, tn{0}, fn{0};  // positive = CH class (label 0)
  uint64_t total() const { return tp + fp + tn + fn; }
};

ConfusionMatrix confusion_at(const SvcModel& model,
                             const LabeledDataset& eval_set, double threshold);

/// Rates with zero denominators come back empty instead of dividing by zero.
struct DetectionMetrics {
  std::optional<double> tpr, fpr, ppv, fnr, accuracy, gmean;
};

DetectionMetrics metrics(const ConfusionMatrix& cm);

/// Versioned plain-text model file ("svcmodel v1"); round-trips decision
/// values exactly (doubles written with 17 significant digits).
void save_model(const SvcModel& model, const std::string& path);
SvcModel load_model(const std::string& path);

}  // namespace che

#endif  // CHE_SVC_HPP
