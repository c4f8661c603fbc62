#ifndef CHE_PIPELINE_HPP
#define CHE_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "che/ch_map.hpp"
#include "che/replanner.hpp"
#include "che/scenario.hpp"

namespace che {

/// Training-stage failures (non-convergence) map to CLI exit code 4.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything the end-to-end pipeline produced, kept in memory for callers
/// that want to assert on it; run_pipeline also writes the artifact files.
struct RunResult {
  GridMap layout;
  RssMap rss_pl_map;
  RssMap rss_sf_map;
  DatasetSplits splits;
  CrossValidationResult cv;
  SvcModel model;
  RocCurve validation_roc;  // source of the model's decision threshold
  RocCurve test_roc;
  double test_operating_threshold{0.0};
  ConfusionMatrix test_confusion;
  ChMap chmap;
  PrmGraph prm_initial;
  PrmGraph prm_chi;  // roadmap on chi(k); empty when no event was detected
  Trajectory initial_trajectory;
  std::optional<CoverageHoleEvent> event;
  SsprResult sspr_result;
  FollowTrace follow_trace;
  /// True when the sampled dataset came out single-class and the classifier
  /// degenerated to a constant prediction (no CV, no ROC artifacts).
  bool degenerate_classifier{false};
};

/// Stages shared by `run` and `sweep-lat`: maps -> dataset -> model -> chi ->
/// initial trajectory -> local detection.
struct PipelinePrefix {
  GridMap layout;
  RssMap rss_pl_map;
  RssMap rss_sf_map;
  DatasetSplits splits;
  CrossValidationResult cv;
  SvcModel model;
  RocCurve validation_roc;
  ChMap chmap;
  PrmGraph prm_initial;
  Trajectory initial_trajectory;
  std::optional<CoverageHoleEvent> event;
  bool degenerate_classifier{false};
};

PipelinePrefix run_pipeline_prefix(const Scenario& sc);

/// Full Fig.-1 loop. Writes every intermediate artifact plus a manifest with
/// all parameters and derived seeds under out_dir (created if needed). Stage
/// failures surface as InvalidScenario / PlanningError / TrainingError.
RunResult run_pipeline(const Scenario& sc, const std::string& out_dir);

/// roc.csv (`threshold,tpr,fpr`), metrics.csv
/// (`auc,gmean,tpr,fpr,ppv,fnr`), confusion.csv (`tp,fp,tn,fn`) for the model
/// on a labeled evaluation set, at the g-mean operating point of that set's
/// own ROC.
struct DetectionReport {
  RocCurve roc;
  double threshold{0.0};
  ConfusionMatrix confusion;
  DetectionMetrics detection_metrics;
};

DetectionReport report_detection(const SvcModel& model,
                                 const LabeledDataset& test_set,
                                 const std::string& out_dir);

struct SweepRow {
  double lat{0.0};
  int node_count{0};
  double connect_radius{0.0};
  int repetition{0};
  double alt_length{0.0};  // NaN on an infeasible repetition
};

struct SweepResults {
  std::vector<SweepRow> rows;
};

/// The Fig.-10 experiment: for each (lat, PRM variant, repetition) rebuild
/// the roadmap on chi(k) with a per-repetition seed (shared across lat values
/// and variants so larger windows/roadmaps see supersets), run SSPR, and
/// record the total alternative length. Writes sweep.csv and
/// sweep_summary.csv. Requires the scenario's initial trajectory to contain a
/// hole event.
SweepResults sweep_lat(const Scenario& sc, const std::string& out_dir);

}  // namespace che

#endif  // CHE_PIPELINE_HPP
