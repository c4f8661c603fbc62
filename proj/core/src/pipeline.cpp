#include "che/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "che/rng.hpp"

namespace che {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << content;
}

void save_cv_scores(const CrossValidationResult& cv, const std::string& path) {
  std::ostringstream out;
  char buf[96];
  out << "c,gamma,score\n";
  for (size_t ci = 0; ci < cv.c_grid.size(); ++ci) {
    for (size_t gi = 0; gi < cv.gamma_grid.size(); ++gi) {
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", cv.c_grid[ci],
                    cv.gamma_grid[gi], cv.scores[ci][gi]);
      out << buf;
    }
  }
  write_text(path, out.str());
}

void save_roc_csv(const RocCurve& roc, const std::string& path) {
  std::ostringstream out;
  char buf[96];
  out << "threshold,tpr,fpr\n";
  for (const RocPoint& p : roc.points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", p.threshold, p.tpr, p.fpr);
    out << buf;
  }
  write_text(path, out.str());
}

double or_nan(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

PipelinePrefix run_pipeline_prefix(const Scenario& sc) {
  validate_scenario(sc);

  GridMap layout = build_layout(sc);

  RadioConfig radio = sc.radio;
  radio.seed = derive_seed(sc.master_seed, "radio");
  auto [pl, sf] = gen_rss_maps(layout, sc.tx, radio);

  const std::vector<WorldPoint> receivers = sample_receivers(
      layout, sc.receiver_count, derive_seed(sc.master_seed, "receivers"));
  const LabeledDataset ds = build_dataset(layout, sf, sc.tx, radio, receivers);
  DatasetSplits splits = split(ds, sc.fractions, derive_seed(sc.master_seed, "split"));

  CrossValidationResult cv;
  SvcModel model;
  RocCurve validation_roc;
  bool degenerate = false;
  if (ds.count_label(0) == 0 || ds.count_label(1) == 0) {
    // Single-class world (e.g. zero fading with generous sensitivity): there
    // is nothing to learn, the classifier degenerates to a constant.
    degenerate = true;
    model.bias = ds.count_label(0) == 0 ? 1.0 : -1.0;
    model.decision_threshold = 0.0;
    model.norm = splits.train.norm;
  } else {
    cv = cross_validate(splits.train, sc.c_grid, sc.gamma_grid, sc.folds,
                        derive_seed(sc.master_seed, "cv"), sc.train_options);
    model = train(splits.train, cv.best_c, cv.best_gamma, sc.train_options);
    if (!model.train_report.converged) {
      throw TrainingError("train: SMO did not converge within the kernel evaluation budget");
    }
    validation_roc = roc_curve(model, splits.validation);
    model.decision_threshold = operating_point(validation_roc);
  }

  ChMap chmap = build_chmap(model, layout, sc.tx, radio, /*timestamp_step=*/1);

  // The initial trajectory is planned on chi(k-1): the layout with no
  // predicted holes. The chi(k) update then reveals the holes on it.
  const ChMap chi_prev = layout_only_chmap(layout, 0);
  PrmParams init_params = sc.prm;
  init_params.seed = derive_seed(sc.master_seed, "prm.initial");
  PrmGraph prm_initial = prm_build(chi_prev, init_params);
  const AugmentedQuery query =
      connect_query_points(prm_initial, chi_prev, sc.start, sc.target);
  const auto initial_path = astar(query.graph, query.start_id, query.goal_id);
  if (!initial_path) throw PlanningError("plan: no path from start to target");
  const auto initial_traj = interpolate_on_map(
      chi_prev.chi, path_waypoints(query.graph, *initial_path), sc.trajectory);
  if (!initial_traj) throw PlanningError("plan: trajectory smoothing failed");

  PipelinePrefix prefix{std::move(layout),
                        std::move(pl),
                        std::move(sf),
                        std::move(splits),
                        std::move(cv),
                        std::move(model),
                        std::move(validation_roc),
                        std::move(chmap),
                        std::move(prm_initial),
                        *initial_traj,
                        std::nullopt,
                        degenerate};
  prefix.event = local_detect(prefix.chmap, prefix.initial_trajectory, sc.detect_step);
  return prefix;
}

DetectionReport report_detection(const SvcModel& model,
                                 const LabeledDataset& test_set,
                                 const std::string& out_dir) {
  fs::create_directories(out_dir);
  DetectionReport report;
  report.roc = roc_curve(model, test_set);
  report.threshold = operating_point(report.roc);
  report.confusion = confusion_at(model, test_set, report.threshold);
  report.detection_metrics = metrics(report.confusion);

  save_roc_csv(report.roc, join(out_dir, "roc.csv"));

  std::ostringstream m;
  char buf[256];
  m << "auc,gmean,tpr,fpr,ppv,fnr\n";
  const DetectionMetrics& dm = report.detection_metrics;
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                report.roc.auc, or_nan(dm.gmean), or_nan(dm.tpr),
                or_nan(dm.fpr), or_nan(dm.ppv), or_nan(dm.fnr));
  m << buf;
  write_text(join(out_dir, "metrics.csv"), m.str());

  std::ostringstream c;
  c << "tp,fp,tn,fn\n"
    << report.confusion.tp << "," << report.confusion.fp << ","
    << report.confusion.tn << "," << report.confusion.fn << "\n";
  write_text(join(out_dir, "confusion.csv"), c.str());
  return report;
}

RunResult run_pipeline(const Scenario& sc, const std::string& out_dir) {
  fs::create_directories(out_dir);
  PipelinePrefix prefix = run_pipeline_prefix(sc);

  RadioConfig radio = sc.radio;
  radio.seed = derive_seed(sc.master_seed, "radio");

  prefix.layout.save_pgm(join(out_dir, "layout.pgm"));
  save_rss_csv(prefix.rss_pl_map, prefix.layout, join(out_dir, "rss_pl.csv"));
  save_rss_csv(prefix.rss_sf_map, prefix.layout, join(out_dir, "rss_sf.csv"));
  save_dataset_csv(prefix.splits.train, join(out_dir, "dataset_train.csv"));
  save_dataset_csv(prefix.splits.validation, join(out_dir, "dataset_validation.csv"));
  save_dataset_csv(prefix.splits.test, join(out_dir, "dataset_test.csv"));
  if (!prefix.degenerate_classifier) {
    save_cv_scores(prefix.cv, join(out_dir, "cv_scores.csv"));
  }
  save_model(prefix.model, join(out_dir, "model.svc"));
  save_chmap(prefix.chmap, join(out_dir, "chmap.pgm"), join(out_dir, "chmap_cells.csv"));
  save_prm_csv(prefix.prm_initial, join(out_dir, "prm_initial_nodes.csv"),
               join(out_dir, "prm_initial_edges.csv"));
  save_trajectory_csv(prefix.initial_trajectory, join(out_dir, "initial_trajectory.csv"));

  DetectionReport report;
  if (!prefix.degenerate_classifier) {
    report = report_detection(prefix.model, prefix.splits.test, out_dir);
  }

  RunResult result{std::move(prefix.layout),
                   std::move(prefix.rss_pl_map),
                   std::move(prefix.rss_sf_map),
                   std::move(prefix.splits),
                   std::move(prefix.cv),
                   std::move(prefix.model),
                   std::move(prefix.validation_roc),
                   report.roc,
                   report.threshold,
                   report.confusion,
                   std::move(prefix.chmap),
                   std::move(prefix.prm_initial),
                   PrmGraph{},
                   std::move(prefix.initial_trajectory),
                   prefix.event,
                   SsprResult{},
                   FollowTrace{},
                   prefix.degenerate_classifier};

  if (result.event) {
    PrmParams chi_params = sc.prm;
    chi_params.seed = derive_seed(sc.master_seed, "prm");
    result.prm_chi = prm_build(result.chmap, chi_params);
    save_prm_csv(result.prm_chi, join(out_dir, "prm_nodes.csv"),
                 join(out_dir, "prm_edges.csv"));

    LookAhead lat = lat_from_event(sc.detect_step, *result.event,
                                   result.initial_trajectory.dt);
    if (sc.lat_budget >= 0.0) lat.lat = std::min(lat.lat, sc.lat_budget);
    const auto sspr_result =
        sspr(result.chmap, result.prm_chi, result.initial_trajectory,
             sc.detect_step, result.event, lat, sc.trajectory);
    if (!sspr_result) {
      throw PlanningError("replan: no feasible coverage-hole-free re-route");
    }
    result.sspr_result = *sspr_result;
    save_sspr_trace_csv(result.sspr_result, join(out_dir, "sspr_trace.csv"));
    save_trajectory_csv(result.sspr_result.alternative,
                        join(out_dir, "alternative_trajectory.csv"));
  }

  const TrajectorySample& s0 = result.initial_trajectory.samples.front();
  const AgvState initial_state{s0.x, s0.y, s0.theta, 0.0};
  if (result.event) {
    result.follow_trace = simulate_with_replacement(
        result.initial_trajectory, sc.detect_step,
        result.sspr_result.alternative, initial_state, sc.gains, sc.settle_steps);
  } else {
    result.follow_trace = simulate(result.initial_trajectory, initial_state,
                                   sc.gains, sc.settle_steps);
  }
  save_follow_trace_csv(result.follow_trace, result.initial_trajectory.dt,
                        join(out_dir, "follow_trace.csv"));

  std::ostringstream manifest;
  manifest << scenario_manifest(sc);
  char buf[160];
  manifest << "result.event_detected = " << (result.event ? 1 : 0) << "\n";
  if (result.event) {
    manifest << "result.event_k_bs = " << result.event->k_bs << "\n";
    std::snprintf(buf, sizeof(buf), "result.event_x = %.17g\n", result.event->position.x);
    manifest << buf;
    std::snprintf(buf, sizeof(buf), "result.event_y = %.17g\n", result.event->position.y);
    manifest << buf;
    std::snprintf(buf, sizeof(buf), "result.t_re = %.17g\n", result.sspr_result.t_re);
    manifest << buf;
    std::snprintf(buf, sizeof(buf), "result.alt_length_total = %.17g\n",
                  result.sspr_result.length_total);
    manifest << buf;
    std::snprintf(buf, sizeof(buf), "result.alt_length_remaining = %.17g\n",
                  result.sspr_result.length_remaining);
    manifest << buf;
  }
  manifest << "result.degenerate_classifier = "
           << (result.degenerate_classifier ? 1 : 0) << "\n";
  if (!result.degenerate_classifier) {
    std::snprintf(buf, sizeof(buf), "result.test_auc = %.17g\n", result.test_roc.auc);
    manifest << buf;
  }
  std::snprintf(buf, sizeof(buf), "result.final_xy_error = %.17g\n",
                result.follow_trace.back().xy_error);
  manifest << buf;
  write_text(join(out_dir, "manifest.txt"), manifest.str());
  return result;
}

SweepResults sweep_lat(const Scenario& sc, const std::string& out_dir) {
  if (sc.sweep.lat_values.empty() || sc.sweep.prm_variants.empty()) {
    throw InvalidScenario("sweep-lat: scenario must set sweep.lat and sweep.prm");
  }
  fs::create_directories(out_dir);
  PipelinePrefix prefix = run_pipeline_prefix(sc);
  if (!prefix.event) {
    throw PlanningError("sweep-lat: initial trajectory has no coverage-hole event");
  }

  const double dt = prefix.initial_trajectory.dt;
  const double full_window =
      lat_from_event(sc.detect_step, *prefix.event, dt).lat;

  SweepResults results;
  std::ostringstream rows;
  rows << "lat,n,d_max,repetition,alt_length\n";
  char buf[160];

  for (int rep = 0; rep < sc.sweep.repetitions; ++rep) {
    // One roadmap seed per repetition, shared by every variant and LAT value:
    // a larger (N, D_max) variant then builds a supergraph of the smaller
    // one, and larger LAT scans a superset of candidates on the same graph.
    const uint64_t rep_seed =
        derive_seed(sc.master_seed, "sweep.prm.rep" + std::to_string(rep));
    for (const PrmParams& variant : sc.sweep.prm_variants) {
      PrmParams params = variant;
      params.seed = rep_seed;
      const PrmGraph prm = prm_build(prefix.chmap, params);
      for (const double lat_value : sc.sweep.lat_values) {
        const LookAhead lat{std::min(lat_value, full_window)};
        const auto res =
            sspr(prefix.chmap, prm, prefix.initial_trajectory, sc.detect_step,
                 prefix.event, lat, sc.trajectory);
        SweepRow row{lat_value, params.node_count, params.connect_radius, rep,
                     res ? res->length_total
                         : std::numeric_limits<double>::quiet_NaN()};
        results.rows.push_back(row);
        std::snprintf(buf, sizeof(buf), "%.6f,%d,%.6f,%d,%.6f\n", row.lat,
                      row.node_count, row.connect_radius, row.repetition,
                      row.alt_length);
        rows << buf;
      }
    }
  }
  write_text(join(out_dir, "sweep.csv"), rows.str());

  std::ostringstream summary;
  summary << "lat,n,d_max,mean_alt_length,std_alt_length,failures\n";
  for (const PrmParams& variant : sc.sweep.prm_variants) {
    for (const double lat_value : sc.sweep.lat_values) {
      double sum = 0.0, sum2 = 0.0;
      int ok = 0, failures = 0;
      for (const SweepRow& row : results.rows) {
        if (row.lat != lat_value || row.node_count != variant.node_count ||
            row.connect_radius != variant.connect_radius) {
          continue;
        }
        if (std::isnan(row.alt_length)) {
          ++failures;
        } else {
          sum += row.alt_length;
          sum2 += row.alt_length * row.alt_length;
          ++ok;
        }
      }
      const double mean = ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
      const double var = ok > 0 ? std::max(0.0, sum2 / ok - mean * mean) : 0.0;
      std::snprintf(buf, sizeof(buf), "%.6f,%d,%.6f,%.6f,%.6f,%d\n", lat_value,
                    variant.node_count, variant.connect_radius, mean,
                    ok > 0 ? std::sqrt(var) : std::numeric_limits<double>::quiet_NaN(),
                    failures);
      summary << buf;
    }
  }
  write_text(join(out_dir, "sweep_summary.csv"), summary.str());
  return results;
}

}  // namespace che
