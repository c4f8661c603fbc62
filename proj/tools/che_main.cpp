// Command-line front end for the coverage-hole elimination pipeline. Every
// subcommand is runnable standalone on the artifacts of earlier stages; `run`
// executes the whole loop. Exit codes: 0 success, 2 invalid scenario,
// 3 infeasible planning, 4 training failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "che/pipeline.hpp"
#include "che/rng.hpp"

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

struct StageIo {
  std::string scenario_path;
  std::string dir{"out"};

  che::Scenario scenario() const {
    che::Scenario sc = che::load_scenario(scenario_path);
    che::validate_scenario(sc);
    return sc;
  }
  void ensure_dir() const { fs::create_directories(dir); }
};

che::RadioConfig seeded_radio(const che::Scenario& sc) {
  che::RadioConfig radio = sc.radio;
  radio.seed = che::derive_seed(sc.master_seed, "radio");
  return radio;
}

int cmd_genmap(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  io.ensure_dir();
  const che::GridMap layout = che::build_layout(sc);
  const auto [pl, sf] = che::gen_rss_maps(layout, sc.tx, seeded_radio(sc));
  layout.save_pgm(join(io.dir, "layout.pgm"));
  che::save_rss_csv(pl, layout, join(io.dir, "rss_pl.csv"));
  che::save_rss_csv(sf, layout, join(io.dir, "rss_sf.csv"));
  std::cout << "genmap: wrote layout.pgm, rss_pl.csv, rss_sf.csv\n";
  return 0;
}

int cmd_dataset(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  const che::GridMap layout = che::GridMap::load_pgm(join(io.dir, "layout.pgm"));
  const che::RssMap sf =
      che::load_rss_csv(layout, che::RssVariant::sf, join(io.dir, "rss_sf.csv"));
  const auto receivers = che::sample_receivers(
      layout, sc.receiver_count, che::derive_seed(sc.master_seed, "receivers"));
  const che::LabeledDataset ds =
      che::build_dataset(layout, sf, sc.tx, seeded_radio(sc), receivers);
  const che::DatasetSplits splits =
      che::split(ds, sc.fractions, che::derive_seed(sc.master_seed, "split"));
  che::save_dataset_csv(splits.train, join(io.dir, "dataset_train.csv"));
  che::save_dataset_csv(splits.validation, join(io.dir, "dataset_validation.csv"));
  che::save_dataset_csv(splits.test, join(io.dir, "dataset_test.csv"));
  std::cout << "dataset: " << ds.size() << " rows ("
            << ds.count_label(0) << " hole / " << ds.count_label(1)
            << " covered), split " << splits.train.size() << "/"
            << splits.validation.size() << "/" << splits.test.size() << "\n";
  return 0;
}

int cmd_train(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  che::LabeledDataset train_set =
      che::load_dataset_csv(join(io.dir, "dataset_train.csv"));
  che::LabeledDataset val_set =
      che::load_dataset_csv(join(io.dir, "dataset_validation.csv"));
  const che::Normalization norm = che::fit_normalization(train_set);
  train_set.norm = norm;
  val_set.norm = norm;

  const che::CrossValidationResult cv =
      che::cross_validate(train_set, sc.c_grid, sc.gamma_grid, sc.folds,
                          che::derive_seed(sc.master_seed, "cv"), sc.train_options);
  che::SvcModel model =
      che::train(train_set, cv.best_c, cv.best_gamma, sc.train_options);
  if (!model.train_report.converged) {
    throw che::TrainingError("train: SMO did not converge within the kernel evaluation budget");
  }
  model.decision_threshold = che::operating_point(che::roc_curve(model, val_set));
  che::save_model(model, join(io.dir, "model.svc"));

  std::ofstream cvout(join(io.dir, "cv_scores.csv"), std::ios::binary);
  cvout << "c,gamma,score\n";
  char buf[96];
  for (size_t ci = 0; ci < cv.c_grid.size(); ++ci) {
    for (size_t gi = 0; gi < cv.gamma_grid.size(); ++gi) {
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", cv.c_grid[ci],
                    cv.gamma_grid[gi], cv.scores[ci][gi]);
      cvout << buf;
    }
  }
  std::cout << "train: C=" << cv.best_c << " gamma=" << cv.best_gamma
            << " support_vectors=" << model.support_vectors.size()
            << " threshold=" << model.decision_threshold << "\n";
  return 0;
}

int cmd_chmap(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  const che::GridMap layout = che::GridMap::load_pgm(join(io.dir, "layout.pgm"));
  const che::SvcModel model = che::load_model(join(io.dir, "model.svc"));
  const che::ChMap chmap = che::build_chmap(model, layout, sc.tx, seeded_radio(sc), 1);
  che::save_chmap(chmap, join(io.dir, "chmap.pgm"), join(io.dir, "chmap_cells.csv"));
  std::cout << "chmap: " << chmap.chi.width() << "x" << chmap.chi.height()
            << ", blocked cells "
            << (static_cast<size_t>(chmap.chi.width()) * chmap.chi.height() -
                chmap.chi.free_cell_count())
            << "\n";
  return 0;
}

int cmd_plan(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  const che::GridMap layout = che::GridMap::load_pgm(join(io.dir, "layout.pgm"));
  const che::ChMap chi_prev = che::layout_only_chmap(layout, 0);
  che::PrmParams params = sc.prm;
  params.seed = che::derive_seed(sc.master_seed, "prm.initial");
  const che::PrmGraph prm = che::prm_build(chi_prev, params);
  const che::AugmentedQuery q =
      che::connect_query_points(prm, chi_prev, sc.start, sc.target);
  const auto path = che::astar(q.graph, q.start_id, q.goal_id);
  if (!path) throw che::PlanningError("plan: no path from start to target");
  const auto traj = che::interpolate_on_map(
      chi_prev.chi, che::path_waypoints(q.graph, *path), sc.trajectory);
  if (!traj) throw che::PlanningError("plan: trajectory smoothing failed");
  che::save_prm_csv(prm, join(io.dir, "prm_initial_nodes.csv"),
                    join(io.dir, "prm_initial_edges.csv"));
  che::save_trajectory_csv(*traj, join(io.dir, "initial_trajectory.csv"));
  std::cout << "plan: path length " << path->length << " m, "
            << traj->samples.size() << " samples\n";
  return 0;
}

int cmd_replan(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  const che::GridMap chi_raster = che::GridMap::load_pgm(join(io.dir, "chmap.pgm"));
  const che::ChMap chmap{chi_raster, 1};
  const che::Trajectory initial =
      che::load_trajectory_csv(join(io.dir, "initial_trajectory.csv"));

  const auto event = che::local_detect(chmap, initial, sc.detect_step);
  if (!event) {
    std::cout << "replan: no coverage hole on the remaining trajectory\n";
    return 0;
  }
  che::PrmParams params = sc.prm;
  params.seed = che::derive_seed(sc.master_seed, "prm");
  const che::PrmGraph prm = che::prm_build(chmap, params);
  che::LookAhead lat = che::lat_from_event(sc.detect_step, *event, initial.dt);
  if (sc.lat_budget >= 0.0) lat.lat = std::min(lat.lat, sc.lat_budget);
  const auto result = che::sspr(chmap, prm, initial, sc.detect_step, event, lat,
                                sc.trajectory);
  if (!result) throw che::PlanningError("replan: no feasible coverage-hole-free re-route");
  che::save_prm_csv(prm, join(io.dir, "prm_nodes.csv"), join(io.dir, "prm_edges.csv"));
  che::save_sspr_trace_csv(*result, join(io.dir, "sspr_trace.csv"));
  che::save_trajectory_csv(result->alternative,
                           join(io.dir, "alternative_trajectory.csv"));
  std::cout << "replan: hole at step " << event->k_bs << ", depart t_re="
            << result->t_re << " s, total length " << result->length_total
            << " m\n";
  return 0;
}

int cmd_follow(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  const che::Trajectory initial =
      che::load_trajectory_csv(join(io.dir, "initial_trajectory.csv"));
  const che::TrajectorySample& s0 = initial.samples.front();
  const che::AgvState start{s0.x, s0.y, s0.theta, 0.0};

  che::FollowTrace trace;
  const std::string alt_path = join(io.dir, "alternative_trajectory.csv");
  if (fs::exists(alt_path)) {
    const che::Trajectory alt = che::load_trajectory_csv(alt_path);
    trace = che::simulate_with_replacement(initial, sc.detect_step, alt, start,
                                           sc.gains, sc.settle_steps);
  } else {
    trace = che::simulate(initial, start, sc.gains, sc.settle_steps);
  }
  che::save_follow_trace_csv(trace, initial.dt, join(io.dir, "follow_trace.csv"));
  std::cout << "follow: final xy error " << trace.back().xy_error << " m\n";
  return 0;
}

int cmd_run(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  const che::RunResult result = che::run_pipeline(sc, io.dir);
  std::cout << "run: " << (result.event ? "hole detected, re-planned"
                                        : "no hole on initial trajectory")
            << ", final xy error " << result.follow_trace.back().xy_error
            << " m\n";
  return 0;
}

int cmd_sweep_lat(const StageIo& io) {
  const che::Scenario sc = io.scenario();
  const che::SweepResults results = che::sweep_lat(sc, io.dir);
  std::cout << "sweep-lat: " << results.rows.size() << " rows -> sweep.csv\n";
  return 0;
}

int cmd_report(const StageIo& io) {
  io.scenario();  // validates the file even though only artifacts are used
  che::LabeledDataset test_set =
      che::load_dataset_csv(join(io.dir, "dataset_test.csv"));
  che::LabeledDataset train_set =
      che::load_dataset_csv(join(io.dir, "dataset_train.csv"));
  test_set.norm = che::fit_normalization(train_set);
  const che::SvcModel model = che::load_model(join(io.dir, "model.svc"));
  const che::DetectionReport report = che::report_detection(model, test_set, io.dir);
  std::cout << "report: auc " << report.roc.auc << ", operating point tpr "
            << (report.detection_metrics.tpr ? *report.detection_metrics.tpr : 0.0)
            << " fpr "
            << (report.detection_metrics.fpr ? *report.detection_metrics.fpr : 0.0)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-hole detection and AGV trajectory re-planning simulator"};
  app.require_subcommand(1);

  StageIo io;
  int (*handler)(const StageIo&) = nullptr;
  const std::pair<const char*, int (*)(const StageIo&)> commands[] = {
      {"genmap", cmd_genmap},   {"dataset", cmd_dataset},
      {"train", cmd_train},     {"chmap", cmd_chmap},
      {"plan", cmd_plan},       {"replan", cmd_replan},
      {"follow", cmd_follow},   {"run", cmd_run},
      {"sweep-lat", cmd_sweep_lat}, {"report", cmd_report},
  };
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-s,--scenario", io.scenario_path, "scenario file")->required();
    sub->add_option("-d,--dir", io.dir, "artifact directory (default: out)");
    sub->callback([&handler, fn]() { handler = fn; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return handler(io);
  } catch (const che::InvalidScenario& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const che::PlanningError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const che::TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
