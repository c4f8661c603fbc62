#ifndef CHE_SCENARIO_HPP
#define CHE_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "che/dataset.hpp"
#include "che/follower.hpp"
#include "che/planner.hpp"
#include "che/radio.hpp"
#include "che/svc.hpp"
#include "che/trajectory.hpp"

namespace che {

/// Scenario file problems map to CLI exit code 2.
class InvalidScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LAT sweep specification (the Fig.-10-style experiment).
struct SweepSpec {
  std::vector<double> lat_values;
  std::vector<PrmParams> prm_variants;  // seeds assigned per repetition
  int repetitions{10};
};

/// Full experiment configuration, parsed from a flat `key = value` file with
/// section-prefixed keys (e.g. `radio.shadow_sigma_db = 6.0`). All randomness
/// derives from `master_seed` via named stages (derive_seed), so every stage
/// replays independently.
struct Scenario {
  // layout: either a PGM file or a synthetic rectangle-blocked floor
  std::string layout_file;
  int layout_width{50};
  int layout_height{50};
  double layout_resolution{1.0};
  WorldPoint layout_origin{0.0, 0.0};
  std::vector<std::array<double, 4>> block_rects;  // x0 y0 x1 y1 (world)

  Transmitter tx;
  RadioConfig radio;  // .seed is overwritten from master_seed

  int receiver_count{2000};
  SplitFractions fractions;

  std::vector<double> c_grid{1.0, 10.0, 100.0};
  std::vector<double> gamma_grid{0.5, 2.0, 8.0};
  int folds{5};
  TrainOptions train_options{1e-3, 50000000};

  PrmParams prm;  // .seed is overwritten from master_seed

  TrajectoryParams trajectory;

  FollowerGains gains;

  WorldPoint start{2.0, 2.0};
  WorldPoint target{45.0, 45.0};
  int detect_step{0};
  double lat_budget{-1.0};  // < 0: use the full window to the event
  int settle_steps{20};

  uint64_t master_seed{1};

  SweepSpec sweep;
};

Scenario load_scenario(const std::string& path);

/// Checks the cross-field invariants (fractions sum, dt * v_max < resolution,
/// grids nonempty, ...). Throws InvalidScenario.
void validate_scenario(const Scenario& sc);

/// Layout raster from the scenario: loads layout_file when set, otherwise
/// builds the synthetic floor with the configured blocked rectangles.
GridMap build_layout(const Scenario& sc);

/// Echo of every parameter and derived per-stage seed, in fixed order, for
/// the run manifest.
std::string scenario_manifest(const Scenario& sc);

}  // namespace che

#endif  // CHE_SCENARIO_HPP
