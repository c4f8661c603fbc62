#include "che/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "che/rng.hpp"

namespace che {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_doubles(const std::string& value, const std::string& key) {
  std::istringstream ss(value);
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  if (out.empty()) throw InvalidScenario("scenario: empty list for " + key);
  return out;
}

double parse_double(const std::string& value, const std::string& key) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw InvalidScenario("scenario: bad number for " + key + ": " + value);
  }
  if (trim(value.substr(pos)) != "") {
    throw InvalidScenario("scenario: trailing junk for " + key + ": " + value);
  }
  return v;
}

int parse_int(const std::string& value, const std::string& key) {
  const double v = parse_double(value, key);
  if (v != std::floor(v)) throw InvalidScenario("scenario: expected integer for " + key);
  return static_cast<int>(v);
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidScenario("scenario: cannot open " + path);

  Scenario sc;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidScenario("scenario: line " + std::to_string(line_no) +
                            " is not `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "seed") sc.master_seed = static_cast<uint64_t>(parse_double(value, key));
    else if (key == "layout.file") sc.layout_file = value;
    else if (key == "layout.width") sc.layout_width = parse_int(value, key);
    else if (key == "layout.height") sc.layout_height = parse_int(value, key);
    else if (key == "layout.resolution") sc.layout_resolution = parse_double(value, key);
    else if (key == "layout.origin_x") sc.layout_origin.x = parse_double(value, key);
    else if (key == "layout.origin_y") sc.layout_origin.y = parse_double(value, key);
    else if (key == "layout.block_rect") {
      const auto v = parse_doubles(value, key);
      if (v.size() != 4) throw InvalidScenario("scenario: layout.block_rect needs x0 y0 x1 y1");
      sc.block_rects.push_back({v[0], v[1], v[2], v[3]});
    } else if (key == "tx.x") sc.tx.position.x = parse_double(value, key);
    else if (key == "tx.y") sc.tx.position.y = parse_double(value, key);
    else if (key == "tx.height") sc.tx.height = parse_double(value, key);
    else if (key == "tx.power_dbm") sc.tx.tx_power_dbm = parse_double(value, key);
    else if (key == "tx.freq_ghz") sc.tx.frequency_ghz = parse_double(value, key);
    else if (key == "radio.pathloss_exponent") sc.radio.pathloss_exponent = parse_double(value, key);
    else if (key == "radio.reference_distance") sc.radio.reference_distance = parse_double(value, key);
    else if (key == "radio.reference_loss_db") sc.radio.reference_loss = parse_double(value, key);
    else if (key == "radio.shadow_sigma_db") sc.radio.shadow_sigma = parse_double(value, key);
    else if (key == "radio.shadow_decorrelation_m") sc.radio.shadow_decorrelation = parse_double(value, key);
    else if (key == "radio.multipath_sigma_db") sc.radio.multipath_sigma = parse_double(value, key);
    else if (key == "radio.sensitivity_dbm") sc.radio.sensitivity = parse_double(value, key);
    else if (key == "dataset.receivers") sc.receiver_count = parse_int(value, key);
    else if (key == "dataset.train_fraction") sc.fractions.train = parse_double(value, key);
    else if (key == "dataset.val_fraction") sc.fractions.validation = parse_double(value, key);
    else if (key == "dataset.test_fraction") sc.fractions.test = parse_double(value, key);
    else if (key == "svc.c_grid") sc.c_grid = parse_doubles(value, key);
    else if (key == "svc.gamma_grid") sc.gamma_grid = parse_doubles(value, key);
    else if (key == "svc.folds") sc.folds = parse_int(value, key);
    else if (key == "svc.kkt_tol") sc.train_options.kkt_tol = parse_double(value, key);
    else if (key == "svc.max_kernel_evals") sc.train_options.max_kernel_evals = static_cast<uint64_t>(parse_double(value, key));
    else if (key == "planner.nodes") sc.prm.node_count = parse_int(value, key);
    else if (key == "planner.connect_radius") sc.prm.connect_radius = parse_double(value, key);
    else if (key == "trajectory.dt") sc.trajectory.dt = parse_double(value, key);
    else if (key == "trajectory.v_max") sc.trajectory.v_max = parse_double(value, key);
    else if (key == "trajectory.v_cruise") sc.trajectory.v_cruise = parse_double(value, key);
    else if (key == "trajectory.a_max") sc.trajectory.a_max = parse_double(value, key);
    else if (key == "trajectory.max_deviation") sc.trajectory.max_deviation = parse_double(value, key);
    else if (key == "follower.k_x") sc.gains.k_x = parse_double(value, key);
    else if (key == "follower.k_y") sc.gains.k_y = parse_double(value, key);
    else if (key == "follower.k_theta") sc.gains.k_theta = parse_double(value, key);
    else if (key == "follower.omega_max") sc.gains.omega_max = parse_double(value, key);
    else if (key == "mission.start_x") sc.start.x = parse_double(value, key);
    else if (key == "mission.start_y") sc.start.y = parse_double(value, key);
    else if (key == "mission.target_x") sc.target.x = parse_double(value, key);
    else if (key == "mission.target_y") sc.target.y = parse_double(value, key);
    else if (key == "mission.detect_step") sc.detect_step = parse_int(value, key);
    else if (key == "mission.lat_budget") sc.lat_budget = parse_double(value, key);
    else if (key == "mission.settle_steps") sc.settle_steps = parse_int(value, key);
    else if (key == "sweep.lat") sc.sweep.lat_values = parse_doubles(value, key);
    else if (key == "sweep.prm") {
      std::istringstream ss(value);
      std::string tok;
      sc.sweep.prm_variants.clear();
      while (ss >> tok) {
        int n = 0;
        double d = 0.0;
        if (std::sscanf(tok.c_str(), "%d:%lf", &n, &d) != 2) {
          throw InvalidScenario("scenario: sweep.prm entries must be N:D_max");
        }
        sc.sweep.prm_variants.push_back({n, d, 0});
      }
      if (sc.sweep.prm_variants.empty()) {
        throw InvalidScenario("scenario: sweep.prm needs at least one N:D_max");
      }
    } else if (key == "sweep.repetitions") sc.sweep.repetitions = parse_int(value, key);
    else throw InvalidScenario("scenario: unknown key `" + key + "` (line " +
                               std::to_string(line_no) + ")");
  }

  // Gains share the trajectory's speed limit.
  sc.gains.v_max = sc.trajectory.v_max;
  return sc;
}

void validate_scenario(const Scenario& sc) {
  try {
    sc.radio.validate();
  } catch (const std::exception& e) {
    throw InvalidScenario(std::string("scenario: ") + e.what());
  }
  if (sc.layout_file.empty()) {
    if (sc.layout_width < 1 || sc.layout_height < 1 || !(sc.layout_resolution > 0.0)) {
      throw InvalidScenario("scenario: bad synthetic layout dimensions");
    }
  } else {
    std::ifstream probe(sc.layout_file);
    if (!probe) throw InvalidScenario("scenario: layout.file does not exist: " + sc.layout_file);
  }
  const double fsum = sc.fractions.train + sc.fractions.validation + sc.fractions.test;
  if (std::abs(fsum - 1.0) > 1e-9) {
    throw InvalidScenario("scenario: dataset fractions must sum to 1");
  }
  if (sc.receiver_count < 10) throw InvalidScenario("scenario: dataset.receivers too small");
  if (sc.c_grid.empty() || sc.gamma_grid.empty()) {
    throw InvalidScenario("scenario: empty SVC hyperparameter grid");
  }
  if (sc.folds < 2) throw InvalidScenario("scenario: svc.folds must be >= 2");
  if (sc.prm.node_count < 2) throw InvalidScenario("scenario: planner.nodes must be >= 2");
  if (!(sc.prm.connect_radius > 0.0)) throw InvalidScenario("scenario: planner.connect_radius must be > 0");
  if (!(sc.trajectory.dt > 0.0)) throw InvalidScenario("scenario: trajectory.dt must be > 0");
  if (!(sc.trajectory.v_cruise > 0.0) || sc.trajectory.v_cruise > sc.trajectory.v_max) {
    throw InvalidScenario("scenario: need 0 < v_cruise <= v_max");
  }
  // Hole detection samples reference positions every dt; one step must not
  // skip over a whole cell.
  if (sc.trajectory.dt * sc.trajectory.v_max >= sc.layout_resolution) {
    throw InvalidScenario("scenario: dt * v_max must stay below the map resolution");
  }
  if (sc.gains.k_x <= 0.0 || sc.gains.k_y <= 0.0 || sc.gains.k_theta <= 0.0 ||
      sc.gains.omega_max <= 0.0) {
    throw InvalidScenario("scenario: follower gains must be positive");
  }
  if (sc.detect_step < 0) throw InvalidScenario("scenario: mission.detect_step must be >= 0");
  if (sc.sweep.repetitions < 1) throw InvalidScenario("scenario: sweep.repetitions must be >= 1");
}

GridMap build_layout(const Scenario& sc) {
  if (!sc.layout_file.empty()) return GridMap::load_pgm(sc.layout_file);
  GridMap map(sc.layout_width, sc.layout_height, sc.layout_resolution,
              sc.layout_origin);
  for (const auto& r : sc.block_rects) map.block_rect(r[0], r[1], r[2], r[3]);
  return map;
}

std::string scenario_manifest(const Scenario& sc) {
  std::ostringstream out;
  char buf[160];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
    out << buf;
  };
  auto put_list = [&](const char* key, const std::vector<double>& vs) {
    out << key << " =";
    for (double v : vs) {
      std::snprintf(buf, sizeof(buf), " %.17g", v);
      out << buf;
    }
    out << "\n";
  };

  out << "seed = " << sc.master_seed << "\n";
  out << "layout.file = " << sc.layout_file << "\n";
  out << "layout.width = " << sc.layout_width << "\n";
  out << "layout.height = " << sc.layout_height << "\n";
  put("layout.resolution", sc.layout_resolution);
  put("layout.origin_x", sc.layout_origin.x);
  put("layout.origin_y", sc.layout_origin.y);
  for (const auto& r : sc.block_rects) {
    std::snprintf(buf, sizeof(buf), "layout.block_rect = %.17g %.17g %.17g %.17g\n",
                  r[0], r[1], r[2], r[3]);
    out << buf;
  }
  put("tx.x", sc.tx.position.x);
  put("tx.y", sc.tx.position.y);
  put("tx.height", sc.tx.height);
  put("tx.power_dbm", sc.tx.tx_power_dbm);
  put("tx.freq_ghz", sc.tx.frequency_ghz);
  put("radio.pathloss_exponent", sc.radio.pathloss_exponent);
  put("radio.reference_distance", sc.radio.reference_distance);
  put("radio.reference_loss_db", sc.radio.reference_loss);
  put("radio.shadow_sigma_db", sc.radio.shadow_sigma);
  put("radio.shadow_decorrelation_m", sc.radio.shadow_decorrelation);
  put("radio.multipath_sigma_db", sc.radio.multipath_sigma);
  put("radio.sensitivity_dbm", sc.radio.sensitivity);
  out << "dataset.receivers = " << sc.receiver_count << "\n";
  put("dataset.train_fraction", sc.fractions.train);
  put("dataset.val_fraction", sc.fractions.validation);
  put("dataset.test_fraction", sc.fractions.test);
  put_list("svc.c_grid", sc.c_grid);
  put_list("svc.gamma_grid", sc.gamma_grid);
  out << "svc.folds = " << sc.folds << "\n";
  put("svc.kkt_tol", sc.train_options.kkt_tol);
  out << "svc.max_kernel_evals = " << sc.train_options.max_kernel_evals << "\n";
  out << "planner.nodes = " << sc.prm.node_count << "\n";
  put("planner.connect_radius", sc.prm.connect_radius);
  put("trajectory.dt", sc.trajectory.dt);
  put("trajectory.v_max", sc.trajectory.v_max);
  put("trajectory.v_cruise", sc.trajectory.v_cruise);
  put("trajectory.a_max", sc.trajectory.a_max);
  put("trajectory.max_deviation", sc.trajectory.max_deviation);
  put("follower.k_x", sc.gains.k_x);
  put("follower.k_y", sc.gains.k_y);
  put("follower.k_theta", sc.gains.k_theta);
  put("follower.omega_max", sc.gains.omega_max);
  put("mission.start_x", sc.start.x);
  put("mission.start_y", sc.start.y);
  put("mission.target_x", sc.target.x);
  put("mission.target_y", sc.target.y);
  out << "mission.detect_step = " << sc.detect_step << "\n";
  put("mission.lat_budget", sc.lat_budget);
  out << "mission.settle_steps = " << sc.settle_steps << "\n";
  if (!sc.sweep.lat_values.empty()) put_list("sweep.lat", sc.sweep.lat_values);
  if (!sc.sweep.prm_variants.empty()) {
    out << "sweep.prm =";
    for (const auto& v : sc.sweep.prm_variants) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", v.node_count, v.connect_radius);
      out << buf;
    }
    out << "\n";
  }
  out << "sweep.repetitions = " << sc.sweep.repetitions << "\n";

  out << "derived.seed.radio = " << derive_seed(sc.master_seed, "radio") << "\n";
  out << "derived.seed.receivers = " << derive_seed(sc.master_seed, "receivers") << "\n";
  out << "derived.seed.split = " << derive_seed(sc.master_seed, "split") << "\n";
  out << "derived.seed.cv = " << derive_seed(sc.master_seed, "cv") << "\n";
  out << "derived.seed.prm_initial = " << derive_seed(sc.master_seed, "prm.initial") << "\n";
  out << "derived.seed.prm = " << derive_seed(sc.master_seed, "prm") << "\n";
  return out.str();
}

}  // namespace che
