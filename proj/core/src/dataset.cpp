#include "che/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "che/rng.hpp"

namespace che {

FeatureVector Normalization::apply(const FeatureVector& raw) const {
  FeatureVector out;
  for (int j = 0; j < kFeatureCount; ++j) out[j] = (raw[j] - mean[j]) / scale[j];
  return out;
}

FeatureVector Normalization::invert(const FeatureVector& normalized) const {
  FeatureVector out;
  for (int j = 0; j < kFeatureCount; ++j) out[j] = normalized[j] * scale[j] + mean[j];
  return out;
}

size_t LabeledDataset::count_label(int label) const {
  size_t n = 0;
  for (int y : labels) n += (y == label);
  return n;
}

int label_position(double rss_sf_value, double sensitivity) {
  return rss_sf_value < sensitivity ? 0 : 1;
}

FeatureVector make_features(const Transmitter& tx, const RadioConfig& cfg,
                            WorldPoint p) {
  const double d2 = distance(tx.position, p);
  FeatureVector x;
  x[kFeatX] = p.x;
  x[kFeatY] = p.y;
  x[kFeatDist2d] = d2;
  x[kFeatDist3d] = std::sqrt(d2 * d2 + tx.height * tx.height);
  x[kFeatRssPl] = rss_pl(tx, cfg, p);
  x[kFeatTxHeight] = tx.height;
  x[kFeatFreqGhz] = tx.frequency_ghz;
  return x;
}

LabeledDataset build_dataset(const GridMap& grid, const RssMap& sf,
                             const Transmitter& tx, const RadioConfig& cfg,
                             const std::vector<WorldPoint>& positions) {
  LabeledDataset ds;
  ds.rows.reserve(positions.size());
  ds.labels.reserve(positions.size());
  for (const WorldPoint& p : positions) {
    const auto c = grid.world_to_cell(p);
    if (!c || grid.blocked(*c)) {
      throw std::invalid_argument("build_dataset: position out of bounds or blocked");
    }
    ds.rows.push_back(make_features(tx, cfg, p));
    ds.labels.push_back(label_position(sf.at(*c), cfg.sensitivity));
  }
  return ds;
}

Normalization fit_normalization(const LabeledDataset& train) {
  Normalization norm;
  const size_t n = train.size();
  if (n == 0) return norm;
  for (int j = 0; j < kFeatureCount; ++j) {
    double sum = 0.0;
    for (const auto& row : train.rows) sum += row[j];
    const double mean = sum / n;
    double var = 0.0;
    for (const auto& row : train.rows) {
      const double d = row[j] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    norm.mean[j] = mean;
    norm.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return norm;
}

DatasetSplits split(const LabeledDataset& ds, SplitFractions fractions,
                    uint64_t seed) {
  const double fsum = fractions.train + fractions.validation + fractions.test;
  if (std::abs(fsum - 1.0) > 1e-9) {
    throw std::invalid_argument("split: fractions must sum to 1");
  }

  std::array<std::vector<size_t>, 2> by_class;
  for (size_t i = 0; i < ds.size(); ++i) {
    const int y = ds.labels[i];
    if (y != 0 && y != 1) throw std::invalid_argument("split: labels must be 0 or 1");
    by_class[y].push_back(i);
  }
  for (int y = 0; y < 2; ++y) {
    if (!by_class[y].empty() && by_class[y].size() < 3) {
      throw std::invalid_argument("split: a class has fewer samples than splits");
    }
  }

  Rng rng(seed);
  std::array<std::vector<size_t>, 3> assignment;  // train, validation, test
  const double frac[3] = {fractions.train, fractions.validation, fractions.test};

  for (int y = 0; y < 2; ++y) {
    auto& idx = by_class[y];
    if (idx.empty()) continue;
    for (size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
    }
    // Largest-remainder allocation of this class across the three splits,
    // then force at least one sample per split (the invariant every split
    // carries both classes when present).
    const size_t nc = idx.size();
    size_t count[3];
    double rem[3];
    size_t used = 0;
    for (int s = 0; s < 3; ++s) {
      const double quota = frac[s] * nc;
      count[s] = static_cast<size_t>(std::floor(quota));
      rem[s] = quota - static_cast<double>(count[s]);
      used += count[s];
    }
    while (used < nc) {
      int best = 0;
      for (int s = 1; s < 3; ++s) {
        if (rem[s] > rem[best]) best = s;
      }
      ++count[best];
      rem[best] = -1.0;
      ++used;
    }
    for (int s = 0; s < 3; ++s) {
      if (count[s] == 0) {
        int donor = 0;
        for (int t = 1; t < 3; ++t) {
          if (count[t] > count[donor]) donor = t;
        }
        --count[donor];
        ++count[s];
      }
    }
    size_t at = 0;
    for (int s = 0; s < 3; ++s) {
      for (size_t k = 0; k < count[s]; ++k) assignment[s].push_back(idx[at++]);
    }
  }

  DatasetSplits out;
  LabeledDataset* sets[3] = {&out.train, &out.validation, &out.test};
  for (int s = 0; s < 3; ++s) {
    for (size_t i : assignment[s]) {
      sets[s]->rows.push_back(ds.rows[i]);
      sets[s]->labels.push_back(ds.labels[i]);
    }
  }
  const Normalization norm = fit_normalization(out.train);
  out.train.norm = norm;
  out.validation.norm = norm;
  out.test.norm = norm;
  return out;
}

void save_dataset_csv(const LabeledDataset& ds, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_dataset_csv: cannot open " + path);
  f << "x,y,dist2d,dist3d,rss_pl,tx_height,freq_ghz,label\n";
  char buf[256];
  for (size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.rows[i];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n",
                  r[kFeatX], r[kFeatY], r[kFeatDist2d], r[kFeatDist3d],
                  r[kFeatRssPl], r[kFeatTxHeight], r[kFeatFreqGhz],
                  ds.labels[i]);
    f << buf;
  }
}

LabeledDataset load_dataset_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_dataset_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("load_dataset_csv: empty file " + path);
  LabeledDataset ds;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    FeatureVector r;
    int label = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%d", &r[0],
                    &r[1], &r[2], &r[3], &r[4], &r[5], &r[6], &label) != 8) {
      throw std::runtime_error("load_dataset_csv: malformed row in " + path);
    }
    ds.rows.push_back(r);
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace che
