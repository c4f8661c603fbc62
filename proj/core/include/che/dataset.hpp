#ifndef CHE_DATASET_HPP
#define CHE_DATASET_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "che/radio.hpp"

namespace che {

/// Fixed feature ordering of the classifier input. Everything here is derived
/// from the path-loss layer and scenario geometry; the shadow/multipath layer
/// is used for labels only (information barrier).
enum Feature : int {
  kFeatX = 0,
  kFeatY,
  kFeatDist2d,
  kFeatDist3d,
  kFeatRssPl,
  kFeatTxHeight,
  kFeatFreqGhz,
  kFeatureCount
};

using FeatureVector = std::array<double, kFeatureCount>;

/// Per-feature affine normalization (z-score). Constant features keep
/// scale 1 so they pass through unchanged.
struct Normalization {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> scale{};

  Normalization() {
    mean.fill(0.0);
    scale.fill(1.0);
  }

  FeatureVector apply(const FeatureVector& raw) const;
  FeatureVector invert(const FeatureVector& normalized) const;
};

struct LabeledDataset {
  std::vector<FeatureVector> rows;
  std::vector<int> labels;  // 0 = coverage hole, 1 = covered
  Normalization norm;

  size_t size() const { return rows.size(); }
  size_t count_label(int label) const;
};

/// 0 (coverage hole) iff the fading-layer RSS is strictly below sensitivity.
int label_position(double rss_sf_value, double sensitivity);

FeatureVector make_features(const Transmitter& tx, const RadioConfig& cfg,
                            WorldPoint p);

/// Rows from the pl layer + geometry, labels from the sf layer. Throws when a
/// position is out of bounds or blocked. Normalization is left at identity;
/// fit it on the training split (fit_normalization) to avoid leakage.
LabeledDataset build_dataset(const GridMap& grid, const RssMap& sf,
                             const Transmitter& tx, const RadioConfig& cfg,
                             const std::vector<WorldPoint>& positions);

/// Computes z-score parameters from `train` and stamps them on all given
/// datasets (rows stay raw; SVC normalizes on the fly).
Normalization fit_normalization(const LabeledDataset& train);

struct SplitFractions {
  double train{0.6};
  double validation{0.2};
  double test{0.2};
};

struct DatasetSplits {
  LabeledDataset train;
  LabeledDataset validation;
  LabeledDataset test;
};

/// Stratified, deterministic, disjoint and exhaustive. Throws when a class
/// has fewer samples than splits. All three splits share the normalization
/// fitted on the training rows.
DatasetSplits split(const LabeledDataset& ds, SplitFractions fractions,
                    uint64_t seed);

/// CSV: header `x,y,dist2d,dist3d,rss_pl,tx_height,freq_ghz,label`, 6 decimals.
void save_dataset_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset_csv(const std::string& path);

}  // namespace che

#endif  // CHE_DATASET_HPP
