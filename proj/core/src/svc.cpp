#include "che/svc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "che/rng.hpp"

namespace che {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double rbf(const FeatureVector& a, const FeatureVector& b, double gamma) {
  double d2 = 0.0;
  for (int j = 0; j < kFeatureCount; ++j) {
    const double d = a[j] - b[j];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

// Lazy kernel row cache over the normalized training rows. Row fills are the
// unit the kernel-evaluation budget counts.
class KernelCache {
 public:
  KernelCache(const std::vector<FeatureVector>& rows, double gamma,
              uint64_t budget)
      : rows_(rows), gamma_(gamma), budget_(budget), cache_(rows.size()) {}

  const std::vector<double>* row(size_t i) {
    auto& r = cache_[i];
    if (!r.empty()) return &r;
    if (evals_ + rows_.size() > budget_) return nullptr;
    evals_ += rows_.size();
    r.resize(rows_.size());
    for (size_t t = 0; t < rows_.size(); ++t) r[t] = rbf(rows_[i], rows_[t], gamma_);
    return &r;
  }

  uint64_t evals() const { return evals_; }

 private:
  const std::vector<FeatureVector>& rows_;
  double gamma_;
  uint64_t budget_;
  uint64_t evals_{0};
  std::vector<std::vector<double>> cache_;
};

}  // namespace

double SvcModel::decision_value(const FeatureVector& normalized_x) const {
  double sum = bias;
  for (size_t i = 0; i < support_vectors.size(); ++i) {
    sum += dual_coef[i] * rbf(support_vectors[i], normalized_x, gamma);
  }
  return sum;
}

SvcModel train(const LabeledDataset& ds, double penalty_c, double gamma,
               const TrainOptions& opts) {
  const size_t n = ds.size();
  if (!(penalty_c > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("train: C and gamma must be > 0");
  }
  if (ds.count_label(0) == 0 || ds.count_label(1) == 0) {
    throw std::invalid_argument("train: both classes must be present");
  }

  // Normalized rows; covered -> +1, hole -> -1 so holes sit on the low side
  // of the decision function.
  std::vector<FeatureVector> x(n);
  std::vector<double> z(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = ds.norm.apply(ds.rows[i]);
    z[i] = ds.labels[i] == 1 ? 1.0 : -1.0;
  }

  KernelCache kernel(x, gamma, opts.max_kernel_evals);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q alpha - e, alpha = 0

  const double C = penalty_c;
  auto is_upper = [&](size_t t) { return alpha[t] >= C; };
  auto is_lower = [&](size_t t) { return alpha[t] <= 0.0; };

  TrainReport report;
  bool budget_exhausted = false;

  // SMO, libsvm-style: first index from the maximal violation, second from
  // the second-order objective decrease. Ordered scans make ties land on the
  // smallest index. The working-pair curvature for a unit-diagonal RBF kernel
  // is 2 - 2 K_ij regardless of the label pattern.
  const uint64_t max_iter = 100000000ULL;
  while (report.iterations < max_iter) {
    double gmax = -kInf;
    int i = -1;
    for (size_t t = 0; t < n; ++t) {
      const bool in_up = (z[t] > 0 && !is_upper(t)) || (z[t] < 0 && !is_lower(t));
      if (in_up && -z[t] * grad[t] > gmax) {
        gmax = -z[t] * grad[t];
        i = static_cast<int>(t);
      }
    }
    if (i < 0) {
      report.converged = true;  // no ascent direction left
      break;
    }

    const std::vector<double>* Ki = kernel.row(i);
    if (!Ki) {
      budget_exhausted = true;
      break;
    }

    double gmin = kInf;
    double obj_min = kInf;
    int j = -1;
    for (size_t t = 0; t < n; ++t) {
      const bool in_low = (z[t] > 0 && !is_lower(t)) || (z[t] < 0 && !is_upper(t));
      if (!in_low) continue;
      const double neg_zg = -z[t] * grad[t];
      gmin = std::min(gmin, neg_zg);
      const double grad_diff = gmax - neg_zg;
      if (grad_diff > 0.0) {
        double quad = 2.0 - 2.0 * (*Ki)[t];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(grad_diff * grad_diff) / quad;
        if (obj < obj_min) {
          obj_min = obj;
          j = static_cast<int>(t);
        }
      }
    }

    report.kkt_violation = gmax - gmin;
    if (report.kkt_violation <= opts.kkt_tol || j < 0) {
      report.converged = true;
      break;
    }

    const std::vector<double>* Kj = kernel.row(j);
    if (!Kj) {
      budget_exhausted = true;
      break;
    }

    const double old_ai = alpha[i], old_aj = alpha[j];
    double quad = 2.0 - 2.0 * (*Ki)[j];
    if (quad <= 0.0) quad = kTau;
    if (z[i] != z[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = -diff;
        }
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = C + diff;
        }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (size_t t = 0; t < n; ++t) {
      grad[t] += z[i] * z[t] * (*Ki)[t] * dai + z[j] * z[t] * (*Kj)[t] * daj;
    }
    ++report.iterations;
  }

  report.kernel_evals = kernel.evals();
  if (budget_exhausted) report.converged = false;

  // Bias from the KKT conditions: average y*G over free vectors, else the
  // midpoint of the feasible interval. decision = sum coef K + bias.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  size_t nr_free = 0;
  for (size_t t = 0; t < n; ++t) {
    const double zg = z[t] * grad[t];
    if (is_upper(t)) {
      if (z[t] < 0) ub = std::min(ub, zg);
      else lb = std::max(lb, zg);
    } else if (is_lower(t)) {
      if (z[t] > 0) ub = std::min(ub, zg);
      else lb = std::max(lb, zg);
    } else {
      ++nr_free;
      sum_free += zg;
    }
  }
  const double rho = nr_free > 0 ? sum_free / nr_free : (ub + lb) / 2.0;

  SvcModel model;
  model.gamma = gamma;
  model.penalty_c = penalty_c;
  model.bias = -rho;
  model.norm = ds.norm;
  model.train_report = report;
  for (size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_back(x[t]);
      model.dual_coef.push_back(alpha[t] * z[t]);
    }
  }
  return model;
}

CrossValidationResult cross_validate(const LabeledDataset& ds,
                                     const std::vector<double>& c_grid,
                                     const std::vector<double>& gamma_grid,
                                     int folds, uint64_t seed,
                                     const TrainOptions& opts) {
  if (folds < 2) throw std::invalid_argument("cross_validate: need at least 2 folds");
  if (c_grid.empty() || gamma_grid.empty()) {
    throw std::invalid_argument("cross_validate: empty hyperparameter grid");
  }
  for (int y = 0; y < 2; ++y) {
    if (ds.count_label(y) < static_cast<size_t>(folds)) {
      throw std::invalid_argument("cross_validate: a fold would lack a class");
    }
  }

  // Stratified fold assignment: shuffle each class, deal round-robin.
  std::vector<int> fold_of(ds.size());
  Rng rng(seed);
  for (int y = 0; y < 2; ++y) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == y) idx.push_back(i);
    }
    for (size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
    }
    for (size_t k = 0; k < idx.size(); ++k) {
      fold_of[idx[k]] = static_cast<int>(k % folds);
    }
  }

  CrossValidationResult result;
  result.c_grid = c_grid;
  result.gamma_grid = gamma_grid;
  std::sort(result.c_grid.begin(), result.c_grid.end());
  std::sort(result.gamma_grid.begin(), result.gamma_grid.end());

  double best_score = -kInf;
  result.scores.assign(result.c_grid.size(),
                       std::vector<double>(result.gamma_grid.size(), 0.0));
  for (size_t ci = 0; ci < result.c_grid.size(); ++ci) {
    for (size_t gi = 0; gi < result.gamma_grid.size(); ++gi) {
      double score_sum = 0.0;
      for (int fold = 0; fold < folds; ++fold) {
        LabeledDataset tr, va;
        tr.norm = ds.norm;
        va.norm = ds.norm;
        for (size_t i = 0; i < ds.size(); ++i) {
          auto& dst = fold_of[i] == fold ? va : tr;
          dst.rows.push_back(ds.rows[i]);
          dst.labels.push_back(ds.labels[i]);
        }
        const SvcModel m = train(tr, result.c_grid[ci], result.gamma_grid[gi], opts);
        const RocCurve roc = roc_curve(m, va);
        double best_gmean = 0.0;
        for (const RocPoint& p : roc.points) {
          best_gmean = std::max(best_gmean, std::sqrt(p.tpr * (1.0 - p.fpr)));
        }
        score_sum += best_gmean;
      }
      const double score = score_sum / folds;
      result.scores[ci][gi] = score;
      if (score > best_score) {
        best_score = score;
        result.best_c = result.c_grid[ci];
        result.best_gamma = result.gamma_grid[gi];
      }
    }
  }
  return result;
}

RocCurve roc_curve(const SvcModel& model, const LabeledDataset& eval_set) {
  std::vector<double> values(eval_set.size());
  for (size_t i = 0; i < eval_set.size(); ++i) {
    values[i] = model.decision_value_raw(eval_set.rows[i]);
  }
  return roc_from_scores(values, eval_set.labels);
}

RocCurve roc_from_scores(const std::vector<double>& decision_values,
                         const std::vector<int>& labels) {
  size_t n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 0 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("roc_curve: evaluation set must contain both classes");
  }

  std::vector<std::pair<double, int>> scored(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    scored[i] = {decision_values[i], labels[i]};
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  RocCurve roc;
  roc.points.push_back({-kInf, 0.0, 0.0});
  uint64_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < scored.size()) {
    const double v = scored[i].first;
    while (i < scored.size() && scored[i].first == v) {
      if (scored[i].second == 0) ++tp;
      else ++fp;
      ++i;
    }
    roc.points.push_back({v, static_cast<double>(tp) / n_pos,
                          static_cast<double>(fp) / n_neg});
  }
  roc.points.push_back({kInf, 1.0, 1.0});

  double auc = 0.0;
  for (size_t k = 1; k < roc.points.size(); ++k) {
    const auto& a = roc.points[k - 1];
    const auto& b = roc.points[k];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  roc.auc = auc;
  return roc;
}

double operating_point(const RocCurve& roc) {
  if (roc.points.empty()) throw std::invalid_argument("operating_point: empty ROC");
  double best_g = -1.0, best_fpr = kInf, best_t = 0.0;
  for (const RocPoint& p : roc.points) {
    const double g = std::sqrt(p.tpr * (1.0 - p.fpr));
    if (g > best_g || (g == best_g && p.fpr < best_fpr)) {
      best_g = g;
      best_fpr = p.fpr;
      best_t = p.threshold;
    }
  }
  return best_t;
}

ConfusionMatrix confusion_at(const SvcModel& model,
                             const LabeledDataset& eval_set,
                             double threshold) {
  ConfusionMatrix cm;
  for (size_t i = 0; i < eval_set.size(); ++i) {
    const bool predicted_ch = model.decision_value_raw(eval_set.rows[i]) <= threshold;
    const bool actual_ch = eval_set.labels[i] == 0;
    if (predicted_ch && actual_ch) ++cm.tp;
    else if (predicted_ch && !actual_ch) ++cm.fp;
    else if (!predicted_ch && actual_ch) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

DetectionMetrics metrics(const ConfusionMatrix& cm) {
  DetectionMetrics m;
  if (cm.tp + cm.fn > 0) {
    m.tpr = static_cast<double>(cm.tp) / (cm.tp + cm.fn);
    m.fnr = static_cast<double>(cm.fn) / (cm.tp + cm.fn);
  }
  if (cm.tn + cm.fp > 0) m.fpr = static_cast<double>(cm.fp) / (cm.tn + cm.fp);
  if (cm.tp + cm.fp > 0) m.ppv = static_cast<double>(cm.tp) / (cm.tp + cm.fp);
  if (cm.total() > 0) m.accuracy = static_cast<double>(cm.tp + cm.tn) / cm.total();
  if (m.tpr && m.fpr) m.gmean = std::sqrt(*m.tpr * (1.0 - *m.fpr));
  return m;
}

void save_model(const SvcModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_model: cannot open " + path);
  char buf[512];
  f << "svcmodel v1\n";
  f << "# decision_value <= threshold predicts the coverage-hole class (0)\n";
  std::snprintf(buf, sizeof(buf), "gamma = %.17g\n", model.gamma);
  f << buf;
  std::snprintf(buf, sizeof(buf), "C = %.17g\n", model.penalty_c);
  f << buf;
  std::snprintf(buf, sizeof(buf), "bias = %.17g\n", model.bias);
  f << buf;
  std::snprintf(buf, sizeof(buf), "threshold = %.17g\n", model.decision_threshold);
  f << buf;
  auto write_array = [&](const char* key, const std::array<double, kFeatureCount>& a) {
    f << key << " =";
    for (double v : a) {
      std::snprintf(buf, sizeof(buf), " %.17g", v);
      f << buf;
    }
    f << "\n";
  };
  write_array("norm_mean", model.norm.mean);
  write_array("norm_scale", model.norm.scale);
  f << "support_vectors = " << model.support_vectors.size() << "\n";
  for (size_t i = 0; i < model.support_vectors.size(); ++i) {
    const auto& sv = model.support_vectors[i];
    for (int j = 0; j < kFeatureCount; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", sv[j]);
      f << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", model.dual_coef[i]);
    f << buf;
  }
}

SvcModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_model: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "svcmodel v1") {
    throw std::runtime_error("load_model: unsupported model file " + path);
  }

  SvcModel model;
  size_t sv_count = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key, eq;
    ss >> key >> eq;
    if (eq != "=") throw std::runtime_error("load_model: malformed line: " + line);
    if (key == "gamma") ss >> model.gamma;
    else if (key == "C") ss >> model.penalty_c;
    else if (key == "bias") ss >> model.bias;
    else if (key == "threshold") ss >> model.decision_threshold;
    else if (key == "norm_mean") for (auto& v : model.norm.mean) ss >> v;
    else if (key == "norm_scale") for (auto& v : model.norm.scale) ss >> v;
    else if (key == "support_vectors") {
      ss >> sv_count;
      break;
    } else {
      throw std::runtime_error("load_model: unknown key: " + key);
    }
    if (!ss) throw std::runtime_error("load_model: malformed value: " + line);
  }

  for (size_t i = 0; i < sv_count; ++i) {
    if (!std::getline(f, line)) throw std::runtime_error("load_model: truncated support vectors");
    FeatureVector sv;
    double coef = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &sv[0],
                    &sv[1], &sv[2], &sv[3], &sv[4], &sv[5], &sv[6],
                    &coef) != kFeatureCount + 1) {
      throw std::runtime_error("load_model: malformed support vector row");
    }
    model.support_vectors.push_back(sv);
    model.dual_coef.push_back(coef);
  }
  return model;
}

}  // namespace che
