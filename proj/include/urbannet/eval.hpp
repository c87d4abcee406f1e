#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urbannet/errors.hpp"

namespace urbannet::eval {

/// Positive-class and weighted-average classification metrics plus AUC.
/// The paper does not say which averaging its precision uses; both are kept.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

/// Stratified 80/20 split: train gets ceil(0.8 n) ids apportioned per class by
/// largest remainder. Deterministic per seed.
std::pair<std::vector<std::string>, std::vector<std::string>> split_80_20(
    const std::vector<std::string>& ids, const std::vector<int>& labels, std::uint64_t seed);

/// Stratified fold assignment (one fold id per input id), fold sizes within 1.
std::vector<int> kfold(const std::vector<std::string>& ids, const std::vector<int>& labels,
                       int n_folds, std::uint64_t seed);

/// precision/recall/F1 (positive class and weighted) from hard predictions.
Metrics confusion_metrics(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Probability that a random positive outscores a random negative, ties 1/2
/// (midrank Mann-Whitney).
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// ROC polyline: the (0,0) start, one point per distinct score (descending
/// threshold), and the (1,1) end. Trapezoid area equals auc().
std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<int>& labels);

double roc_area(const std::vector<RocPoint>& points);

void write_roc_csv(const std::vector<RocPoint>& points, const std::string& path,
                   const std::vector<std::string>& comment = {});

/// Minimal standalone SVG: unit axes, diagonal reference, ROC polyline.
void write_roc_svg(const std::vector<RocPoint>& points, const std::string& path,
                   const std::string& title);

}  // namespace urbannet::eval
