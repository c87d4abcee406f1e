#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urbannet/ingest.hpp"
#include "urbannet/network.hpp"

namespace urbannet::featpipe {

/// Per-column z-score statistics. Zero-variance columns are flagged and map to
/// all-zeros instead of dividing by zero.
struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population std over the stat rows
  std::vector<bool> zero_variance;
};

/// Stats over the given subset of rows (training rows only, to avoid leakage).
ColumnStats column_stats(const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& stat_rows);

/// z-score every row with the provided stats.
std::vector<std::vector<double>> apply_standardize(const std::vector<std::vector<double>>& rows,
                                                   const ColumnStats& stats);

struct LogRegModel {
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<double> objective_history;  // mean logistic loss + lambda * ||w||_1
};

/// L1-penalized logistic regression via proximal gradient descent with
/// backtracking (soft-thresholding; the intercept is unpenalized). Stops when
/// the relative objective change drops below tol or at max_iter.
LogRegModel l1_logreg(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                      double lambda, int max_iter = 1000, double tol = 1e-8);

double logreg_score(const LogRegModel& model, const std::vector<double>& x);  // P(y=1)

struct SelectionOptions {
  std::vector<double> lambda_grid;  // empty -> default_lambda_grid()
  double corr_threshold = 0.8;
  int cv_folds = 5;
  std::uint64_t seed = 0;
  int max_iter = 1000;
  double tol = 1e-8;
};

/// 20 log-spaced values in [1e-4, 1e1].
std::vector<double> default_lambda_grid();

struct SelectionEntry {
  std::string feature;
  int column = 0;          // original socio column
  double coefficient = 0.0;
  int abs_rank = 0;        // 1-based rank by |coefficient|
  bool selected = false;   // nonzero L1 coefficient
  bool pruned = false;     // selected but dropped for collinearity
};

struct SelectionReport {
  std::vector<SelectionEntry> entries;  // original column order
  double chosen_lambda = 0.0;
  std::vector<int> kept_columns;        // surviving columns, by |coefficient| desc
  std::vector<std::string> kept_names;
  ColumnStats stats;                    // standardization stats (labeled tracts)
};

/// The socioeconomic selection pipeline: standardize on labeled tracts, pick
/// lambda by cross-validated AUC, keep nonzero-coefficient features, then prune
/// collinear survivors (|Pearson r| > corr_threshold keeps the larger |coef|).
SelectionReport select_features(const ingest::Dataset& dataset,
                                const SelectionOptions& options = {});

void write_selection_csv(const SelectionReport& report, const std::string& path,
                         const std::vector<std::string>& comment = {});

struct FeatureGroups {
  bool onehot = true;
  bool socio = true;
  bool footprints = true;
  bool hops = true;
  bool degree = false;  // normalized degree; used by structure-only GCN runs
};

/// Node-attribute matrix aligned 1:1 with a network's node order.
struct FeatureMatrix {
  std::vector<network::NodeRef> index;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;

  int rows() const { return static_cast<int>(values.size()); }
  int cols() const { return static_cast<int>(columns.size()); }
};

/// Assemble per-node rows: [one-hot kind] + [selected socio] + [footprints] +
/// [hops] + [normalized degree], as enabled. Facility nodes carry zeros in the
/// tract-only blocks. socio and footprint blocks are z-scored with
/// labeled-tract statistics. Pass selection/hops as null only when the
/// corresponding group is off.
FeatureMatrix assemble_features(const network::UrbanNetwork& net, const ingest::Dataset& dataset,
                                const SelectionReport* selection,
                                const network::HopFeatures* hops, const FeatureGroups& groups);

void write_feature_matrix_csv(const FeatureMatrix& fm, const std::string& path,
                              const std::vector<std::string>& comment = {});

}  // namespace urbannet::featpipe
