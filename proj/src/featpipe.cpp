#include "urbannet/featpipe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "urbannet/eval.hpp"
#include "urbannet/util.hpp"

namespace urbannet::featpipe {

ColumnStats column_stats(const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& stat_rows) {
  if (stat_rows.empty()) throw TooFewSamples("column_stats needs at least one stat row");
  const std::size_t m = rows.empty() ? 0 : rows[0].size();
  ColumnStats stats;
  stats.mean.assign(m, 0.0);
  stats.stddev.assign(m, 0.0);
  stats.zero_variance.assign(m, false);
  const double n = static_cast<double>(stat_rows.size());
  for (std::size_t c = 0; c < m; ++c) {
    double sum = 0.0;
    for (int r : stat_rows) sum += rows[r][c];
    const double mean = sum / n;
    double ss = 0.0;
    for (int r : stat_rows) {
      const double d = rows[r][c] - mean;
      ss += d * d;
    }
    stats.mean[c] = mean;
    stats.stddev[c] = std::sqrt(ss / n);
    if (stats.stddev[c] == 0.0) stats.zero_variance[c] = true;
  }
  return stats;
}

std::vector<std::vector<double>> apply_standardize(const std::vector<std::vector<double>>& rows,
                                                   const ColumnStats& stats) {
  std::vector<std::vector<double>> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != stats.mean.size()) throw ShapeMismatch("apply_standardize row width");
    out[r].resize(rows[r].size());
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out[r][c] = stats.zero_variance[c] ? 0.0 : (rows[r][c] - stats.mean[c]) / stats.stddev[c];
    }
  }
  return out;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Mean logistic loss; labels in {0,1} mapped onto {-1,+1} margins.
double logistic_loss(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<double>& w, double b) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = b;
    for (std::size_t c = 0; c < w.size(); ++c) z += w[c] * X[i][c];
    const double margin = (y[i] == 1 ? 1.0 : -1.0) * z;
    // log(1 + exp(-margin)) without overflow
    loss += margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
  }
  return loss / static_cast<double>(X.size());
}

void logistic_grad(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                   const std::vector<double>& w, double b, std::vector<double>& gw, double& gb) {
  std::fill(gw.begin(), gw.end(), 0.0);
  gb = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = b;
    for (std::size_t c = 0; c < w.size(); ++c) z += w[c] * X[i][c];
    const double ysgn = y[i] == 1 ? 1.0 : -1.0;
    const double coef = -ysgn * sigmoid(-ysgn * z);
    for (std::size_t c = 0; c < w.size(); ++c) gw[c] += coef * X[i][c];
    gb += coef;
  }
  const double inv_n = 1.0 / static_cast<double>(X.size());
  for (double& g : gw) g *= inv_n;
  gb *= inv_n;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double l1_norm(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += std::fabs(v);
  return s;
}

}  // namespace

LogRegModel l1_logreg(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                      double lambda, int max_iter, double tol) {
  if (X.size() != y.size()) throw LengthMismatch("l1_logreg X vs y");
  if (X.empty()) throw TooFewSamples("l1_logreg on empty input");
  if (lambda < 0) throw ConfigError("l1_logreg lambda must be >= 0");
  const std::size_t m = X[0].size();

  LogRegModel model;
  model.weights.assign(m, 0.0);
  model.intercept = 0.0;

  std::vector<double> gw(m), w_next(m);
  double step = 1.0;
  double objective = logistic_loss(X, y, model.weights, model.intercept);  // ||0||_1 = 0
  model.objective_history.push_back(objective);

  for (int iter = 0; iter < max_iter; ++iter) {
    double gb = 0.0;
    logistic_grad(X, y, model.weights, model.intercept, gw, gb);
    const double f0 = logistic_loss(X, y, model.weights, model.intercept);

    step = std::min(step * 2.0, 1e6);  // optimistic restart, backtracking trims it
    double b_next = 0.0;
    while (true) {
      for (std::size_t c = 0; c < m; ++c) {
        w_next[c] = soft_threshold(model.weights[c] - step * gw[c], step * lambda);
      }
      b_next = model.intercept - step * gb;
      // Sufficient-decrease check for the smooth part at the candidate point.
      double lin = 0.0, quad = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        const double d = w_next[c] - model.weights[c];
        lin += gw[c] * d;
        quad += d * d;
      }
      const double db = b_next - model.intercept;
      lin += gb * db;
      quad += db * db;
      const double f_next = logistic_loss(X, y, w_next, b_next);
      if (f_next <= f0 + lin + quad / (2.0 * step) + 1e-15) break;
      step *= 0.5;
      if (step < 1e-12) break;
    }
    model.weights = w_next;
    model.intercept = b_next;
    const double next_objective =
        logistic_loss(X, y, model.weights, model.intercept) + lambda * l1_norm(model.weights);
    if (!std::isfinite(next_objective)) throw NonFinite("l1_logreg objective");
    model.objective_history.push_back(next_objective);
    if (std::fabs(objective - next_objective) <= tol * std::max(1.0, std::fabs(objective))) {
      break;
    }
    objective = next_objective;
  }
  return model;
}

double logreg_score(const LogRegModel& model, const std::vector<double>& x) {
  if (x.size() != model.weights.size()) throw ShapeMismatch("logreg_score input width");
  double z = model.intercept;
  for (std::size_t c = 0; c < x.size(); ++c) z += model.weights[c] * x[c];
  return sigmoid(z);
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  const double lo = std::log10(1e-4), hi = std::log10(1e1);
  for (int i = 0; i < 20; ++i) {
    grid.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / 19.0));
  }
  return grid;
}

namespace {

/// Pearson correlation of two standardized columns over the given rows.
double pearson(const std::vector<std::vector<double>>& rows, const std::vector<int>& sel,
               int a, int b) {
  const double n = static_cast<double>(sel.size());
  double sa = 0, sb = 0;
  for (int r : sel) {
    sa += rows[r][a];
    sb += rows[r][b];
  }
  const double ma = sa / n, mb = sb / n;
  double cov = 0, va = 0, vb = 0;
  for (int r : sel) {
    const double da = rows[r][a] - ma, db = rows[r][b] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace

SelectionReport select_features(const ingest::Dataset& dataset, const SelectionOptions& options) {
  const auto labeled = dataset.labeled_indices();
  if (dataset.socio_names.size() < 2) throw TooFewSamples("select_features needs >= 2 features");
  if (labeled.size() < 10) throw TooFewSamples("select_features needs >= 10 labeled rows");

  SelectionReport report;
  report.stats = column_stats(dataset.socio, labeled);

  // Standardized labeled rows drive both CV and the final fit.
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  std::vector<std::string> row_ids;
  {
    std::vector<std::vector<double>> raw;
    for (int r : labeled) {
      raw.push_back(dataset.socio[r]);
      y.push_back(*dataset.tracts[r].label);
      row_ids.push_back(dataset.tracts[r].id);
    }
    X = apply_standardize(raw, report.stats);
  }

  const std::vector<double> grid =
      options.lambda_grid.empty() ? default_lambda_grid() : options.lambda_grid;

  // Fold assignment by seeded hash of tract id: row-order invariant.
  const int folds = options.cv_folds;
  std::vector<int> fold(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    fold[i] = static_cast<int>(
        util::splitmix64(util::fnv1a(row_ids[i]) ^ util::splitmix64(options.seed)) %
        static_cast<std::uint64_t>(folds));
  }

  double best_lambda = grid.front();
  double best_auc = -1.0;
  for (double lambda : grid) {
    double auc_sum = 0.0;
    int auc_count = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::vector<double>> x_tr, x_va;
      std::vector<int> y_tr, y_va;
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (fold[i] == f) {
          x_va.push_back(X[i]);
          y_va.push_back(y[i]);
        } else {
          x_tr.push_back(X[i]);
          y_tr.push_back(y[i]);
        }
      }
      // A fold can occasionally miss a class; it is skipped, not an error.
      const bool va_ok = std::count(y_va.begin(), y_va.end(), 1) > 0 &&
                         std::count(y_va.begin(), y_va.end(), 0) > 0;
      const bool tr_ok = std::count(y_tr.begin(), y_tr.end(), 1) > 0 &&
                         std::count(y_tr.begin(), y_tr.end(), 0) > 0;
      if (!va_ok || !tr_ok || x_tr.empty() || x_va.empty()) continue;
      const auto model = l1_logreg(x_tr, y_tr, lambda, options.max_iter, options.tol);
      std::vector<double> scores;
      scores.reserve(x_va.size());
      for (const auto& row : x_va) scores.push_back(logreg_score(model, row));
      auc_sum += eval::auc(scores, y_va);
      ++auc_count;
    }
    if (auc_count == 0) continue;
    const double mean_auc = auc_sum / auc_count;
    // Ties go to the larger lambda (sparser model).
    if (mean_auc > best_auc || (mean_auc == best_auc && lambda > best_lambda)) {
      best_auc = mean_auc;
      best_lambda = lambda;
    }
  }
  report.chosen_lambda = best_lambda;

  const auto final_model = l1_logreg(X, y, best_lambda, options.max_iter, options.tol);

  report.entries.resize(dataset.socio_names.size());
  for (std::size_t c = 0; c < dataset.socio_names.size(); ++c) {
    auto& e = report.entries[c];
    e.feature = dataset.socio_names[c];
    e.column = static_cast<int>(c);
    e.coefficient = final_model.weights[c];
    e.selected = final_model.weights[c] != 0.0;
  }

  // Rank all features by |coefficient| (ties by column order).
  std::vector<int> rank_order(report.entries.size());
  std::iota(rank_order.begin(), rank_order.end(), 0);
  std::stable_sort(rank_order.begin(), rank_order.end(), [&](int a, int b) {
    return std::fabs(report.entries[a].coefficient) > std::fabs(report.entries[b].coefficient);
  });
  for (std::size_t i = 0; i < rank_order.size(); ++i) {
    report.entries[rank_order[i]].abs_rank = static_cast<int>(i + 1);
  }

  // Collinearity pruning: walk survivors by descending |coef|; drop a feature
  // when it correlates above the threshold with an already-kept one.
  std::vector<int> kept;
  for (int c : rank_order) {
    if (!report.entries[c].selected) continue;
    bool drop = false;
    for (int k : kept) {
      if (std::fabs(pearson(X, [&] {
            std::vector<int> all(X.size());
            std::iota(all.begin(), all.end(), 0);
            return all;
          }(), c, k)) > options.corr_threshold) {
        drop = true;
        break;
      }
    }
    if (drop) {
      report.entries[c].pruned = true;
    } else {
      kept.push_back(c);
    }
  }
  for (int c : kept) {
    report.kept_columns.push_back(c);
    report.kept_names.push_back(report.entries[c].feature);
  }
  return report;
}

void write_selection_csv(const SelectionReport& report, const std::string& path,
                         const std::vector<std::string>& comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (const auto& c : comment) out << "# " << c << "\n";
  out << "feature,coefficient,abs_rank,selected,pruned\n";
  // Appendix-style: ranked by |coefficient|.
  std::vector<const SelectionEntry*> rows;
  for (const auto& e : report.entries) rows.push_back(&e);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto* a, const auto* b) { return a->abs_rank < b->abs_rank; });
  for (const auto* e : rows) {
    out << e->feature << ',' << util::format_double(e->coefficient) << ',' << e->abs_rank << ','
        << (e->selected ? 1 : 0) << ',' << (e->pruned ? 1 : 0) << '\n';
  }
}

FeatureMatrix assemble_features(const network::UrbanNetwork& net, const ingest::Dataset& dataset,
                                const SelectionReport* selection,
                                const network::HopFeatures* hops, const FeatureGroups& groups) {
  using network::NodeKind;
  if (groups.socio && selection == nullptr) throw ShapeMismatch("socio group needs a selection");
  if (groups.hops && hops == nullptr) throw ShapeMismatch("hops group needs hop features");

  FeatureMatrix fm;
  fm.index = net.nodes;

  if (groups.onehot) {
    fm.columns.insert(fm.columns.end(),
                      {"kind_tract", "kind_school", "kind_hospital", "kind_subway"});
  }
  if (groups.socio) {
    for (const auto& name : selection->kept_names) fm.columns.push_back("socio_" + name);
  }
  const std::vector<std::string> fp_cols = {"fp_building_count", "fp_total_perimeter_m",
                                            "fp_total_area_m2", "fp_mean_area_m2"};
  if (groups.footprints) fm.columns.insert(fm.columns.end(), fp_cols.begin(), fp_cols.end());
  if (groups.hops) {
    fm.columns.insert(fm.columns.end(), {"hops_school", "hops_hospital", "hops_subway"});
  }
  if (groups.degree) fm.columns.push_back("norm_degree");

  // Tract lookups.
  std::unordered_map<std::string, std::size_t> tract_pos;
  for (std::size_t i = 0; i < dataset.tracts.size(); ++i) tract_pos[dataset.tracts[i].id] = i;
  std::unordered_map<std::string, std::size_t> hop_pos;
  if (groups.hops) {
    for (std::size_t i = 0; i < hops->tract_ids.size(); ++i) hop_pos[hops->tract_ids[i]] = i;
  }

  // Standardized tract-row blocks. Stats come from labeled tracts only.
  std::vector<std::vector<double>> socio_std;
  if (groups.socio) {
    if (selection->stats.mean.size() != dataset.socio_names.size()) {
      throw ShapeMismatch("selection stats do not match dataset socio columns");
    }
    socio_std = apply_standardize(dataset.socio, selection->stats);
  }
  std::vector<std::vector<double>> fp_std;
  if (groups.footprints) {
    std::vector<std::vector<double>> raw;
    raw.reserve(dataset.tracts.size());
    for (const auto& s : dataset.footprints) {
      raw.push_back({static_cast<double>(s.building_count), s.total_perimeter_m, s.total_area_m2,
                     s.mean_area_m2});
    }
    fp_std = apply_standardize(raw, column_stats(raw, dataset.labeled_indices()));
  }

  int max_degree = 0;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    max_degree = std::max(max_degree, net.degree(static_cast<int>(i)));
  }

  fm.values.reserve(net.nodes.size());
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const auto& node = net.nodes[i];
    std::vector<double> row;
    row.reserve(fm.columns.size());
    const bool is_tract = node.kind == NodeKind::Tract;
    std::size_t tr = 0;
    if (is_tract) {
      auto it = tract_pos.find(node.id);
      if (it == tract_pos.end()) throw ShapeMismatch("network tract not in dataset: " + node.id);
      tr = it->second;
    }
    if (groups.onehot) {
      for (int kk = 0; kk < 4; ++kk) row.push_back(static_cast<int>(node.kind) == kk ? 1.0 : 0.0);
    }
    if (groups.socio) {
      for (int c : selection->kept_columns) row.push_back(is_tract ? socio_std[tr][c] : 0.0);
    }
    if (groups.footprints) {
      for (int c = 0; c < 4; ++c) row.push_back(is_tract ? fp_std[tr][c] : 0.0);
    }
    if (groups.hops) {
      if (is_tract) {
        auto it = hop_pos.find(node.id);
        if (it == hop_pos.end()) throw ShapeMismatch("hop features missing tract " + node.id);
        for (int c = 0; c < 3; ++c) {
          row.push_back(static_cast<double>(hops->hops[it->second][c]));
        }
      } else {
        for (int c = 0; c < 3; ++c) row.push_back(0.0);
      }
    }
    if (groups.degree) {
      row.push_back(max_degree > 0
                        ? static_cast<double>(net.degree(static_cast<int>(i))) / max_degree
                        : 0.0);
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw NonFinite("feature matrix row for node " + node.id);
    }
    fm.values.push_back(std::move(row));
  }
  return fm;
}

void write_feature_matrix_csv(const FeatureMatrix& fm, const std::string& path,
                              const std::vector<std::string>& comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (const auto& c : comment) out << "# " << c << "\n";
  out << "kind,id";
  for (const auto& col : fm.columns) out << ',' << col;
  out << '\n';
  for (std::size_t i = 0; i < fm.values.size(); ++i) {
    out << network::node_kind_name(fm.index[i].kind) << ',' << fm.index[i].id;
    for (double v : fm.values[i]) out << ',' << util::format_double(v);
    out << '\n';
  }
}

}  // namespace urbannet::featpipe
