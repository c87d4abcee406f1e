#include "urbannet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "urbannet/util.hpp"

namespace urbannet::eval {

namespace {

void check_two_classes(const std::vector<int>& labels, const char* where) {
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == 0) neg = true;
    else throw ConfigError(std::string(where) + ": labels must be 0 or 1");
  }
  if (!pos || !neg) throw SingleClass(where);
}

/// Indices per class, preserving input order.
std::array<std::vector<int>, 2> by_class(const std::vector<int>& labels) {
  std::array<std::vector<int>, 2> out;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    out[labels[i] == 1 ? 1 : 0].push_back(i);
  }
  return out;
}

}  // namespace

std::pair<std::vector<std::string>, std::vector<std::string>> split_80_20(
    const std::vector<std::string>& ids, const std::vector<int>& labels, std::uint64_t seed) {
  if (ids.size() != labels.size()) throw LengthMismatch("split_80_20 ids vs labels");
  if (ids.size() < 5) throw TooFewSamples("split_80_20 needs at least 5 labeled tracts");
  check_two_classes(labels, "split_80_20");

  auto classes = by_class(labels);
  const std::size_t n = ids.size();
  const std::size_t train_total =
      static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(n)));

  // Largest-remainder apportionment of the train budget across classes;
  // ties go to the positive class.
  std::array<double, 2> exact{};
  std::array<std::size_t, 2> take{};
  for (int c : {0, 1}) {
    exact[c] = 0.8 * static_cast<double>(classes[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact[c]));
  }
  std::size_t assigned = take[0] + take[1];
  while (assigned < train_total) {
    const double rem0 = exact[0] - std::floor(exact[0]);
    const double rem1 = exact[1] - std::floor(exact[1]);
    int c = (rem1 >= rem0) ? 1 : 0;
    // Never exceed a class size.
    if (take[c] >= classes[c].size()) c = 1 - c;
    ++take[c];
    exact[c] = std::floor(exact[c]);  // consumed its remainder
    ++assigned;
  }

  std::mt19937_64 rng(util::derive_seed(seed, 0x5011u));
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  for (int c : {1, 0}) {
    auto idx = classes[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < take[c] ? out.first : out.second).push_back(ids[idx[i]]);
    }
  }
  return out;
}

std::vector<int> kfold(const std::vector<std::string>& ids, const std::vector<int>& labels,
                       int n_folds, std::uint64_t seed) {
  if (ids.size() != labels.size()) throw LengthMismatch("kfold ids vs labels");
  if (n_folds < 2) throw ConfigError("kfold needs n_folds >= 2");
  check_two_classes(labels, "kfold");
  auto classes = by_class(labels);
  for (int c : {0, 1}) {
    if (static_cast<int>(classes[c].size()) < n_folds) {
      throw TooFewSamples("kfold: class count below n_folds");
    }
  }

  std::mt19937_64 rng(util::derive_seed(seed, 0xf01d5u));
  std::vector<int> fold(ids.size(), -1);
  int next = 0;  // rotating fold offset keeps overall sizes within 1
  for (int c : {1, 0}) {
    auto idx = classes[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      fold[idx[i]] = next;
      next = (next + 1) % n_folds;
    }
  }
  return fold;
}

Metrics confusion_metrics(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw LengthMismatch("confusion_metrics");
  if (predicted.empty()) throw TooFewSamples("confusion_metrics on empty input");
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == 1;
    const bool t = truth[i] == 1;
    if (p && t) ++tp;
    else if (p && !t) ++fp;
    else if (!p && t) ++fn;
    else ++tn;
  }
  auto prf = [](long long tp_, long long fp_, long long fn_) {
    const double prec = (tp_ + fp_) > 0 ? static_cast<double>(tp_) / (tp_ + fp_) : 0.0;
    const double rec = (tp_ + fn_) > 0 ? static_cast<double>(tp_) / (tp_ + fn_) : 0.0;
    const double f1 = (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    return std::array<double, 3>{prec, rec, f1};
  };
  const auto pos = prf(tp, fp, fn);
  const auto neg = prf(tn, fn, fp);  // negatives as the "positive" class
  const double n_pos = static_cast<double>(tp + fn);
  const double n_neg = static_cast<double>(tn + fp);
  const double n = n_pos + n_neg;

  Metrics m;
  m.precision = pos[0];
  m.recall = pos[1];
  m.f1 = pos[2];
  m.precision_weighted = (n_pos * pos[0] + n_neg * neg[0]) / n;
  m.recall_weighted = (n_pos * pos[1] + n_neg * neg[1]) / n;
  m.f1_weighted = (n_pos * pos[2] + n_neg * neg[2]) / n;
  return m;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw LengthMismatch("auc scores vs labels");
  check_two_classes(labels, "auc");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks: tied scores share the average of their rank range.
  double rank_sum_pos = 0.0;
  long long n_pos = 0, n_neg = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum_pos += midrank;
    }
    i = j;
  }
  for (int y : labels) (y == 1 ? n_pos : n_neg)++;
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw LengthMismatch("roc_points scores vs labels");
  check_two_classes(labels, "roc_points");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1.0;

  std::vector<RocPoint> out;
  out.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  long long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    out.push_back({static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos, s});
  }
  out.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
  return out;
}

double roc_area(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * 0.5 * (points[i].tpr + points[i - 1].tpr);
  }
  return area;
}

void write_roc_csv(const std::vector<RocPoint>& points, const std::string& path,
                   const std::vector<std::string>& comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (const auto& c : comment) out << "# " << c << "\n";
  out << "threshold,fpr,tpr\n";
  for (const auto& p : points) {
    out << (std::isinf(p.threshold) ? (p.threshold > 0 ? "inf" : "-inf")
                                    : util::format_double(p.threshold))
        << ',' << util::format_double(p.fpr) << ',' << util::format_double(p.tpr) << '\n';
  }
}

void write_roc_svg(const std::vector<RocPoint>& points, const std::string& path,
                   const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  const double size = 400.0, margin = 40.0;
  auto sx = [&](double x) { return margin + x * (size - 2 * margin); };
  auto sy = [&](double y) { return size - margin - y * (size - 2 * margin); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\">\n";
  out << "<!-- " << title << " -->\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size - 2 * margin
      << "\" height=\"" << size - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\""
      << sy(1) << "\" stroke=\"grey\" stroke-dasharray=\"4\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\" points=\"";
  for (const auto& p : points) {
    out << util::format_double(sx(p.fpr)) << ',' << util::format_double(sy(p.tpr)) << ' ';
  }
  out << "\"/>\n";
  out << "<text x=\"" << size / 2 << "\" y=\"" << size - 8
      << "\" text-anchor=\"middle\" font-size=\"12\">false positive rate</text>\n";
  out << "<text x=\"12\" y=\"" << size / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 " << size / 2
      << ")\">true positive rate</text>\n";
  out << "<text x=\"" << size / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"12\">" << title
      << "</text>\n";
  out << "</svg>\n";
}

}  // namespace urbannet::eval
