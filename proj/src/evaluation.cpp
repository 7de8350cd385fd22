#include "latnet/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace latnet {

PredictionMatrix cross_validate(const Sociomatrix& y, const DyadCovariates& x,
                                ModelKind kind, int K, int folds,
                                const SamplerConfig& cfg,
                                const PriorConfig& prior, int jobs) {
  PredictionMatrix out;
  out.folds = assign_folds(y, folds, cfg.seed);
  out.yhat = Eigen::VectorXd::Zero(y.dyad_count());
  out.predicted.assign(y.dyad_count(), 0);
  out.truth.assign(y.dyad_count(), 0);
  const int lowest = y.value_levels().front();
  for (int d = 0; d < y.dyad_count(); ++d)
    if (y.observed_at(d)) out.truth[d] = y.value_at(d) > lowest;

  const PriorConfig calibrated =
      calibrate_prior_alpha_variance(kind, K, prior, y.node_count());

  std::vector<Eigen::VectorXd> fold_yhat(folds);
  std::vector<std::exception_ptr> errors(folds);
  const auto run_fold = [&](int f) {
    try {
      const Sociomatrix masked = mask_fold(y, out.folds, f + 1);
      SamplerConfig fold_cfg = cfg;
      fold_cfg.seed = mix_seed(cfg.seed, 0xCF01D000 + static_cast<std::uint64_t>(f));
      GibbsSampler sampler(masked, x, kind, K, fold_cfg, calibrated);
      fold_yhat[f] = posterior_predictive_mean(sampler.run());
    } catch (...) {
      errors[f] = std::current_exception();
    }
  };

  if (jobs <= 1) {
    for (int f = 0; f < folds; ++f) run_fold(f);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::min(jobs, folds);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int f = next.fetch_add(1);
          if (f >= folds) return;
          run_fold(f);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (int f = 0; f < folds; ++f)
    if (errors[f]) std::rethrow_exception(errors[f]);

  for (int d = 0; d < y.dyad_count(); ++d) {
    const int f = out.folds.fold[d];
    if (f >= 1) {
      out.yhat[d] = fold_yhat[f - 1][d];
      out.predicted[d] = 1;
    }
  }
  return out;
}

RocCurve roc_curve(const std::vector<double>& score,
                   const std::vector<std::uint8_t>& truth) {
  if (score.size() != truth.size())
    throw std::invalid_argument("roc_curve: size mismatch");
  long long pos = 0, neg = 0;
  for (const auto t : truth) (t ? pos : neg)++;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc_curve: need both classes in the truth");
  std::vector<int> order(score.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return score[a] > score[b];
  });
  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  long long tp = 0, fp = 0;
  double auc2 = 0.0;  // twice the area, accumulated per tie group
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    long long dtp = 0, dfp = 0;
    while (j < order.size() && score[order[j]] == score[order[i]]) {
      (truth[order[j]] ? dtp : dfp)++;
      ++j;
    }
    auc2 += static_cast<double>(dfp) * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.points.push_back({static_cast<double>(fp) / neg,
                          static_cast<double>(tp) / pos});
    i = j;
  }
  roc.auc = auc2 / (2.0 * pos * neg);
  return roc;
}

RocCurve roc_curve(const PredictionMatrix& pred) {
  std::vector<double> score;
  std::vector<std::uint8_t> truth;
  for (int d = 0; d < static_cast<int>(pred.predicted.size()); ++d) {
    if (!pred.predicted[d]) continue;
    score.push_back(pred.yhat[d]);
    truth.push_back(pred.truth[d]);
  }
  return roc_curve(score, truth);
}

void write_predictions_tsv(const Sociomatrix& y, const PredictionMatrix& pred,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "i\tj\tfold\ttruth\tyhat\n";
  char buf[32];
  for (int d = 0; d < y.dyad_count(); ++d) {
    if (!pred.predicted[d]) continue;
    const auto [i, j] = y.dyad_nodes(d);
    std::snprintf(buf, sizeof buf, "%.10g", pred.yhat[d]);
    out << y.labels()[i] << '\t' << y.labels()[j] << '\t' << pred.folds.fold[d]
        << '\t' << static_cast<int>(pred.truth[d]) << '\t' << buf << '\n';
  }
}

void write_roc_tsv(const RocCurve& roc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "fpr\ttpr\n";
  char buf[32];
  for (const auto& p : roc.points) {
    std::snprintf(buf, sizeof buf, "%.10g\t%.10g", p.fpr, p.tpr);
    out << buf << '\n';
  }
}

void AucTable::set(const std::string& dataset, const std::string& model, int k,
                   double auc) {
  if (std::find(datasets.begin(), datasets.end(), dataset) == datasets.end())
    datasets.push_back(dataset);
  if (std::find(dimensions.begin(), dimensions.end(), k) == dimensions.end()) {
    dimensions.push_back(k);
    std::sort(dimensions.begin(), dimensions.end());
  }
  cells[{dataset, model, k}] = auc;
}

double AucTable::get(const std::string& dataset, const std::string& model,
                     int k) const {
  const auto it = cells.find({dataset, model, k});
  if (it == cells.end()) throw std::out_of_range("auc table cell missing");
  return it->second;
}

std::string format_auc_table_csv(const AucTable& table) {
  std::ostringstream out;
  out << "K";
  for (const auto& ds : table.datasets)
    for (const auto& m : table.models) out << ',' << ds << ':' << m;
  out << '\n';
  char buf[16];
  for (const int k : table.dimensions) {
    out << k;
    for (const auto& ds : table.datasets) {
      for (const auto& m : table.models) {
        const auto it = table.cells.find({ds, m, k});
        if (it == table.cells.end()) {
          out << ',';
        } else {
          std::snprintf(buf, sizeof buf, "%.2f", it->second);
          out << ',' << buf;
        }
      }
    }
    out << '\n';
  }
  return out.str();
}

AucTable parse_auc_table_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty table");
  AucTable table;
  table.models.clear();
  std::vector<std::pair<std::string, std::string>> columns;
  {
    std::istringstream hs(line);
    std::string cell;
    bool first = true;
    while (std::getline(hs, cell, ',')) {
      if (first) {
        first = false;
        continue;
      }
      const auto colon = cell.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("bad table header cell '" + cell + "'");
      const std::string ds = cell.substr(0, colon);
      const std::string model = cell.substr(colon + 1);
      columns.emplace_back(ds, model);
      if (std::find(table.datasets.begin(), table.datasets.end(), ds) ==
          table.datasets.end())
        table.datasets.push_back(ds);
      if (std::find(table.models.begin(), table.models.end(), model) ==
          table.models.end())
        table.models.push_back(model);
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    const int k = std::stoi(cell);
    table.dimensions.push_back(k);
    for (const auto& [ds, model] : columns) {
      if (!std::getline(ls, cell, ',')) cell.clear();
      if (!cell.empty()) table.cells[{ds, model, k}] = std::stod(cell);
    }
  }
  std::sort(table.dimensions.begin(), table.dimensions.end());
  return table;
}

void write_auc_table_csv(const AucTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_auc_table_csv(table);
}

}  // namespace latnet
