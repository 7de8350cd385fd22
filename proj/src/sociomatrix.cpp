#include "latnet/sociomatrix.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "latnet/rng.hpp"

namespace latnet {

int dyad_index(int n, int i, int j) {
  if (i == j) throw std::invalid_argument("sociomatrix diagonal is undefined");
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw std::out_of_range("node index out of range");
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

int dyad_count(int n) { return n * (n - 1) / 2; }

Sociomatrix::Sociomatrix(std::vector<std::string> labels,
                         Eigen::VectorXi values,
                         std::vector<std::uint8_t> observed)
    : n_(static_cast<int>(labels.size())),
      labels_(std::move(labels)),
      values_(std::move(values)),
      observed_(std::move(observed)) {
  if (n_ < 2) throw std::invalid_argument("sociomatrix needs at least 2 nodes");
  const int d = latnet::dyad_count(n_);
  if (values_.size() != d || static_cast<int>(observed_.size()) != d)
    throw std::invalid_argument("sociomatrix storage size mismatch");
  std::set<int> distinct;
  observed_count_ = 0;
  for (int k = 0; k < d; ++k) {
    if (observed_[k]) {
      ++observed_count_;
      distinct.insert(values_[k]);
    }
  }
  value_levels_.assign(distinct.begin(), distinct.end());
}

Sociomatrix Sociomatrix::all_observed(std::vector<std::string> labels,
                                      Eigen::VectorXi values) {
  std::vector<std::uint8_t> obs(values.size(), 1);
  return Sociomatrix(std::move(labels), std::move(values), std::move(obs));
}

std::pair<int, int> Sociomatrix::dyad_nodes(int d) const {
  if (d < 0 || d >= dyad_count()) throw std::out_of_range("dyad index out of range");
  int i = 0;
  int row_len = n_ - 1;
  while (d >= row_len) {
    d -= row_len;
    ++i;
    --row_len;
  }
  return {i, i + 1 + d};
}

int Sociomatrix::value_at(int d) const {
  if (d < 0 || d >= dyad_count()) throw std::out_of_range("dyad index out of range");
  if (!observed_[d]) throw std::runtime_error("dyad is unobserved");
  return values_[d];
}

int Sociomatrix::level_at(int d) const {
  const int v = value_at(d);
  const auto it = std::lower_bound(value_levels_.begin(), value_levels_.end(), v);
  return static_cast<int>(it - value_levels_.begin());
}

DyadCovariates DyadCovariates::none(int node_count) {
  return DyadCovariates(node_count, Eigen::MatrixXd(dyad_count(node_count), 0));
}

DyadCovariates::DyadCovariates(int node_count, Eigen::MatrixXd x)
    : n_(node_count), x_(std::move(x)) {
  if (x_.rows() != dyad_count(n_))
    throw std::invalid_argument("covariate row count must equal dyad count");
}

int FoldAssignment::size_of(int f) const {
  int c = 0;
  for (const int v : fold) c += (v == f);
  return c;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int_strict(const std::string& s, const std::string& what) {
  if (s.empty()) throw std::runtime_error(what + ": empty integer field");
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size())
    throw std::runtime_error(what + ": not an integer: '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

Sociomatrix load_edge_list(const std::string& path, int default_value) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> id;
  auto node = [&](const std::string& s) {
    const auto it = id.find(s);
    if (it != id.end()) return it->second;
    const int k = static_cast<int>(labels.size());
    id.emplace(s, k);
    labels.push_back(s);
    return k;
  };
  std::map<std::pair<int, int>, int> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_tabs(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (f.size() != 2 && f.size() != 3)
      throw std::runtime_error(where + ": expected 2 or 3 tab-separated fields");
    if (f[0] == f[1]) throw std::runtime_error(where + ": self loop '" + f[0] + "'");
    const int v = f.size() == 3 ? parse_int_strict(f[2], where) : 1;
    int a = node(f[0]);
    int b = node(f[1]);
    if (a > b) std::swap(a, b);
    const auto it = edges.find({a, b});
    if (it != edges.end()) {
      if (it->second != v)
        throw std::runtime_error(where + ": conflicting duplicate for dyad " +
                                 f[0] + "," + f[1]);
    } else {
      edges.emplace(std::make_pair(a, b), v);
    }
  }
  if (labels.size() < 2) throw std::runtime_error(path + ": no dyads found");
  const int n = static_cast<int>(labels.size());
  Eigen::VectorXi values = Eigen::VectorXi::Constant(dyad_count(n), default_value);
  for (const auto& [key, v] : edges) values[dyad_index(n, key.first, key.second)] = v;
  return Sociomatrix::all_observed(std::move(labels), std::move(values));
}

void write_edge_list(const Sociomatrix& y, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int d = 0; d < y.dyad_count(); ++d) {
    if (!y.observed_at(d)) continue;
    const auto [i, j] = y.dyad_nodes(d);
    out << y.labels()[i] << '\t' << y.labels()[j] << '\t' << y.value_at(d) << '\n';
  }
}

Sociomatrix load_dense_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<std::string> labels;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      labels.push_back(cell);
    }
  }
  const int n = static_cast<int>(labels.size());
  if (n < 2) throw std::runtime_error(path + ": need at least 2 columns");
  Eigen::VectorXi values = Eigen::VectorXi::Zero(dyad_count(n));
  std::vector<std::uint8_t> observed(dyad_count(n), 0);
  std::vector<std::uint8_t> seen(dyad_count(n), 0);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error(path + ": expected " + std::to_string(n) + " rows");
    std::stringstream ss(line);
    std::string cell;
    for (int j = 0; j < n; ++j) {
      if (!std::getline(ss, cell, ','))
        throw std::runtime_error(path + ": short row " + std::to_string(i + 1));
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      if (i == j) {
        if (cell != "NA")
          throw std::runtime_error(path + ": diagonal must be NA");
        continue;
      }
      const int d = dyad_index(n, i, j);
      if (cell == "NA") {
        if (seen[d] && observed[d])
          throw std::runtime_error(path + ": asymmetric entries for dyad");
        seen[d] = 1;
        continue;
      }
      const int v = parse_int_strict(cell, path);
      if (seen[d] && (!observed[d] || values[d] != v))
        throw std::runtime_error(path + ": asymmetric entries for dyad");
      seen[d] = 1;
      observed[d] = 1;
      values[d] = v;
    }
  }
  return Sociomatrix(std::move(labels), std::move(values), std::move(observed));
}

void write_dense_csv(const Sociomatrix& y, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const int n = y.node_count();
  for (int j = 0; j < n; ++j) out << (j ? "," : "") << y.labels()[j];
  out << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) out << ',';
      if (i == j || !y.is_observed(i, j))
        out << "NA";
      else
        out << y.value(i, j);
    }
    out << '\n';
  }
}

DyadCovariates load_covariates(const std::string& path, const Sociomatrix& y) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::unordered_map<std::string, int> id;
  for (int i = 0; i < y.node_count(); ++i) id.emplace(y.labels()[i], i);
  const int n = y.node_count();
  Eigen::MatrixXd x;
  std::vector<std::uint8_t> seen(dyad_count(n), 0);
  int p = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_tabs(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (f.size() < 3) throw std::runtime_error(where + ": expected label, label, values");
    if (p < 0) {
      p = static_cast<int>(f.size()) - 2;
      x = Eigen::MatrixXd::Zero(dyad_count(n), p);
    } else if (static_cast<int>(f.size()) - 2 != p) {
      throw std::runtime_error(where + ": inconsistent covariate dimension");
    }
    const auto ia = id.find(f[0]);
    const auto ib = id.find(f[1]);
    if (ia == id.end() || ib == id.end())
      throw std::runtime_error(where + ": unknown node label");
    if (ia->second == ib->second) throw std::runtime_error(where + ": self loop");
    const int d = dyad_index(n, ia->second, ib->second);
    if (seen[d]) throw std::runtime_error(where + ": duplicate dyad");
    seen[d] = 1;
    for (int k = 0; k < p; ++k) {
      char* end = nullptr;
      x(d, k) = std::strtod(f[2 + k].c_str(), &end);
      if (end != f[2 + k].c_str() + f[2 + k].size())
        throw std::runtime_error(where + ": not a number: '" + f[2 + k] + "'");
    }
  }
  if (p < 0) p = 0;
  if (p == 0) return DyadCovariates::none(n);
  return DyadCovariates(n, std::move(x));
}

Sociomatrix tokenize_adjacency_counts(const std::string& text) {
  static const std::string kPunct = ".,;:?!";
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> id;
  auto token_id = [&](const std::string& s) {
    const auto it = id.find(s);
    if (it != id.end()) return it->second;
    const int k = static_cast<int>(labels.size());
    id.emplace(s, k);
    labels.push_back(s);
    return k;
  };
  std::vector<int> stream;
  std::string run;
  auto flush_run = [&] {
    if (!run.empty()) {
      stream.push_back(token_id(run));
      run.clear();
    }
  };
  for (const char c : text) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      run += static_cast<char>(std::tolower(u));
    } else {
      flush_run();
      if (kPunct.find(c) != std::string::npos) stream.push_back(token_id(std::string(1, c)));
    }
  }
  flush_run();
  if (stream.empty()) throw std::runtime_error("empty token stream");
  const int n = static_cast<int>(labels.size());
  if (n < 2) throw std::runtime_error("token stream has a single distinct token");
  Eigen::VectorXi values = Eigen::VectorXi::Zero(dyad_count(n));
  for (std::size_t t = 0; t + 1 < stream.size(); ++t) {
    if (stream[t] == stream[t + 1]) continue;  // repeated token
    ++values[dyad_index(n, stream[t], stream[t + 1])];
  }
  return Sociomatrix::all_observed(std::move(labels), std::move(values));
}

Sociomatrix largest_connected_component(const Sociomatrix& y, int threshold) {
  if (y.observed_count() == 0) throw std::runtime_error("no observed entries");
  const int n = y.node_count();
  std::vector<std::vector<int>> adj(n);
  for (int d = 0; d < y.dyad_count(); ++d) {
    if (!y.observed_at(d) || y.value_at(d) <= threshold) continue;
    const auto [i, j] = y.dyad_nodes(d);
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = n_comp;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (const int w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = n_comp;
          queue.push_back(w);
        }
      }
    }
    ++n_comp;
  }
  std::vector<int> size(n_comp, 0);
  std::vector<std::string> min_label(n_comp);
  for (int v = 0; v < n; ++v) {
    const int c = comp[v];
    ++size[c];
    if (min_label[c].empty() || y.labels()[v] < min_label[c])
      min_label[c] = y.labels()[v];
  }
  int best = 0;
  for (int c = 1; c < n_comp; ++c) {
    if (size[c] > size[best] ||
        (size[c] == size[best] && min_label[c] < min_label[best]))
      best = c;
  }
  std::vector<int> keep;
  for (int v = 0; v < n; ++v)
    if (comp[v] == best) keep.push_back(v);
  const int m = static_cast<int>(keep.size());
  if (m < 2) throw std::runtime_error("largest component has fewer than 2 nodes");
  std::vector<std::string> labels(m);
  Eigen::VectorXi values = Eigen::VectorXi::Zero(dyad_count(m));
  std::vector<std::uint8_t> observed(dyad_count(m), 0);
  for (int a = 0; a < m; ++a) labels[a] = y.labels()[keep[a]];
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const int d_old = y.dyad_index(keep[a], keep[b]);
      const int d_new = dyad_index(m, a, b);
      if (y.observed_at(d_old)) {
        observed[d_new] = 1;
        values[d_new] = y.value_at(d_old);
      }
    }
  }
  return Sociomatrix(std::move(labels), std::move(values), std::move(observed));
}

FoldAssignment assign_folds(const Sociomatrix& y, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("assign_folds: need at least 2 folds");
  std::vector<int> observed;
  for (int d = 0; d < y.dyad_count(); ++d)
    if (y.observed_at(d)) observed.push_back(d);
  if (static_cast<int>(observed.size()) < folds)
    throw std::invalid_argument("assign_folds: more folds than observed dyads");
  RngStream rng(seed, 0xF01D5);
  // Fisher-Yates so the permutation does not depend on library internals.
  for (int k = static_cast<int>(observed.size()) - 1; k > 0; --k) {
    const int r = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k) + 1));
    std::swap(observed[k], observed[r]);
  }
  FoldAssignment a;
  a.fold_count = folds;
  a.seed = seed;
  a.fold.assign(y.dyad_count(), 0);
  for (std::size_t pos = 0; pos < observed.size(); ++pos)
    a.fold[observed[pos]] = 1 + static_cast<int>(pos % folds);
  return a;
}

Sociomatrix mask_fold(const Sociomatrix& y, const FoldAssignment& a, int f) {
  if (f < 1 || f > a.fold_count)
    throw std::invalid_argument("mask_fold: fold index out of range");
  if (static_cast<int>(a.fold.size()) != y.dyad_count())
    throw std::invalid_argument("mask_fold: assignment does not match matrix");
  Eigen::VectorXi values(y.dyad_count());
  std::vector<std::uint8_t> observed(y.dyad_count(), 0);
  for (int d = 0; d < y.dyad_count(); ++d) {
    const bool hide = a.fold[d] == f;
    if (y.observed_at(d) && !hide) {
      observed[d] = 1;
      values[d] = y.value_at(d);
    } else {
      values[d] = 0;  // erased; hidden values must not leak into the copy
    }
  }
  return Sociomatrix(y.labels(), std::move(values), std::move(observed));
}

}  // namespace latnet
