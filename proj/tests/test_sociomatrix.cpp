#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "latnet/sociomatrix.hpp"

using namespace latnet;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

Sociomatrix from_pairs(int n, const std::vector<std::tuple<int, int, int>>& edges) {
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = std::string(1, static_cast<char>('a' + i));
  Eigen::VectorXi values = Eigen::VectorXi::Zero(dyad_count(n));
  for (const auto& [i, j, v] : edges) values[dyad_index(n, i, j)] = v;
  return Sociomatrix::all_observed(std::move(labels), std::move(values));
}

}  // namespace

TEST_CASE("upper-triangle access is symmetric and the diagonal is an error") {
  const Sociomatrix y = from_pairs(4, {{0, 1, 2}, {2, 3, 1}});
  CHECK(y.value(0, 1) == 2);
  CHECK(y.value(1, 0) == 2);
  CHECK(y.value(3, 2) == 1);
  CHECK(y.value(1, 2) == 0);
  CHECK_THROWS_AS(y.value(2, 2), std::invalid_argument);
  CHECK_THROWS_AS(y.dyad_index(0, 4), std::out_of_range);
  CHECK(y.value_levels() == std::vector<int>{0, 1, 2});
  for (int d = 0; d < y.dyad_count(); ++d) {
    const auto [i, j] = y.dyad_nodes(d);
    CHECK(y.dyad_index(i, j) == d);
    CHECK(i < j);
  }
}

TEST_CASE("edge list loader") {
  const auto p = temp_file("edges_basic.tsv", "a\tb\t1\n");
  const Sociomatrix y = load_edge_list(p.string(), 0);
  CHECK(y.node_count() == 2);
  CHECK(y.value(0, 1) == 1);

  // symmetric duplicate with the same value is tolerated
  const auto p2 = temp_file("edges_dup.tsv", "a\tb\t1\nb\ta\t1\n");
  const Sociomatrix y2 = load_edge_list(p2.string(), 0);
  CHECK(y2.value(0, 1) == 1);

  // default fills unlisted dyads as observed
  const auto p3 = temp_file("edges_default.tsv", "a\tb\t1\nb\tc\t2\n");
  const Sociomatrix y3 = load_edge_list(p3.string(), 0);
  CHECK(y3.node_count() == 3);
  CHECK(y3.is_observed(0, 2));
  CHECK(y3.value(0, 2) == 0);

  // omitted value defaults to 1
  const auto p4 = temp_file("edges_noval.tsv", "a\tb\n");
  CHECK(load_edge_list(p4.string(), 0).value(0, 1) == 1);

  const auto bad1 = temp_file("edges_self.tsv", "a\ta\t1\n");
  CHECK_THROWS_WITH_AS(load_edge_list(bad1.string(), 0),
                       doctest::Contains("self loop"), std::runtime_error);
  const auto bad2 = temp_file("edges_conflict.tsv", "a\tb\t1\na\tb\t2\n");
  CHECK_THROWS_WITH_AS(load_edge_list(bad2.string(), 0),
                       doctest::Contains("conflicting"), std::runtime_error);
  const auto bad3 = temp_file("edges_nonint.tsv", "a\tb\tx\n");
  CHECK_THROWS_AS(load_edge_list(bad3.string(), 0), std::runtime_error);
}

TEST_CASE("edge list round trip is bit exact") {
  const Sociomatrix y = from_pairs(5, {{0, 1, 3}, {1, 4, 1}, {2, 3, 7}});
  const fs::path p = fs::temp_directory_path() / "roundtrip.tsv";
  write_edge_list(y, p.string());
  const Sociomatrix z = load_edge_list(p.string(), 0);
  const fs::path q = fs::temp_directory_path() / "roundtrip2.tsv";
  write_edge_list(z, q.string());
  std::ifstream f1(p), f2(q);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  CHECK(z.labels() == y.labels());
  for (int d = 0; d < y.dyad_count(); ++d) CHECK(z.value_at(d) == y.value_at(d));
}

TEST_CASE("dense csv round trips values and mask") {
  const Sociomatrix y = from_pairs(4, {{0, 1, 2}, {1, 2, 5}});
  FoldAssignment a;
  a.fold_count = 2;
  a.fold.assign(y.dyad_count(), 0);
  a.fold[y.dyad_index(0, 3)] = 1;
  const Sociomatrix masked = mask_fold(y, a, 1);
  const fs::path p = fs::temp_directory_path() / "dense.csv";
  write_dense_csv(masked, p.string());
  const Sociomatrix back = load_dense_csv(p.string());
  CHECK(back.labels() == masked.labels());
  CHECK(back.observed_count() == masked.observed_count());
  CHECK(!back.is_observed(0, 3));
  for (int d = 0; d < masked.dyad_count(); ++d) {
    CHECK(back.observed_at(d) == masked.observed_at(d));
    if (masked.observed_at(d)) CHECK(back.value_at(d) == masked.value_at(d));
  }
}

TEST_CASE("tokenizer counts unordered adjacencies") {
  const Sociomatrix y = tokenize_adjacency_counts("God said, God said");
  CHECK(y.node_count() == 3);
  const auto& l = y.labels();
  CHECK(l[0] == "god");
  CHECK(l[1] == "said");
  CHECK(l[2] == ",");
  CHECK(y.value(0, 1) == 2);
  CHECK(y.value(1, 2) == 1);
  CHECK(y.value(2, 0) == 1);

  const Sociomatrix ab = tokenize_adjacency_counts("a b a");
  CHECK(ab.value(0, 1) == 2);

  CHECK_THROWS_AS(tokenize_adjacency_counts("123 456"), std::runtime_error);
}

TEST_CASE("tokenizer mass identity") {
  // total count mass = (stream length - 1) - repeated-token adjacencies
  const std::string text = "to be, or not to be: that is the question. be be";
  const Sociomatrix y = tokenize_adjacency_counts(text);
  // recompute the stream by the same rules
  int len = 0, repeats = 0;
  {
    std::vector<std::string> toks;
    std::string run;
    auto flush = [&] {
      if (!run.empty()) {
        toks.push_back(run);
        run.clear();
      }
    };
    for (const char c : text) {
      if (std::isalpha(static_cast<unsigned char>(c)))
        run += static_cast<char>(std::tolower(c));
      else {
        flush();
        if (std::string(".,;:?!").find(c) != std::string::npos)
          toks.push_back(std::string(1, c));
      }
    }
    flush();
    len = static_cast<int>(toks.size());
    for (int t = 0; t + 1 < len; ++t) repeats += toks[t] == toks[t + 1];
  }
  long long mass = 0;
  for (int d = 0; d < y.dyad_count(); ++d) mass += y.value_at(d);
  CHECK(mass == len - 1 - repeats);
}

TEST_CASE("largest connected component") {
  // two disjoint triangles plus an isolated node: tie broken by label
  const Sociomatrix y = from_pairs(
      7, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
  const Sociomatrix c = largest_connected_component(y, 0);
  CHECK(c.node_count() == 3);
  CHECK(c.labels() == std::vector<std::string>{"a", "b", "c"});

  // a path of 4 beats an edge of 2
  const Sociomatrix y2 =
      from_pairs(6, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {4, 5, 1}});
  CHECK(largest_connected_component(y2, 0).node_count() == 4);

  // threshold is strict
  const Sociomatrix y3 = from_pairs(4, {{0, 1, 2}, {1, 2, 1}, {2, 3, 2}});
  CHECK(largest_connected_component(y3, 1).node_count() == 2);
}

TEST_CASE("fold assignment sizes and determinism") {
  const Sociomatrix y = from_pairs(5, {{0, 1, 1}});  // 10 dyads
  const FoldAssignment a = assign_folds(y, 5, 99);
  std::multiset<int> sizes;
  for (int f = 1; f <= 5; ++f) sizes.insert(a.size_of(f));
  CHECK(sizes == std::multiset<int>{2, 2, 2, 2, 2});

  const FoldAssignment b = assign_folds(y, 5, 99);
  CHECK(a.fold == b.fold);
  const FoldAssignment c = assign_folds(y, 5, 100);
  CHECK(a.fold != c.fold);

  // 11 observed dyads into 5 folds: sizes 3,2,2,2,2
  std::vector<std::string> labels;
  for (int i = 0; i < 12; ++i) labels.push_back("n" + std::to_string(i));
  Eigen::VectorXi values = Eigen::VectorXi::Zero(dyad_count(12));
  std::vector<std::uint8_t> obs(dyad_count(12), 0);
  for (int d = 0; d < 11; ++d) obs[d] = 1;
  const Sociomatrix y11(labels, values, obs);
  const FoldAssignment a11 = assign_folds(y11, 5, 1);
  std::multiset<int> s11;
  for (int f = 1; f <= 5; ++f) s11.insert(a11.size_of(f));
  CHECK(s11 == std::multiset<int>{2, 2, 2, 2, 3});

  CHECK_THROWS_AS(assign_folds(y11, 12, 1), std::invalid_argument);
}

TEST_CASE("masking hides exactly one fold and the union covers everything") {
  const Sociomatrix y = from_pairs(6, {{0, 1, 1}, {2, 3, 4}});  // 15 dyads
  const FoldAssignment a = assign_folds(y, 5, 3);
  int hidden_total = 0;
  std::vector<int> times_hidden(y.dyad_count(), 0);
  for (int f = 1; f <= 5; ++f) {
    const Sociomatrix m = mask_fold(y, a, f);
    CHECK(m.observed_count() == y.observed_count() - a.size_of(f));
    hidden_total += a.size_of(f);
    for (int d = 0; d < y.dyad_count(); ++d)
      if (!m.observed_at(d)) {
        ++times_hidden[d];
        CHECK_THROWS_AS(m.value_at(d), std::runtime_error);
      }
  }
  CHECK(hidden_total == y.observed_count());
  for (int d = 0; d < y.dyad_count(); ++d) CHECK(times_hidden[d] == 1);
  CHECK_THROWS_AS(mask_fold(y, a, 6), std::invalid_argument);
}

TEST_CASE("masked copies are independent of the hidden values") {
  const Sociomatrix y1 = from_pairs(5, {{0, 1, 1}, {1, 2, 1}});
  Eigen::VectorXi altered = Eigen::VectorXi::Zero(dyad_count(5));
  altered[dyad_index(5, 0, 1)] = 1;
  altered[dyad_index(5, 1, 2)] = 1;
  altered[dyad_index(5, 3, 4)] = 9;  // will be hidden
  std::vector<std::string> labels = y1.labels();
  const Sociomatrix y2 = Sociomatrix::all_observed(std::move(labels), std::move(altered));
  FoldAssignment a;
  a.fold_count = 2;
  a.fold.assign(y1.dyad_count(), 2);
  a.fold[dyad_index(5, 3, 4)] = 1;
  const Sociomatrix m1 = mask_fold(y1, a, 1);
  const Sociomatrix m2 = mask_fold(y2, a, 1);
  for (int d = 0; d < m1.dyad_count(); ++d) {
    CHECK(m1.observed_at(d) == m2.observed_at(d));
    if (m1.observed_at(d)) CHECK(m1.value_at(d) == m2.value_at(d));
  }
}

TEST_CASE("covariate loader") {
  const Sociomatrix y = from_pairs(3, {{0, 1, 1}});
  const auto p = temp_file("covs.tsv", "a\tb\t0.5\t1.0\nb\tc\t-1\t2\n");
  const DyadCovariates x = load_covariates(p.string(), y);
  CHECK(x.dim() == 2);
  CHECK(x.x(0, 1)[0] == doctest::Approx(0.5));
  CHECK(x.x(1, 0)[1] == doctest::Approx(1.0));  // symmetric access
  CHECK(x.x(0, 2)[0] == doctest::Approx(0.0));  // unlisted dyad
}
