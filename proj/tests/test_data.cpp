#include <doctest.h>

#include <fstream>
#include <sstream>

#include "brl/dataset.hpp"
#include "brl/errors.hpp"
#include "brl/rng.hpp"
#include "oracles.hpp"

using namespace brl;

namespace {

CsvTable table_from(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text;
  return name;
}

}  // namespace

TEST_CASE("csv parses quoted fields and CRLF") {
  CsvTable t = table_from("a,b\r\n\"x,\"\"y\"\",z\",2\n1,3\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "x,\"y\",z");
  CHECK(t.rows[1][1] == "3");
}

TEST_CASE("featurize expands categorical columns") {
  CsvTable t = table_from("sex,label\nmale,yes\nfemale,no\nmale,yes\n");
  Dataset data = featurize(t, "label");
  REQUIRE(data.num_items() == 2);
  CHECK(data.item_columns[0].render() == "sex=male");
  CHECK(data.item_columns[1].render() == "sex=female");
  CHECK(data.num_labels() == 2);
  CHECK(data.label_names == std::vector<std::string>{"yes", "no"});
  CHECK(data.value(0, 0));
  CHECK_FALSE(data.value(1, 0));
}

TEST_CASE("titanic loads with 8 items and 2 labels") {
  Dataset data = load_csv(BRL_DATA_DIR "/titanic.csv", "survived");
  CHECK(data.n() == 2201);
  CHECK(data.num_items() == 8);
  CHECK(data.num_labels() == 2);
  CHECK(data.label_names == std::vector<std::string>{"no", "yes"});
  auto hist = data.label_histogram();
  CHECK(hist[0] == 1490);
  CHECK(hist[1] == 711);
}

TEST_CASE("degenerate labels rejected") {
  CsvTable t = table_from("sex,label\nmale,yes\nfemale,yes\n");
  CHECK_THROWS_AS(featurize(t, "label"), DataError);
}

TEST_CASE("missing file and missing label column") {
  CHECK_THROWS_AS(load_csv("does_not_exist.csv", "label"), DataError);
  CsvTable t = table_from("a,b\n1,2\n");
  CHECK_THROWS_AS(featurize(t, "label"), DataError);
}

TEST_CASE("single-valued column dropped with warning") {
  CsvTable t = table_from("sex,const,label\nmale,1,yes\nfemale,1,no\n");
  std::vector<std::string> warnings;
  Dataset data = featurize(t, "label", {}, &warnings);
  CHECK(data.num_items() == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("const") != std::string::npos);
}

TEST_CASE("binary columns become single items") {
  CsvTable t = table_from("flag,label\n0,a\n1,b\n1,a\n");
  Dataset data = featurize(t, "label");
  REQUIRE(data.num_items() == 1);
  CHECK(data.item_columns[0].render() == "flag=1");
  CHECK_FALSE(data.value(0, 0));
  CHECK(data.value(1, 0));
}

TEST_CASE("non-numeric value in a numeric column is a hard error") {
  CsvTable t = table_from("age,label\n45,a\nold,b\n");
  DiscretizationSpec spec;
  spec.thresholds["age"] = {50.0};
  CHECK_THROWS_AS(featurize(t, "label", spec), DataError);
}

TEST_CASE("threshold discretization emits at_least/less_than pairs") {
  const std::vector<double> ages = {45, 62, 71, 83};
  auto cols = discretize_thresholds("age", ages, {50, 60, 70, 80});
  REQUIRE(cols.items.size() == 8);
  CHECK(cols.items[0].render() == "age>=50");
  CHECK(cols.items[1].render() == "age<50");
  // Row 0 (age 45): at_least(50)=0, less_than(50)=1.
  CHECK_FALSE(cols.columns[0].test(0));
  CHECK(cols.columns[1].test(0));
  // Row 3 (age 83) is at_least for every threshold.
  for (std::size_t k = 0; k < 8; k += 2) CHECK(cols.columns[k].test(3));

  SUBCASE("paired indicators partition every row") {
    for (std::size_t k = 0; k < 8; k += 2)
      for (std::size_t i = 0; i < ages.size(); ++i)
        CHECK(cols.columns[k].test(i) + cols.columns[k + 1].test(i) == 1);
  }
}

TEST_CASE("thresholds must increase") {
  CHECK_THROWS_AS(discretize_thresholds("age", {1, 2}, {60, 50}), ConfigError);
}

TEST_CASE("quartile discretization of 1..4 gives one value per bin") {
  // Nearest-rank quartiles of [1,2,3,4]: Q(1/4)=1, Q(1/2)=2, Q(3/4)=3, so the
  // bins (-inf,1], (1,2], (2,3], (3,inf) each cover exactly one value.
  auto cols = discretize_quantiles("v", {1, 2, 3, 4}, 4);
  REQUIRE(cols.items.size() == 4);
  CHECK(cols.items[0].render() == "v<=1");
  CHECK(cols.items[1].render() == "1<v<=2");
  CHECK(cols.items[3].render() == "v>3");
  for (std::size_t b = 0; b < 4; ++b) {
    CHECK(cols.columns[b].count() == 1);
    CHECK(cols.columns[b].test(b));
  }
}

TEST_CASE("constant column has no quantile cut points") {
  CHECK_THROWS_AS(discretize_quantiles("v", {7, 7, 7}, 4), DataError);
}

TEST_CASE("quantile bins partition rows even with duplicate cuts") {
  auto cols = discretize_quantiles("v", {1, 1, 1, 2, 2, 9}, 4);
  for (std::size_t i = 0; i < 6; ++i) {
    std::size_t hits = 0;
    for (const auto& col : cols.columns) hits += col.test(i);
    CHECK(hits == 1);
  }
}

TEST_CASE("one-hot expansion sets exactly one item per source column") {
  CsvTable t = table_from(
      "c1,c2,label\nx,p,0\ny,q,1\nz,p,0\nx,q,1\ny,p,0\n");
  Dataset data = featurize(t, "label");
  REQUIRE(data.num_items() == 5);  // 3 + 2
  for (std::size_t i = 0; i < data.n(); ++i) {
    std::size_t c1_hits = 0, c2_hits = 0;
    for (std::size_t c = 0; c < data.num_items(); ++c) {
      if (data.item_columns[c].feature == "c1") c1_hits += data.value(i, c);
      if (data.item_columns[c].feature == "c2") c2_hits += data.value(i, c);
    }
    CHECK(c1_hits == 1);
    CHECK(c2_hits == 1);
  }
}

TEST_CASE("item render/parse round-trips") {
  Rng rng = make_rng(7);
  std::vector<Item> items = {
      Item::equals("sex", "male"),
      Item::equals("class", "3rd"),
      Item::in_range("age", -std::numeric_limits<double>::infinity(), 25.0),
      Item::in_range("age", 25.0, std::numeric_limits<double>::infinity()),
  };
  for (int k = 0; k < 200; ++k) {
    const double a = std::floor(uniform_unit(rng) * 1000) / 8.0;
    const double b = a + 1.0 + std::floor(uniform_unit(rng) * 100) / 16.0;
    switch (k % 3) {
      case 0: items.push_back(Item::at_least("x", a)); break;
      case 1: items.push_back(Item::less_than("x", a)); break;
      default: items.push_back(Item::in_range("x", a, b)); break;
    }
  }
  for (const auto& item : items) {
    CAPTURE(item.render());
    CHECK(Item::parse(item.render()) == item);
  }
}

TEST_CASE("feature names with comparison characters are rejected") {
  CHECK_THROWS_AS(Item::equals("a<b", "x"), DataError);
}

TEST_CASE("fold sizes are near-equal") {
  CsvTable t = table_from("f,label\n1,a\n0,b\n1,a\n0,b\n1,a\n0,b\n1,a\n0,b\n1,a\n0,b\n");
  Dataset ten = featurize(t, "label");
  FoldAssignment fa = split_folds(ten, 5, 11);
  std::vector<int> sizes(5, 0);
  for (int f : fa.fold_of) ++sizes[f];
  for (int s : sizes) CHECK(s == 2);

  Dataset eleven = subset(ten, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  eleven.y.push_back(0);
  for (auto& col : eleven.columns) {
    Bitset grown(11);
    for (std::size_t i = 0; i < 10; ++i)
      if (col.test(i)) grown.set(i);
    col = grown;
  }
  FoldAssignment fb = split_folds(eleven, 5, 11);
  std::vector<int> sizes_b(5, 0);
  for (int f : fb.fold_of) ++sizes_b[f];
  std::sort(sizes_b.begin(), sizes_b.end());
  CHECK(sizes_b == std::vector<int>{2, 2, 2, 2, 3});
}

TEST_CASE("folds deterministic in seed") {
  Dataset data = oracle::make_dataset({"1010101010"},
                                      {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  FoldAssignment a = split_folds(data, 5, 42);
  FoldAssignment b = split_folds(data, 5, 42);
  FoldAssignment c = split_folds(data, 5, 43);
  CHECK(a.fold_of == b.fold_of);
  CHECK(a.fold_of != c.fold_of);
}

TEST_CASE("stratified folds balance labels within one observation") {
  std::vector<std::uint16_t> labels;
  std::string bits;
  for (int i = 0; i < 40; ++i) {
    labels.push_back(i < 25 ? 0 : 1);
    bits.push_back(i % 2 ? '1' : '0');
  }
  Dataset data = oracle::make_dataset({bits}, labels);
  FoldAssignment fa = split_folds(data, 4, 3, /*stratified=*/true);
  std::vector<int> label0(4, 0), label1(4, 0);
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 0 ? label0 : label1)[fa.fold_of[i]]++;
  auto [min0, max0] = std::minmax_element(label0.begin(), label0.end());
  auto [min1, max1] = std::minmax_element(label1.begin(), label1.end());
  CHECK(*max0 - *min0 <= 1);
  CHECK(*max1 - *min1 <= 1);
}

TEST_CASE("fold count must not exceed n") {
  Dataset data = oracle::make_dataset({"101"}, {0, 1, 0});
  CHECK_THROWS_AS(split_folds(data, 4, 1), ConfigError);
}

TEST_CASE("missing values are rejected") {
  // An empty cell forms its own category; the loader treats it as data, so a
  // file with a blank numeric cell fails the numeric parse instead.
  CsvTable t = table_from("age,label\n45,a\n,b\n");
  DiscretizationSpec spec;
  spec.thresholds["age"] = {50.0};
  CHECK_THROWS_AS(featurize(t, "label", spec), DataError);
  std::string path = write_temp("tmp_missing.csv", "age,label\n45,a\n,b\n");
  CHECK_THROWS_AS(load_csv(path, "label", spec), DataError);
}
