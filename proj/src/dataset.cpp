#include "brl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>

#include "brl/errors.hpp"
#include "brl/rng.hpp"

namespace brl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void warn(std::vector<std::string>* sink, const std::string& msg) {
  if (sink)
    sink->push_back(msg);
  else
    std::cerr << "warning: " << msg << "\n";
}

bool parse_double(const std::string& s, double& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

std::vector<std::size_t> Dataset::label_histogram() const {
  std::vector<std::size_t> hist(num_labels(), 0);
  for (auto label : y) ++hist[label];
  return hist;
}

DiscretizedColumns discretize_thresholds(
    const std::string& feature, const std::vector<double>& values,
    const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ConfigError("thresholds list is empty");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i - 1] < thresholds[i]))
      throw ConfigError("thresholds not increasing for column " + feature);

  DiscretizedColumns out;
  for (double t : thresholds) {
    Bitset ge(values.size());
    Bitset lt(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] >= t)
        ge.set(i);
      else
        lt.set(i);
    }
    out.items.push_back(Item::at_least(feature, t));
    out.columns.push_back(std::move(ge));
    out.items.push_back(Item::less_than(feature, t));
    out.columns.push_back(std::move(lt));
  }
  return out;
}

DiscretizedColumns discretize_quantiles(const std::string& feature,
                                        const std::vector<double>& values,
                                        int quantile_count) {
  if (quantile_count < 2) throw ConfigError("quantile count must be >= 2");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());

  // Nearest-rank empirical quantile: Q(p) = sorted[ceil(p*n)] (1-based).
  std::vector<double> cuts;
  const auto n = static_cast<double>(sorted.size());
  for (int i = 1; i < quantile_count; ++i) {
    double p = static_cast<double>(i) / quantile_count;
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    if (rank == 0) rank = 1;
    cuts.push_back(sorted[rank - 1]);
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.empty() || sorted.front() == sorted.back())
    throw DataError("no quantile cut points for constant column " + feature);

  std::vector<double> edges;
  edges.push_back(-kInf);
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(kInf);

  DiscretizedColumns out;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    Bitset bits(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      if (edges[b] < values[i] && values[i] <= edges[b + 1]) bits.set(i);
    out.items.push_back(Item::in_range(feature, edges[b], edges[b + 1]));
    out.columns.push_back(std::move(bits));
  }
  return out;
}

Dataset featurize(const CsvTable& table, const std::string& label_column,
                  const DiscretizationSpec& spec,
                  std::vector<std::string>* warnings) {
  const std::size_t label_col = table.column_index(label_column);
  if (label_col == static_cast<std::size_t>(-1))
    throw DataError("label column not found: " + label_column);
  if (table.rows.empty()) throw DataError("empty data");
  const std::size_t n = table.rows.size();

  Dataset data;
  for (const auto& row : table.rows) {
    const std::string& label = row[label_col];
    auto it = std::find(data.label_names.begin(), data.label_names.end(), label);
    if (it == data.label_names.end()) {
      data.label_names.push_back(label);
      it = std::prev(data.label_names.end());
    }
    data.y.push_back(
        static_cast<std::uint16_t>(it - data.label_names.begin()));
  }
  if (data.num_labels() < 2) throw DataError("degenerate labels: only one class");

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == label_col) continue;
    const std::string& name = table.header[c];

    auto thr = spec.thresholds.find(name);
    auto qnt = spec.quantiles.find(name);
    if (thr != spec.thresholds.end() || qnt != spec.quantiles.end()) {
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i)
        if (!parse_double(table.rows[i][c], values[i]))
          throw DataError("non-numeric value '" + table.rows[i][c] +
                          "' in numeric column " + name);
      DiscretizedColumns cols =
          thr != spec.thresholds.end()
              ? discretize_thresholds(name, values, thr->second)
              : discretize_quantiles(name, values, qnt->second);
      for (std::size_t k = 0; k < cols.items.size(); ++k) {
        data.item_columns.push_back(std::move(cols.items[k]));
        data.columns.push_back(std::move(cols.columns[k]));
      }
      continue;
    }

    std::vector<std::string> categories;  // first-appearance order
    for (const auto& row : table.rows) {
      if (std::find(categories.begin(), categories.end(), row[c]) ==
          categories.end())
        categories.push_back(row[c]);
    }
    if (categories.size() < 2) {
      warn(warnings, "dropping column '" + name + "': single distinct value");
      continue;
    }

    const bool binary =
        categories.size() == 2 &&
        ((categories[0] == "0" && categories[1] == "1") ||
         (categories[0] == "1" && categories[1] == "0"));
    if (binary) {
      Bitset bits(n);
      for (std::size_t i = 0; i < n; ++i)
        if (table.rows[i][c] == "1") bits.set(i);
      data.item_columns.push_back(Item::equals(name, "1"));
      data.columns.push_back(std::move(bits));
    } else {
      for (const auto& cat : categories) {
        Bitset bits(n);
        for (std::size_t i = 0; i < n; ++i)
          if (table.rows[i][c] == cat) bits.set(i);
        data.item_columns.push_back(Item::equals(name, cat));
        data.columns.push_back(std::move(bits));
      }
    }
  }
  if (data.item_columns.empty())
    throw DataError("no usable feature columns");
  return data;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const DiscretizationSpec& spec,
                 std::vector<std::string>* warnings) {
  return featurize(read_csv_file(path), label_column, spec, warnings);
}

FoldAssignment split_folds(const Dataset& data, int k, std::uint64_t seed,
                           bool stratified) {
  const std::size_t n = data.n();
  if (k < 2) throw ConfigError("fold count must be >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw ConfigError("fold count exceeds number of observations");

  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.fold_of.assign(n, 0);
  Rng rng = make_rng(derive_seed(seed, /*stream=*/0x0f01d5));

  std::vector<std::vector<std::size_t>> groups;
  if (stratified) {
    groups.resize(data.num_labels());
    for (std::size_t i = 0; i < n; ++i) groups[data.y[i]].push_back(i);
  } else {
    groups.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) groups[0][i] = i;
  }

  // Fisher-Yates within each group, then deal round-robin with a cursor that
  // carries across groups so overall fold sizes stay within 1 of each other.
  int cursor = 0;
  for (auto& group : groups) {
    for (std::size_t i = group.size(); i > 1; --i)
      std::swap(group[i - 1], group[uniform_index(rng, i)]);
    for (std::size_t idx : group) {
      fa.fold_of[idx] = cursor;
      cursor = (cursor + 1) % k;
    }
  }
  return fa;
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.item_columns = data.item_columns;
  out.label_names = data.label_names;
  out.y.reserve(rows.size());
  for (std::size_t r : rows) out.y.push_back(data.y[r]);
  out.columns.reserve(data.columns.size());
  for (const auto& col : data.columns) {
    Bitset bits(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (col.test(rows[i])) bits.set(i);
    out.columns.push_back(std::move(bits));
  }
  return out;
}

}  // namespace brl
