#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "brl/bitset.hpp"
#include "brl/csv.hpp"
#include "brl/item.hpp"

namespace brl {

// Binary-featurized classification data. Feature columns are stored as
// per-item bitsets over observations; labels are 0-based ids into
// label_names (first-appearance order).
struct Dataset {
  std::vector<Item> item_columns;
  std::vector<Bitset> columns;        // one bitset of n bits per item column
  std::vector<std::uint16_t> y;       // label id per observation
  std::vector<std::string> label_names;

  std::size_t n() const { return y.size(); }
  std::size_t num_items() const { return item_columns.size(); }
  std::size_t num_labels() const { return label_names.size(); }
  bool value(std::size_t row, std::size_t col) const {
    return columns[col].test(row);
  }
  std::vector<std::size_t> label_histogram() const;
};

struct FoldAssignment {
  std::vector<int> fold_of;  // 0-based fold id per observation
  int k = 0;
  std::uint64_t seed = 0;
};

// Per-column handling of numeric source columns.
struct DiscretizationSpec {
  std::map<std::string, std::vector<double>> thresholds;  // column -> cuts
  std::map<std::string, int> quantiles;                   // column -> bin count
};

// Loads a CSV with a header row. Columns named in `spec` are parsed as
// numeric and discretized; remaining columns with values all in {0,1} become
// a single item; all other columns are one-hot expanded per observed
// category. Single-valued columns are dropped with a warning. Labels are
// mapped in first-appearance order.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const DiscretizationSpec& spec = {},
                 std::vector<std::string>* warnings = nullptr);

// Same, from an already parsed table (used by tests and predict).
Dataset featurize(const CsvTable& table, const std::string& label_column,
                  const DiscretizationSpec& spec = {},
                  std::vector<std::string>* warnings = nullptr);

// Expands one numeric column into binary item columns.
//   thresholds t1 < t2 < ...: per threshold an at_least / less_than pair.
//   quantile count k >= 2: nearest-rank quantile cut points, duplicates
//   collapsed, yielding in_range bins (lo < v <= hi with infinite ends).
// Returns items plus one bitset per item.
struct DiscretizedColumns {
  std::vector<Item> items;
  std::vector<Bitset> columns;
};
DiscretizedColumns discretize_thresholds(const std::string& feature,
                                         const std::vector<double>& values,
                                         const std::vector<double>& thresholds);
DiscretizedColumns discretize_quantiles(const std::string& feature,
                                        const std::vector<double>& values,
                                        int quantile_count);

// Near-equal folds (sizes differ by at most 1), deterministic in seed. With
// `stratified`, per-label counts per fold also differ by at most 1.
FoldAssignment split_folds(const Dataset& data, int k, std::uint64_t seed,
                           bool stratified = false);

// Row subset preserving item columns and label names.
Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows);

}  // namespace brl
