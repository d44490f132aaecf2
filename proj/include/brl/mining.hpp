#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "brl/bitset.hpp"
#include "brl/dataset.hpp"

namespace brl {

// A mined itemset: sorted item column indices plus its cover over the data.
struct Antecedent {
  std::vector<std::uint32_t> items;  // sorted ascending
  std::size_t support_count = 0;

  std::size_t cardinality() const { return items.size(); }
  std::string render(const Dataset& data, const std::string& sep = " and ") const;
};

// The pre-mined collection, immutable once built. Covers are bitsets over the
// observations of the dataset the pool was mined from.
struct AntecedentPool {
  std::vector<Antecedent> antecedents;
  std::vector<Bitset> covers;
  std::map<std::size_t, std::vector<std::uint32_t>> by_cardinality;
  std::size_t max_cardinality = 0;
  std::size_t n = 0;  // observation count of the source data

  std::size_t size() const { return antecedents.size(); }
  std::vector<std::size_t> cardinality_counts() const;  // indexed by cardinality
};

// Cover of an itemset: AND of the single-item column bitsets.
Bitset cover(const std::vector<std::uint32_t>& items, const Dataset& data);

// All itemsets with support_count >= ceil(min_support * n) and size <= C,
// in canonical order (cardinality, then lexicographic item indices).
// Throws DataError when nothing meets the support threshold.
AntecedentPool mine_antecedents(const Dataset& data, double min_support,
                                std::size_t max_cardinality);

// Pool from explicit itemsets (covers computed from the data). Used for the
// simulation study's singleton pools and for small hand-built pools.
AntecedentPool make_pool(const Dataset& data,
                         std::vector<std::vector<std::uint32_t>> itemsets,
                         std::size_t max_cardinality = 0);

// One singleton antecedent per item column.
AntecedentPool singleton_pool(const Dataset& data);

}  // namespace brl
