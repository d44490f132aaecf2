#include "brl/mining.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "brl/errors.hpp"

namespace brl {

std::string Antecedent::render(const Dataset& data,
                               const std::string& sep) const {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += data.item_columns[items[k]].render();
  }
  return out;
}

std::vector<std::size_t> AntecedentPool::cardinality_counts() const {
  std::vector<std::size_t> counts(max_cardinality + 1, 0);
  for (const auto& [card, ids] : by_cardinality) counts[card] = ids.size();
  return counts;
}

Bitset cover(const std::vector<std::uint32_t>& items, const Dataset& data) {
  if (items.empty()) return Bitset(data.n(), true);
  for (auto id : items)
    if (id >= data.num_items()) throw ConfigError("item index out of range");
  Bitset bits = data.columns[items[0]];
  for (std::size_t k = 1; k < items.size(); ++k) bits &= data.columns[items[k]];
  return bits;
}

AntecedentPool make_pool(const Dataset& data,
                         std::vector<std::vector<std::uint32_t>> itemsets,
                         std::size_t max_cardinality) {
  for (auto& set : itemsets) {
    std::sort(set.begin(), set.end());
    if (std::adjacent_find(set.begin(), set.end()) != set.end())
      throw ConfigError("itemset contains duplicate items");
    if (set.empty()) throw ConfigError("empty itemset");
  }
  std::sort(itemsets.begin(), itemsets.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  if (std::adjacent_find(itemsets.begin(), itemsets.end()) != itemsets.end())
    throw ConfigError("duplicate itemsets in pool");

  AntecedentPool pool;
  pool.n = data.n();
  for (auto& set : itemsets) {
    Bitset bits = cover(set, data);
    Antecedent a;
    a.items = std::move(set);
    a.support_count = bits.count();
    pool.max_cardinality = std::max(pool.max_cardinality, a.cardinality());
    pool.by_cardinality[a.cardinality()].push_back(
        static_cast<std::uint32_t>(pool.antecedents.size()));
    pool.antecedents.push_back(std::move(a));
    pool.covers.push_back(std::move(bits));
  }
  if (max_cardinality > 0) pool.max_cardinality = max_cardinality;
  return pool;
}

AntecedentPool singleton_pool(const Dataset& data) {
  std::vector<std::vector<std::uint32_t>> itemsets;
  for (std::uint32_t c = 0; c < data.num_items(); ++c) itemsets.push_back({c});
  return make_pool(data, std::move(itemsets));
}

namespace {

// FP-tree with first-child/next-sibling links and a per-item header chain.
struct FpTree {
  struct Node {
    std::uint32_t item = 0;
    std::size_t count = 0;
    std::int32_t parent = -1;
    std::int32_t child = -1;
    std::int32_t sibling = -1;
    std::int32_t header_next = -1;
  };
  std::vector<Node> nodes;                         // node 0 is the root
  std::map<std::uint32_t, std::int32_t> header;    // item -> chain head
  std::map<std::uint32_t, std::size_t> item_total;

  FpTree() { nodes.emplace_back(); }

  void insert(const std::vector<std::uint32_t>& path, std::size_t count) {
    std::int32_t cur = 0;
    for (auto item : path) {
      std::int32_t found = -1;
      for (std::int32_t ch = nodes[cur].child; ch != -1;
           ch = nodes[ch].sibling)
        if (nodes[ch].item == item) {
          found = ch;
          break;
        }
      if (found == -1) {
        found = static_cast<std::int32_t>(nodes.size());
        Node node;
        node.item = item;
        node.parent = cur;
        node.sibling = nodes[cur].child;
        nodes.push_back(node);
        nodes[cur].child = found;
        auto [it, inserted] = header.try_emplace(item, found);
        if (!inserted) {
          nodes[found].header_next = it->second;
          it->second = found;
        }
      }
      nodes[found].count += count;
      item_total[item] += count;
      cur = found;
    }
  }
};

using Transaction = std::pair<std::vector<std::uint32_t>, std::size_t>;

FpTree build_tree(const std::vector<Transaction>& transactions,
                  std::size_t min_count,
                  const std::vector<std::uint32_t>& rank) {
  std::map<std::uint32_t, std::size_t> totals;
  for (const auto& [items, count] : transactions)
    for (auto item : items) totals[item] += count;

  FpTree tree;
  std::vector<std::uint32_t> path;
  for (const auto& [items, count] : transactions) {
    path.clear();
    for (auto item : items)
      if (totals[item] >= min_count) path.push_back(item);
    std::sort(path.begin(), path.end(), [&](std::uint32_t a, std::uint32_t b) {
      return rank[a] != rank[b] ? rank[a] < rank[b] : a < b;
    });
    if (!path.empty()) tree.insert(path, count);
  }
  return tree;
}

void fp_growth(const FpTree& tree, std::vector<std::uint32_t>& suffix,
               std::size_t min_count, std::size_t max_cardinality,
               const std::vector<std::uint32_t>& rank,
               std::vector<std::pair<std::vector<std::uint32_t>, std::size_t>>&
                   out) {
  for (const auto& [item, total] : tree.item_total) {
    if (total < min_count) continue;
    suffix.push_back(item);
    out.emplace_back(suffix, total);
    if (suffix.size() < max_cardinality) {
      std::vector<Transaction> base;
      for (std::int32_t node = tree.header.at(item); node != -1;
           node = tree.nodes[node].header_next) {
        std::vector<std::uint32_t> path;
        for (std::int32_t p = tree.nodes[node].parent; p > 0;
             p = tree.nodes[p].parent)
          path.push_back(tree.nodes[p].item);
        if (!path.empty())
          base.emplace_back(std::move(path), tree.nodes[node].count);
      }
      if (!base.empty()) {
        FpTree conditional = build_tree(base, min_count, rank);
        if (!conditional.item_total.empty())
          fp_growth(conditional, suffix, min_count, max_cardinality, rank, out);
      }
    }
    suffix.pop_back();
  }
}

}  // namespace

AntecedentPool mine_antecedents(const Dataset& data, double min_support,
                                std::size_t max_cardinality) {
  if (data.n() == 0) throw DataError("cannot mine an empty dataset");
  if (!(min_support > 0.0 && min_support <= 1.0))
    throw ConfigError("min_support must be in (0, 1]");
  if (max_cardinality < 1) throw ConfigError("max_cardinality must be >= 1");

  const auto min_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(min_support * static_cast<double>(data.n()) - 1e-9)));

  // Global item order: by descending support, ties by index.
  std::vector<std::size_t> support(data.num_items());
  for (std::size_t c = 0; c < data.num_items(); ++c)
    support[c] = data.columns[c].count();
  std::vector<std::uint32_t> order(data.num_items());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return support[a] != support[b] ? support[a] > support[b] : a < b;
  });
  std::vector<std::uint32_t> rank(data.num_items());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  std::vector<Transaction> transactions;
  transactions.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    std::vector<std::uint32_t> items;
    for (std::uint32_t c = 0; c < data.num_items(); ++c)
      if (data.columns[c].test(i)) items.push_back(c);
    transactions.emplace_back(std::move(items), 1);
  }

  FpTree tree = build_tree(transactions, min_count, rank);
  std::vector<std::pair<std::vector<std::uint32_t>, std::size_t>> patterns;
  std::vector<std::uint32_t> suffix;
  fp_growth(tree, suffix, min_count, max_cardinality, rank, patterns);

  if (patterns.empty()) {
    std::ostringstream msg;
    msg << "no itemset reaches min support " << min_support << " ("
        << min_count << " of " << data.n()
        << " observations); lower --min-support";
    throw DataError(msg.str());
  }

  std::vector<std::vector<std::uint32_t>> itemsets;
  itemsets.reserve(patterns.size());
  for (auto& [items, count] : patterns) itemsets.push_back(std::move(items));
  AntecedentPool pool = make_pool(data, std::move(itemsets), max_cardinality);
  pool.max_cardinality = max_cardinality;
  return pool;
}

}  // namespace brl
