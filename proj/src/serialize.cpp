#include "brl/serialize.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "brl/errors.hpp"

namespace brl {

using nlohmann::json;

namespace {

json rule_row_to_json(const BayesianDecisionList& fitted, std::size_t row) {
  json out;
  out["dirichlet"] = fitted.dirichlet_params[row];
  out["mean"] = fitted.posterior_means[row];
  json intervals = json::array();
  for (const auto& [lo, hi] : fitted.credible_intervals[row])
    intervals.push_back({lo, hi});
  out["interval"] = intervals;
  return out;
}

void rule_row_from_json(const json& doc, BayesianDecisionList& fitted,
                        std::size_t row) {
  fitted.dirichlet_params[row] = doc.at("dirichlet").get<std::vector<double>>();
  fitted.posterior_means[row] = doc.at("mean").get<std::vector<double>>();
  for (const auto& pair : doc.at("interval"))
    fitted.credible_intervals[row].emplace_back(pair.at(0).get<double>(),
                                                pair.at(1).get<double>());
}

std::vector<std::string> split_items(const std::string& antecedent_text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  const std::string sep = " and ";
  for (;;) {
    const auto pos = antecedent_text.find(sep, start);
    if (pos == std::string::npos) {
      items.push_back(antecedent_text.substr(start));
      return items;
    }
    items.push_back(antecedent_text.substr(start, pos - start));
    start = pos + sep.size();
  }
}

std::string join_items(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += " and ";
    out += items[i];
  }
  return out;
}

}  // namespace

json bundle_to_json(const ModelBundle& bundle) {
  json doc;
  doc["format"] = "brl-model/1";
  doc["created_at"] = bundle.created_at;
  doc["seed"] = bundle.seed;
  doc["r_hat"] = bundle.r_hat;
  doc["converged"] = bundle.converged;
  doc["config"] = bundle.config_json.empty()
                      ? json::object()
                      : json::parse(bundle.config_json);
  doc["hyperparams"] = {{"lambda", bundle.hp.lambda},
                        {"eta", bundle.hp.eta},
                        {"alpha", bundle.hp.alpha}};
  doc["interval_level"] = bundle.fitted.interval_level;
  doc["label_names"] = bundle.fitted.label_names;

  json rules = json::array();
  for (std::size_t j = 0; j < bundle.fitted.list.length(); ++j) {
    json rule = rule_row_to_json(bundle.fitted, j + 1);
    rule["items"] = split_items(bundle.fitted.antecedent_text[j]);
    rule["pool_id"] = bundle.fitted.list.ids[j];
    rules.push_back(std::move(rule));
  }
  doc["rules"] = rules;
  doc["default_rule"] = rule_row_to_json(bundle.fitted, 0);

  if (bundle.has_ensemble) {
    json ens = json::array();
    for (const auto& entry : bundle.ensemble) {
      json e;
      e["rules"] = entry.rule_items;
      e["dirichlet_rows"] = entry.dirichlet_rows;
      e["weight"] = entry.weight;
      ens.push_back(std::move(e));
    }
    doc["ensemble"] = std::move(ens);
  }
  return doc;
}

ModelBundle bundle_from_json(const json& doc) {
  if (doc.value("format", "") != "brl-model/1")
    throw DataError("not a brl model file (missing format tag)");

  ModelBundle bundle;
  bundle.created_at = doc.value("created_at", "");
  bundle.seed = doc.value("seed", std::uint64_t{0});
  bundle.r_hat = doc.value("r_hat", 0.0);
  bundle.converged = doc.value("converged", true);
  bundle.config_json = doc.at("config").dump();
  bundle.hp.lambda = doc.at("hyperparams").at("lambda").get<double>();
  bundle.hp.eta = doc.at("hyperparams").at("eta").get<double>();
  bundle.hp.alpha = doc.at("hyperparams").at("alpha").get<std::vector<double>>();

  auto& fitted = bundle.fitted;
  fitted.interval_level = doc.value("interval_level", 0.95);
  fitted.label_names = doc.at("label_names").get<std::vector<std::string>>();
  const auto& rules = doc.at("rules");
  const std::size_t m = rules.size();
  fitted.dirichlet_params.resize(m + 1);
  fitted.posterior_means.resize(m + 1);
  fitted.credible_intervals.resize(m + 1);
  rule_row_from_json(doc.at("default_rule"), fitted, 0);
  for (std::size_t j = 0; j < m; ++j) {
    rule_row_from_json(rules[j], fitted, j + 1);
    fitted.antecedent_text.push_back(
        join_items(rules[j].at("items").get<std::vector<std::string>>()));
    fitted.list.ids.push_back(rules[j].value("pool_id", std::uint32_t{0}));
  }

  if (doc.contains("ensemble")) {
    bundle.has_ensemble = true;
    for (const auto& e : doc.at("ensemble")) {
      ModelBundle::StoredList entry;
      entry.rule_items =
          e.at("rules").get<std::vector<std::vector<std::string>>>();
      entry.dirichlet_rows =
          e.at("dirichlet_rows").get<std::vector<std::vector<double>>>();
      entry.weight = e.at("weight").get<std::size_t>();
      bundle.ensemble.push_back(std::move(entry));
    }
  }
  return bundle;
}

void save_model(const std::string& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  out << bundle_to_json(bundle).dump(2) << "\n";
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
  return bundle_from_json(doc);
}

std::vector<ModelBundle::StoredList> stored_ensemble(
    const PosteriorEnsemble& ensemble, const AntecedentPool& pool,
    const Dataset& data, const std::vector<double>& alpha) {
  std::vector<ModelBundle::StoredList> out;
  for (const auto& wl : distinct_lists(ensemble)) {
    ModelBundle::StoredList entry;
    entry.weight = wl.multiplicity;
    CountMatrix counts = compute_counts(wl.list, pool, data);
    entry.dirichlet_rows.resize(counts.rows());
    for (std::size_t j = 0; j < counts.rows(); ++j) {
      entry.dirichlet_rows[j].resize(counts.num_labels);
      for (std::size_t l = 0; l < counts.num_labels; ++l)
        entry.dirichlet_rows[j][l] =
            alpha[l] + static_cast<double>(counts.at(j, l));
    }
    for (auto id : wl.list.ids) {
      std::vector<std::string> texts;
      for (auto item : pool.antecedents[id].items)
        texts.push_back(data.item_columns[item].render());
      entry.rule_items.push_back(std::move(texts));
    }
    out.push_back(std::move(entry));
  }
  return out;
}

namespace {

// First matching rule (1-based; 0 = default) of parsed item-text rules.
std::size_t first_match_raw(
    const std::vector<std::vector<std::string>>& rule_items,
    const CsvTable& table, std::size_t row) {
  for (std::size_t j = 0; j < rule_items.size(); ++j) {
    bool all = true;
    for (const auto& text : rule_items[j]) {
      Item item = Item::parse(text);
      const std::size_t col = table.column_index(item.feature);
      if (col == static_cast<std::size_t>(-1))
        throw DataError("prediction data is missing column: " + item.feature);
      if (!item.evaluate(table.rows[row][col])) {
        all = false;
        break;
      }
    }
    if (all) return j + 1;
  }
  return 0;
}

}  // namespace

RowPrediction predict_row_point(const ModelBundle& bundle,
                                const CsvTable& table, std::size_t row) {
  std::vector<std::vector<std::string>> rule_items;
  for (const auto& text : bundle.fitted.antecedent_text)
    rule_items.push_back(split_items(text));

  RowPrediction pred;
  pred.matched_rule_index = first_match_raw(rule_items, table, row);
  pred.probabilities = bundle.fitted.posterior_means[pred.matched_rule_index];
  pred.explanation = pred.matched_rule_index == 0
                         ? "default"
                         : bundle.fitted.antecedent_text[pred.matched_rule_index - 1];
  return pred;
}

RowPrediction predict_row_posterior(const ModelBundle& bundle,
                                    const CsvTable& table, std::size_t row) {
  if (!bundle.has_ensemble)
    throw DataError("ensemble not stored; refit with --keep-ensemble");
  const std::size_t num_labels = bundle.fitted.label_names.size();
  RowPrediction pred;
  pred.probabilities.assign(num_labels, 0.0);
  std::size_t total_weight = 0;
  for (const auto& entry : bundle.ensemble) {
    const std::size_t j = first_match_raw(entry.rule_items, table, row);
    const auto& dirichlet = entry.dirichlet_rows[j];
    double row_total = 0.0;
    for (double v : dirichlet) row_total += v;
    for (std::size_t l = 0; l < num_labels; ++l)
      pred.probabilities[l] +=
          static_cast<double>(entry.weight) * dirichlet[l] / row_total;
    total_weight += entry.weight;
  }
  for (double& p : pred.probabilities)
    p /= static_cast<double>(total_weight);
  pred.explanation = "posterior average";
  return pred;
}

}  // namespace brl
