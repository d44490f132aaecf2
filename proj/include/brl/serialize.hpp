#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "brl/inference.hpp"

namespace brl {

// On-disk model document. Rules carry their rendered item texts so a loaded
// model can score new raw CSV rows without the training data or pool. The
// ensemble block (posterior prediction) is optional and stores distinct
// sampled lists with their fitted Dirichlet rows and multiplicities.
struct ModelBundle {
  BayesianDecisionList fitted;
  Hyperparams hp;
  double r_hat = 0.0;
  bool converged = true;
  std::uint64_t seed = 0;
  std::string created_at;  // the single non-deterministic header field
  std::string config_json;  // run configuration, serialized verbatim

  struct StoredList {
    std::vector<std::vector<std::string>> rule_items;  // item texts per rule
    std::vector<std::vector<double>> dirichlet_rows;   // (m+1) x L, row 0 default
    std::size_t weight = 1;
  };
  std::vector<StoredList> ensemble;
  bool has_ensemble = false;
};

nlohmann::json bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& doc);

void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

// Builds the storable ensemble block from posterior samples: one entry per
// distinct list, consequents fit on the training data.
std::vector<ModelBundle::StoredList> stored_ensemble(
    const PosteriorEnsemble& ensemble, const AntecedentPool& pool,
    const Dataset& data, const std::vector<double>& alpha);

// Scoring of raw CSV rows against a loaded model.
struct RowPrediction {
  std::vector<double> probabilities;
  std::size_t matched_rule_index = 0;
  std::string explanation;
};
RowPrediction predict_row_point(const ModelBundle& bundle,
                                const CsvTable& table, std::size_t row);
RowPrediction predict_row_posterior(const ModelBundle& bundle,
                                    const CsvTable& table, std::size_t row);

}  // namespace brl
