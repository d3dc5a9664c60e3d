#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "autoens/dataset.hpp"
#include "autoens/ensemble.hpp"
#include "autoens/error.hpp"
#include "autoens/subnetwork.hpp"

#include "json.hpp"

namespace autoens {

inline constexpr const char* kModelFormat = "autoens-model-v1";

// The exported artifact of a finished run: architecture metadata, parameters,
// mixture weights, and the feature schema the model expects. JSON stores
// doubles in shortest round-trip form, so load(save(m)) predicts bit-exactly.
struct ExportedModel {
  std::size_t input_dim = 0;
  std::vector<std::string> feature_names;
  std::string label_column = "label";
  double rho = 0.1;  // margin used when reporting margin error
  EnsembleModel ensemble;
};

inline std::filesystem::path save_model(const ExportedModel& model,
                                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json subnetworks = nlohmann::json::array();
  for (const Subnetwork& sn : model.ensemble.subnetworks) {
    nlohmann::json j = subnetwork_metadata(sn);
    j["params"] = flatten_params(sn);
    j["steps_done"] = sn.train_steps_done;
    subnetworks.push_back(std::move(j));
  }
  const nlohmann::json doc = {
      {"format", kModelFormat},
      {"input_dim", model.input_dim},
      {"feature_names", model.feature_names},
      {"label_column", model.label_column},
      {"rho", model.rho},
      {"weights", model.ensemble.weights.values},
      {"subnetworks", subnetworks},
  };
  const std::filesystem::path path = dir / "model.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << doc.dump(2) << '\n';
  return path;
}

inline ExportedModel load_model(const std::filesystem::path& dir) {
  const std::filesystem::path path =
      std::filesystem::is_directory(dir) ? dir / "model.json" : dir;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& err) {
    throw DataError("model file " + path.string() + " is not valid JSON: " +
                    err.what());
  }
  if (!doc.contains("format") || doc.at("format") != kModelFormat) {
    throw DataError("model file " + path.string() + " has an unknown format");
  }
  ExportedModel model;
  model.input_dim = doc.at("input_dim").get<std::size_t>();
  model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  model.label_column = doc.at("label_column").get<std::string>();
  model.rho = doc.at("rho").get<double>();
  model.ensemble.weights.values = doc.at("weights").get<std::vector<double>>();
  for (const auto& j : doc.at("subnetworks")) {
    Subnetwork sn = subnetwork_from_metadata(j, model.input_dim, /*seed=*/0);
    unflatten_params(sn, j.at("params").get<std::vector<double>>());
    sn.train_steps_done = j.at("steps_done").get<std::size_t>();
    model.ensemble.subnetworks.push_back(std::move(sn));
  }
  if (model.ensemble.subnetworks.size() != model.ensemble.weights.values.size()) {
    throw DataError("model file lists " +
                    std::to_string(model.ensemble.subnetworks.size()) +
                    " subnetworks but " +
                    std::to_string(model.ensemble.weights.values.size()) +
                    " weights");
  }
  return model;
}

// Maps dataset columns onto the model's expected feature order by name.
// Returns, for each model feature, the column index in the dataset.
inline std::vector<std::size_t> align_feature_schema(
    const ExportedModel& model, const std::vector<std::string>& columns) {
  std::vector<std::size_t> mapping;
  mapping.reserve(model.feature_names.size());
  for (const std::string& name : model.feature_names) {
    bool found = false;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) {
        mapping.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) {
      throw DataError("schema error: dataset is missing feature column '" +
                      name + "'");
    }
  }
  for (const std::string& column : columns) {
    bool expected = false;
    for (const std::string& name : model.feature_names) {
      if (name == column) {
        expected = true;
        break;
      }
    }
    if (!expected) {
      throw DataError("schema error: dataset has unexpected feature column '" +
                      column + "'");
    }
  }
  return mapping;
}

inline std::vector<double> reorder_features(const std::vector<double>& features,
                                            const std::vector<std::size_t>& map) {
  std::vector<double> out;
  out.reserve(map.size());
  for (std::size_t idx : map) out.push_back(features[idx]);
  return out;
}

}  // namespace autoens
