#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fairsel/dataset.hpp"
#include "fairsel/eval.hpp"
#include "fairsel/fufs.hpp"

// All JSON is UTF-8 with lowercase snake_case keys; unknown config keys are
// rejected so typos fail loudly.

namespace fairsel {

inline constexpr const char* kToolVersion = "0.1.0";

/// Where a dataset came from: a CSV recipe or a synthetic spec. Enough to
/// reproduce the run bit for bit. Both paths standardize features by default;
/// the generator itself emits raw values.
struct DataSource {
    struct Csv {
        std::string path;
        std::vector<std::string> protected_columns;
        std::optional<std::string> label_column;
        bool standardize = true;
    };
    struct Synthetic {
        SyntheticSpec spec;
        bool standardize = true;
    };
    std::optional<Csv> csv;
    std::optional<Synthetic> synthetic;
};

struct RunManifest {
    FufsConfig config;
    DataSource source;
    std::string tool_version = kToolVersion;
    double wall_time_seconds = 0.0;
    std::vector<std::string> outputs;
};

nlohmann::json config_to_json(const FufsConfig& cfg);
FufsConfig config_from_json(const nlohmann::json& j);
/// Overlay a (possibly partial) config JSON onto `cfg`.
void apply_config_json(FufsConfig& cfg, const nlohmann::json& j);

nlohmann::json synthetic_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_from_json(const nlohmann::json& j);

nlohmann::json source_to_json(const DataSource& source);
DataSource source_from_json(const nlohmann::json& j);

nlohmann::json selection_to_json(const SelectionResult& result);
SelectionResult selection_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EvalReport& report);

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Materialize the dataset a DataSource describes. For synthetic sources the
/// generated feature roles are reported through `roles` when non-null.
Dataset load_from_source(const DataSource& source, std::vector<FeatureRole>* roles = nullptr);

}  // namespace fairsel
