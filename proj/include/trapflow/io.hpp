#pragma once

#include "trapflow/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace trapflow {

struct RunArtifacts {
    Grid1D grid;
    std::vector<CellField> snapshots;
    nlohmann::json summary = nlohmann::json::object();
    // Additional files (name -> content), e.g. CSV tables.
    std::map<std::string, std::string> extra;
};

struct ManifestEntry {
    std::string file;
    std::string sha256;
    std::size_t bytes = 0;
};

struct Manifest {
    std::vector<ManifestEntry> files;
    nlohmann::json to_json() const;
};

// "x,u" with every value in %.17e.
std::string snapshot_csv(const Grid1D& grid, const Eigen::VectorXd& u);
std::string sha256_hex(const std::string& data);

// Writes snapshot_NNN.csv, summary.json, extra files and manifest.json into
// dir. Refuses a non-empty existing directory unless force is set. The
// summary gains "tool_version" and a "snapshots" index (file, time).
Manifest write_outputs(const std::filesystem::path& dir, const RunArtifacts& run, bool force = false);

}  // namespace trapflow
