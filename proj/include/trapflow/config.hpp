#pragma once

#include "trapflow/capillary.hpp"
#include "trapflow/flux_model.hpp"
#include "trapflow/grid.hpp"
#include "trapflow/riemann.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace trapflow {

struct ModelSpec {
    // "TF1" or empty for the parametric family.
    std::string preset = "TF1";
    double q = 0.25;
    double C = 1.0;
    double P1 = 0.0;
    double P2 = 1.0;
    ParamFamily family;

    FluxModel build() const;
    bool operator==(const ModelSpec&) const;
};

struct GridSpec {
    double x_min = -2.0;
    double x_max = 2.0;
    int n_left = 400;
    int n_right = 400;

    Grid1D build() const { return Grid1D::from_bounds(x_min, x_max, n_left, n_right); }
    bool operator==(const GridSpec&) const = default;
};

struct InitialSpec {
    enum class Kind { constant, riemann, indicator, table };
    Kind kind = Kind::riemann;
    double ul = 0.5;
    double ur = 0.5;
    // indicator: value on [a, b], 0 elsewhere
    double a = -1.0;
    double b = 0.0;
    double value = 1.0;
    // table: linear interpolation of (x, u) samples read from a CSV file
    std::string path;
    std::vector<double> xs;
    std::vector<double> us;

    std::function<double(double)> function() const;
    bool operator==(const InitialSpec&) const = default;
};

struct RunConfig {
    ModelSpec model;
    GridSpec grid;
    Coupling mode = Coupling::non_classical();
    InterfaceMode interface = InterfaceMode::graph();
    std::optional<double> eps;
    std::optional<double> eta;
    double cfl = 0.49;
    double c_dt = 0.5;
    Boundaries bc;
    InitialSpec initial;
    double t_end = 1.0;
    std::vector<double> snapshots;
    std::string output = "out";
    std::uint64_t seed = 0;

    bool operator==(const RunConfig&) const = default;
};

// Parses a JSON document. Throws ConfigError carrying line/column for syntax
// errors and listing every violated constraint for semantic errors. Table
// initial data is loaded relative to `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

// Reads "x,u" rows (header optional).
std::pair<std::vector<double>, std::vector<double>> read_xu_csv(const std::string& path);

BoundaryCondition parse_boundary(const std::string& text);
std::string to_string(const BoundaryCondition& bc);

}  // namespace trapflow
