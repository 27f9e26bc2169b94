#pragma once

#include "trapflow/capillary.hpp"
#include "trapflow/hyperbolic.hpp"

#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace trapflow {

// sum_{x_a < x_j < x_b} u_j dx per snapshot. Both bounds must be faces of the
// grid (ConfigError otherwise).
std::vector<double> trapped_mass_series(const Grid1D& grid, const Trajectory& trajectory, double x_a,
                                        double x_b);

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> distance;  // sum |u_j - v_j| dx
    bool pass = true;
};

// Passes iff the L1 distance never grows by more than 1e-12 (d_0 + 1).
// Throws std::invalid_argument when the trajectories do not share snapshots.
ContractionReport l1_contraction_test(const Grid1D& grid, const Trajectory& u, const Trajectory& v);

// Two random piecewise-constant profiles on [-1, 1] with common far field.
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_profile_pair(const Grid1D& grid,
                                                                std::mt19937_64& rng);

enum class DataRegime { large, small };
const char* to_string(DataRegime r);

// large: u_i* <= u0 <= 1 on each rock; small: 0 <= u0 <= u_i*. Throws
// UnsupportedRegime for data that straddles u_i*.
DataRegime classify_regime(const FluxModel& model, const Grid1D& grid, const Eigen::VectorXd& u0);

struct VanishingOptions {
    int snapshots = 21;
    int reference_factor = 4;
    // Large data only: start the capillary runs from prepared data with
    // eta = eta_factor * eps.
    bool prepare = true;
    double eta_factor = 1.0;
    ParabolicOptions parabolic;
    HyperbolicOptions hyperbolic;
};

struct VanishingRow {
    double eps = 0.0;
    double distance = 0.0;  // space-time L1 distance to the hyperbolic reference
    std::array<double, 2> energy{0.0, 0.0};
};

struct VanishingStudy {
    DataRegime regime = DataRegime::large;
    Coupling reference;
    std::vector<VanishingRow> rows;
    bool pass = false;
};

// eps_list must be strictly decreasing. The reference is a hyperbolic run on
// a grid reference_factor times finer, restricted by cell averaging.
VanishingStudy vanishing_viscosity_study(const FluxModel& model,
                                         const std::function<double(double)>& u0,
                                         const std::vector<double>& eps_list, const Grid1D& grid,
                                         double t_end, const VanishingOptions& opts = {});

struct ModeDiscrepancy {
    double l1_gap = 0.0;
    double nonclassical_flux = 0.0;  // time-averaged interface flux
    double entropy_flux = 0.0;
    double flux_gap = 0.0;
    double floor = 0.0;
    bool pass = false;
};

// Runs both hyperbolic couplings; passes iff the L1 gap at t_end exceeds the
// floor (default 10 dx).
ModeDiscrepancy mode_discrepancy_report(const FluxModel& model, const Grid1D& grid,
                                        const Eigen::VectorXd& u0, double t_end,
                                        std::optional<double> floor = std::nullopt,
                                        const HyperbolicOptions& opts = {});

}  // namespace trapflow
