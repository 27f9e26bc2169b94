#pragma once

#include "trapflow/flux_model.hpp"

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <vector>

namespace trapflow {

// Uniform mesh of [-n_left dx, n_right dx]; x = 0 is the face between cell
// n_left - 1 and cell n_left.
struct Grid1D {
    double dx = 0.01;
    int n_left = 200;
    int n_right = 200;

    static Grid1D symmetric(double half_width, int cells_per_side);
    // Throws ConfigError unless -x_min / n_left == x_max / n_right.
    static Grid1D from_bounds(double x_min, double x_max, int n_left, int n_right);

    int size() const { return n_left + n_right; }
    int interface_face() const { return n_left; }
    double x_min() const { return -n_left * dx; }
    double x_max() const { return n_right * dx; }
    double face(int f) const { return (f - n_left) * dx; }
    double center(int j) const { return (j - n_left + 0.5) * dx; }
    Side side_of(int j) const { return j < n_left ? Side::left : Side::right; }
    Eigen::VectorXd centers() const;

    bool operator==(const Grid1D&) const = default;
};

struct CellField {
    Eigen::VectorXd u;
    double time = 0.0;
};

struct BoundaryCondition {
    enum class Kind { outflow, dirichlet, zero_flux };
    Kind kind = Kind::outflow;
    double value = 0.0;

    static BoundaryCondition outflow() { return {Kind::outflow, 0.0}; }
    static BoundaryCondition dirichlet(double v) { return {Kind::dirichlet, v}; }
    static BoundaryCondition zero_flux() { return {Kind::zero_flux, 0.0}; }

    bool operator==(const BoundaryCondition&) const = default;
};

struct Boundaries {
    BoundaryCondition left;
    BoundaryCondition right;
    bool operator==(const Boundaries&) const = default;
};

// Face fluxes used by one time step. Traces and Newton data are only filled
// by the capillary solver.
struct StepRecord {
    double time = 0.0;  // time at the end of the step
    double dt = 0.0;
    double left_boundary_flux = 0.0;
    double interface_flux = 0.0;
    double right_boundary_flux = 0.0;
    double trace_left = std::numeric_limits<double>::quiet_NaN();
    double trace_right = std::numeric_limits<double>::quiet_NaN();
    int newton_iterations = 0;
    bool branch_tie = false;
};

struct Trajectory {
    std::vector<CellField> snapshots;
    std::vector<StepRecord> steps;

    // Time average of the interface flux over all recorded steps.
    double mean_interface_flux() const;
    double final_time() const { return snapshots.empty() ? 0.0 : snapshots.back().time; }
};

using StepObserver =
    std::function<void(const CellField& before, const CellField& after, const StepRecord& step)>;

// Cell values of a callable initial profile sampled at cell centres.
Eigen::VectorXd sample(const Grid1D& grid, const std::function<double(double)>& u0);

// Cell averages of a piecewise profile, by 16-point Gauss quadrature per cell.
Eigen::VectorXd cell_averages(const Grid1D& grid, const std::function<double(double)>& u0);

double total_mass(const Grid1D& grid, const Eigen::VectorXd& u);

}  // namespace trapflow
