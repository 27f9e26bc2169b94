#pragma once

#include "trapflow/grid.hpp"
#include "trapflow/riemann.hpp"

#include <array>
#include <string>

namespace trapflow {

// Transmission law at x = 0 for the capillary problem.
struct InterfaceMode {
    enum class Kind { graph, prescribed_flux };
    Kind kind = Kind::graph;
    double value = 0.0;  // prescribed_flux only

    static InterfaceMode graph() { return {Kind::graph, 0.0}; }
    static InterfaceMode prescribed(double v) { return {Kind::prescribed_flux, v}; }

    std::string to_string() const;
    // "graph" or "flux:<value>".
    static InterfaceMode parse(const std::string& text);

    bool operator==(const InterfaceMode&) const = default;
};

// Capillarity-regularised problem. The constructor enforces 0 < eps < P2 - P1
// and, for a prescribed interface flux, 0 <= value <= q.
struct EpsProblem {
    FluxModel model;
    double eps;
    InterfaceMode interface;

    EpsProblem(FluxModel model, double eps, InterfaceMode interface = InterfaceMode::graph());
};

struct InterfaceState {
    double trace_left = 0.0;
    double trace_right = 0.0;
    double flux = 0.0;
    // Both graph branches give the same flux (only when A == B below).
    bool both_branches = false;
};

// Half-cell transmission problem between the last left cell uL and the first
// right cell uR:
//   F1(a) = G1(uL, a) - (2 eps / dx) (phi1(a) - phi1(uL))
//   F2(b) = G2(b, uR) - (2 eps / dx) (phi2(uR) - phi2(b))
// with a = 1 or b = 0 and F1(a) = F2(b). F1 is nonincreasing and F2
// nondecreasing, so the common flux is max(F1(1), F2(0)).
InterfaceState interface_solve(const EpsProblem& problem, double uL, double uR, double dx);

struct ParabolicOptions {
    double cfl = 0.49;
    // dt <= c_dt dx in addition to the convective bound.
    double c_dt = 0.5;
    Boundaries bc;
    double newton_tol = 1e-10;
    int max_newton = 200;
    bool record_every_step = false;
};

double parabolic_dt(const EpsProblem& problem, const Grid1D& grid, const ParabolicOptions& opts);

// IMEX step: Godunov convection from the old state, implicit capillary
// diffusion, implicit interface flux. Throws NumericalError when Newton does
// not reach newton_tol within max_newton iterations.
CellField step_parabolic(const EpsProblem& problem, const Grid1D& grid, const CellField& state,
                         double dt, const ParabolicOptions& opts = {},
                         StepRecord* record = nullptr);

Trajectory run_parabolic(const EpsProblem& problem, const Grid1D& grid, const Eigen::VectorXd& u0,
                         double t_end, std::vector<double> snapshot_times = {},
                         const ParabolicOptions& opts = {}, const StepObserver& observer = {});

// E_i = eps sum_n sum_j ((phi_i(u_{j+1}) - phi_i(u_j)) / dx)^2 dx dt over the
// faces inside rock i, evaluated at the end of each step.
class EnergyAccumulator {
public:
    EnergyAccumulator(const EpsProblem& problem, const Grid1D& grid);
    void observe(const CellField& after, double dt);
    const std::array<double, 2>& result() const { return energy_; }

private:
    EpsProblem problem_;
    Grid1D grid_;
    std::array<double, 2> energy_{0.0, 0.0};
};

// Same quadrature over consecutive snapshots of a trajectory; exact when the
// trajectory was recorded at every step.
std::array<double, 2> energy_estimate(const EpsProblem& problem, const Grid1D& grid,
                                      const Trajectory& trajectory);

}  // namespace trapflow
