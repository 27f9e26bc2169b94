#pragma once

#include "trapflow/grid.hpp"
#include "trapflow/riemann.hpp"

#include <span>
#include <vector>

namespace trapflow {

struct HyperbolicOptions {
    double cfl = 0.49;
    Boundaries bc;
    // Snapshot after every step in addition to the requested times.
    bool record_every_step = false;
};

// Largest admissible step dt = cfl dx / max_i L_i.
double stable_dt(const FluxModel& model, const Grid1D& grid, double cfl);

// Face fluxes F_0 .. F_N of the first-order Godunov scheme with the given
// interface coupling and outer boundary conditions.
Eigen::VectorXd hyperbolic_face_fluxes(const FluxModel& model, const Coupling& coupling,
                                       const Grid1D& grid, const Boundaries& bc,
                                       const Eigen::VectorXd& u);

// One conservative update u_j <- u_j - dt/dx (F_{j+1/2} - F_{j-1/2}).
// Throws NumericalError on a CFL violation or non-finite state.
CellField step_hyperbolic(const FluxModel& model, const Coupling& coupling, const Grid1D& grid,
                          const CellField& state, double dt, const HyperbolicOptions& opts = {},
                          StepRecord* record = nullptr);

// Integrates to t_end with dt = cfl dx / L, landing exactly on every snapshot
// time. The first snapshot is u0 at t = 0, the last one is at t_end.
Trajectory run_hyperbolic(const FluxModel& model, const Coupling& coupling, const Grid1D& grid,
                          const Eigen::VectorXd& u0, double t_end,
                          std::vector<double> snapshot_times = {},
                          const HyperbolicOptions& opts = {}, const StepObserver& observer = {});

// Earliest time a wave started inside the non-constant part of u0 can reach
// an outer boundary, using the per-rock Lipschitz bounds.
double boundary_reach_time(const FluxModel& model, const Grid1D& grid, const Eigen::VectorXd& u0);

struct EntropyAudit {
    // Most negative discrete Kruzhkov production over cells whose faces all
    // lie inside one rock.
    double interior_min = 0.0;
    // Entropy production of the cell pair straddling x = 0 without any
    // interface term, and with the |f_2(k) - f_1(k)| interface term added.
    double interface_min_raw = 0.0;
    double interface_min_with_interface_term = 0.0;
    double worst_kappa_interior = 0.0;
    double worst_kappa_interface = 0.0;
    int steps_audited = 0;
};

// Discrete entropy audit of consecutive states. Each pair
// (states[n], states[n+1]) must be a single step of step_hyperbolic.
EntropyAudit entropy_residual_audit(const FluxModel& model, const Grid1D& grid,
                                    std::span<const CellField> states,
                                    std::span<const double> kappas);

// Streaming form of the audit, usable as a StepObserver.
class EntropyAuditor {
public:
    EntropyAuditor(FluxModel model, Grid1D grid, std::vector<double> kappas);
    void observe(const CellField& before, const CellField& after, double dt);
    const EntropyAudit& result() const { return audit_; }

private:
    FluxModel model_;
    Grid1D grid_;
    std::vector<double> kappas_;
    EntropyAudit audit_;
};

}  // namespace trapflow
