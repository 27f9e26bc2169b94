#include "trapflow/hyperbolic.hpp"

#include "trapflow/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trapflow {

Grid1D Grid1D::symmetric(double half_width, int cells_per_side) {
    if (!(half_width > 0.0) || cells_per_side <= 0)
        throw ConfigError("grid needs a positive half width and cell count");
    return Grid1D{half_width / cells_per_side, cells_per_side, cells_per_side};
}

Grid1D Grid1D::from_bounds(double x_min, double x_max, int n_left, int n_right) {
    if (!(x_min < 0.0 && x_max > 0.0)) throw ConfigError("grid bounds must satisfy x_min < 0 < x_max");
    if (n_left <= 0 || n_right <= 0) throw ConfigError("grid cell counts must be positive");
    const double dl = -x_min / n_left;
    const double dr = x_max / n_right;
    if (std::abs(dl - dr) > 1e-12 * std::max(dl, dr))
        throw ConfigError("grid spacing differs between subdomains; x = 0 must be a face of a uniform mesh");
    return Grid1D{dl, n_left, n_right};
}

Eigen::VectorXd Grid1D::centers() const {
    Eigen::VectorXd x(size());
    for (int j = 0; j < size(); ++j) x[j] = center(j);
    return x;
}

double Trajectory::mean_interface_flux() const {
    double acc = 0.0;
    double t = 0.0;
    for (const auto& s : steps) {
        acc += s.interface_flux * s.dt;
        t += s.dt;
    }
    return t > 0.0 ? acc / t : 0.0;
}

Eigen::VectorXd sample(const Grid1D& grid, const std::function<double(double)>& u0) {
    Eigen::VectorXd u(grid.size());
    for (int j = 0; j < grid.size(); ++j) u[j] = u0(grid.center(j));
    return u;
}

Eigen::VectorXd cell_averages(const Grid1D& grid, const std::function<double(double)>& u0) {
    using Quad = boost::math::quadrature::gauss<double, 16>;
    Eigen::VectorXd u(grid.size());
    // Weights summing to 2 only up to rounding can push an average of 1 past 1.
    for (int j = 0; j < grid.size(); ++j)
        u[j] = std::clamp(Quad::integrate(u0, grid.face(j), grid.face(j + 1)) / grid.dx, 0.0, 1.0);
    return u;
}

double total_mass(const Grid1D& grid, const Eigen::VectorXd& u) { return u.sum() * grid.dx; }

double stable_dt(const FluxModel& model, const Grid1D& grid, double cfl) {
    const double L = model.lipschitz();
    if (!(L > 0.0)) return cfl * grid.dx;
    return cfl * grid.dx / L;
}

namespace {

double boundary_flux(const FluxModel& model, Side side, const BoundaryCondition& bc, double inner,
                     bool is_left_end) {
    switch (bc.kind) {
        case BoundaryCondition::Kind::outflow: return model.flux(side, inner);
        case BoundaryCondition::Kind::dirichlet:
            return is_left_end ? godunov_flux(model, side, bc.value, inner)
                               : godunov_flux(model, side, inner, bc.value);
        case BoundaryCondition::Kind::zero_flux: return 0.0;
    }
    return 0.0;
}

void check_state(const Eigen::VectorXd& u, const char* where) {
    if (!u.allFinite()) throw NumericalError(std::string(where) + ": non-finite saturation");
}

}  // namespace

Eigen::VectorXd hyperbolic_face_fluxes(const FluxModel& model, const Coupling& coupling,
                                       const Grid1D& grid, const Boundaries& bc,
                                       const Eigen::VectorXd& u) {
    const int n = grid.size();
    const int iface = grid.interface_face();
    Eigen::VectorXd F(n + 1);
    F[0] = boundary_flux(model, Side::left, bc.left, u[0], true);
    F[n] = boundary_flux(model, Side::right, bc.right, u[n - 1], false);
    for (int f = 1; f < n; ++f) {
        if (f == iface) {
            F[f] = interface_flux(model, coupling, u[f - 1], u[f]);
        } else {
            F[f] = godunov_flux(model, grid.side_of(f), u[f - 1], u[f]);
        }
    }
    return F;
}

CellField step_hyperbolic(const FluxModel& model, const Coupling& coupling, const Grid1D& grid,
                          const CellField& state, double dt, const HyperbolicOptions& opts,
                          StepRecord* record) {
    if (state.u.size() != grid.size()) throw std::invalid_argument("state size does not match grid");
    check_state(state.u, "step_hyperbolic");
    const double courant = dt * model.lipschitz() / grid.dx;
    if (!(dt > 0.0) || courant > opts.cfl * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CFL violation: dt L / dx = " << courant << " exceeds " << opts.cfl;
        throw NumericalError(os.str());
    }
    const Eigen::VectorXd F = hyperbolic_face_fluxes(model, coupling, grid, opts.bc, state.u);
    const int n = grid.size();
    CellField next;
    next.time = state.time + dt;
    next.u = state.u - (dt / grid.dx) * (F.tail(n) - F.head(n));
    check_state(next.u, "step_hyperbolic");
    if (record) {
        record->time = next.time;
        record->dt = dt;
        record->left_boundary_flux = F[0];
        record->interface_flux = F[grid.interface_face()];
        record->right_boundary_flux = F[n];
    }
    return next;
}

namespace {

std::vector<double> normalised_snapshots(std::vector<double> times, double t_end) {
    std::erase_if(times, [&](double t) { return !(t > 0.0) || t >= t_end; });
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (t_end > 0.0) times.push_back(t_end);
    return times;
}

}  // namespace

Trajectory run_hyperbolic(const FluxModel& model, const Coupling& coupling, const Grid1D& grid,
                          const Eigen::VectorXd& u0, double t_end,
                          std::vector<double> snapshot_times, const HyperbolicOptions& opts,
                          const StepObserver& observer) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    if (u0.size() != grid.size()) throw std::invalid_argument("u0 size does not match grid");
    if ((u0.array() < 0.0).any() || (u0.array() > 1.0).any())
        throw DomainError("run_hyperbolic: initial data outside [0, 1]");
    coupling.validate(model);

    Trajectory traj;
    CellField state{u0, 0.0};
    traj.snapshots.push_back(state);
    const double dt_max = stable_dt(model, grid, opts.cfl);
    for (double target : normalised_snapshots(std::move(snapshot_times), t_end)) {
        while (state.time < target) {
            double dt = std::min(dt_max, target - state.time);
            // Absorb a sliver step into the current one.
            if (target - state.time - dt < 1e-9 * dt_max) dt = target - state.time;
            StepRecord rec;
            CellField next = step_hyperbolic(model, coupling, grid, state, dt, opts, &rec);
            if (target - next.time < 1e-12 * std::max(1.0, target)) next.time = target;
            rec.time = next.time;
            if (observer) observer(state, next, rec);
            traj.steps.push_back(rec);
            state = std::move(next);
            if (opts.record_every_step && state.time < target) traj.snapshots.push_back(state);
        }
        traj.snapshots.push_back(state);
    }
    return traj;
}

double boundary_reach_time(const FluxModel& model, const Grid1D& grid, const Eigen::VectorXd& u0) {
    const int n = grid.size();
    int first = 0;
    while (first < n - 1 && u0[first + 1] == u0[0]) ++first;
    int last = n - 1;
    while (last > 0 && u0[last - 1] == u0[n - 1]) --last;
    if (first >= n - 1) return std::numeric_limits<double>::infinity();
    const double left_gap = grid.face(first + 1) - grid.x_min();
    const double right_gap = grid.x_max() - grid.face(last);
    const double Ll = std::max(model.lipschitz(Side::left), 1e-300);
    const double Lr = std::max(model.lipschitz(Side::right), 1e-300);
    // A wave travelling through both rocks is bounded by the slower of the two
    // gaps at the faster speed.
    return std::min(left_gap / std::max(Ll, Lr), right_gap / std::max(Ll, Lr));
}

namespace {

// Numerical Kruzhkov entropy flux of the Godunov scheme.
double entropy_flux(const FluxModel& model, Side s, double a, double b, double k) {
    return godunov_flux(model, s, std::max(a, k), std::max(b, k)) -
           godunov_flux(model, s, std::min(a, k), std::min(b, k));
}

}  // namespace

EntropyAuditor::EntropyAuditor(FluxModel model, Grid1D grid, std::vector<double> kappas)
    : model_(std::move(model)), grid_(grid), kappas_(std::move(kappas)) {}

void EntropyAuditor::observe(const CellField& before, const CellField& after, double dt) {
    const int n = grid_.size();
    const int iL = grid_.n_left - 1;
    const int iR = grid_.n_left;
    const double lam = dt / grid_.dx;
    const auto& u = before.u;
    const auto& v = after.u;
    for (double k : kappas_) {
        for (int j = 1; j < n - 1; ++j) {
            if (j == iL || j == iR) continue;
            const Side s = grid_.side_of(j);
            const double qin = entropy_flux(model_, s, u[j - 1], u[j], k);
            const double qout = entropy_flux(model_, s, u[j], u[j + 1], k);
            const double prod =
                -(std::abs(v[j] - k) - std::abs(u[j] - k) + lam * (qout - qin));
            if (prod < audit_.interior_min) {
                audit_.interior_min = prod;
                audit_.worst_kappa_interior = k;
            }
        }
        if (iL >= 1 && iR <= n - 2) {
            const double qin = entropy_flux(model_, Side::left, u[iL - 1], u[iL], k);
            const double qout = entropy_flux(model_, Side::right, u[iR], u[iR + 1], k);
            const double raw = -(std::abs(v[iL] - k) - std::abs(u[iL] - k) + std::abs(v[iR] - k) -
                                 std::abs(u[iR] - k) + lam * (qout - qin));
            const double jump =
                std::abs(model_.flux(Side::right, k) - model_.flux(Side::left, k));
            if (raw < audit_.interface_min_raw) {
                audit_.interface_min_raw = raw;
                audit_.worst_kappa_interface = k;
            }
            audit_.interface_min_with_interface_term =
                std::min(audit_.interface_min_with_interface_term, raw + lam * jump);
        }
    }
    ++audit_.steps_audited;
}

EntropyAudit entropy_residual_audit(const FluxModel& model, const Grid1D& grid,
                                    std::span<const CellField> states,
                                    std::span<const double> kappas) {
    EntropyAuditor auditor(model, grid, {kappas.begin(), kappas.end()});
    for (std::size_t n = 0; n + 1 < states.size(); ++n) {
        const double dt = states[n + 1].time - states[n].time;
        if (dt > 0.0) auditor.observe(states[n], states[n + 1], dt);
    }
    return auditor.result();
}

}  // namespace trapflow
