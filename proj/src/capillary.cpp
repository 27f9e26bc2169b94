#include "trapflow/capillary.hpp"

#include "trapflow/errors.hpp"
#include "trapflow/hyperbolic.hpp"
#include "trapflow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trapflow {

std::string InterfaceMode::to_string() const {
    if (kind == Kind::graph) return "graph";
    std::ostringstream os;
    os.precision(17);
    os << "flux:" << value;
    return os.str();
}

InterfaceMode InterfaceMode::parse(const std::string& text) {
    if (text == "graph") return graph();
    if (text.rfind("flux:", 0) == 0) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text.substr(5), &pos);
            if (pos == text.size() - 5) return prescribed(v);
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("unknown interface mode '" + text + "' (expected graph or flux:<value>)");
}

EpsProblem::EpsProblem(FluxModel m, double e, InterfaceMode mode)
    : model(std::move(m)), eps(e), interface(mode) {
    const double gap = model.P(Side::right) - model.P(Side::left);
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    if (!(eps < gap)) throw ConfigError("eps must be < P2−P1");
    if (interface.kind == InterfaceMode::Kind::prescribed_flux &&
        !(interface.value >= 0.0 && interface.value <= model.q()))
        throw ConfigError("prescribed interface flux must lie in [0, q]");
}

namespace {

// d/da of min f over [a, hi]: f'(a) when the minimum sits at a, else 0.
double d_min_left(const FluxModel& m, Side s, double a, double g) {
    return m.flux(s, a) <= g + 1e-15 ? m.flux_derivative(s, a) : 0.0;
}

// d/db of min f over [lo, b].
double d_min_right(const FluxModel& m, Side s, double b, double g) {
    return m.flux(s, b) <= g + 1e-15 ? m.flux_derivative(s, b) : 0.0;
}

struct FaceFlux {
    double F;
    double dL;  // dF / du_{left cell}
    double dR;  // dF / du_{right cell}
    bool tie = false;
};

FaceFlux graph_interface_flux(const EpsProblem& p, double uL, double uR, double dx) {
    const auto& m = p.model;
    const double k = 2.0 * p.eps / dx;
    const double G1 = godunov_flux(m, Side::left, uL, 1.0);
    const double A = G1 - k * (m.phi_max(Side::left) - m.phi(Side::left, uL));
    const double G2 = godunov_flux(m, Side::right, 0.0, uR);
    const double B = G2 - k * m.phi(Side::right, uR);
    FaceFlux r{};
    r.tie = std::abs(A - B) <= 1e-14;
    if (A >= B) {
        r.F = A;
        r.dL = d_min_left(m, Side::left, uL, G1) + k * m.phi_derivative(Side::left, uL);
        r.dR = 0.0;
    } else {
        r.F = B;
        r.dL = 0.0;
        r.dR = d_min_right(m, Side::right, uR, G2) - k * m.phi_derivative(Side::right, uR);
    }
    return r;
}

}  // namespace

InterfaceState interface_solve(const EpsProblem& p, double uL, double uR, double dx) {
    if (!(uL >= 0.0 && uL <= 1.0 && uR >= 0.0 && uR <= 1.0))
        throw DomainError("interface_solve: states outside [0, 1]");
    if (!(dx > 0.0)) throw std::invalid_argument("interface_solve: dx must be positive");
    const auto& m = p.model;
    const double k = 2.0 * p.eps / dx;
    auto F1 = [&](double a) {
        return godunov_flux(m, Side::left, uL, a) - k * (m.phi(Side::left, a) - m.phi(Side::left, uL));
    };
    auto F2 = [&](double b) {
        return godunov_flux(m, Side::right, b, uR) - k * (m.phi(Side::right, uR) - m.phi(Side::right, b));
    };
    const double A = F1(1.0);
    const double B = F2(0.0);
    InterfaceState s;
    s.both_branches = std::abs(A - B) <= 1e-14;
    if (A >= B) {
        s.trace_left = 1.0;
        s.flux = A;
        if (!(F2(1.0) >= A)) throw NumericalError("interface_solve: no root on the a = 1 branch");
        s.trace_right = numerics::bisect([&](double b) { return F2(b) - A; }, 0.0, 1.0);
    } else {
        s.trace_right = 0.0;
        s.flux = B;
        if (!(F1(0.0) >= B)) throw NumericalError("interface_solve: no root on the b = 0 branch");
        s.trace_left = numerics::bisect([&](double a) { return F1(a) - B; }, 0.0, 1.0);
    }
    return s;
}

double parabolic_dt(const EpsProblem& p, const Grid1D& grid, const ParabolicOptions& opts) {
    return std::min(stable_dt(p.model, grid, opts.cfl), opts.c_dt * grid.dx);
}

namespace {

// Thomas algorithm; the system is an M-matrix with unit-bounded diagonal.
void solve_tridiagonal(const Eigen::VectorXd& lower, Eigen::VectorXd diag, const Eigen::VectorXd& upper,
                       Eigen::VectorXd& rhs) {
    const Eigen::Index n = diag.size();
    for (Eigen::Index i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

class ImplicitSystem {
public:
    ImplicitSystem(const EpsProblem& p, const Grid1D& g, const Eigen::VectorXd& old, double dt,
                   const Boundaries& bc)
        : p_(p), g_(g), old_(old), lam_(dt / g.dx), k_(p.eps / g.dx), n_(g.size()) {
        // Convection is frozen at the old level except on the interface face.
        const Coupling frozen = Coupling::prescribed(0.0);
        conv_ = hyperbolic_face_fluxes(p.model, frozen, g, bc, old);
        F_.resize(n_ + 1);
        dL_.resize(n_ + 1);
        dR_.resize(n_ + 1);
        phi_.resize(n_);
        dphi_.resize(n_);
    }

    // Fills F_, dL_, dR_ at u and returns the residual.
    Eigen::VectorXd residual(const Eigen::VectorXd& u) {
        const int iface = g_.interface_face();
        for (int j = 0; j < n_; ++j) {
            const Side s = g_.side_of(j);
            phi_[j] = p_.model.phi(s, u[j]);
            dphi_[j] = p_.model.phi_derivative(s, u[j]);
        }
        F_[0] = conv_[0];
        F_[n_] = conv_[n_];
        dL_[0] = dR_[0] = dL_[n_] = dR_[n_] = 0.0;
        for (int f = 1; f < n_; ++f) {
            if (f == iface) {
                if (p_.interface.kind == InterfaceMode::Kind::prescribed_flux) {
                    F_[f] = p_.interface.value;
                    dL_[f] = dR_[f] = 0.0;
                } else {
                    const FaceFlux ff = graph_interface_flux(p_, u[f - 1], u[f], g_.dx);
                    F_[f] = ff.F;
                    dL_[f] = ff.dL;
                    dR_[f] = ff.dR;
                    tie_ = ff.tie;
                }
                continue;
            }
            F_[f] = conv_[f] - k_ * (phi_[f] - phi_[f - 1]);
            dL_[f] = k_ * dphi_[f - 1];
            dR_[f] = -k_ * dphi_[f];
        }
        return u - old_ + lam_ * (F_.tail(n_) - F_.head(n_));
    }

    // Newton direction for the last residual evaluation.
    Eigen::VectorXd direction(Eigen::VectorXd minus_r) const {
        Eigen::VectorXd lower(n_), diag(n_), upper(n_);
        for (int j = 0; j < n_; ++j) {
            diag[j] = 1.0 + lam_ * (dL_[j + 1] - dR_[j]);
            upper[j] = lam_ * dR_[j + 1];
            lower[j] = -lam_ * dL_[j];
        }
        solve_tridiagonal(lower, diag, upper, minus_r);
        return minus_r;
    }

    const Eigen::VectorXd& fluxes() const { return F_; }
    bool tie() const { return tie_; }

private:
    const EpsProblem& p_;
    const Grid1D& g_;
    const Eigen::VectorXd& old_;
    double lam_;
    double k_;
    int n_;
    Eigen::VectorXd conv_, F_, dL_, dR_, phi_, dphi_;
    bool tie_ = false;
};

}  // namespace

CellField step_parabolic(const EpsProblem& p, const Grid1D& grid, const CellField& state, double dt,
                         const ParabolicOptions& opts, StepRecord* record) {
    if (state.u.size() != grid.size()) throw std::invalid_argument("state size does not match grid");
    if (!state.u.allFinite()) throw NumericalError("step_parabolic: non-finite saturation");
    const double courant = dt * p.model.lipschitz() / grid.dx;
    if (!(dt > 0.0) || courant > opts.cfl * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CFL violation: dt L / dx = " << courant << " exceeds " << opts.cfl;
        throw NumericalError(os.str());
    }

    ImplicitSystem sys(p, grid, state.u, dt, opts.bc);
    Eigen::VectorXd u = state.u;
    Eigen::VectorXd r = sys.residual(u);
    double rn = r.lpNorm<Eigen::Infinity>();
    int it = 0;
    constexpr double target = 1e-14;
    while (rn > target && it < opts.max_newton) {
        ++it;
        const Eigen::VectorXd d = sys.direction(-r);
        double alpha = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
            Eigen::VectorXd trial = (u + alpha * d).cwiseMax(0.0).cwiseMin(1.0);
            Eigen::VectorXd rt = sys.residual(trial);
            const double tn = rt.lpNorm<Eigen::Infinity>();
            if (tn < rn) {
                u = std::move(trial);
                r = std::move(rt);
                rn = tn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (!(rn <= opts.newton_tol)) {
        std::ostringstream os;
        os << "step_parabolic: Newton residual " << rn << " after " << it << " iterations";
        throw NumericalError(os.str());
    }
    // Refresh fluxes at the accepted iterate and update in flux form.
    sys.residual(u);
    const Eigen::VectorXd& F = sys.fluxes();
    const int n = grid.size();
    CellField next;
    next.time = state.time + dt;
    next.u = (state.u - (dt / grid.dx) * (F.tail(n) - F.head(n))).cwiseMax(0.0).cwiseMin(1.0);
    if (!next.u.allFinite()) throw NumericalError("step_parabolic: non-finite saturation");

    if (record) {
        record->time = next.time;
        record->dt = dt;
        record->left_boundary_flux = F[0];
        record->interface_flux = F[grid.interface_face()];
        record->right_boundary_flux = F[n];
        record->newton_iterations = it;
        record->branch_tie = false;
        if (p.interface.kind == InterfaceMode::Kind::graph) {
            const InterfaceState is =
                interface_solve(p, u[grid.n_left - 1], u[grid.n_left], grid.dx);
            record->trace_left = is.trace_left;
            record->trace_right = is.trace_right;
            record->branch_tie = is.both_branches;
        }
    }
    return next;
}

Trajectory run_parabolic(const EpsProblem& p, const Grid1D& grid, const Eigen::VectorXd& u0,
                         double t_end, std::vector<double> snapshot_times,
                         const ParabolicOptions& opts, const StepObserver& observer) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    if (u0.size() != grid.size()) throw std::invalid_argument("u0 size does not match grid");
    if ((u0.array() < 0.0).any() || (u0.array() > 1.0).any())
        throw DomainError("run_parabolic: initial data outside [0, 1]");

    std::erase_if(snapshot_times, [&](double t) { return !(t > 0.0) || t >= t_end; });
    std::sort(snapshot_times.begin(), snapshot_times.end());
    snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                         snapshot_times.end());
    if (t_end > 0.0) snapshot_times.push_back(t_end);

    Trajectory traj;
    CellField state{u0, 0.0};
    traj.snapshots.push_back(state);
    const double dt_max = parabolic_dt(p, grid, opts);
    for (double target : snapshot_times) {
        while (state.time < target) {
            double dt = std::min(dt_max, target - state.time);
            if (target - state.time - dt < 1e-9 * dt_max) dt = target - state.time;
            StepRecord rec;
            CellField next = step_parabolic(p, grid, state, dt, opts, &rec);
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

EnergyAccumulator::EnergyAccumulator(const EpsProblem& problem, const Grid1D& grid)
    : problem_(problem), grid_(grid) {}

void EnergyAccumulator::observe(const CellField& after, double dt) {
    const auto& m = problem_.model;
    const double dx = grid_.dx;
    for (Side s : kSides) {
        const int lo = s == Side::left ? 0 : grid_.n_left;
        const int hi = s == Side::left ? grid_.n_left : grid_.size();
        double acc = 0.0;
        double prev = m.phi(s, after.u[lo]);
        for (int j = lo + 1; j < hi; ++j) {
            const double cur = m.phi(s, after.u[j]);
            const double grad = (cur - prev) / dx;
            acc += grad * grad;
            prev = cur;
        }
        energy_[index(s)] += problem_.eps * acc * dx * dt;
    }
}

std::array<double, 2> energy_estimate(const EpsProblem& problem, const Grid1D& grid,
                                      const Trajectory& trajectory) {
    EnergyAccumulator acc(problem, grid);
    const auto& snaps = trajectory.snapshots;
    for (std::size_t n = 0; n + 1 < snaps.size(); ++n) {
        const double dt = snaps[n + 1].time - snaps[n].time;
        if (dt > 0.0) acc.observe(snaps[n + 1], dt);
    }
    return acc.result();
}

}  // namespace trapflow
