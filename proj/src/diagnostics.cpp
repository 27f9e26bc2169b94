#include "trapflow/diagnostics.hpp"

#include "trapflow/errors.hpp"
#include "trapflow/steady.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace trapflow {

namespace {

int face_index(const Grid1D& grid, double x) {
    const double f = x / grid.dx + grid.n_left;
    const double r = std::round(f);
    if (std::abs(f - r) > 1e-9 || r < 0 || r > grid.size()) {
        std::ostringstream os;
        os << "x = " << x << " is not a face of the grid";
        throw ConfigError(os.str());
    }
    return static_cast<int>(r);
}

double l1(const Grid1D& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().sum() * grid.dx;
}

std::vector<double> even_times(double t_end, int count) {
    std::vector<double> t;
    for (int k = 1; k < count - 1; ++k) t.push_back(t_end * k / (count - 1));
    return t;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) acc += 0.5 * (v[k] + v[k + 1]) * (t[k + 1] - t[k]);
    return acc;
}

Eigen::VectorXd restrict_average(const Eigen::VectorXd& fine, int factor) {
    const Eigen::Index n = fine.size() / factor;
    Eigen::VectorXd coarse(n);
    for (Eigen::Index j = 0; j < n; ++j) coarse[j] = fine.segment(j * factor, factor).mean();
    return coarse;
}

}  // namespace

std::vector<double> trapped_mass_series(const Grid1D& grid, const Trajectory& traj, double x_a,
                                        double x_b) {
    const int a = face_index(grid, x_a);
    const int b = face_index(grid, x_b);
    if (a > b) throw ConfigError("trapped_mass_series: region must satisfy x_a <= x_b");
    std::vector<double> out;
    out.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots) out.push_back(s.u.segment(a, b - a).sum() * grid.dx);
    return out;
}

ContractionReport l1_contraction_test(const Grid1D& grid, const Trajectory& u, const Trajectory& v) {
    if (u.snapshots.size() != v.snapshots.size())
        throw std::invalid_argument("l1_contraction_test: snapshot counts differ");
    ContractionReport r;
    for (std::size_t k = 0; k < u.snapshots.size(); ++k) {
        const auto& a = u.snapshots[k];
        const auto& b = v.snapshots[k];
        if (a.u.size() != grid.size() || b.u.size() != grid.size())
            throw std::invalid_argument("l1_contraction_test: grid mismatch");
        if (std::abs(a.time - b.time) > 1e-12 * std::max(1.0, a.time))
            throw std::invalid_argument("l1_contraction_test: snapshot times differ");
        r.times.push_back(a.time);
        r.distance.push_back(l1(grid, a.u, b.u));
    }
    if (!r.distance.empty()) {
        const double slack = 1e-12 * (r.distance.front() + 1.0);
        for (std::size_t k = 1; k < r.distance.size(); ++k)
            if (r.distance[k] > r.distance[k - 1] + slack) r.pass = false;
    }
    return r;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> random_profile_pair(const Grid1D& grid,
                                                                std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double far_left = unit(rng);
    const double far_right = unit(rng);
    auto profile = [&] {
        // Up to 5 random plateaus between -1 and 1.
        std::uniform_int_distribution<int> count(1, 5);
        const int k = count(rng);
        std::vector<double> cuts{-1.0, 1.0};
        for (int i = 0; i < k - 1; ++i) cuts.push_back(-1.0 + 2.0 * unit(rng));
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> levels(cuts.size() - 1);
        for (double& l : levels) l = unit(rng);
        Eigen::VectorXd u(grid.size());
        for (int j = 0; j < grid.size(); ++j) {
            const double x = grid.center(j);
            if (x < -1.0) {
                u[j] = far_left;
            } else if (x >= 1.0) {
                u[j] = far_right;
            } else {
                const auto it = std::upper_bound(cuts.begin(), cuts.end(), x);
                u[j] = levels[static_cast<std::size_t>(it - cuts.begin()) - 1];
            }
        }
        return u;
    };
    Eigen::VectorXd a = profile();
    Eigen::VectorXd b = profile();
    return {a, b};
}

const char* to_string(DataRegime r) { return r == DataRegime::large ? "large" : "small"; }

DataRegime classify_regime(const FluxModel& model, const Grid1D& grid, const Eigen::VectorXd& u0) {
    bool large = true;
    bool small = true;
    for (int j = 0; j < grid.size(); ++j) {
        const double s = model.u_star(grid.side_of(j));
        if (u0[j] < s - 1e-12) large = false;
        if (u0[j] > s + 1e-12) small = false;
    }
    if (large) return DataRegime::large;
    if (small) return DataRegime::small;
    throw UnsupportedRegime("initial data straddles u_i*; mixed regimes have no reference coupling");
}

VanishingStudy vanishing_viscosity_study(const FluxModel& model,
                                         const std::function<double(double)>& u0,
                                         const std::vector<double>& eps_list, const Grid1D& grid,
                                         double t_end, const VanishingOptions& opts) {
    if (eps_list.empty()) throw std::invalid_argument("vanishing_viscosity_study: empty eps list");
    for (std::size_t k = 1; k < eps_list.size(); ++k)
        if (!(eps_list[k] < eps_list[k - 1]))
            throw std::invalid_argument("vanishing_viscosity_study: eps list must be decreasing");
    if (opts.snapshots < 2) throw std::invalid_argument("vanishing_viscosity_study: need >= 2 snapshots");

    const Eigen::VectorXd coarse0 = cell_averages(grid, u0);
    VanishingStudy study;
    study.regime = classify_regime(model, grid, coarse0);
    study.reference = study.regime == DataRegime::large ? Coupling::non_classical()
                                                        : Coupling::optimal_entropy();

    const std::vector<double> times = even_times(t_end, opts.snapshots);
    const int f = opts.reference_factor;
    const Grid1D fine{grid.dx / f, grid.n_left * f, grid.n_right * f};

    auto reference = std::async(std::launch::async, [&] {
        return run_hyperbolic(model, study.reference, fine, cell_averages(fine, u0), t_end, times,
                              opts.hyperbolic);
    });

    struct Run {
        VanishingRow row;
        Trajectory traj;
    };
    std::vector<std::future<Run>> runs;
    for (double eps : eps_list) {
        runs.push_back(std::async(std::launch::async, [&, eps] {
            EpsProblem problem(model, eps);
            Eigen::VectorXd start = coarse0;
            if (study.regime == DataRegime::large && opts.prepare)
                start = prepare_initial_data(model, grid, u0, opts.eta_factor * eps, eps).u;
            EnergyAccumulator energy(problem, grid);
            Run run;
            run.traj = run_parabolic(problem, grid, start, t_end, times, opts.parabolic,
                                     [&](const CellField&, const CellField& after, const StepRecord& s) {
                                         energy.observe(after, s.dt);
                                     });
            run.row.eps = eps;
            run.row.energy = energy.result();
            return run;
        }));
    }

    const Trajectory ref = reference.get();
    std::vector<Eigen::VectorXd> ref_coarse;
    std::vector<double> ref_times;
    for (const auto& s : ref.snapshots) {
        ref_coarse.push_back(restrict_average(s.u, f));
        ref_times.push_back(s.time);
    }
    for (auto& fut : runs) {
        Run run = fut.get();
        if (run.traj.snapshots.size() != ref_coarse.size())
            throw NumericalError("vanishing_viscosity_study: snapshot mismatch with the reference");
        std::vector<double> d;
        for (std::size_t k = 0; k < ref_coarse.size(); ++k) d.push_back(l1(grid, run.traj.snapshots[k].u, ref_coarse[k]));
        run.row.distance = trapezoid(ref_times, d);
        study.rows.push_back(run.row);
    }
    study.pass = true;
    for (std::size_t k = 1; k < study.rows.size(); ++k)
        if (!(study.rows[k].distance < study.rows[k - 1].distance)) study.pass = false;
    return study;
}

ModeDiscrepancy mode_discrepancy_report(const FluxModel& model, const Grid1D& grid,
                                        const Eigen::VectorXd& u0, double t_end,
                                        std::optional<double> floor, const HyperbolicOptions& opts) {
    auto nc = std::async(std::launch::async, [&] {
        return run_hyperbolic(model, Coupling::non_classical(), grid, u0, t_end, {}, opts);
    });
    const Trajectory oe = run_hyperbolic(model, Coupling::optimal_entropy(), grid, u0, t_end, {}, opts);
    const Trajectory a = nc.get();
    ModeDiscrepancy r;
    r.l1_gap = l1(grid, a.snapshots.back().u, oe.snapshots.back().u);
    r.nonclassical_flux = a.mean_interface_flux();
    r.entropy_flux = oe.mean_interface_flux();
    r.flux_gap = r.entropy_flux - r.nonclassical_flux;
    r.floor = floor.value_or(10.0 * grid.dx);
    r.pass = r.l1_gap > r.floor;
    return r;
}

}  // namespace trapflow
