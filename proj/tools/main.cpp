#include "trapflow/capillary.hpp"
#include "trapflow/config.hpp"
#include "trapflow/diagnostics.hpp"
#include "trapflow/errors.hpp"
#include "trapflow/hyperbolic.hpp"
#include "trapflow/io.hpp"
#include "trapflow/riemann.hpp"
#include "trapflow/steady.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

using namespace trapflow;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kVerdictFail = 1, kUsage = 2, kNumerical = 3 };

struct Globals {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool force = false;
};

struct RunFlags {
    std::optional<double> t_end;
    std::string snapshots;
    std::optional<double> eps;
    std::optional<double> eta;
    std::string mode;
    std::string interface_mode;
};

RunConfig load(const Globals& g, const RunFlags* f = nullptr) {
    RunConfig cfg = g.config.empty() ? parse_config("{}") : load_config(g.config);
    if (!g.out.empty()) cfg.output = g.out;
    if (g.seed_set) cfg.seed = g.seed;
    if (!f) return cfg;
    if (f->t_end) cfg.t_end = *f->t_end;
    if (!f->snapshots.empty()) {
        cfg.snapshots.clear();
        std::stringstream ss(f->snapshots);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                cfg.snapshots.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("--snapshots: malformed time '" + item + "'");
            }
        }
    }
    if (f->eps) cfg.eps = f->eps;
    if (f->eta) cfg.eta = f->eta;
    if (!f->mode.empty()) cfg.mode = Coupling::parse(f->mode);
    if (!f->interface_mode.empty()) cfg.interface = InterfaceMode::parse(f->interface_mode);
    // Re-validate the merged configuration.
    return parse_config(serialize_config(cfg));
}

void add_run_flags(CLI::App* app, RunFlags& f, bool capillary) {
    app->add_option("--t-end", f.t_end, "final time");
    app->add_option("--snapshots", f.snapshots, "comma-separated snapshot times");
    app->add_option("--mode", f.mode, "nonclassical | entropy | flux:<lambda>");
    if (capillary) {
        app->add_option("--eps", f.eps, "capillarity strength");
        app->add_option("--eta", f.eta, "plateau width for prepared data");
        app->add_option("--interface-mode", f.interface_mode, "graph | flux:<lambda>");
    }
}

json series(const std::vector<double>& v) { return json(v); }

json summary_base(const RunConfig& cfg, const Grid1D& grid, const Trajectory& tr) {
    json s;
    s["config"] = to_json(cfg);
    std::vector<double> t, mass, left_mass, right_mass;
    for (const auto& snap : tr.snapshots) {
        t.push_back(snap.time);
        mass.push_back(total_mass(grid, snap.u));
        left_mass.push_back(snap.u.head(grid.n_left).sum() * grid.dx);
        right_mass.push_back(snap.u.tail(grid.n_right).sum() * grid.dx);
    }
    s["snapshot_times"] = series(t);
    s["mass"] = series(mass);
    s["mass_left"] = series(left_mass);
    s["mass_right"] = series(right_mass);
    std::vector<double> st, fi, fl, fr;
    for (const auto& r : tr.steps) {
        st.push_back(r.time);
        fi.push_back(r.interface_flux);
        fl.push_back(r.left_boundary_flux);
        fr.push_back(r.right_boundary_flux);
    }
    s["step_times"] = series(st);
    s["interface_flux"] = series(fi);
    s["left_boundary_flux"] = series(fl);
    s["right_boundary_flux"] = series(fr);
    s["mean_interface_flux"] = tr.mean_interface_flux();
    return s;
}

std::string out_dir(const RunConfig& cfg) { return cfg.output; }

void print_manifest(const std::string& dir, const Manifest& m) {
    std::cout << "wrote " << m.files.size() << " files to " << dir << "\n";
}

int cmd_validate(const Globals& g, const std::string& h2_side) {
    const RunConfig cfg = load(g);
    const FluxModel model = cfg.model.build();
    const H1Report h1 = validate_h1(model);
    json j;
    j["h1"] = {{"pass", h1.pass}, {"message", h1.message}};
    if (h1.u_star[0]) j["h1"]["u_star_left"] = *h1.u_star[0];
    if (h1.u_star[1]) j["h1"]["u_star_right"] = *h1.u_star[1];
    bool pass = h1.pass;
    std::vector<Side> sides;
    if (h2_side == "left" || h2_side == "both") sides.push_back(Side::left);
    if (h2_side == "right" || h2_side == "both") sides.push_back(Side::right);
    if (sides.empty()) throw ConfigError("--h2-side must be left, right or both");
    if (h1.pass) {
        for (Side s : sides) {
            const H2Report h2 = validate_h2(model, s);
            j[std::string("h2_") + name(s)] = {{"pass", h2.pass}, {"m", h2.m},           {"R", h2.R},
                                               {"alpha", h2.alpha}, {"fit_residual", h2.fit_residual},
                                               {"message", h2.message}};
            pass = pass && h2.pass;
        }
    }
    j["pass"] = pass;
    std::cout << j.dump(2) << "\n";
    return pass ? kPass : kVerdictFail;
}

json traces_json(const RiemannTraces& t) {
    return {{"case", to_string(t.case_label)},
            {"u1", t.u1},
            {"u2", t.u2},
            {"interface_flux", t.interface_flux},
            {"classification", to_string(t.classification)}};
}

int cmd_riemann(const Globals& g, double ul, double ur, const std::string& mode) {
    const RunConfig cfg = load(g);
    const FluxModel model = cfg.model.build();
    const Coupling c = mode.empty() ? cfg.mode : Coupling::parse(mode);
    json j = traces_json(solve_riemann(model, c, ul, ur));
    j["ul"] = ul;
    j["ur"] = ur;
    j["mode"] = c.to_string();
    std::cout << j.dump() << "\n";
    return kPass;
}

int cmd_riemann_table(const Globals& g) {
    const RunConfig cfg = load(g);
    const FluxModel model = cfg.model.build();
    const double s1 = model.u_star(Side::left);
    const double s2 = model.u_star(Side::right);
    const std::vector<double> left{0.0, 0.5 * s1, s1, 0.5 * (s1 + 1.0), 1.0};
    const std::vector<double> right{0.0, 0.5 * s2, s2, 0.5 * (s2 + 1.0), 1.0};
    std::ostringstream csv;
    csv.precision(17);
    csv << "ul,ur,case,u1,u2,interface_flux,classification\n";
    for (double ul : left)
        for (double ur : right) {
            const RiemannTraces t = solve_riemann(model, Coupling::non_classical(), ul, ur);
            csv << ul << ',' << ur << ',' << to_string(t.case_label) << ',' << t.u1 << ',' << t.u2 << ','
                << t.interface_flux << ',' << to_string(t.classification) << '\n';
        }
    std::cout << csv.str();
    if (!g.out.empty()) {
        RunArtifacts a;
        a.summary["config"] = to_json(cfg);
        a.extra["riemann_table.csv"] = csv.str();
        print_manifest(g.out, write_outputs(g.out, a, g.force));
    }
    return kPass;
}

int cmd_simulate(const Globals& g, const RunFlags& f) {
    const RunConfig cfg = load(g, &f);
    const FluxModel model = cfg.model.build();
    const Grid1D grid = cfg.grid.build();
    const Eigen::VectorXd u0 = cell_averages(grid, cfg.initial.function());
    HyperbolicOptions opts;
    opts.cfl = cfg.cfl;
    opts.bc = cfg.bc;
    const std::vector<double> kappas{0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
    EntropyAuditor auditor(model, grid, kappas);
    const Trajectory tr = run_hyperbolic(model, cfg.mode, grid, u0, cfg.t_end, cfg.snapshots, opts,
                                         [&](const CellField& a, const CellField& b, const StepRecord& r) {
                                             auditor.observe(a, b, r.dt);
                                         });
    json s = summary_base(cfg, grid, tr);
    const auto& au = auditor.result();
    s["entropy_audit"] = {{"kappas", kappas},
                          {"interior_min", au.interior_min},
                          {"interface_min_raw", au.interface_min_raw},
                          {"interface_min_with_interface_term", au.interface_min_with_interface_term}};
    const double reach = boundary_reach_time(model, grid, u0);
    if (reach < cfg.t_end) {
        s["warnings"].push_back("waves may reach the outer boundary before t_end");
        std::cerr << "warning: waves may reach the outer boundary at t = " << reach << "\n";
    }
    RunArtifacts a{grid, tr.snapshots, s, {}};
    print_manifest(out_dir(cfg), write_outputs(out_dir(cfg), a, g.force));
    return kPass;
}

int cmd_capillary(const Globals& g, const RunFlags& f, bool prepare) {
    const RunConfig cfg = load(g, &f);
    if (!cfg.eps) throw ConfigError("capillary runs need eps (config key or --eps)");
    const FluxModel model = cfg.model.build();
    const Grid1D grid = cfg.grid.build();
    const EpsProblem problem(model, *cfg.eps, cfg.interface);
    const auto u0f = cfg.initial.function();
    Eigen::VectorXd u0 = cell_averages(grid, u0f);
    json prep;
    if (prepare) {
        const PreparedData pd = prepare_initial_data(model, grid, u0f, cfg.eta.value_or(*cfg.eps), *cfg.eps);
        u0 = pd.u;
        prep = {{"mollifier_n", pd.mollifier_n}, {"regime_warning", pd.regime_warning}};
        if (pd.regime_warning) std::cerr << "warning: initial data lies below u_i* somewhere\n";
    }
    ParabolicOptions opts;
    opts.cfl = cfg.cfl;
    opts.c_dt = cfg.c_dt;
    opts.bc = cfg.bc;
    EnergyAccumulator energy(problem, grid);
    int ties = 0;
    int max_newton = 0;
    const Trajectory tr = run_parabolic(problem, grid, u0, cfg.t_end, cfg.snapshots, opts,
                                        [&](const CellField&, const CellField& b, const StepRecord& r) {
                                            energy.observe(b, r.dt);
                                            ties += r.branch_tie ? 1 : 0;
                                            max_newton = std::max(max_newton, r.newton_iterations);
                                        });
    json s = summary_base(cfg, grid, tr);
    s["energy"] = {{"left", energy.result()[0]}, {"right", energy.result()[1]}};
    s["branch_ties"] = ties;
    s["max_newton_iterations"] = max_newton;
    if (prepare) s["prepared"] = prep;
    RunArtifacts a{grid, tr.snapshots, s, {}};
    print_manifest(out_dir(cfg), write_outputs(out_dir(cfg), a, g.force));
    return kPass;
}

int cmd_steady(const Globals& g, const std::string& kind, double eta, std::optional<double> eps,
               double lambda) {
    const RunConfig cfg = load(g);
    const FluxModel model = cfg.model.build();
    SteadyProfile p = [&] {
        if (kind == "y") return build_y_eta(model, eta);
        if (kind == "z") return build_z_eta(model, eta);
        if (kind == "sub" || kind == "super") {
            if (!eps) throw ConfigError("--eps is required for sub/super profiles");
            auto pr = build_sub_super(model, eta, *eps);
            return kind == "sub" ? pr.first : pr.second;
        }
        if (kind == "kappa") return build_kappa_lambda(model, lambda, eps);
        throw ConfigError("--kind must be y, z, sub, super or kappa");
    }();
    std::ostringstream csv;
    csv << "x,value\n";
    char buf[96];
    for (Eigen::Index k = 0; k < p.x().size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17e,%.17e\n", p.x()[k], p.values()[k]);
        csv << buf;
    }
    const bool pass = p.residual() <= 1e-6;
    json report = {{"kind", to_string(p.kind())}, {"residual", p.residual()}, {"pass", pass},
                   {"potential_units", p.in_potential()}};
    if (kind != "kappa") report["eta"] = eta;
    if (eps) report["eps"] = *eps;
    if (kind == "kappa") report["lambda"] = lambda;
    if (g.out.empty()) {
        std::cout << csv.str();
        std::cerr << report.dump() << "\n";
    } else {
        RunArtifacts a;
        a.summary = report;
        a.summary["config"] = to_json(cfg);
        a.extra["profile.csv"] = csv.str();
        print_manifest(g.out, write_outputs(g.out, a, g.force));
        std::cout << report.dump() << "\n";
    }
    return pass ? kPass : kVerdictFail;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("malformed number '" + item + "'");
        }
    }
    return v;
}

int cmd_converge(const Globals& g, const RunFlags& f, const std::string& eps_list, bool raw) {
    const RunConfig cfg = load(g, &f);
    const FluxModel model = cfg.model.build();
    const Grid1D grid = cfg.grid.build();
    VanishingOptions opts;
    opts.prepare = !raw;
    opts.parabolic.cfl = opts.hyperbolic.cfl = cfg.cfl;
    opts.parabolic.c_dt = cfg.c_dt;
    opts.parabolic.bc = opts.hyperbolic.bc = cfg.bc;
    const VanishingStudy st =
        vanishing_viscosity_study(model, cfg.initial.function(), parse_list(eps_list), grid, cfg.t_end, opts);
    std::ostringstream csv;
    csv.precision(17);
    csv << "eps,distance,energy_left,energy_right\n";
    for (const auto& r : st.rows)
        csv << r.eps << ',' << r.distance << ',' << r.energy[0] << ',' << r.energy[1] << '\n';
    json s;
    s["config"] = to_json(cfg);
    s["regime"] = to_string(st.regime);
    s["reference"] = st.reference.to_string();
    s["pass"] = st.pass;
    RunArtifacts a;
    a.grid = grid;
    a.summary = s;
    a.extra["convergence.csv"] = csv.str();
    print_manifest(out_dir(cfg), write_outputs(out_dir(cfg), a, g.force));
    std::cout << csv.str();
    return st.pass ? kPass : kVerdictFail;
}

int cmd_contract(const Globals& g, const RunFlags& f, int pairs) {
    const RunConfig cfg = load(g, &f);
    const FluxModel model = cfg.model.build();
    const Grid1D grid = cfg.grid.build();
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> times;
    for (int k = 1; k < 10; ++k) times.push_back(cfg.t_end * k / 10.0);
    bool pass = true;
    json results = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "pair,time,distance\n";
    for (int p = 0; p < pairs; ++p) {
        const auto [a, b] = random_profile_pair(grid, rng);
        Trajectory ta, tb;
        if (cfg.eps) {
            const EpsProblem problem(model, *cfg.eps, cfg.interface);
            ParabolicOptions o;
            o.cfl = cfg.cfl;
            o.c_dt = cfg.c_dt;
            o.bc = cfg.bc;
            ta = run_parabolic(problem, grid, a, cfg.t_end, times, o);
            tb = run_parabolic(problem, grid, b, cfg.t_end, times, o);
        } else {
            HyperbolicOptions o;
            o.cfl = cfg.cfl;
            o.bc = cfg.bc;
            ta = run_hyperbolic(model, cfg.mode, grid, a, cfg.t_end, times, o);
            tb = run_hyperbolic(model, cfg.mode, grid, b, cfg.t_end, times, o);
        }
        const ContractionReport r = l1_contraction_test(grid, ta, tb);
        for (std::size_t k = 0; k < r.times.size(); ++k) csv << p << ',' << r.times[k] << ',' << r.distance[k] << '\n';
        results.push_back({{"pair", p}, {"pass", r.pass}});
        pass = pass && r.pass;
    }
    json s;
    s["config"] = to_json(cfg);
    s["seed"] = cfg.seed;
    s["pairs"] = results;
    s["pass"] = pass;
    RunArtifacts art;
    art.grid = grid;
    art.summary = s;
    art.extra["contraction.csv"] = csv.str();
    print_manifest(out_dir(cfg), write_outputs(out_dir(cfg), art, g.force));
    std::cout << (pass ? "pass" : "fail") << "\n";
    return pass ? kPass : kVerdictFail;
}

int cmd_discrepancy(const Globals& g, const RunFlags& f, std::optional<double> floor) {
    const RunConfig cfg = load(g, &f);
    const FluxModel model = cfg.model.build();
    const Grid1D grid = cfg.grid.build();
    HyperbolicOptions o;
    o.cfl = cfg.cfl;
    o.bc = cfg.bc;
    const ModeDiscrepancy d =
        mode_discrepancy_report(model, grid, cell_averages(grid, cfg.initial.function()), cfg.t_end, floor, o);
    json s = {{"config", to_json(cfg)},
              {"l1_gap", d.l1_gap},
              {"nonclassical_flux", d.nonclassical_flux},
              {"entropy_flux", d.entropy_flux},
              {"flux_gap", d.flux_gap},
              {"floor", d.floor},
              {"pass", d.pass}};
    RunArtifacts art;
    art.grid = grid;
    art.summary = s;
    print_manifest(out_dir(cfg), write_outputs(out_dir(cfg), art, g.force));
    std::cout << s.dump() << "\n";
    return d.pass ? kPass : kVerdictFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-rock discontinuous-flux conservation law laboratory"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON run configuration");
    app.add_option("--out", g.out, "output directory");
    auto* seed_opt = app.add_option("--seed", g.seed, "random seed");
    app.add_flag("--force", g.force, "overwrite a non-empty output directory");
    app.set_version_flag("--version", TRAPFLOW_VERSION);

    std::string h2_side = "left";
    auto* validate = app.add_subcommand("validate", "check the structural assumptions on the model");
    validate->add_option("--h2-side", h2_side, "left | right | both");

    double ul = 0.5, ur = 0.5;
    std::string rmode;
    auto* riemann = app.add_subcommand("riemann", "interface Riemann traces as JSON");
    riemann->add_option("--ul", ul)->required();
    riemann->add_option("--ur", ur)->required();
    riemann->add_option("--mode", rmode, "nonclassical | entropy");

    auto* table = app.add_subcommand("riemann-table", "case table as CSV");

    RunFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "hyperbolic finite-volume run");
    add_run_flags(simulate, sim_flags, false);

    RunFlags cap_flags;
    bool raw = false;
    auto* capillary = app.add_subcommand("capillary", "capillarity-regularised run");
    add_run_flags(capillary, cap_flags, true);
    capillary->add_flag("--raw", raw, "start from u0 instead of prepared data");

    std::string kind = "y";
    double eta = 0.5, lambda = 0.0;
    std::optional<double> seps;
    auto* steady = app.add_subcommand("steady", "steady profiles");
    steady->add_option("--kind", kind, "y | z | sub | super | kappa");
    steady->add_option("--eta", eta);
    steady->add_option("--eps", seps);
    steady->add_option("--lambda", lambda);

    RunFlags conv_flags;
    std::string eps_list = "0.1,0.05,0.025";
    bool conv_raw = false;
    auto* converge = app.add_subcommand("converge", "vanishing capillarity study");
    add_run_flags(converge, conv_flags, false);
    converge->add_option("--eps-list", eps_list, "decreasing comma-separated eps values");
    converge->add_flag("--raw", conv_raw, "start the capillary runs from u0 instead of prepared data");

    RunFlags con_flags;
    int pairs = 20;
    auto* contract = app.add_subcommand("contract", "L1 contraction on random pairs");
    add_run_flags(contract, con_flags, true);
    contract->add_option("--pairs", pairs);

    RunFlags dis_flags;
    std::optional<double> floor;
    auto* discrepancy = app.add_subcommand("discrepancy", "non-classical vs entropy coupling gap");
    add_run_flags(discrepancy, dis_flags, false);
    discrepancy->add_option("--floor", floor);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (*validate) return cmd_validate(g, h2_side);
        if (*riemann) return cmd_riemann(g, ul, ur, rmode);
        if (*table) return cmd_riemann_table(g);
        if (*simulate) return cmd_simulate(g, sim_flags);
        if (*capillary) return cmd_capillary(g, cap_flags, !raw);
        if (*steady) return cmd_steady(g, kind, eta, seps, lambda);
        if (*converge) return cmd_converge(g, conv_flags, eps_list, conv_raw);
        if (*contract) return cmd_contract(g, con_flags, pairs);
        if (*discrepancy) return cmd_discrepancy(g, dis_flags, floor);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnsupportedRegime& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const AssumptionError& e) {
        std::cerr << "assumption violated: " << e.what() << "\n";
        return kVerdictFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}
