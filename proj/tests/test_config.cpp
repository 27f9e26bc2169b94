#include "trapflow/config.hpp"
#include "trapflow/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

using namespace trapflow;

namespace {

std::string error_of(const std::string& text, const std::string& base = ".") {
    try {
        parse_config(text, base);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal preset config fills defaults") {
    const RunConfig c = parse_config(R"({"model": {"preset": "TF1"}})");
    CHECK(c.model.preset == "TF1");
    CHECK(c.grid.x_min == -2.0);
    CHECK(c.grid.x_max == 2.0);
    CHECK(c.grid.n_left == 400);
    CHECK(c.grid.n_right == 400);
    CHECK(c.cfl == 0.49);
    CHECK(c.mode == Coupling::non_classical());
    CHECK_FALSE(c.eps.has_value());
    const FluxModel m = c.model.build();
    CHECK(m.q() == 0.25);
    CHECK(m.u_star(Side::right) == doctest::Approx(0.125));
}

TEST_CASE("eps above the plateau gap") {
    const std::string e = error_of(R"({"model": {"preset": "TF1", "P1": 0.0, "P2": 0.5}, "eps": 1.0})");
    CHECK(contains(e, "eps must be < P2−P1"));
}

TEST_CASE("every violated constraint is listed") {
    const std::string e = error_of(R"({"eps": -1, "cfl": 2, "t_end": -1, "bogus": 1,
        "grid": {"x_min": -2, "x_max": 2, "n_left": 400, "n_right": 300},
        "initial": {"type": "riemann", "ul": 1.5}})");
    for (const char* msg : {"eps must be > 0", "cfl must lie in (0, 1]", "t_end must be >= 0", "bogus: unknown key",
                            "grid:", "Riemann states must lie in [0, 1]"})
        CHECK_MESSAGE(contains(e, msg), msg);
}

TEST_CASE("syntax errors carry line and column") {
    const std::string e = error_of("{\n  \"eps\": 0.1,\n  \"cfl\": ,\n}");
    CHECK(contains(e, "line 3"));
    CHECK(contains(e, "column"));
    CHECK(contains(error_of("[1, 2]"), "JSON object"));
    CHECK(contains(error_of(R"({"cfl": "fast"})"), "cfl: wrong type"));
}

TEST_CASE("round trip") {
    RunConfig c;
    c.model.preset = "";
    c.model.q = 0.3;
    c.model.family.alpha = {2.0, 3.0};
    c.model.family.K = {1.5, 2.5};
    c.grid = {-1.0, 3.0, 100, 300};
    c.mode = Coupling::prescribed(0.1);
    c.interface = InterfaceMode::prescribed(0.2);
    c.eps = 0.05;
    c.eta = 0.07;
    c.cfl = 0.4;
    c.bc.left = BoundaryCondition::dirichlet(0.3);
    c.bc.right = BoundaryCondition::zero_flux();
    c.initial.kind = InitialSpec::Kind::table;
    c.initial.xs = {-1.0, 0.0, 1.0};
    c.initial.us = {0.2, 0.4, 0.9};
    c.t_end = 0.75;
    c.snapshots = {0.1, 0.3};
    c.output = "runs/a";
    c.seed = 1234567890123ULL;
    const RunConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    const RunConfig d = parse_config("{}");
    CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("initial data specs") {
    const RunConfig c = parse_config(R"({"initial": {"type": "indicator", "a": -1, "b": 0, "value": 0.8}})");
    const auto f = c.initial.function();
    CHECK(f(-0.5) == 0.8);
    CHECK(f(0.5) == 0.0);
    CHECK(f(-1.5) == 0.0);
    const RunConfig r = parse_config(R"({"initial": {"type": "riemann", "ul": 0.1, "ur": 0.05}})");
    CHECK(r.initial.function()(-1.0) == 0.1);
    CHECK(r.initial.function()(1.0) == 0.05);
    const RunConfig k = parse_config(R"({"initial": {"type": "constant", "value": 0.3}})");
    CHECK(k.initial.function()(0.7) == 0.3);
}

TEST_CASE("tabulated initial data from CSV") {
    const auto dir = std::filesystem::temp_directory_path() / "trapflow_cfg_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "u0.csv");
        out << "x,u\n-1,0.2\n0,0.6\n1,1.0\n";
    }
    const RunConfig c = parse_config(R"({"initial": {"type": "table", "path": "u0.csv"}})", dir.string());
    const auto f = c.initial.function();
    CHECK(f(-0.5) == doctest::Approx(0.4));
    CHECK(f(0.5) == doctest::Approx(0.8));
    CHECK(f(-5.0) == 0.2);
    CHECK(f(5.0) == 1.0);
    CHECK(contains(error_of(R"({"initial": {"type": "table", "path": "missing.csv"}})", dir.string()), "initial.path"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("boundary condition text") {
    CHECK(parse_boundary("outflow") == BoundaryCondition::outflow());
    CHECK(parse_boundary("zero_flux") == BoundaryCondition::zero_flux());
    CHECK(parse_boundary("dirichlet:0.25") == BoundaryCondition::dirichlet(0.25));
    for (const auto& bc : {BoundaryCondition::outflow(), BoundaryCondition::zero_flux(), BoundaryCondition::dirichlet(0.7)})
        CHECK(parse_boundary(to_string(bc)) == bc);
    CHECK_THROWS_AS(parse_boundary("wall"), ConfigError);
    CHECK(contains(error_of(R"({"boundary": {"left": "dirichlet:2"}})"), "Dirichlet value"));
}

TEST_CASE("family model") {
    const RunConfig c = parse_config(R"({"model": {"q": 0.25, "family": {"alpha": [2, 2], "beta": [2, 2], "a": 1, "b": 1, "K": [4, 4]}}})");
    CHECK(c.model.preset.empty());
    const FluxModel m = c.model.build();
    CHECK(m.flux(Side::left, 0.5) == doctest::Approx(0.25 * 0.5 + 4 * 0.0625 / 0.5));
    CHECK(contains(error_of(R"({"model": {"preset": "XYZ"}})"), "unknown preset"));
}

}  // TEST_SUITE
