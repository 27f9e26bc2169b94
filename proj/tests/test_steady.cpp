#include "oracles.hpp"

#include "trapflow/capillary.hpp"
#include "trapflow/errors.hpp"
#include "trapflow/steady.hpp"

#include <doctest.h>

#include <cmath>

using namespace trapflow;

namespace {

const FluxModel& tf1() {
    static const FluxModel m = FluxModel::tf1();
    return m;
}

double inv_phi1(double y) { return oracle::bisect([=](double u) { return oracle::phi1(u) - y; }, 0.0, 1.0); }
double inv_phi2(double y) { return oracle::bisect([=](double u) { return oracle::phi2(u) - y; }, 0.0, 1.0); }

// Largest |p'(x) - rhs(p(x))| over n points of [a, b], central differences.
template <class P, class R>
double fd_residual(const P& p, const R& rhs, double a, double b, int n = 100) {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = a + (b - a) * (k + 0.5) / n;
        const double h = 1e-5 * std::max(1.0, std::abs(b - a));
        const double d = (p(x + h) - p(x - h)) / (2 * h);
        worst = std::max(worst, std::abs(d - rhs(p(x))));
    }
    return worst;
}

// L1 distance on [a, b] by the midpoint rule.
template <class F, class G>
double l1(const F& f, const G& g, double a, double b, int n = 200000) {
    double s = 0.0;
    const double h = (b - a) / n;
    for (int k = 0; k < n; ++k) {
        const double x = a + (k + 0.5) * h;
        s += std::abs(f(x) - g(x));
    }
    return s * h;
}

}  // namespace

TEST_SUITE("steady") {

TEST_CASE("y profile") {
    const double eta = 0.5;
    const SteadyProfile y = build_y_eta(tf1(), eta);
    CHECK(y.kind() == SteadyKind::y_eta);
    CHECK(y.in_potential());
    for (double x : {-0.5, -0.3, -1e-9}) CHECK(y(x) == oracle::phi1(1.0));
    CHECK(y.residual() <= 1e-6);
    const auto rhs = [](double v) { return oracle::f1(inv_phi1(v)) - 0.25; };
    CHECK(fd_residual(y, rhs, y.x_lo() + 0.01, -eta - 0.01) <= 1e-6);
    double prev = oracle::phi1(1.0);
    for (double d : {1.0, 2.0, 4.0, 8.0}) {
        const double v = y(-eta - d);
        CHECK(v < prev);
        CHECK(v > oracle::phi1(0.25));
        prev = v;
    }
    CHECK(std::abs(y(-eta - 60.0) - oracle::phi1(0.25)) <= 1e-8);
    for (Eigen::Index k = 1; k < y.values().size(); ++k) CHECK(y.values()[k] >= y.values()[k - 1]);
}

TEST_CASE("y profile requires the Hoelder condition") {
    const double q = 0.25;
    RockCurves steep{[q](double u) {
                         const double w = 1 - u;
                         return 1 - w * w * w * w + (u * w * w * w - u * w) / q;
                     },
                     [](double u) { return u * (1 - u); },
                     {}};
    RockCurves r{[](double u) { return u; }, [](double u) { return 2 * u * (1 - u); }, {}};
    const FluxModel bad(q, 1.0, 0.0, 1.0, steep, r);
    CHECK_THROWS_AS(build_y_eta(bad, 0.5), AssumptionError);
}

TEST_CASE("z profile") {
    const double eta = 0.5;
    const SteadyProfile z = build_z_eta(tf1(), eta);
    CHECK(std::abs(z(eta) - oracle::phi2((1 + 0.125) / 2)) <= 1e-12);
    CHECK(z.residual() <= 1e-6);
    const auto rhs = [](double v) { return oracle::f2(inv_phi2(v)) - 0.25; };
    CHECK(fd_residual(z, rhs, z.x_lo() + 0.01, z.x_hi() - 0.01) <= 1e-6);
    for (Eigen::Index k = 1; k < z.values().size(); ++k) CHECK(z.values()[k] >= z.values()[k - 1]);
    CHECK(std::abs(z(-50.0) - oracle::phi2(0.125)) <= 1e-8);
    CHECK(std::abs(z(50.0) - oracle::phi2(1.0)) <= 1e-8);
}

TEST_CASE("sub- and super-solutions") {
    const double eta = 0.3, eps = 0.1;
    const auto [lo, up] = build_sub_super(tf1(), eta, eps);
    CHECK(lo.kind() == SteadyKind::s_lower);
    CHECK(up.kind() == SteadyKind::s_upper);
    for (double x : {1e-9, 0.5, 3.0}) CHECK(lo(x) == find_u_star(tf1(), Side::right));
    for (double x : {-3.0, -0.5, -1e-9}) CHECK(up(x) == 1.0);
    for (int k = 0; k <= 600; ++k) {
        const double x = -3.0 + k * 0.01;
        CHECK(lo(x) <= up(x));
    }
    CHECK(lo.residual() <= 1e-6);
    CHECK(up.residual() <= 1e-6);
    // f_i(s) - eps d/dx phi_i(s) = q
    const auto phi_lo = [&](double x) { return oracle::phi1(lo(x)); };
    const auto phi_up = [&](double x) { return oracle::phi2(up(x)); };
    CHECK(fd_residual(phi_lo, [&](double v) { return (oracle::f1(inv_phi1(v)) - 0.25) / eps; }, lo.x_lo() + 1e-3, -eta - 1e-3) * eps <= 1e-6);
    CHECK(fd_residual(phi_up, [&](double v) { return (oracle::f2(inv_phi2(v)) - 0.25) / eps; }, 1e-3, up.x_hi() - 1e-3) * eps <= 1e-6);
}

TEST_CASE("monotone dependence on eps and eta") {
    // lower: nondecreasing in eps and in eta.
    // upper: nonincreasing in eta; in eps nondecreasing on (0, eta) and
    // nonincreasing beyond eta.
    const double vals[] = {0.05, 0.1, 0.2};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double eps = vals[i], eta = vals[j];
            const auto [lo, up] = build_sub_super(tf1(), eta, eps);
            for (int k = 0; k < 100; ++k) {
                const double x = -1.5 + 3.0 * (k + 0.5) / 100;
                if (i + 1 < 3) {
                    const auto [lo2, up2] = build_sub_super(tf1(), eta, vals[i + 1]);
                    CHECK(lo2(x) >= lo(x) - 1e-12);
                    if (x > 0 && x < eta) CHECK(up2(x) >= up(x) - 1e-12);
                    if (x > eta) CHECK(up2(x) <= up(x) + 1e-12);
                }
                if (j + 1 < 3) {
                    const auto [lo3, up3] = build_sub_super(tf1(), vals[j + 1], eps);
                    CHECK(lo3(x) >= lo(x) - 1e-12);
                    CHECK(up3(x) <= up(x) + 1e-12);
                }
            }
        }
}

TEST_CASE("vanishing eps limits of the sub- and super-solutions") {
    const double eta = 0.3;
    const auto step_lo = [&](double x) { return x < -eta ? 0.25 : (x < 0 ? 1.0 : 0.125); };
    const auto step_up = [&](double x) { return x < eta ? (x < 0 ? 1.0 : 0.125) : 1.0; };
    std::vector<double> dlo, dup;
    for (double eps : {0.08, 0.04, 0.02}) {
        const auto [lo, up] = build_sub_super(tf1(), eta, eps);
        dlo.push_back(l1(lo, step_lo, -3, 3));
        dup.push_back(l1(up, step_up, -3, 3));
    }
    for (int k = 0; k < 2; ++k) {
        CHECK(dlo[k + 1] / dlo[k] == doctest::Approx(0.5).epsilon(0.2));
        CHECK(dup[k + 1] / dup[k] == doctest::Approx(0.5).epsilon(0.2));
    }
}

TEST_CASE("kappa profiles") {
    SUBCASE("limits") {
        const SteadyProfile kq = build_kappa_lambda(tf1(), 0.25);
        CHECK(kq(-1.0) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(kq(1.0) == doctest::Approx(0.125).epsilon(1e-12));
        const SteadyProfile k0 = build_kappa_lambda(tf1(), 0.0);
        CHECK(k0(-1.0) == 0.0);
        CHECK(k0(1.0) == 0.0);
        const SteadyProfile kb = build_kappa_lambda(tf1(), 0.115);
        CHECK(std::abs(kb(-0.5) - 0.1) <= 1e-10);
        CHECK(std::abs(kb(0.5) - oracle::case_b_u2()) <= 1e-10);
        CHECK_THROWS_AS(build_kappa_lambda(tf1(), 0.3), DomainError);
        CHECK_THROWS_AS(build_kappa_lambda(tf1(), -0.01), DomainError);
    }
    SUBCASE("eps variant") {
        const double eps = 0.05, lambda = 0.2;
        const SteadyProfile k = build_kappa_lambda(tf1(), lambda, eps);
        CHECK(k.residual() <= 1e-6);
        const double k1 = oracle::bisect([&](double u) { return oracle::f1(u) - lambda; }, 0.0, 0.25);
        const double k2 = oracle::bisect([&](double u) { return oracle::f2(u) - lambda; }, 0.0, 0.125);
        // g1 vanishes linearly at 1, so 1 - k(-d) ~ sqrt(2 (q - lambda) d / (eps K1)).
        for (double d : {1e-12, 1e-10}) {
            const double gap = std::sqrt(2.0 * (0.25 - lambda) * d / eps);
            CHECK(std::abs((1.0 - k(-d)) / gap - 1.0) <= 1e-3);
        }
        CHECK(std::abs(k(0.3) - k2) <= 1e-12);
        CHECK(std::abs(k(-5.0) - k1) <= 1e-8);
        const auto phi = [&](double x) { return oracle::phi1(k(x)); };
        CHECK(fd_residual(phi, [&](double v) { return (oracle::f1(inv_phi1(v)) - lambda) / eps; }, k.x_lo() + 1e-3, -1e-3) * eps <= 1e-6);
        for (Eigen::Index j = 1; j < k.values().size(); ++j)
            if (k.x()[j] < 0) CHECK(k.values()[j] >= k.values()[j - 1]);
    }
}

TEST_CASE("prepared data") {
    const Grid1D g = Grid1D::symmetric(2.0, 200);
    const double eps = 0.05, eta = 0.1;
    const auto [lo, up] = build_sub_super(tf1(), eta, eps);
    SUBCASE("constant large data") {
        const PreparedData pd = prepare_initial_data(tf1(), g, [](double) { return 0.5; }, eta, eps);
        CHECK_FALSE(pd.regime_warning);
        CHECK(pd.mollifier_n >= 1);
        for (int j = 0; j < g.size(); ++j) {
            const double x = g.center(j);
            CHECK(pd.u[j] >= lo(x) - 1e-14);
            CHECK(pd.u[j] <= up(x) + 1e-14);
            if (x > -eta && x < 0) CHECK(pd.u[j] == 1.0);
        }
    }
    SUBCASE("smooth data between the bounds is nearly untouched") {
        const auto u0 = [](double x) { return x < 0 ? 0.3 + 0.1 * std::exp(-x * x) : 0.6 + 0.1 * std::sin(x); };
        const PreparedData pd = prepare_initial_data(tf1(), g, u0, eta, eps);
        double err = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            const double x = g.center(j);
            if (std::abs(x) > 0.5 && std::abs(x) < 1.5) err = std::max(err, std::abs(pd.u[j] - u0(x)));
        }
        CHECK(err <= 1.0 / pd.mollifier_n);
    }
    SUBCASE("small data raises the regime warning") {
        const PreparedData pd = prepare_initial_data(tf1(), g, [](double) { return 0.1; }, eta, eps);
        CHECK(pd.regime_warning);
    }
    SUBCASE("mollifier index") {
        const auto u0 = [](double x) { return x < 0 ? 0.4 : 0.9; };
        const PreparedData pd = prepare_initial_data(tf1(), g, u0, eta, eps);
        CHECK(pd.mollifier_n >= 1);
        CHECK(pd.mollifier_n <= static_cast<int>(std::ceil(1.0 / eps)));
    }
}

TEST_CASE("prepared data converge to u0 as eps and eta vanish") {
    const Grid1D g = Grid1D::symmetric(2.0, 1600);
    const auto u0 = [](double x) { return x < 0 ? 0.5 + 0.2 * std::cos(x) : 0.6 + 0.2 * std::sin(x); };
    const Eigen::VectorXd ref = sample(g, u0);
    std::vector<double> d;
    for (double e : {0.08, 0.04, 0.02}) {
        const PreparedData pd = prepare_initial_data(tf1(), g, u0, e, e);
        // local L1 on [-1, 1]
        double s = 0.0;
        for (int j = 0; j < g.size(); ++j)
            if (std::abs(g.center(j)) < 1.0) s += std::abs(pd.u[j] - ref[j]) * g.dx;
        d.push_back(s);
    }
    CHECK(d[1] / d[0] == doctest::Approx(0.5).epsilon(0.3));
    CHECK(d[2] / d[1] == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("sampled lower profile carries flux q through the interface") {
    const double eta = 0.2, eps = 0.05;
    const auto [lo, up] = build_sub_super(tf1(), eta, eps);
    const EpsProblem p(tf1(), eps);
    std::vector<double> gap;
    for (int n : {100, 200, 400}) {
        const Grid1D g = Grid1D::symmetric(1.0, n);
        const InterfaceState s = interface_solve(p, lo(g.center(g.n_left - 1)), lo(g.center(g.n_left)), g.dx);
        gap.push_back(std::abs(s.flux - 0.25));
        CHECK(gap.back() <= 10 * g.dx);
    }
}

}  // TEST_SUITE
