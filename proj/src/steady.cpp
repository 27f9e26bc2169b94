#include "trapflow/steady.hpp"

#include "trapflow/errors.hpp"
#include "trapflow/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace trapflow {

const char* to_string(SteadyKind k) {
    switch (k) {
        case SteadyKind::y_eta: return "y";
        case SteadyKind::z_eta: return "z";
        case SteadyKind::s_lower: return "sub";
        case SteadyKind::s_upper: return "super";
        case SteadyKind::kappa_lambda: return "kappa";
    }
    return "?";
}

// Increasing saturation branch u(x) of f(u) - scale d/dx phi(u) = lambda on
// one rock, through the anchor (u_a, x_a). Tabulated through its inverse
//   x(u) = x_a + int_{u_a}^u scale C g(v) / (f(v) - lambda) dv.
struct SteadyProfile::Branch {
    FluxModel model;
    Side side;
    double lambda;
    double scale;
    double u_lo;
    double u_hi;
    // x(u) -> -inf at u_lo (simple root of f - lambda with g > 0 there).
    bool lo_singular = false;
    double tail_d = 0.0;
    double tail_a = 0.0;
    std::vector<double> nu;
    std::vector<double> nx;

    Branch(FluxModel m, Side s, double lam, double sc, double lo, double hi, double ua, double xa)
        : model(std::move(m)), side(s), lambda(lam), scale(sc), u_lo(lo), u_hi(hi) {
        const double r = u_hi - u_lo;
        lo_singular = model.g(side, u_lo) > 0.0;
        std::vector<double> nodes;
        const double d_lo = lo_singular ? 1e-9 * r : 1e-12 * r;
        for (double d = 0.5 * r; d > d_lo; d *= std::pow(10.0, -0.25)) {
            nodes.push_back(u_lo + d);
            nodes.push_back(u_hi - d);
        }
        nodes.push_back(lo_singular ? u_lo + d_lo : u_lo);
        nodes.push_back(u_hi - 1e-12 * r);
        nodes.push_back(u_hi);
        for (int k = 1; k < 64; ++k) nodes.push_back(u_lo + r * k / 64.0);
        nodes.push_back(ua);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        nu = nodes;
        nx.assign(nu.size(), 0.0);
        const auto ia = static_cast<std::size_t>(std::find(nu.begin(), nu.end(), ua) - nu.begin());
        nx[ia] = xa;
        for (std::size_t k = ia + 1; k < nu.size(); ++k) nx[k] = nx[k - 1] + segment(nu[k - 1], nu[k]);
        for (std::size_t k = ia; k-- > 0;) nx[k] = nx[k + 1] - segment(nu[k], nu[k + 1]);
        if (lo_singular) {
            tail_d = nu[0] - u_lo;
            tail_a = h(nu[0]) * tail_d;
        }
        for (std::size_t k = 1; k < nx.size(); ++k)
            if (!(nx[k] >= nx[k - 1]) || !std::isfinite(nx[k]))
                throw AssumptionError("steady profile: inverse relation x(u) is not increasing at u = " + std::to_string(nu[k]));
    }

    double h(double v) const {
        const double den = model.flux(side, v) - lambda;
        // Rounding can cancel f - lambda within ~1e-15 of a root.
        if (!(den > 0.0)) return 0.0;
        return scale * model.C() * model.g(side, v) / den;
    }

    double segment(double a, double b) const {
        // Nodes are geometric toward both ends, so a fixed rule is accurate
        // on every segment and immune to the rounding noise of f - lambda.
        using Quad = boost::math::quadrature::gauss<double, 20>;
        return Quad::integrate([this](double v) { return h(v); }, a, b);
    }

    double x_first() const { return lo_singular ? -std::numeric_limits<double>::infinity() : nx.front(); }
    double x_last() const { return nx.back(); }

    double x_of_u(double u) const {
        if (u >= u_hi) return nx.back();
        if (lo_singular && u < nu.front()) {
            if (u <= u_lo) return -std::numeric_limits<double>::infinity();
            return nx.front() + tail_a * std::log((u - u_lo) / tail_d);
        }
        if (u <= nu.front()) return nx.front();
        const auto it = std::upper_bound(nu.begin(), nu.end(), u);
        const auto k = static_cast<std::size_t>(it - nu.begin()) - 1;
        return nx[k] + segment(nu[k], u);
    }

    double u_of_x(double x) const {
        if (x >= nx.back()) return u_hi;
        if (x < nx.front()) {
            if (!lo_singular) return u_lo;
            return u_lo + tail_d * std::exp((x - nx.front()) / tail_a);
        }
        const auto it = std::upper_bound(nx.begin(), nx.end(), x);
        const auto k = static_cast<std::size_t>(it - nx.begin()) - 1;
        if (x == nx[k]) return nu[k];
        return numerics::bisect([&](double u) { return nx[k] + segment(nu[k], u) - x; },
                                nu[k], nu[k + 1]);
    }

    // Smallest / largest x with the profile 1e-8 away from its limits.
    double layer_lo() const { return lo_singular ? x_of_u(u_lo + 1e-8) : nx.front(); }
    double layer_hi() const {
        const double u = u_hi - 1e-8;
        return std::max(x_of_u(u), nx.front());
    }
};

double SteadyProfile::operator()(double x) const { return value_(x); }
double SteadyProfile::saturation(double x) const { return sat_(x); }

void SteadyProfile::tabulate(double lo, double hi, int n) {
    x_.resize(n);
    values_.resize(n);
    for (int k = 0; k < n; ++k) {
        x_[k] = lo + (hi - lo) * k / (n - 1);
        values_[k] = value_(x_[k]);
    }
}

namespace {

using BranchPtr = std::shared_ptr<const SteadyProfile::Branch>;

void require_eta(double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
}

void require_eps(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

// Largest |f(u) - scale d/dx phi(u) - lambda| at 100 interior points of the
// branch by central differences of the evaluated profile. `map` is dx/dx_b
// for the change of variable x = to_x(x_b).
template <class Sat>
double residual_check(const SteadyProfile::Branch& b, const Sat& sat, double scale, double lambda,
                      double x_scale, double map, double (*to_x)(double, double, double),
                      double p1, double p2) {
    double worst = 0.0;
    const double r = b.u_hi - b.u_lo;
    for (int k = 1; k <= 100; ++k) {
        const double u = b.u_lo + r * (1e-3 + (1.0 - 2e-3) * (k - 0.5) / 100.0);
        const double xb = b.x_of_u(u);
        const double x = to_x(xb, p1, p2);
        // Keep the stencil well inside the local layer: u moves by at most
        // 1e-3 of its distance to the nearest limit.
        const double dist = std::min(u - b.u_lo, b.u_hi - u);
        const double hstep = std::min(1e-4 * x_scale, 1e-3 * dist * b.h(u) * map);
        // Stencils straddling the glue point x = 0 see the other rock.
        if ((x - hstep < 0.0) != (x + hstep < 0.0)) continue;
        const double dphi = (b.model.phi(b.side, sat(x + hstep)) - b.model.phi(b.side, sat(x - hstep))) /
                            (2.0 * hstep);
        const double res = std::abs(b.model.flux(b.side, sat(x)) - scale * dphi - lambda);
        worst = std::max(worst, res);
    }
    return worst;
}

double identity_x(double xb, double, double) { return xb; }

}  // namespace

SteadyProfile build_y_eta(const FluxModel& model, double eta) {
    require_eta(eta);
    const H2Report h2 = validate_h2(model, Side::left);
    if (!h2.pass) throw AssumptionError("build_y_eta: (H2) fails on the left rock: " + h2.message);
    const double us = model.u_star(Side::left);
    auto br = std::make_shared<const SteadyProfile::Branch>(model, Side::left, model.q(), 1.0, us, 1.0,
                                                            1.0, -eta);
    SteadyProfile p;
    p.kind_ = SteadyKind::y_eta;
    p.eta_ = eta;
    p.sat_ = [br](double x) { return br->u_of_x(x); };
    p.value_ = [br](double x) { return br->model.phi(Side::left, br->u_of_x(x)); };
    p.residual_ = residual_check(*br, p.sat_, 1.0, model.q(), 1.0, 1.0, identity_x, 0.0, 0.0);
    p.tabulate(br->layer_lo(), 0.0, 401);
    return p;
}

SteadyProfile build_z_eta(const FluxModel& model, double eta) {
    require_eta(eta);
    const double us = model.u_star(Side::right);
    const double mid = 0.5 * (1.0 + us);
    auto br = std::make_shared<const SteadyProfile::Branch>(model, Side::right, model.q(), 1.0, us, 1.0,
                                                            mid, eta);
    SteadyProfile p;
    p.kind_ = SteadyKind::z_eta;
    p.eta_ = eta;
    p.sat_ = [br](double x) { return br->u_of_x(x); };
    p.value_ = [br](double x) { return br->model.phi(Side::right, br->u_of_x(x)); };
    p.residual_ = residual_check(*br, p.sat_, 1.0, model.q(), 1.0, 1.0, identity_x, 0.0, 0.0);
    p.tabulate(br->layer_lo(), br->layer_hi(), 401);
    return p;
}

std::pair<SteadyProfile, SteadyProfile> build_sub_super(const FluxModel& model, double eta, double eps) {
    require_eta(eta);
    require_eps(eps);
    const double u1 = model.u_star(Side::left);
    const double u2 = model.u_star(Side::right);
    const H2Report h2 = validate_h2(model, Side::left);
    if (!h2.pass) throw AssumptionError("build_sub_super: (H2) fails on the left rock: " + h2.message);

    auto yb = std::make_shared<const SteadyProfile::Branch>(model, Side::left, model.q(), 1.0, u1, 1.0,
                                                            1.0, -eta);
    auto zb = std::make_shared<const SteadyProfile::Branch>(model, Side::right, model.q(), 1.0, u2, 1.0,
                                                            0.5 * (1.0 + u2), eta);

    SteadyProfile lo;
    lo.kind_ = SteadyKind::s_lower;
    lo.eta_ = eta;
    lo.eps_ = eps;
    lo.sat_ = [yb, eta, eps, u2](double x) {
        if (x >= 0.0) return u2;
        return yb->u_of_x((x + eta) / eps - eta);
    };
    lo.value_ = lo.sat_;
    // x = eps (xb + eta) - eta maps branch coordinates back to x.
    lo.residual_ = residual_check(
        *yb, lo.sat_, eps, model.q(), eps, eps,
        [](double xb, double e, double et) { return e * (xb + et) - et; }, eps, eta);
    lo.tabulate(std::min(eps * (yb->layer_lo() + eta) - eta, -eta), eps, 401);

    SteadyProfile up;
    up.kind_ = SteadyKind::s_upper;
    up.eta_ = eta;
    up.eps_ = eps;
    up.sat_ = [zb, eta, eps](double x) {
        if (x < 0.0) return 1.0;
        return zb->u_of_x((x - eta) / eps + eta);
    };
    up.value_ = up.sat_;
    up.residual_ = residual_check(
        *zb, up.sat_, eps, model.q(), eps, eps,
        [](double xb, double e, double et) { return e * (xb - et) + et; }, eps, eta);
    up.tabulate(-eps, std::max(eps * (zb->layer_hi() - eta) + eta, eps), 401);
    return {lo, up};
}

SteadyProfile build_kappa_lambda(const FluxModel& model, double lambda, std::optional<double> eps) {
    if (!(lambda >= 0.0 && lambda <= model.q())) {
        std::ostringstream os;
        os << "build_kappa_lambda: lambda = " << lambda << " outside [0, q = " << model.q() << "]";
        throw DomainError(os.str());
    }
    const double k1 = lambda == model.q() ? model.u_star(Side::left)
                                          : model.inverse_increasing_branch(Side::left, lambda);
    const double k2 = lambda == model.q() ? model.u_star(Side::right)
                                          : model.inverse_increasing_branch(Side::right, lambda);
    SteadyProfile p;
    p.kind_ = SteadyKind::kappa_lambda;
    p.lambda_ = lambda;
    p.eps_ = eps;
    if (!eps || lambda == 0.0) {
        p.sat_ = [k1, k2](double x) { return x < 0.0 ? k1 : k2; };
        p.value_ = p.sat_;
        p.residual_ = 0.0;
        p.tabulate(-1.0, 1.0, 401);
        return p;
    }
    require_eps(*eps);
    if (k1 >= 1.0) throw DomainError("build_kappa_lambda: no increasing branch root below 1");
    auto br = std::make_shared<const SteadyProfile::Branch>(model, Side::left, lambda, *eps, k1, 1.0,
                                                            1.0, 0.0);
    p.sat_ = [br, k2](double x) { return x < 0.0 ? br->u_of_x(x) : k2; };
    p.value_ = p.sat_;
    p.residual_ = residual_check(*br, p.sat_, *eps, lambda, *eps, 1.0, identity_x, 0.0, 0.0);
    p.tabulate(br->layer_lo(), *eps, 401);
    return p;
}

PreparedData prepare_initial_data(const FluxModel& model, const Grid1D& grid,
                                  const std::function<double(double)>& u0, double eta, double eps) {
    const auto [lower, upper] = build_sub_super(model, eta, eps);
    const Eigen::VectorXd xc = grid.centers();
    const int N = grid.size();

    PreparedData out;
    for (int j = 0; j < N; ++j) {
        const double v = u0(xc[j]);
        if (v < model.u_star(grid.side_of(j)) - 1e-12) out.regime_warning = true;
    }

    using Quad = boost::math::quadrature::gauss<double, 4>;
    constexpr int panels = 256;
    auto mollify = [&](int n) {
        const double w = 1.0 / n;
        Eigen::VectorXd m(N);
        for (int j = 0; j < N; ++j) {
            double acc = 0.0;
            for (int p = 0; p < panels; ++p) {
                const double a = -w + 2.0 * w * p / panels;
                const double b = a + 2.0 * w / panels;
                acc += Quad::integrate(
                    [&](double y) { return u0(xc[j] - y) * n * (1.0 - n * std::abs(y)); }, a, b);
            }
            m[j] = std::clamp(acc, 0.0, 1.0);
        }
        return m;
    };
    auto steep = [&](const Eigen::VectorXd& m) {
        double worst = 0.0;
        for (int j = 0; j + 1 < N; ++j) {
            if (j + 1 == grid.n_left) continue;
            const Side s = grid.side_of(j);
            worst = std::max(worst, std::abs(model.phi(s, m[j + 1]) - model.phi(s, m[j])) / grid.dx);
        }
        return eps * worst;
    };

    int n = static_cast<int>(std::ceil(1.0 / eps));
    Eigen::VectorXd m = mollify(n);
    while (n > 1 && steep(m) > 1.0) {
        n = std::max(1, n / 2);
        m = mollify(n);
    }
    out.mollifier_n = n;
    out.u.resize(N);
    for (int j = 0; j < N; ++j)
        out.u[j] = std::max(lower.saturation(xc[j]), std::min(upper.saturation(xc[j]), m[j]));
    return out;
}

}  // namespace trapflow
