#include "trapflow/flux_model.hpp"

#include "trapflow/errors.hpp"
#include "trapflow/numerics.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace trapflow {

namespace {

constexpr int kPhiTableSize = 2048;
constexpr int kExtremumSamples = 4096;
constexpr int kLipschitzSamples = 10000;
constexpr int kUStarSamples = 10000;
// Slack on the [0, 1] range check; iterates of the implicit solvers may sit a
// few ulps outside the unit interval.
constexpr double kRangeSlack = 1e-12;

double checked(double u, const char* what) {
    if (!(u >= -kRangeSlack && u <= 1.0 + kRangeSlack)) {
        std::ostringstream os;
        os << what << ": saturation " << u << " outside [0, 1]";
        throw DomainError(os.str());
    }
    return std::clamp(u, 0.0, 1.0);
}

}  // namespace

struct FluxModel::Rock {
    RockCurves curves;
    double q = 0.0;
    double C = 1.0;
    // phi at u_k = k / kPhiTableSize.
    std::vector<double> phi_table;
    std::vector<Extremum> extrema;
    double lipschitz = 0.0;
    std::optional<double> u_star;
    std::string u_star_error;

    double f(double u) const { return q * curves.c(u) + curves.g(u); }

    double phi(double u) const {
        if (curves.g_primitive) return C * curves.g_primitive(u);
        const int k = std::min(static_cast<int>(u * kPhiTableSize), kPhiTableSize - 1);
        const double uk = static_cast<double>(k) / kPhiTableSize;
        if (u == uk) return phi_table[k];
        const double tail =
            boost::math::quadrature::gauss<double, 10>::integrate(curves.g, uk, u);
        return phi_table[k] + C * tail;
    }

    double f_prime(double u) const {
        constexpr double h = 1e-6;
        if (u < h) return (-3.0 * f(u) + 4.0 * f(u + h) - f(u + 2.0 * h)) / (2.0 * h);
        if (u > 1.0 - h) return (3.0 * f(u) - 4.0 * f(u - h) + f(u - 2.0 * h)) / (2.0 * h);
        return (f(u + h) - f(u - h)) / (2.0 * h);
    }
};

struct FluxModel::Impl {
    double q = 0.0;
    double C = 1.0;
    std::array<double, 2> P{0.0, 1.0};
    std::array<Rock, 2> rocks;
};

namespace {

void build_phi_table(FluxModel::Rock& r);
void build_extrema(FluxModel::Rock& r);
void build_u_star(FluxModel::Rock& r);

}  // namespace

FluxModel::FluxModel(double q, double C, double P1, double P2, RockCurves left, RockCurves right) {
    if (!(q >= 0.0)) throw std::invalid_argument("total flow rate q must be >= 0");
    if (!(C > 0.0)) throw std::invalid_argument("buoyancy constant C must be > 0");
    if (!(P1 < P2)) throw std::invalid_argument("capillary plateaus must satisfy P1 < P2");
    if (!left.c || !left.g || !right.c || !right.g)
        throw std::invalid_argument("rock curves c and g must be set");

    auto impl = std::make_shared<Impl>();
    impl->q = q;
    impl->C = C;
    impl->P = {P1, P2};
    impl->rocks[0].curves = std::move(left);
    impl->rocks[1].curves = std::move(right);
    for (auto& r : impl->rocks) {
        r.q = q;
        r.C = C;
        build_phi_table(r);
        build_extrema(r);
        double lip = 0.0;
        for (int k = 0; k <= kLipschitzSamples; ++k)
            lip = std::max(lip, std::abs(r.f_prime(static_cast<double>(k) / kLipschitzSamples)));
        r.lipschitz = lip;
        build_u_star(r);
    }
    impl_ = std::move(impl);
}

FluxModel FluxModel::tf1(double q, double P1, double P2) {
    auto rock = [](double K) {
        RockCurves r;
        r.c = [](double u) { return u; };
        r.g = [K](double u) { return K * u * (1.0 - u); };
        r.g_primitive = [K](double u) { return K * (u * u / 2.0 - u * u * u / 3.0); };
        return r;
    };
    return FluxModel(q, 1.0, P1, P2, rock(1.0), rock(2.0));
}

RockCurves family_curves(const ParamFamily& p, Side side) {
    const int i = index(side);
    const double al = p.alpha[i];
    const double be = p.beta[i];
    const double K = p.K[i];
    const double a = p.a;
    const double b = p.b;
    if (!(al >= 1.0 && be >= 1.0)) throw std::invalid_argument("family exponents must be >= 1");
    if (!(a > 0.0 && b > 0.0 && K > 0.0))
        throw std::invalid_argument("family constants a, b, K must be > 0");
    RockCurves r;
    r.c = [=](double u) {
        const double ua = std::pow(u, al);
        return ua / (ua + (a / b) * std::pow(1.0 - u, be));
    };
    r.g = [=](double u) {
        const double ua = std::pow(u, al);
        const double vb = std::pow(1.0 - u, be);
        return K * ua * vb / (b * ua + a * vb);
    };
    return r;
}

FluxModel FluxModel::from_family(double q, double C, double P1, double P2, const ParamFamily& p) {
    return FluxModel(q, C, P1, P2, family_curves(p, Side::left), family_curves(p, Side::right));
}

const FluxModel::Rock& FluxModel::rock(Side s) const { return impl_->rocks[index(s)]; }

double FluxModel::q() const { return impl_->q; }
double FluxModel::C() const { return impl_->C; }
double FluxModel::P(Side s) const { return impl_->P[index(s)]; }

double FluxModel::c(Side s, double u) const { return rock(s).curves.c(checked(u, "c")); }
double FluxModel::g(Side s, double u) const { return rock(s).curves.g(checked(u, "g")); }

double FluxModel::flux(Side s, double u) const { return rock(s).f(checked(u, "flux")); }

double FluxModel::flux_derivative(Side s, double u) const {
    return rock(s).f_prime(checked(u, "flux_derivative"));
}

double FluxModel::phi(Side s, double u) const { return rock(s).phi(checked(u, "phi")); }

double FluxModel::phi_max(Side s) const { return rock(s).phi_table.back(); }

double FluxModel::phi_inverse(Side s, double y) const {
    const Rock& r = rock(s);
    const double top = r.phi_table.back();
    const double slack = 1e-12 * std::max(top, 1e-300);
    if (!(y >= -slack && y <= top + slack)) {
        std::ostringstream os;
        os << "phi_inverse: potential " << y << " outside [0, " << top << "]";
        throw DomainError(os.str());
    }
    if (y <= 0.0) return 0.0;
    // phi is flat at u = 1, so a last-ulp gap below the top would otherwise
    // land ~sqrt(eps) away from 1.
    if (y >= top - 4.0 * std::numeric_limits<double>::epsilon() * top) return 1.0;
    auto it = std::upper_bound(r.phi_table.begin(), r.phi_table.end(), y);
    const auto k = static_cast<int>(std::distance(r.phi_table.begin(), it));
    const double lo = static_cast<double>(k - 1) / kPhiTableSize;
    const double hi = static_cast<double>(k) / kPhiTableSize;
    return numerics::bisect([&](double u) { return r.phi(u) - y; }, lo, hi);
}

double FluxModel::u_star(Side s) const {
    const Rock& r = rock(s);
    if (!r.u_star) throw AssumptionError(std::string(name(s)) + " rock: " + r.u_star_error);
    return *r.u_star;
}

bool FluxModel::has_u_star(Side s) const { return rock(s).u_star.has_value(); }

double FluxModel::lipschitz(Side s) const { return rock(s).lipschitz; }

double FluxModel::lipschitz() const { return std::max(lipschitz(Side::left), lipschitz(Side::right)); }

const std::vector<Extremum>& FluxModel::extrema(Side s) const { return rock(s).extrema; }

double FluxModel::min_flux(Side s, double lo, double hi) const {
    const Rock& r = rock(s);
    lo = checked(lo, "min_flux");
    hi = checked(hi, "min_flux");
    if (lo > hi) std::swap(lo, hi);
    double v = std::min(r.f(lo), r.f(hi));
    for (const auto& e : r.extrema)
        if (!e.is_max && e.u > lo && e.u < hi) v = std::min(v, e.value);
    return v;
}

double FluxModel::max_flux(Side s, double lo, double hi) const {
    const Rock& r = rock(s);
    lo = checked(lo, "max_flux");
    hi = checked(hi, "max_flux");
    if (lo > hi) std::swap(lo, hi);
    double v = std::max(r.f(lo), r.f(hi));
    for (const auto& e : r.extrema)
        if (e.is_max && e.u > lo && e.u < hi) v = std::max(v, e.value);
    return v;
}

double FluxModel::inverse_increasing_branch(Side s, double value) const {
    const Rock& r = rock(s);
    const double us = u_star(s);
    const double fmax = r.f(us);
    if (!(value >= -1e-14 && value <= fmax + 1e-14 * std::max(1.0, fmax))) {
        std::ostringstream os;
        os << "flux value " << value << " outside f(" << name(s) << ")([0, u*]) = [0, " << fmax << "]";
        throw DomainError(os.str());
    }
    if (value <= 0.0) return 0.0;
    if (value >= fmax) return us;
    return numerics::bisect([&](double u) { return r.f(u) - value; }, 0.0, us);
}

namespace {

void build_phi_table(FluxModel::Rock& r) {
    r.phi_table.assign(kPhiTableSize + 1, 0.0);
    if (r.curves.g_primitive) {
        for (int k = 0; k <= kPhiTableSize; ++k)
            r.phi_table[k] = r.C * r.curves.g_primitive(static_cast<double>(k) / kPhiTableSize);
        return;
    }
    double acc = 0.0;
    for (int k = 1; k <= kPhiTableSize; ++k) {
        const double a = static_cast<double>(k - 1) / kPhiTableSize;
        const double b = static_cast<double>(k) / kPhiTableSize;
        acc += r.C * boost::math::quadrature::gauss<double, 20>::integrate(r.curves.g, a, b);
        r.phi_table[k] = acc;
    }
}

void build_extrema(FluxModel::Rock& r) {
    constexpr int n = kExtremumSamples;
    Eigen::VectorXd f(n + 1);
    for (int k = 0; k <= n; ++k) f[k] = r.f(static_cast<double>(k) / n);
    r.extrema.clear();
    // Sign of the last nonzero sampled slope.
    int prev_sign = 0;
    for (int k = 1; k <= n; ++k) {
        const double d = f[k] - f[k - 1];
        const int sign = (d > 0.0) - (d < 0.0);
        if (sign == 0) continue;
        if (prev_sign != 0 && sign != prev_sign) {
            const bool is_max = prev_sign > 0;
            const double lo = std::max(0.0, static_cast<double>(k - 2) / n);
            const double hi = static_cast<double>(k) / n;
            auto [u, val] = is_max
                                ? numerics::minimise([&](double x) { return -r.f(x); }, lo, hi)
                                : numerics::minimise([&](double x) { return r.f(x); }, lo, hi);
            r.extrema.push_back({u, is_max ? -val : val, is_max});
        }
        prev_sign = sign;
    }
}

void build_u_star(FluxModel::Rock& r) {
    if (r.q == 0.0) {
        r.u_star = 0.0;
        return;
    }
    constexpr int n = kUStarSamples;
    double prev = r.f(0.0);
    for (int k = 1; k <= n; ++k) {
        const double u = static_cast<double>(k) / n;
        const double fk = r.f(u);
        if (fk >= r.q) {
            const double root = numerics::bisect([&](double x) { return r.f(x) - r.q; },
                                                 static_cast<double>(k - 1) / n, u);
            if (root >= 1.0 - 1e-12) {
                r.u_star_error = "f = q has no root in [0, 1)";
                return;
            }
            r.u_star = root;
            return;
        }
        if (fk < prev) {
            r.u_star_error = "f stays below q up to its first local maximum";
            return;
        }
        prev = fk;
    }
    r.u_star_error = "f = q has no root in [0, 1)";
}

}  // namespace

double eval_flux(const FluxModel& m, Side s, double u) { return m.flux(s, u); }
double eval_phi(const FluxModel& m, Side s, double u) { return m.phi(s, u); }
double invert_phi(const FluxModel& m, Side s, double y) { return m.phi_inverse(s, y); }
double find_u_star(const FluxModel& m, Side s) { return m.u_star(s); }

H1Report validate_h1(const FluxModel& model, int samples) {
    H1Report rep;
    const double q = model.q();
    auto fail = [&](Side s, double u, std::string msg) {
        rep.pass = false;
        rep.violating_side = s;
        rep.violating_u = u;
        rep.message = std::string(name(s)) + " rock: " + std::move(msg);
        return rep;
    };
    for (Side s : kSides) {
        if (!model.has_u_star(s)) {
            try {
                model.u_star(s);
            } catch (const AssumptionError& e) {
                return fail(s, 0.0, e.what());
            }
        }
        const double us = model.u_star(s);
        rep.u_star[index(s)] = us;
        const double h = 1.0 / samples;
        if (std::abs(model.flux(s, 1.0) - q) > 1e-12 * std::max(q, 1.0))
            return fail(s, 1.0, "f(1) != q");
        if (std::abs(model.flux(s, 0.0)) > 1e-12) return fail(s, 0.0, "f(0) != 0");
        double prev = model.flux(s, 0.0);
        for (int k = 1; k < samples; ++k) {
            const double u = k * h;
            const double fu = model.flux(s, u);
            if (!(model.g(s, u) > 0.0)) return fail(s, u, "g is not strictly positive inside (0, 1)");
            if (u <= us) {
                if (fu < prev) return fail(s, u, "f is not increasing on [0, u*]");
            } else {
                // Samples adjacent to u* or 1 only need to clear q up to rounding.
                const bool near_end = (u - us) < h || (1.0 - u) < 1.5 * h;
                const double floor = near_end ? q - 1e-10 : q;
                if (!(fu > floor)) return fail(s, u, "f is not strictly above q on (u*, 1)");
            }
            prev = fu;
        }
    }
    rep.pass = true;
    rep.message = "ok";
    return rep;
}

H2Report validate_h2(const FluxModel& model, Side side, int samples) {
    H2Report rep;
    rep.side = side;
    const double top = model.phi_max(side);
    const double q = model.q();
    rep.alpha = 0.05 * top;
    if (!(top > 0.0)) {
        rep.message = "capillary potential is identically zero";
        return rep;
    }
    // Log-spaced gaps d = phi(1) - s in [alpha 1e-6, alpha].
    Eigen::VectorXd logd(samples), logv(samples), d(samples), v(samples);
    for (int k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        d[k] = rep.alpha * std::pow(10.0, -6.0 * (1.0 - t));
        const double u = model.phi_inverse(side, top - d[k]);
        v[k] = model.flux(side, u) - q;
        if (!(v[k] > 0.0)) {
            rep.message = "f o phi^{-1} - q is not positive near phi(1)";
            return rep;
        }
        logd[k] = std::log(d[k]);
        logv[k] = std::log(v[k]);
    }
    Eigen::MatrixXd A(samples, 2);
    A.col(0).setOnes();
    A.col(1) = logd;
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(logv);
    rep.m = coef[1];
    rep.fit_residual = (A * coef - logv).cwiseAbs().maxCoeff();
    rep.R = (v.array() / d.array().pow(rep.m)).minCoeff();
    rep.pass = rep.m > 0.0 && rep.m < 1.0 && rep.R > 0.0;
    std::ostringstream os;
    os << "fitted m = " << rep.m << ", R = " << rep.R;
    if (!(rep.m > 0.0 && rep.m < 1.0)) os << " (m must lie in (0, 1))";
    rep.message = os.str();
    return rep;
}

}  // namespace trapflow
