#include "trapflow/riemann.hpp"

#include "trapflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trapflow {

namespace {

constexpr double kStateTol = 1e-12;

void check_state(double u, const char* what) {
    if (!(u >= 0.0 && u <= 1.0)) {
        std::ostringstream os;
        os << what << ": state " << u << " outside [0, 1]";
        throw DomainError(os.str());
    }
}

}  // namespace

void Coupling::validate(const FluxModel& model) const {
    if (kind != Kind::prescribed_flux) return;
    if (!(lambda >= 0.0 && lambda <= model.q())) {
        std::ostringstream os;
        os << "prescribed interface flux " << lambda << " outside [0, q = " << model.q() << "]";
        throw ConfigError(os.str());
    }
}

std::string Coupling::to_string() const {
    switch (kind) {
        case Kind::non_classical: return "nonclassical";
        case Kind::optimal_entropy: return "entropy";
        case Kind::prescribed_flux: {
            std::ostringstream os;
            os.precision(17);
            os << "flux:" << lambda;
            return os.str();
        }
    }
    return "?";
}

Coupling Coupling::parse(const std::string& text) {
    if (text == "nonclassical" || text == "non-classical") return non_classical();
    if (text == "entropy" || text == "optimal-entropy") return optimal_entropy();
    if (text.rfind("flux:", 0) == 0) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text.substr(5), &pos);
            if (pos == text.size() - 5) return prescribed(v);
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("unknown coupling '" + text + "' (expected nonclassical, entropy or flux:<value>)");
}

const char* to_string(RiemannCase c) {
    switch (c) {
        case RiemannCase::a: return "a";
        case RiemannCase::b: return "b";
        case RiemannCase::c: return "c";
        case RiemannCase::d: return "d";
        case RiemannCase::e: return "e";
        case RiemannCase::f: return "f";
    }
    return "?";
}

const char* to_string(ShockType s) {
    switch (s) {
        case ShockType::classical: return "classical";
        case ShockType::non_classical_undercompressive: return "non_classical_undercompressive";
        case ShockType::no_shock: return "no_shock";
    }
    return "?";
}

double godunov_flux(const FluxModel& model, Side side, double a, double b) {
    check_state(a, "godunov_flux");
    check_state(b, "godunov_flux");
    if (a == b) return model.flux(side, a);
    return a < b ? model.min_flux(side, a, b) : model.max_flux(side, b, a);
}

double nonclassical_interface_flux(const FluxModel& model, double u_left) {
    return godunov_flux(model, Side::left, u_left, 1.0);
}

double entropy_interface_flux(const FluxModel& model, double u_left, double u_right) {
    check_state(u_left, "entropy_interface_flux");
    check_state(u_right, "entropy_interface_flux");
    const double demand = model.max_flux(Side::left, 0.0, u_left);
    const double supply = model.max_flux(Side::right, u_right, 1.0);
    return std::min(demand, supply);
}

double interface_flux(const FluxModel& model, const Coupling& coupling, double u_left,
                      double u_right) {
    switch (coupling.kind) {
        case Coupling::Kind::non_classical: return nonclassical_interface_flux(model, u_left);
        case Coupling::Kind::optimal_entropy: return entropy_interface_flux(model, u_left, u_right);
        case Coupling::Kind::prescribed_flux: return coupling.lambda;
    }
    return 0.0;
}

RiemannCase classify_riemann(const FluxModel& model, double ul, double ur) {
    check_state(ul, "classify_riemann");
    check_state(ur, "classify_riemann");
    const double s1 = model.u_star(Side::left);
    const double s2 = model.u_star(Side::right);
    const bool right_is_one = ur >= 1.0 - kStateTol;
    if (ul > s1 + kStateTol) {
        if (right_is_one) return RiemannCase::c;
        return ur >= s2 - kStateTol ? RiemannCase::a : RiemannCase::e;
    }
    if (ul >= s1 - kStateTol && right_is_one) return RiemannCase::d;
    return ur <= s2 + kStateTol ? RiemannCase::b : RiemannCase::f;
}

RiemannTraces solve_riemann(const FluxModel& model, const Coupling& coupling, double ul, double ur) {
    check_state(ul, "solve_riemann");
    check_state(ur, "solve_riemann");
    const double s1 = model.u_star(Side::left);
    const double s2 = model.u_star(Side::right);

    if (coupling.kind == Coupling::Kind::prescribed_flux)
        throw UnsupportedRegime("solve_riemann: prescribed interface flux is not a Riemann coupling");
    if (coupling.kind == Coupling::Kind::optimal_entropy &&
        !(ul <= s1 + kStateTol && ur <= s2 + kStateTol))
        throw UnsupportedRegime(
            "solve_riemann: the optimal-entropy coupling is only supported for u_l <= u1*, u_r <= u2*");

    RiemannTraces t;
    t.case_label = classify_riemann(model, ul, ur);
    switch (t.case_label) {
        case RiemannCase::a:
        case RiemannCase::e:
            t.u1 = 1.0;
            t.u2 = s2;
            break;
        case RiemannCase::b:
        case RiemannCase::f:
            t.u1 = ul;
            try {
                t.u2 = model.inverse_increasing_branch(Side::right, model.flux(Side::left, ul));
            } catch (const DomainError& e) {
                throw AssumptionError(std::string("solve_riemann: f2^{-1} bracket is empty: ") + e.what());
            }
            break;
        case RiemannCase::c:
            t.u1 = 1.0;
            t.u2 = 1.0;
            break;
        case RiemannCase::d:
            t.u1 = s1;
            t.u2 = 1.0;
            break;
    }
    t.interface_flux = model.flux(Side::left, t.u1);
    if (t.u1 == t.u2) {
        t.classification = ShockType::no_shock;
    } else {
        t.classification = oleinik_interface(model, t.u1, t.u2).admissible
                               ? ShockType::classical
                               : ShockType::non_classical_undercompressive;
    }
    return t;
}

OleinikResult oleinik_interface(const FluxModel& model, double u1, double u2) {
    check_state(u1, "oleinik_interface");
    check_state(u2, "oleinik_interface");
    const double s_left = model.flux_derivative(Side::left, u1);
    const double s_right = model.flux_derivative(Side::right, u2);
    OleinikResult r;
    r.admissible = !(s_left < 0.0 && s_right > 0.0);
    r.witness = r.admissible ? 0.0 : std::min(-s_left, s_right);
    return r;
}

OleinikResult oleinik_same_side(const FluxModel& model, Side side, double left, double right) {
    check_state(left, "oleinik_same_side");
    check_state(right, "oleinik_same_side");
    OleinikResult r;
    if (left == right) return r;
    const double fl = model.flux(side, left);
    const double speed = (model.flux(side, right) - fl) / (right - left);
    // Oleinik: (f(v) - f(left)) / (v - left) >= speed for v strictly between.
    constexpr int n = 1000;
    double worst = 0.0;
    for (int k = 1; k < n; ++k) {
        const double v = left + (right - left) * static_cast<double>(k) / n;
        const double chord = (model.flux(side, v) - fl) / (v - left);
        worst = std::min(worst, chord - speed);
    }
    r.admissible = worst >= -1e-12;
    r.witness = worst;
    return r;
}

}  // namespace trapflow
