#pragma once

#include "trapflow/flux_model.hpp"

#include <string>

namespace trapflow {

// Interface flux law used at x = 0.
struct Coupling {
    enum class Kind { non_classical, optimal_entropy, prescribed_flux };
    Kind kind = Kind::non_classical;
    double lambda = 0.0;  // prescribed_flux only

    static Coupling non_classical() { return {Kind::non_classical, 0.0}; }
    static Coupling optimal_entropy() { return {Kind::optimal_entropy, 0.0}; }
    // Requires lambda in [0, q]; checked against the model by validate().
    static Coupling prescribed(double lambda) { return {Kind::prescribed_flux, lambda}; }

    void validate(const FluxModel& model) const;
    std::string to_string() const;
    static Coupling parse(const std::string& text);

    bool operator==(const Coupling&) const = default;
};

enum class RiemannCase { a, b, c, d, e, f };
enum class ShockType { classical, non_classical_undercompressive, no_shock };

const char* to_string(RiemannCase c);
const char* to_string(ShockType s);

struct RiemannTraces {
    double u1 = 0.0;
    double u2 = 0.0;
    double interface_flux = 0.0;
    RiemannCase case_label = RiemannCase::a;
    ShockType classification = ShockType::no_shock;
};

// Godunov flux of f_side: min over [a, b] when a <= b, max over [b, a] otherwise.
double godunov_flux(const FluxModel& model, Side side, double a, double b);

// Interface flux of the oil-trapping coupling: G_1(u_left, 1).
double nonclassical_interface_flux(const FluxModel& model, double u_left);

// Demand/supply coupling: min(max f_1 on [0, u_left], max f_2 on [u_right, 1]).
double entropy_interface_flux(const FluxModel& model, double u_left, double u_right);

// Face flux at x = 0 for a given coupling.
double interface_flux(const FluxModel& model, const Coupling& coupling, double u_left,
                      double u_right);

RiemannCase classify_riemann(const FluxModel& model, double ul, double ur);

// Interface traces of the Riemann problem (u_l on x < 0, u_r on x > 0).
// optimal_entropy is only supported in the small-data regime; prescribed_flux
// is not a Riemann coupling and throws UnsupportedRegime.
RiemannTraces solve_riemann(const FluxModel& model, const Coupling& coupling, double ul, double ur);

struct OleinikResult {
    bool admissible = true;
    double witness = 0.0;  // offending slope (interface) or chord defect (same side)
};

// Stationary interface shock (u1 on the left rock, u2 on the right rock):
// undercompressive iff f_1'(u1) < 0 < f_2'(u2).
OleinikResult oleinik_interface(const FluxModel& model, double u1, double u2);

// Shock from `left` to `right` inside one rock, checked on 1000 intermediate states.
OleinikResult oleinik_same_side(const FluxModel& model, Side side, double left, double right);

}  // namespace trapflow
