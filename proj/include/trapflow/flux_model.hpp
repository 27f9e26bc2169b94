#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace trapflow {

// Rock index: left is Omega_1 = (-inf, 0), right is Omega_2 = (0, +inf).
enum class Side { left = 0, right = 1 };

inline constexpr std::array<Side, 2> kSides{Side::left, Side::right};

inline constexpr int index(Side s) { return static_cast<int>(s); }
inline const char* name(Side s) { return s == Side::left ? "left" : "right"; }

using Curve = std::function<double(double)>;

// Fractional-flow and gravity curves of one rock. `g_primitive`, when set, is
// the closed form of u -> int_0^u g; otherwise the capillary potential is
// tabulated by quadrature.
struct RockCurves {
    Curve c;
    Curve g;
    Curve g_primitive;
};

// Engineering relative-permeability family:
//   c(u) = u^alpha / (u^alpha + (a/b) (1-u)^beta)
//   g(u) = K u^alpha (1-u)^beta / (b u^alpha + a (1-u)^beta)
struct ParamFamily {
    std::array<double, 2> alpha{2.0, 2.0};
    std::array<double, 2> beta{2.0, 2.0};
    double a = 1.0;
    double b = 1.0;
    std::array<double, 2> K{1.0, 2.0};
};

RockCurves family_curves(const ParamFamily& p, Side side);

struct Extremum {
    double u;
    double value;
    bool is_max;
};

// Two-rock flux model f_i(u) = q c_i(u) + g_i(u) with capillary potentials
// phi_i(u) = C int_0^u g_i. Immutable; copies share the precomputed tables.
class FluxModel {
public:
    FluxModel(double q, double C, double P1, double P2, RockCurves left, RockCurves right);

    // q = 0.25, c_i(u) = u, g_i(u) = K_i u (1-u) with K = (1, 2), C = 1.
    static FluxModel tf1(double q = 0.25, double P1 = 0.0, double P2 = 1.0);
    static FluxModel from_family(double q, double C, double P1, double P2, const ParamFamily& p);

    double q() const;
    double C() const;
    double P(Side s) const;

    double c(Side s, double u) const;
    double g(Side s, double u) const;

    // f_i(u); throws DomainError outside [0, 1].
    double flux(Side s, double u) const;
    // One-sided at the endpoints, central inside.
    double flux_derivative(Side s, double u) const;

    double phi(Side s, double u) const;
    double phi_derivative(Side s, double u) const { return C() * g(s, u); }
    double phi_max(Side s) const;
    // u with |phi(u) - y| <= 1e-12 phi(1).
    double phi_inverse(Side s, double y) const;

    // Smallest root of f_i = q; throws AssumptionError when none exists below
    // the first local maximum.
    double u_star(Side s) const;
    bool has_u_star(Side s) const;

    // Sampled bound of |f_i'| on [0, 1].
    double lipschitz(Side s) const;
    double lipschitz() const;

    // Interior local extrema of f_i, sorted by u.
    const std::vector<Extremum>& extrema(Side s) const;

    // min_{[a,b]} f_i if a <= b, max_{[b,a]} f_i otherwise.
    double min_flux(Side s, double lo, double hi) const;
    double max_flux(Side s, double lo, double hi) const;

    // Root of f_i = value on the increasing branch [0, u_i*].
    double inverse_increasing_branch(Side s, double value) const;

    // Opaque per-rock tables.
    struct Rock;
    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
    const Rock& rock(Side s) const;
};

// Free-function forms of the model operations.
double eval_flux(const FluxModel& m, Side s, double u);
double eval_phi(const FluxModel& m, Side s, double u);
double invert_phi(const FluxModel& m, Side s, double y);
double find_u_star(const FluxModel& m, Side s);

struct H1Report {
    bool pass = false;
    std::array<std::optional<double>, 2> u_star;
    std::string message;
    std::optional<Side> violating_side;
    std::optional<double> violating_u;
};

struct H2Report {
    bool pass = false;
    Side side = Side::left;
    double m = 0.0;
    double R = 0.0;
    double alpha = 0.0;
    double fit_residual = 0.0;
    std::string message;
};

H1Report validate_h1(const FluxModel& model, int samples = 10000);
// Power-law fit of f o phi^{-1}(s) - q against phi(1) - s near s = phi(1).
H2Report validate_h2(const FluxModel& model, Side side = Side::left, int samples = 200);

}  // namespace trapflow
