#pragma once

#include "trapflow/flux_model.hpp"
#include "trapflow/grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <utility>

namespace trapflow {

enum class SteadyKind { y_eta, z_eta, s_lower, s_upper, kappa_lambda };

const char* to_string(SteadyKind k);

// Monotone steady profile x -> value. y_eta and z_eta are expressed in
// capillary-potential units, the other kinds in saturation units.
class SteadyProfile {
public:
    struct Branch;

    SteadyKind kind() const { return kind_; }
    double eta() const { return eta_; }
    std::optional<double> eps() const { return eps_; }
    std::optional<double> lambda() const { return lambda_; }
    bool in_potential() const { return kind_ == SteadyKind::y_eta || kind_ == SteadyKind::z_eta; }

    double operator()(double x) const;
    // Saturation at x; equal to operator() for saturation-valued kinds.
    double saturation(double x) const;

    // Samples on [x_lo, x_hi] covering the transition layer.
    const Eigen::VectorXd& x() const { return x_; }
    const Eigen::VectorXd& values() const { return values_; }
    // Largest ODE residual over the interior check points.
    double residual() const { return residual_; }

    // Interval outside which the profile equals its limit values to 1e-8.
    double x_lo() const { return x_.size() ? x_[0] : 0.0; }
    double x_hi() const { return x_.size() ? x_[x_.size() - 1] : 0.0; }

private:
    friend SteadyProfile build_y_eta(const FluxModel&, double);
    friend SteadyProfile build_z_eta(const FluxModel&, double);
    friend std::pair<SteadyProfile, SteadyProfile> build_sub_super(const FluxModel&, double, double);
    friend SteadyProfile build_kappa_lambda(const FluxModel&, double, std::optional<double>);

    SteadyKind kind_ = SteadyKind::y_eta;
    double eta_ = 0.0;
    std::optional<double> eps_;
    std::optional<double> lambda_;
    std::function<double(double)> sat_;
    std::function<double(double)> value_;
    Eigen::VectorXd x_;
    Eigen::VectorXd values_;
    double residual_ = 0.0;

    void tabulate(double lo, double hi, int n);
};

// y' = f1(phi1^{-1}(y)) - q, equal to phi1(1) on [-eta, +inf) and tending to
// phi1(u1*) at -inf. Throws AssumptionError when (H2) fails on side 1.
SteadyProfile build_y_eta(const FluxModel& model, double eta);

// z' = f2(phi2^{-1}(z)) - q through z(eta) = phi2((1 + u2*) / 2); tends to
// phi2(u2*) at -inf and phi2(1) at +inf.
SteadyProfile build_z_eta(const FluxModel& model, double eta);

// Sub- and super-solutions (saturation units):
//   lower(x) = phi1^{-1}(y((x + eta) / eps - eta)) for x < 0, u2* for x > 0
//   upper(x) = 1 for x < 0, phi2^{-1}(z((x - eta) / eps + eta)) for x > 0
std::pair<SteadyProfile, SteadyProfile> build_sub_super(const FluxModel& model, double eta,
                                                        double eps);

// Steady state with constant flux lambda in [0, q]. Without eps, the
// piecewise constant limit kappa_i = f_i^{-1}(lambda) on the increasing
// branch. With eps, f_i(k) - eps d/dx phi_i(k) = lambda with the graph
// connection at x = 0 (left trace 1 for lambda > 0).
SteadyProfile build_kappa_lambda(const FluxModel& model, double lambda,
                                 std::optional<double> eps = std::nullopt);

// Prepared initial data on the cell centres of `grid`: hat-kernel mollified u0
// clamped between the sub- and super-solutions. `warning` is set when u0 lies
// below u_i* somewhere, outside the large-data regime.
struct PreparedData {
    Eigen::VectorXd u;
    int mollifier_n = 0;
    bool regime_warning = false;
};

PreparedData prepare_initial_data(const FluxModel& model, const Grid1D& grid,
                                  const std::function<double(double)>& u0, double eta, double eps);

}  // namespace trapflow
