#pragma once

#include <vector>

#include "tempo/application.hpp"

namespace tempo::problems {

/// 2D Gray-Scott reaction-diffusion system on [0, domain]^2 with periodic
/// boundaries:
///
///   u_t = Du lap(u) - u v^2 + F (1 - u)
///   v_t = Dv lap(v) + u v^2 - (F + K) v
///
/// discretized with central differences on an n x n grid and backward Euler
/// in time. Each step solves the nonlinear system with Newton's method using
/// the analytic Jacobian; the inner linear systems are solved iteratively
/// (BiCGSTAB, diagonal preconditioning). The state stacks u then v
/// (vector_size = 2 n^2). Forcing is folded into the integrator.
class GrayScott final : public Application {
public:
    struct Options {
        int n = 32;
        double domain = 2.5;
        double feed = 0.024;   ///< F
        double kill = 0.06;    ///< K
        double du = 8e-5;
        double dv = 4e-5;
        double newton_tol = 1e-10;  ///< absolute and relative
        int newton_max_iters = 30;
        double linear_tol = 1e-10;
        bool reaction = true;       ///< disable for pure-diffusion checks
        bool bounds_check = true;   ///< abort when concentrations leave the box
        double bound_lo = -1.0;
        double bound_hi = 3.0;
    };

    explicit GrayScott(Options opt);

    int vector_size() const override { return 2 * opt_.n * opt_.n; }

    StateVector initial_condition() const override;

    StateVector step(int level, int index, const StateVector& u_prev) const override;

    bool forcing_folded() const override { return true; }

    const Options& options() const { return opt_; }

    /// Total mass (plain sum) of the u and v fields.
    std::pair<double, double> mass(const StateVector& w) const;

    /// One backward-Euler Newton solve with step size dt (exposed so small
    /// configurations can be checked against dense oracles).
    StateVector backward_euler_solve(double dt, const StateVector& w_prev) const;

private:
    void reaction_terms(const std::vector<double>& w, std::vector<double>& f) const;

    Options opt_;
    double h_ = 0.0;
    std::vector<int> north_, south_, east_, west_;  ///< periodic neighbor index maps
};

} // namespace tempo::problems
