#pragma once

#include <vector>

#include "tempo/application.hpp"

namespace tempo::problems {

/// One-dimensional heat equation u_t - u_xx = b(x, t) on x in [x0, x1] with
/// homogeneous Dirichlet boundaries, discretized by second-order central
/// differences in space (n_dof interior unknowns) and backward Euler in time.
///
/// The forcing b(x,t) = -sin(pi x) (sin t - pi^2 cos t) manufactures the
/// exact solution u(x,t) = sin(pi x) cos(t) with u(x,0) = sin(pi x).
///
/// In the explicit convention, step() applies the inverse of (I + dt L) and
/// forcing() returns the per-step affine term; in the folded convention
/// step() is the full affine propagator. The spatial operator is factored
/// once per level; levels differ only in their step size.
class Heat1D final : public Application {
public:
    struct Options {
        int n_dof = 1025;   ///< interior unknowns
        double x0 = 0.0;
        double x1 = 1.0;
        bool folded = false;
        bool manufactured_forcing = true;  ///< disable for the homogeneous equation
    };

    explicit Heat1D(Options opt);

    int vector_size() const override { return opt_.n_dof; }

    StateVector initial_condition() const override;

    StateVector step(int level, int index, const StateVector& u_prev) const override;

    StateVector forcing(int level, int index) const override;

    bool forcing_folded() const override { return opt_.folded; }

    /// Exact PDE solution sampled at the interior grid points.
    StateVector exact_solution(double t) const;

    double mesh_width() const { return h_; }

    /// Step multiplier spectrum of (I + dt L)^{-1} on `level` (one entry per
    /// spatial eigenmode), for convergence analysis.
    std::vector<double> step_multipliers(int level) const;

protected:
    void on_configure() override;

private:
    struct Factorization {
        double r = 0.0;               ///< dt / h^2 for one sub-step
        double sub_dt = 0.0;
        std::vector<double> c_prime;  ///< precomputed elimination coefficients
        std::vector<double> inv_den;
    };

    // Solve (I + sub_dt L) x = rhs in place.
    void tridiag_solve(const Factorization& f, std::vector<double>& x) const;

    // Full affine sub-step chain from point index-1 to index; `with_forcing`
    // off gives the linear action.
    StateVector propagate(int level, int index, const StateVector& u_prev,
                          bool with_forcing) const;

    double forcing_time_factor(double t) const;

    Options opt_;
    double h_ = 0.0;
    std::vector<double> sin_profile_;  ///< sin(pi x_i)
    std::vector<Factorization> factor_;
};

} // namespace tempo::problems
