#pragma once

// Test-only problems and independent oracles. Everything here is written
// directly from the operator definitions so it can cross-check the library
// without sharing its code paths.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "tempo/application.hpp"
#include "tempo/hierarchy.hpp"
#include "tempo/solver.hpp"

namespace tempo::testing {

/// Scalar linear problem u_i = mult(level) * u_{i-1} + forcing with an
/// arbitrary multiplier per level (level 0 = phi, coarser = psi, ...).
class ScalarLinear final : public Application {
public:
    ScalarLinear(std::vector<double> multipliers, double u0, bool folded,
                 std::vector<double> fine_forcing = {})
        : multipliers_(std::move(multipliers)), u0_(u0), folded_(folded),
          fine_forcing_(std::move(fine_forcing)) {}

    int vector_size() const override { return 1; }

    StateVector initial_condition() const override {
        StateVector v(1);
        v[0] = u0_;
        return v;
    }

    StateVector step(int level, int index, const StateVector& u_prev) const override {
        StateVector v(1);
        v[0] = multipliers_.at(static_cast<std::size_t>(level)) * u_prev[0];
        if (folded_ && level == 0 && !fine_forcing_.empty()) {
            v[0] += fine_forcing_.at(static_cast<std::size_t>(index));
        }
        return v;
    }

    StateVector forcing(int level, int index) const override {
        StateVector v(1);
        v[0] = (!folded_ && level == 0 && !fine_forcing_.empty())
                   ? fine_forcing_.at(static_cast<std::size_t>(index))
                   : 0.0;
        return v;
    }

    bool forcing_folded() const override { return folded_; }

    double multiplier(std::size_t level) const { return multipliers_.at(level); }

private:
    std::vector<double> multipliers_;
    double u0_;
    bool folded_;
    std::vector<double> fine_forcing_;
};

/// Exact discrete solution of the level-0 system by sequential stepping.
inline std::vector<StateVector> sequential_solution(const Application& app, int n_points) {
    std::vector<StateVector> u;
    u.reserve(static_cast<std::size_t>(n_points));
    u.push_back(app.initial_condition());
    for (int i = 1; i < n_points; ++i) {
        StateVector next = app.step(0, i, u.back());
        if (!app.forcing_folded()) next.add(app.forcing(0, i));
        u.push_back(std::move(next));
    }
    return u;
}

/// Independently coded Parareal iteration over the same Application:
/// U_j^{new} = Psi(U_j-1^{new}) + F(U_{j-1}^{old}) - Psi(U_{j-1}^{old}) on the
/// coarse points, with the fine propagator F given by stepping through the
/// F-interval. Returns the residual-norm history using the discrete 2-norm of
/// the full space-time residual (fine points filled by F-propagation).
class PararealOracle {
public:
    PararealOracle(const Application& app, const Hierarchy& hier)
        : app_(app), hier_(hier) {}

    /// Runs `iters` iterations from the given fine initial guess; returns one
    /// residual norm per iteration.
    std::vector<double> run(std::vector<StateVector> fine_guess, int iters) {
        const CfSplit& split = hier_.split(0);
        const int n_c = static_cast<int>(split.c_points.size());
        const int n_fine = hier_.level(0).n_points;

        std::vector<StateVector> coarse(static_cast<std::size_t>(n_c));
        for (int j = 0; j < n_c; ++j) {
            coarse[static_cast<std::size_t>(j)] =
                fine_guess[static_cast<std::size_t>(split.c_points[j])];
        }
        coarse[0] = app_.initial_condition();

        std::vector<double> history;
        for (int it = 0; it < iters; ++it) {
            // fine propagation F(U_{j-1}) over every interval (parallel step)
            std::vector<StateVector> fine_prop(static_cast<std::size_t>(n_c));
            for (int j = 1; j < n_c; ++j) {
                fine_prop[static_cast<std::size_t>(j)] = propagate_fine(
                    coarse[static_cast<std::size_t>(j - 1)], split.c_points[j - 1],
                    split.c_points[j]);
            }
            // sequential coarse correction sweep
            std::vector<StateVector> next(static_cast<std::size_t>(n_c));
            next[0] = app_.initial_condition();
            for (int j = 1; j < n_c; ++j) {
                StateVector value = coarse_step(next[static_cast<std::size_t>(j - 1)], j);
                value.add(fine_prop[static_cast<std::size_t>(j)]);
                value.sub(coarse_step(coarse[static_cast<std::size_t>(j - 1)], j));
                next[static_cast<std::size_t>(j)] = std::move(value);
            }
            coarse = std::move(next);
            history.push_back(residual_norm(coarse, n_fine, split));
        }
        return history;
    }

private:
    StateVector propagate_fine(const StateVector& from, int i_begin, int i_end) const {
        StateVector u = from;
        for (int i = i_begin + 1; i <= i_end; ++i) {
            StateVector next = app_.step(0, i, u);
            if (!app_.forcing_folded()) next.add(app_.forcing(0, i));
            u = std::move(next);
        }
        return u;
    }

    StateVector coarse_step(const StateVector& from, int j) const {
        StateVector next = app_.step(1, j, from);
        if (!app_.forcing_folded()) next.add(app_.forcing(1, j));
        return next;
    }

    double residual_norm(const std::vector<StateVector>& coarse, int n_fine,
                         const CfSplit& split) const {
        // expand to the fine grid by interval propagation
        std::vector<StateVector> u(static_cast<std::size_t>(n_fine));
        for (std::size_t j = 0; j < split.c_points.size(); ++j) {
            u[static_cast<std::size_t>(split.c_points[j])] = coarse[j];
        }
        for (const auto& run : split.intervals) {
            for (int i = run.first; i <= run.last; ++i) {
                StateVector next = app_.step(0, i, u[static_cast<std::size_t>(i - 1)]);
                if (!app_.forcing_folded()) next.add(app_.forcing(0, i));
                u[static_cast<std::size_t>(i)] = std::move(next);
            }
        }
        double sum = 0.0;
        for (int i = 0; i < n_fine; ++i) {
            StateVector r;
            if (i == 0) {
                r = app_.initial_condition();
                r.sub(u[0]);
            } else {
                r = app_.step(0, i, u[static_cast<std::size_t>(i - 1)]);
                if (!app_.forcing_folded()) r.add(app_.forcing(0, i));
                r.sub(u[static_cast<std::size_t>(i)]);
            }
            sum += r.norm2_squared();
        }
        return std::sqrt(sum);
    }

    const Application& app_;
    const Hierarchy& hier_;
};

/// Brute-force dense assembly of the two-level error propagator
/// (I - sum_p P_S^(p) (A_c^(p))^{-1} R_I^(p) A) P R_I for a scalar problem,
/// built directly from the operator definitions.
inline Eigen::MatrixXd brute_force_propagator(double phi, double psi, int m, int k,
                                              int n_t) {
    const int n = n_t + 1;
    const int n_c = n_t / m + 1;

    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int i = 1; i < n; ++i) a(i, i - 1) = -phi;

    // ideal interpolation and injection
    Eigen::MatrixXd interp = Eigen::MatrixXd::Zero(n, n_c);
    for (int j = 0; j < n_c; ++j) {
        double power = 1.0;
        for (int i = j * m; i < std::min(n, (j + 1) * m); ++i) {
            interp(i, j) = power;
            power *= phi;
        }
    }
    Eigen::MatrixXd inject = Eigen::MatrixXd::Zero(n_c, n);
    for (int j = 0; j < n_c; ++j) inject(j, j * m) = 1.0;

    Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0; p < n_c; ++p) {
        const int lo = std::max(0, p - k + 1);
        const int size = p - lo + 1;

        Eigen::MatrixXd r_p = Eigen::MatrixXd::Zero(size, n);
        for (int s = 0; s < size; ++s) r_p(s, (lo + s) * m) = 1.0;

        Eigen::MatrixXd a_c = Eigen::MatrixXd::Identity(size, size);
        for (int s = 1; s < size; ++s) a_c(s, s - 1) = -psi;

        // selective ideal interpolation: only the window's last column acts
        Eigen::MatrixXd p_s = Eigen::MatrixXd::Zero(n, size);
        double power = 1.0;
        for (int i = p * m; i < std::min(n, (p + 1) * m); ++i) {
            p_s(i, size - 1) = power;
            power *= phi;
        }
        correction += p_s * a_c.inverse() * r_p * a;
    }

    return (Eigen::MatrixXd::Identity(n, n) - correction) * interp * inject;
}

} // namespace tempo::testing
