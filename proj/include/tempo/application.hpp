#pragma once

#include <span>
#include <vector>

#include "tempo/errors.hpp"
#include "tempo/state_vector.hpp"

namespace tempo {

/// Per-level time discretization handed to an Application before a solve.
struct LevelSpec {
    double dt = 0.0;   ///< step size on this level
    double t0 = 0.0;   ///< time of point 0
    int n_points = 0;  ///< number of time points on this level
    int substeps = 1;  ///< internal sub-steps per step (coarsest-level knob)
};

/// Problem contract: the state-vector algebra lives in StateVector; an
/// Application supplies the per-level one-step integrator, the forcing terms,
/// and the initial condition.
///
/// Forcing convention:
///  - forcing_folded() == false ("explicit"): step(level, i, u) applies the
///    linear part of the integrator only, and forcing(level, i) returns the
///    additive term g_i. Required by the two-level residual-correction mode.
///  - forcing_folded() == true ("folded"): step() is the full (possibly
///    nonlinear/affine) propagator with all problem forcing included, and
///    forcing() is unused. Required by the multilevel FAS modes.
///
/// step() must be deterministic for fixed inputs and safe to call
/// concurrently from multiple threads.
class Application {
public:
    virtual ~Application() = default;

    virtual int vector_size() const = 0;

    virtual StateVector initial_condition() const = 0;

    /// Propagate u_prev from point index-1 to point index on `level`.
    virtual StateVector step(int level, int index, const StateVector& u_prev) const = 0;

    /// Additive forcing g_i on `level` (explicit convention only).
    virtual StateVector forcing(int level, int index) const {
        (void)level;
        (void)index;
        return StateVector::zeros(static_cast<std::size_t>(vector_size()));
    }

    virtual bool forcing_folded() const = 0;

    /// Called once per solve with the time discretization of every level.
    void configure(std::vector<LevelSpec> levels) {
        if (levels.empty()) throw ConfigError("Application::configure: no levels");
        levels_ = std::move(levels);
        on_configure();
    }

    bool configured() const { return !levels_.empty(); }

    int n_levels() const { return static_cast<int>(levels_.size()); }

    const LevelSpec& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }

    double time_at(int l, int index) const {
        const LevelSpec& spec = level(l);
        return spec.t0 + spec.dt * index;
    }

protected:
    /// Hook for per-level setup (operator assembly, factorizations).
    virtual void on_configure() {}

    std::vector<LevelSpec> levels_;
};

} // namespace tempo
