#pragma once

#include <cmath>

#include "tempo/application.hpp"

namespace tempo::problems {

/// Scalar test equation u' = lambda * u with backward-Euler stepping,
/// u_i = u_{i-1} / (1 - lambda * dt). Zero forcing, so the problem can be
/// declared in either forcing convention.
class Dahlquist final : public Application {
public:
    explicit Dahlquist(double lambda = -1.0, double u0 = 1.0, bool folded = false)
        : lambda_(lambda), u0_(u0), folded_(folded) {}

    int vector_size() const override { return 1; }

    StateVector initial_condition() const override {
        StateVector v(1);
        v[0] = u0_;
        return v;
    }

    StateVector step(int level, int index, const StateVector& u_prev) const override {
        (void)index;
        StateVector v(1);
        v[0] = multiplier(level) * u_prev[0];
        return v;
    }

    bool forcing_folded() const override { return folded_; }

    /// Step multiplier on `level`, including coarse sub-stepping.
    double multiplier(int level) const {
        const LevelSpec& spec = this->level(level);
        const double h = spec.dt / spec.substeps;
        const double m = 1.0 / (1.0 - lambda_ * h);
        double out = m;
        for (int s = 1; s < spec.substeps; ++s) out *= m;
        return out;
    }

    double lambda() const { return lambda_; }

private:
    double lambda_;
    double u0_;
    bool folded_;
};

} // namespace tempo::problems
