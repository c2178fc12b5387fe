#pragma once

#include "tempo/errors.hpp"

namespace tempo {

/// Uniformly spaced temporal grid t_i = t0 + i*dt, i = 0..n_points-1.
struct TimeGrid {
    double t0 = 0.0;
    double tf = 0.0;
    int n_points = 0;  ///< N_t + 1 points
    double dt = 0.0;

    static TimeGrid make(double t0, double tf, int n_points) {
        if (n_points < 2) throw ConfigError("TimeGrid: need at least 2 points");
        if (!(tf > t0)) throw ConfigError("TimeGrid: tf must exceed t0");
        TimeGrid g;
        g.t0 = t0;
        g.tf = tf;
        g.n_points = n_points;
        g.dt = (tf - t0) / static_cast<double>(n_points - 1);
        return g;
    }

    int n_steps() const { return n_points - 1; }

    double point(int i) const { return t0 + dt * i; }
};

} // namespace tempo
