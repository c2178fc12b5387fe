#include "tempo/kernels.hpp"

#include <cmath>

namespace tempo::kernels {

void f_relax(const Application& app, int level, const CfSplit& split,
             std::vector<StateVector>& u, const std::vector<StateVector>& g,
             std::size_t first_interval, std::size_t count) {
    for (std::size_t n = first_interval; n < first_interval + count; ++n) {
        const CfSplit::FInterval& run = split.intervals[n];
        for (int i = run.first; i <= run.last; ++i) {
            u[i] = app.step(level, i, u[i - 1]);
            u[i].add(g[i]);
        }
    }
}

void c_relax(const Application& app, int level, const CfSplit& split,
             std::vector<StateVector>& u, const std::vector<StateVector>& g,
             std::size_t first_c, std::size_t count) {
    for (std::size_t n = first_c; n < first_c + count; ++n) {
        const int c = split.c_points[n];
        if (c == 0) continue;  // the initial condition is never relaxed
        u[c] = app.step(level, c, u[c - 1]);
        u[c].add(g[c]);
    }
}

void residual(const Application& app, int level,
              const std::vector<StateVector>& u, const std::vector<StateVector>& g,
              std::vector<StateVector>& r, int first, int count) {
    for (int i = first; i < first + count; ++i) {
        if (i == 0) {
            r[0] = g[0];
            r[0].sub(u[0]);
        } else {
            r[i] = app.step(level, i, u[i - 1]);
            r[i].add(g[i]);
            r[i].sub(u[i]);
        }
    }
}

std::vector<StateVector> restrict_injection(const std::vector<StateVector>& values,
                                            std::span<const int> c_indices) {
    std::vector<StateVector> coarse;
    coarse.reserve(c_indices.size());
    for (int c : c_indices) coarse.push_back(values[c]);
    return coarse;
}

StateVector solve_window_linear(const Application& app, int level, int lo_index,
                                std::span<const StateVector> r_window) {
    StateVector e = r_window[0];
    for (std::size_t s = 1; s < r_window.size(); ++s) {
        e = app.step(level, lo_index + static_cast<int>(s), e);
        e.add(r_window[s]);
    }
    return e;
}

StateVector solve_window_fas(const Application& app, int level, int lo_index,
                             std::span<const StateVector> v_window,
                             std::span<const StateVector> r_window) {
    StateVector u = v_window[0];
    u.add(r_window[0]);
    for (std::size_t s = 1; s < v_window.size(); ++s) {
        const int idx = lo_index + static_cast<int>(s);
        StateVector next = app.step(level, idx, u);
        next.add(v_window[s]);
        next.sub(app.step(level, idx, v_window[s - 1]));
        next.add(r_window[s]);
        u = std::move(next);
    }
    return u;
}

StateVector solve_window_forward(const Application& app, int level, int lo_index,
                                 const StateVector& first_value, int size,
                                 std::span<const StateVector> g_window) {
    StateVector u = first_value;
    for (int s = 1; s < size; ++s) {
        u = app.step(level, lo_index + s, u);
        if (!g_window.empty()) u.add(g_window[s]);
    }
    return u;
}

std::vector<double> point_squares(const std::vector<StateVector>& r, int first, int count) {
    std::vector<double> sq;
    sq.reserve(static_cast<std::size_t>(count));
    for (int i = first; i < first + count; ++i) sq.push_back(r[i].norm2_squared());
    return sq;
}

double norm_from_squares(std::span<const double> squares) {
    double s = 0.0;
    for (double x : squares) s += x;
    return std::sqrt(s);
}

} // namespace tempo::kernels
