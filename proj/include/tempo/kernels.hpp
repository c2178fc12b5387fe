#pragma once

#include <span>
#include <vector>

#include "tempo/application.hpp"
#include "tempo/hierarchy.hpp"
#include "tempo/space_time.hpp"

namespace tempo::kernels {

/// F-relaxation over the F-intervals [first_interval, first_interval+count)
/// of `split`: each run is swept left to right from its C-point,
/// u_i = Phi_i(u_{i-1}) + g_i. C-point values are untouched. Runs are
/// independent of each other.
void f_relax(const Application& app, int level, const CfSplit& split,
             std::vector<StateVector>& u, const std::vector<StateVector>& g,
             std::size_t first_interval, std::size_t count);

/// C-relaxation over C-points c_points[first_c .. first_c+count): every
/// C-point i > 0 is updated from the fine point before it,
/// u_i = Phi_i(u_{i-1}) + g_i.
void c_relax(const Application& app, int level, const CfSplit& split,
             std::vector<StateVector>& u, const std::vector<StateVector>& g,
             std::size_t first_c, std::size_t count);

/// Residual r = g - A(u) over point indices [first, first+count):
/// r_0 = g_0 - u_0 and r_i = g_i - u_i + Phi_i(u_{i-1}) for i >= 1.
void residual(const Application& app, int level,
              const std::vector<StateVector>& u, const std::vector<StateVector>& g,
              std::vector<StateVector>& r, int first, int count);

/// Injection: values at the given C-point indices, order preserved.
std::vector<StateVector> restrict_injection(const std::vector<StateVector>& values,
                                            std::span<const int> c_indices);

/// Zero-seeded forward substitution of the local window's error system
/// (residual-correction form): e_lo = r_lo, e_j = Psi_j(e_{j-1}) + r_j.
/// Returns the error at the window's last point only. `lo_index` is the
/// coarse index of the first window point (the step index of window slot s
/// is lo_index + s), and r_window holds the window residuals.
StateVector solve_window_linear(const Application& app, int level, int lo_index,
                                std::span<const StateVector> r_window);

/// Full-approximation forward substitution of the local window:
/// u_lo = v_lo + r_lo, then u_j = Psi_j(u_{j-1}) + v_j - Psi_j(v_{j-1}) + r_j,
/// where r is the restricted residual. The window's first point keeps its own
/// residual equation (identity row of the truncated system). Returns the
/// updated value at the window's last point only.
StateVector solve_window_fas(const Application& app, int level, int lo_index,
                             std::span<const StateVector> v_window,
                             std::span<const StateVector> r_window);

/// Plain initial-value sweep of a window of `size` points: u_lo = first_value,
/// then u_j = Psi_j(u_{j-1}) + g_j. Used by nested iterations. g_window is
/// either empty (folded forcing) or holds `size` entries.
StateVector solve_window_forward(const Application& app, int level, int lo_index,
                                 const StateVector& first_value, int size,
                                 std::span<const StateVector> g_window);

/// Sum of squared 2-norms of r over point indices [first, first+count),
/// accumulated in index order.
std::vector<double> point_squares(const std::vector<StateVector>& r, int first, int count);

/// In-order sum of per-point squares followed by sqrt. Both drivers reduce
/// norms through this single code path so histories agree bitwise.
double norm_from_squares(std::span<const double> squares);

} // namespace tempo::kernels
