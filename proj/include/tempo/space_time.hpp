#pragma once

#include <vector>

#include "tempo/state_vector.hpp"

namespace tempo {

/// Per-level space-time data.
///
///  u  solution values
///  g  the level's current system right-hand side: the problem forcing on
///     level 0 (or just the initial condition in slot 0 when forcing is
///     folded), the full-approximation right-hand side on relaxed coarse
///     levels
///  v  restricted approximation (levels >= 1)
///  r  restricted residual (levels >= 1); the local window solves consume
///     (v, r) because the truncated window system differs from the global
///     one in its first row
struct LevelState {
    std::vector<StateVector> u;
    std::vector<StateVector> g;
    std::vector<StateVector> v;
    std::vector<StateVector> r;
};

struct SpaceTimeState {
    std::vector<LevelState> levels;

    LevelState& level(int l) { return levels[static_cast<std::size_t>(l)]; }
    const LevelState& level(int l) const { return levels[static_cast<std::size_t>(l)]; }
};

} // namespace tempo
