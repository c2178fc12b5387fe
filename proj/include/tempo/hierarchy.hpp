#pragma once

#include <vector>

#include "tempo/time_grid.hpp"

namespace tempo {

/// CF-splitting of one level: C-points at every m-th index, F-points grouped
/// into maximal runs, each preceded by its C-point. If the point count is not
/// a multiple of m, the trailing run after the last C-point is shorter.
struct CfSplit {
    int m = 0;

    std::vector<int> c_points;  ///< {0, m, 2m, ...}

    struct FInterval {
        int c_left;  ///< index of the C-point preceding the run
        int first;   ///< first F-point index
        int last;    ///< last F-point index (inclusive)
    };

    std::vector<FInterval> intervals;
};

/// Truncated local coarse grid attached to coarsest-level C-point `owner`:
/// the contiguous index window [lo, owner] of at most k points.
struct LocalCoarseGrid {
    int owner = 0;
    int lo = 0;

    int size() const { return owner - lo + 1; }
};

/// Multilevel temporal hierarchy: level 0 is finest; level l+1 keeps every
/// m_l-th point of level l. Local coarse grids of distance k live on the
/// coarsest level only; finer levels look exactly like standard reduction
/// hierarchies.
class Hierarchy {
public:
    Hierarchy(std::vector<TimeGrid> levels, std::vector<int> m, int k,
              std::vector<CfSplit> splits)
        : levels_(std::move(levels)), m_(std::move(m)), k_(k), splits_(std::move(splits)) {}

    int n_levels() const { return static_cast<int>(levels_.size()); }

    const TimeGrid& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }

    const std::vector<TimeGrid>& levels() const { return levels_; }

    const std::vector<int>& coarsening_factors() const { return m_; }

    int k() const { return k_; }

    /// CF-splitting of level l (defined for l < n_levels()-1).
    const CfSplit& split(int l) const { return splits_.at(static_cast<std::size_t>(l)); }

    int coarsest() const { return n_levels() - 1; }

    /// Number of points on the coarsest level (N_T + 1).
    int n_coarsest_points() const { return levels_.back().n_points; }

    LocalCoarseGrid local_grid(int p) const {
        LocalCoarseGrid g;
        g.owner = p;
        g.lo = p - k_ + 1 > 0 ? p - k_ + 1 : 0;
        return g;
    }

    /// True when every local grid is an untruncated prefix of the coarsest
    /// grid, i.e. the configuration reduces to Parareal/MGRIT.
    bool is_global_coarse_grid() const { return k_ >= n_coarsest_points(); }

private:
    std::vector<TimeGrid> levels_;
    std::vector<int> m_;
    int k_;
    std::vector<CfSplit> splits_;
};

/// Build the temporal hierarchy for coarsening factors m (one per transition,
/// each > 1) and local-grid distance k >= 1. Fails if any level would drop
/// below 2 points.
Hierarchy build_hierarchy(const TimeGrid& fine, const std::vector<int>& m, int k);

/// CF-splitting of a point range of size n_points under factor m.
CfSplit make_cf_split(int n_points, int m);

} // namespace tempo
