#pragma once

#include <vector>

#include "tempo/hierarchy.hpp"

namespace tempo::runtime {

/// Contiguous fine-block ownership per simulated rank. Blocks end at a
/// coarsest-level C-point (the rank owning C-point p also owns the F-points
/// leading up to it), so residuals at owned C-points are local and each
/// F-sweep needs one value from the left neighbour. When the worker count
/// equals the coarsest point count, every rank owns exactly one coarsest
/// C-point.
struct RankLayout {
    int workers = 1;
    std::vector<int> fine_lo;    ///< first fine point per rank (inclusive)
    std::vector<int> fine_hi;    ///< last fine point per rank (inclusive)
    std::vector<int> coarse_lo;  ///< first coarsest C-index per rank
    std::vector<int> coarse_hi;  ///< last coarsest C-index per rank

    int owner_of_fine(int i) const;
    int owner_of_coarse(int p) const;
};

/// Distribute the coarsest C-points near-evenly over `workers` contiguous
/// blocks. Requires workers <= number of coarsest points.
RankLayout build_layout(const Hierarchy& hier, int workers);

/// The two group decompositions of the coarsest C-points used to distribute
/// residuals in two communication rounds: the first decomposition groups
/// {0..k-1}, {k..2k-1}, ...; the second groups {k-1..2k-2}, {2k-1..3k-2}, ...
/// (final groups possibly shorter). Groups within one decomposition are
/// pairwise disjoint.
struct CommGroups {
    std::vector<std::vector<int>> first;
    std::vector<std::vector<int>> second;
};

CommGroups build_comm_groups(int n_coarse_points, int k);

} // namespace tempo::runtime
