#include "tempo/hierarchy.hpp"

#include <string>

namespace tempo {

CfSplit make_cf_split(int n_points, int m) {
    if (m < 2) throw ConfigError("coarsening factor must exceed 1, got " + std::to_string(m));
    if (n_points < 2) throw ConfigError("cannot split a level with fewer than 2 points");

    CfSplit split;
    split.m = m;
    const int last = n_points - 1;
    for (int c = 0; c <= last; c += m) split.c_points.push_back(c);

    for (int c : split.c_points) {
        const int first = c + 1;
        const int stop = std::min(c + m - 1, last);
        if (first <= stop) split.intervals.push_back({c, first, stop});
    }
    return split;
}

Hierarchy build_hierarchy(const TimeGrid& fine, const std::vector<int>& m, int k) {
    if (m.empty()) throw ConfigError("hierarchy needs at least one coarsening factor");
    if (k < 1) throw ConfigError("local-grid distance k must be at least 1");

    std::vector<TimeGrid> levels{fine};
    std::vector<CfSplit> splits;

    for (std::size_t l = 0; l < m.size(); ++l) {
        const TimeGrid& cur = levels.back();
        splits.push_back(make_cf_split(cur.n_points, m[l]));

        const int n_coarse = (cur.n_points - 1) / m[l] + 1;
        if (n_coarse < 2) {
            throw ConfigError("coarsening exhausts the grid at level " +
                              std::to_string(l + 1) + " (" + std::to_string(n_coarse) +
                              " points)");
        }
        TimeGrid next;
        next.t0 = cur.t0;
        next.dt = cur.dt * m[l];
        next.n_points = n_coarse;
        next.tf = cur.t0 + next.dt * (n_coarse - 1);
        levels.push_back(next);
    }

    return Hierarchy(std::move(levels), m, k, std::move(splits));
}

} // namespace tempo
