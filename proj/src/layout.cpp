#include "tempo/runtime/layout.hpp"

#include <string>

#include "tempo/errors.hpp"

namespace tempo::runtime {

int RankLayout::owner_of_fine(int i) const {
    for (int r = 0; r < workers; ++r) {
        if (i >= fine_lo[static_cast<std::size_t>(r)] &&
            i <= fine_hi[static_cast<std::size_t>(r)]) {
            return r;
        }
    }
    throw ConfigError("layout: fine point " + std::to_string(i) + " is unowned");
}

int RankLayout::owner_of_coarse(int p) const {
    for (int r = 0; r < workers; ++r) {
        if (p >= coarse_lo[static_cast<std::size_t>(r)] &&
            p <= coarse_hi[static_cast<std::size_t>(r)]) {
            return r;
        }
    }
    throw ConfigError("layout: coarse point " + std::to_string(p) + " is unowned");
}

RankLayout build_layout(const Hierarchy& hier, int workers) {
    const int n_coarse = hier.n_coarsest_points();
    if (workers < 1) throw ConfigError("layout: need at least one worker");
    if (workers > n_coarse) {
        throw ConfigError("layout: " + std::to_string(workers) +
                          " workers exceed the " + std::to_string(n_coarse) +
                          " coarsest-level points");
    }

    int stride = 1;
    for (int m : hier.coarsening_factors()) stride *= m;
    const int n_fine = hier.level(0).n_points;

    RankLayout layout;
    layout.workers = workers;

    const int base = n_coarse / workers;
    const int extra = n_coarse % workers;
    int next = 0;
    for (int r = 0; r < workers; ++r) {
        const int size = base + (r < extra ? 1 : 0);
        const int lo = next;
        const int hi = next + size - 1;
        next = hi + 1;
        layout.coarse_lo.push_back(lo);
        layout.coarse_hi.push_back(hi);
        // Fine block (T_{lo-1}, T_hi], with the trailing F-points attached to
        // the last rank and point 0 to the first.
        const int f_lo = (r == 0) ? 0 : (lo - 1) * stride + 1;
        const int f_hi = (r == workers - 1) ? n_fine - 1 : hi * stride;
        layout.fine_lo.push_back(f_lo);
        layout.fine_hi.push_back(f_hi);
    }
    return layout;
}

CommGroups build_comm_groups(int n_coarse_points, int k) {
    if (k < 1) throw ConfigError("comm groups: k must be at least 1");
    if (n_coarse_points < 1) throw ConfigError("comm groups: empty coarse grid");

    CommGroups groups;
    for (int start = 0; start < n_coarse_points; start += k) {
        std::vector<int> g;
        for (int p = start; p < std::min(start + k, n_coarse_points); ++p) g.push_back(p);
        groups.first.push_back(std::move(g));
    }
    for (int start = k - 1; start < n_coarse_points; start += k) {
        std::vector<int> g;
        for (int p = start; p < std::min(start + k, n_coarse_points); ++p) g.push_back(p);
        if (g.size() > 1) groups.second.push_back(std::move(g));
    }
    return groups;
}

} // namespace tempo::runtime
