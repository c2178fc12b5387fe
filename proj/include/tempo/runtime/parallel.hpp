#pragma once

#include <chrono>
#include <functional>
#include <map>

#include "tempo/runtime/layout.hpp"
#include "tempo/runtime/transport.hpp"
#include "tempo/solver.hpp"

namespace tempo::runtime {

struct ParallelOptions {
    int workers = 1;
    std::chrono::milliseconds timeout{30000};
    TraceSink trace;
    /// Test hook: drop predicate (from, to, tag) forwarded to the transport.
    std::function<bool(int, int, int)> drop_filter;
};

/// Multi-worker driver: one thread per simulated rank, connected by ordered
/// point-to-point message queues, running the same cycle kernels as the
/// sequential driver. The residual-norm history is bit-identical to the
/// sequential driver's for any worker count; worker failures surface as
/// structured errors after all workers have unwound.
SolveResult run_parallel(Application& app, const Hierarchy& hier, const SolverConfig& cfg,
                         const ParallelOptions& opt);

using WindowPayloads = std::map<int, std::vector<StateVector>>;

/// Two-round distribution of per-C-point payloads on the coarsest level:
/// an all-gather within each group of the first decomposition, then an
/// all-gather of the accumulated sets within each group of the second.
/// Returns exactly the payloads indexed by the union of `rank`'s local
/// windows of distance k.
WindowPayloads exchange_local_windows(Transport& transport, const RankLayout& layout,
                                      const CommGroups& groups, int rank, int k,
                                      const WindowPayloads& own, int tag_round1,
                                      int tag_round2);

} // namespace tempo::runtime
