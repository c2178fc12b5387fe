#include "tempo/runtime/parallel.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <thread>

#include "tempo/errors.hpp"

namespace tempo::runtime {

namespace {

// Message tags; per-level offsets keep distinct phases distinguishable.
constexpr int kTagHalo = 1000;
constexpr int kTagWindow1 = 2000;
constexpr int kTagWindow2 = 3000;
constexpr int kTagChain = 4000;
constexpr int kTagNormGather = 5000;
constexpr int kTagNormResult = 6000;
constexpr int kTagMaxGather = 7000;
constexpr int kTagMaxResult = 8000;

std::vector<double> pack_payloads(const WindowPayloads& payloads) {
    std::vector<double> buf;
    buf.push_back(static_cast<double>(payloads.size()));
    for (const auto& [index, vecs] : payloads) {
        buf.push_back(static_cast<double>(index));
        buf.push_back(static_cast<double>(vecs.size()));
        for (const StateVector& v : vecs) {
            buf.push_back(static_cast<double>(v.size()));
            buf.insert(buf.end(), v.raw().begin(), v.raw().end());
        }
    }
    return buf;
}

void unpack_payloads(const std::vector<double>& buf, WindowPayloads& into) {
    std::size_t pos = 0;
    const std::size_t entries = static_cast<std::size_t>(buf.at(pos++));
    for (std::size_t e = 0; e < entries; ++e) {
        const int index = static_cast<int>(buf.at(pos++));
        const std::size_t n_vecs = static_cast<std::size_t>(buf.at(pos++));
        std::vector<StateVector> vecs;
        vecs.reserve(n_vecs);
        for (std::size_t v = 0; v < n_vecs; ++v) {
            const std::size_t len = static_cast<std::size_t>(buf.at(pos++));
            std::vector<double> data(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                                     buf.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
            vecs.emplace_back(std::move(data));
        }
        into.emplace(index, std::move(vecs));
    }
}

/// Per-rank, per-level slice bookkeeping derived from the fine-block layout.
struct RankRanges {
    std::vector<int> lo, hi;  // inclusive point range; lo > hi means empty
    std::vector<std::size_t> iv_first, iv_count;
    std::vector<std::size_t> c_first, c_count;
    std::vector<int> left_src, right_dst;  // -1 when absent
};

int ceil_div(int a, int b) { return (a + b - 1) / b; }

RankRanges compute_ranges(const Hierarchy& hier, const RankLayout& layout, int rank) {
    const int L = hier.n_levels();
    RankRanges rr;
    rr.lo.resize(L);
    rr.hi.resize(L);
    rr.iv_first.assign(static_cast<std::size_t>(L), 0);
    rr.iv_count.assign(static_cast<std::size_t>(L), 0);
    rr.c_first.assign(static_cast<std::size_t>(L), 0);
    rr.c_count.assign(static_cast<std::size_t>(L), 0);
    rr.left_src.assign(static_cast<std::size_t>(L), -1);
    rr.right_dst.assign(static_cast<std::size_t>(L), -1);

    const int fine_lo = layout.fine_lo[static_cast<std::size_t>(rank)];
    const int fine_hi = layout.fine_hi[static_cast<std::size_t>(rank)];

    int stride = 1;
    for (int l = 0; l < L; ++l) {
        const int n_l = hier.level(l).n_points;
        int lo = ceil_div(fine_lo, stride);
        int hi = fine_hi / stride;
        hi = std::min(hi, n_l - 1);
        rr.lo[static_cast<std::size_t>(l)] = lo;
        rr.hi[static_cast<std::size_t>(l)] = hi;

        const bool empty = lo > hi;
        if (!empty) {
            if (lo > 0) {
                rr.left_src[static_cast<std::size_t>(l)] =
                    layout.owner_of_fine((lo - 1) * stride);
            }
            if (hi + 1 <= n_l - 1) {
                rr.right_dst[static_cast<std::size_t>(l)] =
                    layout.owner_of_fine((hi + 1) * stride);
            }
        }

        if (l < L - 1) {
            const CfSplit& split = hier.split(l);
            if (!empty) {
                const int m = split.m;
                const int cf = ceil_div(lo, m);
                const int cl = hi / m;
                if (cf <= cl) {
                    rr.c_first[static_cast<std::size_t>(l)] = static_cast<std::size_t>(cf);
                    rr.c_count[static_cast<std::size_t>(l)] =
                        static_cast<std::size_t>(cl - cf + 1);
                }
                std::size_t first = split.intervals.size();
                std::size_t count = 0;
                for (std::size_t n = 0; n < split.intervals.size(); ++n) {
                    const int f = split.intervals[n].first;
                    if (f >= lo && f <= hi) {
                        first = std::min(first, n);
                        ++count;
                    }
                }
                rr.iv_first[static_cast<std::size_t>(l)] = count > 0 ? first : 0;
                rr.iv_count[static_cast<std::size_t>(l)] = count;
            }
            stride *= split.m;
        }
    }
    return rr;
}

} // namespace

WindowPayloads exchange_local_windows(Transport& transport, const RankLayout& layout,
                                      const CommGroups& groups, int rank, int k,
                                      const WindowPayloads& own, int tag_round1,
                                      int tag_round2) {
    auto distinct_owners = [&](const std::vector<int>& group) {
        std::set<int> owners;
        for (int p : group) owners.insert(layout.owner_of_coarse(p));
        return owners;
    };

    auto round = [&](const std::vector<std::vector<int>>& decomposition,
                     const WindowPayloads& outgoing_all, bool restrict_to_group,
                     int tag, WindowPayloads& acc) {
        for (const std::vector<int>& group : decomposition) {
            const std::set<int> owners = distinct_owners(group);
            if (owners.find(rank) == owners.end() || owners.size() < 2) continue;

            WindowPayloads outgoing;
            if (restrict_to_group) {
                for (int p : group) {
                    auto it = outgoing_all.find(p);
                    if (it != outgoing_all.end()) outgoing.emplace(*it);
                }
            } else {
                outgoing = outgoing_all;
            }
            const std::vector<double> buf = pack_payloads(outgoing);
            for (int r : owners) {
                if (r != rank) transport.send(rank, r, tag, buf);
            }
            for (int r : owners) {
                if (r != rank) unpack_payloads(transport.recv(rank, r, tag), acc);
            }
        }
    };

    // Round 1: all-gather own payloads within each first-decomposition group.
    WindowPayloads acc = own;
    round(groups.first, own, /*restrict_to_group=*/true, tag_round1, acc);

    // Round 2: all-gather the round-1 accumulations within each
    // second-decomposition group.
    WindowPayloads acc2 = acc;
    round(groups.second, acc, /*restrict_to_group=*/false, tag_round2, acc2);

    // Keep exactly the indices covered by the rank's own windows.
    WindowPayloads result;
    const int c_lo = layout.coarse_lo[static_cast<std::size_t>(rank)];
    const int c_hi = layout.coarse_hi[static_cast<std::size_t>(rank)];
    for (int p = c_lo; p <= c_hi; ++p) {
        for (int j = std::max(0, p - k + 1); j <= p; ++j) {
            auto it = acc2.find(j);
            if (it == acc2.end()) {
                throw RuntimeFault(rank, "window exchange did not deliver coarse index " +
                                             std::to_string(j));
            }
            result.emplace(j, it->second);
        }
    }
    return result;
}

namespace {

class WorkerExecution final : public Execution {
public:
    WorkerExecution(int rank, Transport& transport, const RankLayout& layout,
                    const CommGroups& groups, const Hierarchy& hier, TraceSink trace,
                    std::mutex& trace_mutex)
        : rank_(rank), transport_(transport), layout_(layout), groups_(groups),
          hier_(hier), ranges_(compute_ranges(hier, layout, rank)),
          trace_(std::move(trace)), trace_mutex_(trace_mutex) {}

    int rank() const override { return rank_; }

    int first_point(int level) const override {
        return std::min(ranges_.lo[static_cast<std::size_t>(level)],
                        hier_.level(level).n_points);
    }

    int n_points(int level) const override {
        const int lo = ranges_.lo[static_cast<std::size_t>(level)];
        const int hi = ranges_.hi[static_cast<std::size_t>(level)];
        return hi >= lo ? hi - lo + 1 : 0;
    }

    std::size_t first_interval(int level) const override {
        return ranges_.iv_first[static_cast<std::size_t>(level)];
    }

    std::size_t n_intervals(int level) const override {
        return ranges_.iv_count[static_cast<std::size_t>(level)];
    }

    std::size_t first_c(int level) const override {
        return ranges_.c_first[static_cast<std::size_t>(level)];
    }

    std::size_t n_c(int level) const override {
        return ranges_.c_count[static_cast<std::size_t>(level)];
    }

    void sync_left_edge(int level, std::vector<StateVector>& u) override {
        if (n_points(level) == 0) return;
        const std::size_t l = static_cast<std::size_t>(level);
        const int right = ranges_.right_dst[l];
        if (right >= 0) {
            transport_.send(rank_, right, kTagHalo + level,
                            u[static_cast<std::size_t>(ranges_.hi[l])].raw());
        }
        const int left = ranges_.left_src[l];
        if (ranges_.lo[l] > 0 && left >= 0) {
            u[static_cast<std::size_t>(ranges_.lo[l] - 1)] =
                StateVector(transport_.recv(rank_, left, kTagHalo + level));
        }
    }

    std::map<int, std::vector<StateVector>> exchange_windows(
        int level, const std::map<int, std::vector<StateVector>>& own) override {
        return exchange_local_windows(transport_, layout_, groups_, rank_, hier_.k(), own,
                                      kTagWindow1 + level, kTagWindow2 + level);
    }

    void chain_forward(const Application& app, int level, std::vector<StateVector>& u,
                       const std::vector<StateVector>& g) override {
        if (n_points(level) == 0) return;
        const std::size_t l = static_cast<std::size_t>(level);
        const int lo = ranges_.lo[l];
        const int hi = ranges_.hi[l];
        if (lo > 0) {
            u[static_cast<std::size_t>(lo - 1)] =
                StateVector(transport_.recv(rank_, ranges_.left_src[l], kTagChain + level));
        }
        for (int j = std::max(lo, 1); j <= hi; ++j) {
            u[static_cast<std::size_t>(j)] =
                app.step(level, j, u[static_cast<std::size_t>(j - 1)]);
            u[static_cast<std::size_t>(j)].add(g[static_cast<std::size_t>(j)]);
        }
        const int right = ranges_.right_dst[l];
        if (right >= 0) {
            transport_.send(rank_, right, kTagChain + level,
                            u[static_cast<std::size_t>(hi)].raw());
        }
    }

    double reduce_norm(int level, std::span<const double> own_squares) override {
        if (rank_ != 0) {
            transport_.send(rank_, 0, kTagNormGather + level,
                            std::vector<double>(own_squares.begin(), own_squares.end()));
            return transport_.recv(rank_, 0, kTagNormResult + level).at(0);
        }
        std::vector<double> all(own_squares.begin(), own_squares.end());
        for (int r = 1; r < layout_.workers; ++r) {
            const std::vector<double> part = transport_.recv(0, r, kTagNormGather + level);
            all.insert(all.end(), part.begin(), part.end());
        }
        const double norm = kernels::norm_from_squares(all);
        for (int r = 1; r < layout_.workers; ++r) {
            transport_.send(0, r, kTagNormResult + level, {norm});
        }
        return norm;
    }

    double reduce_max(double own) override {
        if (rank_ != 0) {
            transport_.send(rank_, 0, kTagMaxGather, {own});
            return transport_.recv(rank_, 0, kTagMaxResult).at(0);
        }
        double result = own;
        for (int r = 1; r < layout_.workers; ++r) {
            result = std::max(result, transport_.recv(0, r, kTagMaxGather).at(0));
        }
        for (int r = 1; r < layout_.workers; ++r) {
            transport_.send(0, r, kTagMaxResult, {result});
        }
        return result;
    }

    void record_phase(int iter, const std::string& phase, double seconds) override {
        if (!trace_) return;
        std::lock_guard<std::mutex> lock(trace_mutex_);
        trace_(iter, rank_, phase, seconds);
    }

private:
    int rank_;
    Transport& transport_;
    const RankLayout& layout_;
    const CommGroups& groups_;
    const Hierarchy& hier_;
    RankRanges ranges_;
    TraceSink trace_;
    std::mutex& trace_mutex_;
};

} // namespace

SolveResult run_parallel(Application& app, const Hierarchy& hier, const SolverConfig& cfg,
                         const ParallelOptions& opt) {
    const RankLayout layout = build_layout(hier, opt.workers);
    const CommGroups groups = build_comm_groups(hier.n_coarsest_points(), hier.k());
    app.configure(make_level_specs(hier, cfg.coarse_substeps));

    Transport transport(opt.workers, opt.timeout);
    if (opt.drop_filter) transport.set_drop_filter(opt.drop_filter);

    const int P = opt.workers;
    std::vector<SpaceTimeState> states(static_cast<std::size_t>(P));
    std::vector<ConvergenceReport> reports(static_cast<std::size_t>(P));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(P));
    std::mutex trace_mutex;

    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(P));
    for (int rank = 0; rank < P; ++rank) {
        workers.emplace_back([&, rank]() {
            try {
                WorkerExecution ex(rank, transport, layout, groups, hier, opt.trace,
                                   trace_mutex);
                CycleDriver driver(app, hier, cfg, ex);
                reports[static_cast<std::size_t>(rank)] = driver.drive();
                states[static_cast<std::size_t>(rank)] = std::move(driver.state());
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(rank)] = std::current_exception();
                transport.abort(std::string("worker ") + std::to_string(rank) +
                                " failed: " + e.what());
            }
        });
    }
    for (std::thread& w : workers) w.join();

    // Deterministic divergence is reported as such; anything else becomes a
    // runtime fault naming the first failed rank.
    for (int rank = 0; rank < P; ++rank) {
        if (!errors[static_cast<std::size_t>(rank)]) continue;
        try {
            std::rethrow_exception(errors[static_cast<std::size_t>(rank)]);
        } catch (const DivergenceError&) {
            throw;
        } catch (const RuntimeFault&) {
            // keep scanning for the root cause; rethrown below if none found
        } catch (const std::exception& e) {
            throw RuntimeFault(rank, e.what());
        }
    }
    for (int rank = 0; rank < P; ++rank) {
        if (errors[static_cast<std::size_t>(rank)]) {
            std::rethrow_exception(errors[static_cast<std::size_t>(rank)]);
        }
    }

    // Merge the per-rank slices into one state.
    SolveResult result;
    result.report = std::move(reports[0]);
    result.state.levels.resize(static_cast<std::size_t>(hier.n_levels()));
    for (int l = 0; l < hier.n_levels(); ++l) {
        result.state.level(l).u.resize(static_cast<std::size_t>(hier.level(l).n_points));
    }
    for (int rank = 0; rank < P; ++rank) {
        const RankRanges rr = compute_ranges(hier, layout, rank);
        SpaceTimeState& st = states[static_cast<std::size_t>(rank)];
        for (int l = 0; l < hier.n_levels(); ++l) {
            const std::size_t ls = static_cast<std::size_t>(l);
            if (st.levels.empty()) continue;
            for (int i = rr.lo[ls]; i <= rr.hi[ls]; ++i) {
                result.state.level(l).u[static_cast<std::size_t>(i)] =
                    std::move(st.level(l).u[static_cast<std::size_t>(i)]);
            }
        }
    }
    return result;
}

} // namespace tempo::runtime
