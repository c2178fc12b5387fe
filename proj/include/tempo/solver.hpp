#pragma once

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "tempo/application.hpp"
#include "tempo/hierarchy.hpp"
#include "tempo/kernels.hpp"
#include "tempo/solver_config.hpp"
#include "tempo/space_time.hpp"

namespace tempo {

/// Supplies the slice of each level a driver sweeps over and the data
/// movement between slices. The sequential driver owns every point and moves
/// nothing; the simulated-rank driver owns contiguous blocks and exchanges
/// messages. Cycle arithmetic is identical either way because both flow
/// through the same kernels in the same per-point order.
class Execution {
public:
    virtual ~Execution() = default;

    virtual int rank() const = 0;

    /// Owned contiguous point range on `level` (may be empty).
    virtual int first_point(int level) const = 0;
    virtual int n_points(int level) const = 0;

    /// Owned F-interval range (indices into CfSplit::intervals).
    virtual std::size_t first_interval(int level) const = 0;
    virtual std::size_t n_intervals(int level) const = 0;

    /// Owned C-point range (indices into CfSplit::c_points).
    virtual std::size_t first_c(int level) const = 0;
    virtual std::size_t n_c(int level) const = 0;

    /// Make u[first_point(level)-1] valid before a sweep: receive the left
    /// neighbour's last point, send own last point right. No-op sequentially.
    virtual void sync_left_edge(int level, std::vector<StateVector>& u) = 0;

    /// Coarsest-level window exchange. `own` maps each owned C-point index to
    /// its payload (one or two state vectors). Returns payloads for every
    /// index in the union of the owned local windows.
    virtual std::map<int, std::vector<StateVector>> exchange_windows(
        int level, const std::map<int, std::vector<StateVector>>& own) = 0;

    /// Sequential chain u_j = step(u_{j-1}) + g_j across all slices of
    /// `level` (global coarse solve for nested iterations).
    virtual void chain_forward(const Application& app, int level,
                               std::vector<StateVector>& u,
                               const std::vector<StateVector>& g) = 0;

    /// Global residual norm from per-point squared norms of the owned slice,
    /// summed in point order across all ranks.
    virtual double reduce_norm(int level, std::span<const double> own_squares) = 0;

    /// Global max reduction (functional-change stopping norm).
    virtual double reduce_max(double own) = 0;

    /// Per-phase timing hook (`iter,rank,phase,seconds`).
    virtual void record_phase(int iter, const std::string& phase, double seconds) = 0;
};

/// Runs two-level or multilevel FAS cycles against an Execution context.
class CycleDriver {
public:
    CycleDriver(const Application& app, const Hierarchy& hier, const SolverConfig& cfg,
                Execution& ex);

    /// Iterate until the stopping criterion or max_iters; fills state/report.
    ConvergenceReport drive();

    SpaceTimeState& state() { return state_; }
    const SpaceTimeState& state() const { return state_; }

    /// One cycle of the configured kind (exposed for tests and analysis).
    void cycle();

    /// Build the level arrays and the initial guess (idempotent; drive()
    /// calls it automatically).
    void setup();

    /// Nested-iteration initial guess: coarsest solve, then interpolation
    /// upward with one V-cycle per intermediate level.
    void nested_init();

    /// Residual 2-norm over all points of level 0 for the current iterate.
    double residual_norm();

private:
    void validate() const;
    void fill_initial_guess();
    void fill_level_rhs(int level);
    void relax_level(int level);
    void f_relax_own(int level);
    StateVector residual_at(int level, int i) const;
    void residual_own(int level, std::vector<StateVector>& r);
    void restrict_to(int level);
    void coarsest_fas();
    void coarsest_linear();
    void correct_from(int level);
    void v_cycle(int level);
    void two_level_cycle();
    double stopping_norm(int iter);

    const Application& app_;
    const Hierarchy& hier_;
    const SolverConfig& cfg_;
    Execution& ex_;
    SpaceTimeState state_;
    std::vector<std::vector<StateVector>> r_scratch_;
    std::vector<double> prev_functional_;  // per own C-point, FunctionalChange norm
    std::map<std::string, double> timings_;
    bool setup_done_ = false;
    int current_iter_ = 0;

    friend class PhaseTimer;
};

struct SolveResult {
    SpaceTimeState state;
    ConvergenceReport report;
};

/// Per-level time discretization derived from the hierarchy; sub-stepping is
/// applied on the coarsest level only.
std::vector<LevelSpec> make_level_specs(const Hierarchy& hier, int coarse_substeps);

/// Sequential driver: iterates the configured cycle until the stopping
/// criterion holds on level 0 or max_iters is reached. Configures the
/// application for the hierarchy if that has not happened yet.
SolveResult solve(Application& app, const Hierarchy& hier, const SolverConfig& cfg,
                  TraceSink trace = {});

/// Execution over the whole grid in one thread of control.
class SequentialExecution final : public Execution {
public:
    explicit SequentialExecution(const Hierarchy& hier, TraceSink trace = {});

    int rank() const override { return 0; }
    int first_point(int level) const override;
    int n_points(int level) const override;
    std::size_t first_interval(int level) const override;
    std::size_t n_intervals(int level) const override;
    std::size_t first_c(int level) const override;
    std::size_t n_c(int level) const override;
    void sync_left_edge(int level, std::vector<StateVector>& u) override;
    std::map<int, std::vector<StateVector>> exchange_windows(
        int level, const std::map<int, std::vector<StateVector>>& own) override;
    void chain_forward(const Application& app, int level, std::vector<StateVector>& u,
                       const std::vector<StateVector>& g) override;
    double reduce_norm(int level, std::span<const double> own_squares) override;
    double reduce_max(double own) override;
    void record_phase(int iter, const std::string& phase, double seconds) override;

private:
    const Hierarchy& hier_;
    TraceSink trace_;
};

} // namespace tempo
