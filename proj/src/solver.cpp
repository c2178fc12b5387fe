#include "tempo/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "tempo/errors.hpp"

namespace tempo {

class PhaseTimer {
public:
    PhaseTimer(CycleDriver& driver, std::string phase)
        : driver_(driver), phase_(std::move(phase)),
          start_(std::chrono::steady_clock::now()) {}

    ~PhaseTimer() {
        const double s = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_).count();
        driver_.timings_[phase_] += s;
        driver_.ex_.record_phase(driver_.current_iter_, phase_, s);
    }

private:
    CycleDriver& driver_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<LevelSpec> make_level_specs(const Hierarchy& hier, int coarse_substeps) {
    if (coarse_substeps < 1) throw ConfigError("coarse_substeps must be at least 1");
    std::vector<LevelSpec> specs;
    for (int l = 0; l < hier.n_levels(); ++l) {
        const TimeGrid& g = hier.level(l);
        LevelSpec s;
        s.dt = g.dt;
        s.t0 = g.t0;
        s.n_points = g.n_points;
        s.substeps = (l == hier.coarsest()) ? coarse_substeps : 1;
        specs.push_back(s);
    }
    return specs;
}

CycleDriver::CycleDriver(const Application& app, const Hierarchy& hier,
                         const SolverConfig& cfg, Execution& ex)
    : app_(app), hier_(hier), cfg_(cfg), ex_(ex) {
    validate();
}

void CycleDriver::validate() const {
    if (!(cfg_.tol > 0.0)) throw ConfigError("solver: tol must be positive");
    if (cfg_.max_iters < 1) throw ConfigError("solver: max_iters must be at least 1");
    if (cfg_.relaxation == Relaxation::FCF && cfg_.nu < 1) {
        throw ConfigError("solver: FCF relaxation needs nu >= 1");
    }
    if (cfg_.mode == CycleMode::TwoLevel) {
        if (hier_.n_levels() != 2) {
            throw ConfigError("two-level mode needs a two-level hierarchy");
        }
        if (app_.forcing_folded()) {
            throw ConfigError("two-level residual-correction mode needs explicit forcing");
        }
    } else {
        if (!app_.forcing_folded()) {
            throw ConfigError("FAS cycles need forcing folded into the integrator");
        }
    }
    if (cfg_.norm == NormKind::FunctionalChange && !cfg_.functional) {
        throw ConfigError("functional-change stopping norm needs a functional");
    }
    if (cfg_.initial_guess == InitialGuess::Provided &&
        static_cast<int>(cfg_.provided.size()) != hier_.level(0).n_points) {
        throw ConfigError("provided initial guess has the wrong number of points");
    }
    if (!app_.configured() || app_.n_levels() != hier_.n_levels()) {
        throw ConfigError("application is not configured for this hierarchy");
    }
}

void CycleDriver::setup() {
    if (setup_done_) return;

    const int L = hier_.n_levels();
    state_.levels.resize(static_cast<std::size_t>(L));
    r_scratch_.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        const std::size_t n = static_cast<std::size_t>(hier_.level(l).n_points);
        state_.level(l).u.resize(n);
        state_.level(l).g.resize(n);
        if (l >= 1) {
            state_.level(l).v.resize(n);
            state_.level(l).r.resize(n);
        }
        r_scratch_[static_cast<std::size_t>(l)].resize(n);
    }

    fill_initial_guess();
    fill_level_rhs(0);

    if (cfg_.norm == NormKind::FunctionalChange) {
        const CfSplit& split = hier_.split(0);
        prev_functional_.clear();
        for (std::size_t j = ex_.first_c(0); j < ex_.first_c(0) + ex_.n_c(0); ++j) {
            prev_functional_.push_back(cfg_.functional(state_.level(0).u[split.c_points[j]]));
        }
    }
    setup_done_ = true;
}

void CycleDriver::fill_initial_guess() {
    const int n = app_.vector_size();
    std::vector<StateVector>& u = state_.level(0).u;
    const int first = ex_.first_point(0);
    const int count = ex_.n_points(0);
    for (int i = first; i < first + count; ++i) {
        if (i == 0) {
            u[0] = app_.initial_condition();
            continue;
        }
        switch (cfg_.initial_guess) {
            case InitialGuess::Constant:
                u[i] = cfg_.constant_value ? *cfg_.constant_value : app_.initial_condition();
                break;
            case InitialGuess::Random:
                u[i] = random_state(cfg_.seed + static_cast<std::uint64_t>(i),
                                    static_cast<std::size_t>(n));
                break;
            case InitialGuess::Provided:
                u[i] = cfg_.provided[static_cast<std::size_t>(i)];
                break;
        }
    }
}

void CycleDriver::fill_level_rhs(int level) {
    LevelState& ls = state_.level(level);
    const int first = ex_.first_point(level);
    const int count = ex_.n_points(level);
    const bool folded = app_.forcing_folded();
    for (int i = first; i < first + count; ++i) {
        if (i == 0) {
            ls.g[0] = app_.initial_condition();
        } else if (folded) {
            ls.g[i] = StateVector::zeros(static_cast<std::size_t>(app_.vector_size()));
        } else {
            ls.g[i] = app_.forcing(level, i);
        }
    }
}

void CycleDriver::f_relax_own(int level) {
    const CfSplit& split = hier_.split(level);
    LevelState& ls = state_.level(level);
    ex_.sync_left_edge(level, ls.u);
    kernels::f_relax(app_, level, split, ls.u, ls.g, ex_.first_interval(level),
                     ex_.n_intervals(level));
}

void CycleDriver::relax_level(int level) {
    PhaseTimer t(*this, "relax");
    f_relax_own(level);
    if (cfg_.relaxation == Relaxation::FCF) {
        const CfSplit& split = hier_.split(level);
        LevelState& ls = state_.level(level);
        for (int s = 0; s < cfg_.nu; ++s) {
            kernels::c_relax(app_, level, split, ls.u, ls.g, ex_.first_c(level),
                             ex_.n_c(level));
            f_relax_own(level);
        }
    }
}

StateVector CycleDriver::residual_at(int level, int i) const {
    const LevelState& ls = state_.level(level);
    if (i == 0) {
        StateVector r = ls.g[0];
        r.sub(ls.u[0]);
        return r;
    }
    StateVector r = app_.step(level, i, ls.u[i - 1]);
    r.add(ls.g[i]);
    r.sub(ls.u[i]);
    return r;
}

void CycleDriver::residual_own(int level, std::vector<StateVector>& r) {
    LevelState& ls = state_.level(level);
    ex_.sync_left_edge(level, ls.u);
    kernels::residual(app_, level, ls.u, ls.g, r, ex_.first_point(level),
                      ex_.n_points(level));
}

void CycleDriver::restrict_to(int level) {
    PhaseTimer t(*this, "restrict");
    const CfSplit& split = hier_.split(level);
    const LevelState& fine = state_.level(level);
    LevelState& coarse = state_.level(level + 1);
    const bool coarse_is_relaxed = (level + 1) != hier_.coarsest();

    for (std::size_t j = ex_.first_c(level); j < ex_.first_c(level) + ex_.n_c(level); ++j) {
        const int c = split.c_points[j];
        coarse.u[j] = fine.u[c];
        coarse.v[j] = fine.u[c];
        coarse.r[j] = residual_at(level, c);
        if (coarse_is_relaxed) {
            // Full-approximation right-hand side of the coarse system,
            // g_j = A(v)_j + r_j, needed wherever the coarse level is relaxed.
            if (j == 0) {
                coarse.g[0] = coarse.v[0];
                coarse.g[0].add(coarse.r[0]);
            } else {
                // previous C value: own point or the synced left-edge slot
                const StateVector& v_prev = fine.u[split.c_points[j - 1]];
                StateVector b = coarse.v[j];
                b.sub(app_.step(level + 1, static_cast<int>(j), v_prev));
                b.add(coarse.r[j]);
                coarse.g[j] = std::move(b);
            }
        }
    }
}

void CycleDriver::coarsest_fas() {
    const int lc = hier_.coarsest();
    LevelState& ls = state_.level(lc);

    std::map<int, std::vector<StateVector>> own;
    const int first = ex_.first_point(lc);
    const int count = ex_.n_points(lc);
    for (int p = first; p < first + count; ++p) own[p] = {ls.v[p], ls.r[p]};

    std::map<int, std::vector<StateVector>> window;
    {
        PhaseTimer t(*this, "exchange");
        window = ex_.exchange_windows(lc, own);
    }

    PhaseTimer t(*this, "coarse");
    for (int p = first; p < first + count; ++p) {
        const LocalCoarseGrid grid = hier_.local_grid(p);
        std::vector<StateVector> v_win, r_win;
        v_win.reserve(static_cast<std::size_t>(grid.size()));
        r_win.reserve(static_cast<std::size_t>(grid.size()));
        for (int j = grid.lo; j <= p; ++j) {
            const std::vector<StateVector>& payload = window.at(j);
            v_win.push_back(payload[0]);
            r_win.push_back(payload[1]);
        }
        ls.u[p] = kernels::solve_window_fas(app_, lc, grid.lo, v_win, r_win);
    }
}

void CycleDriver::coarsest_linear() {
    LevelState& coarse = state_.level(1);
    const CfSplit& split = hier_.split(0);
    LevelState& fine = state_.level(0);

    std::map<int, std::vector<StateVector>> own;
    const int first = ex_.first_point(1);
    const int count = ex_.n_points(1);
    for (int p = first; p < first + count; ++p) own[p] = {coarse.r[p]};

    std::map<int, std::vector<StateVector>> window;
    {
        PhaseTimer t(*this, "exchange");
        window = ex_.exchange_windows(1, own);
    }

    PhaseTimer t(*this, "coarse");
    for (int p = first; p < first + count; ++p) {
        const LocalCoarseGrid grid = hier_.local_grid(p);
        std::vector<StateVector> r_win;
        r_win.reserve(static_cast<std::size_t>(grid.size()));
        for (int j = grid.lo; j <= p; ++j) r_win.push_back(window.at(j)[0]);
        const StateVector e = kernels::solve_window_linear(app_, 1, grid.lo, r_win);
        fine.u[split.c_points[p]].add(e);
    }
}

void CycleDriver::correct_from(int level) {
    PhaseTimer t(*this, "correct");
    const CfSplit& split = hier_.split(level);
    LevelState& fine = state_.level(level);
    LevelState& coarse = state_.level(level + 1);
    for (std::size_t j = ex_.first_c(level); j < ex_.first_c(level) + ex_.n_c(level); ++j) {
        StateVector e = coarse.u[j];
        e.sub(coarse.v[j]);
        fine.u[split.c_points[j]].add(e);
    }
    f_relax_own(level);
}

void CycleDriver::v_cycle(int level) {
    if (level == hier_.coarsest()) {
        coarsest_fas();
        return;
    }
    relax_level(level);
    restrict_to(level);
    v_cycle(level + 1);
    correct_from(level);
}

void CycleDriver::two_level_cycle() {
    relax_level(0);
    {
        PhaseTimer t(*this, "restrict");
        const CfSplit& split = hier_.split(0);
        LevelState& coarse = state_.level(1);
        for (std::size_t j = ex_.first_c(0); j < ex_.first_c(0) + ex_.n_c(0); ++j) {
            coarse.r[j] = residual_at(0, split.c_points[j]);
        }
    }
    coarsest_linear();
    {
        PhaseTimer t(*this, "correct");
        f_relax_own(0);
    }
}

void CycleDriver::cycle() {
    setup();
    if (cfg_.mode == CycleMode::TwoLevel) {
        two_level_cycle();
    } else {
        v_cycle(0);
    }
}

void CycleDriver::nested_init() {
    const int lc = hier_.coarsest();

    // Restrict the initial guess and set up each level's own right-hand side.
    for (int l = 0; l < lc; ++l) {
        const CfSplit& split = hier_.split(l);
        for (std::size_t j = ex_.first_c(l); j < ex_.first_c(l) + ex_.n_c(l); ++j) {
            state_.level(l + 1).u[j] = state_.level(l).u[split.c_points[j]];
        }
        fill_level_rhs(l + 1);
    }

    LevelState& cs = state_.level(lc);
    if (hier_.is_global_coarse_grid()) {
        ex_.chain_forward(app_, lc, cs.u, cs.g);
    } else {
        std::map<int, std::vector<StateVector>> own;
        const int first = ex_.first_point(lc);
        const int count = ex_.n_points(lc);
        for (int p = first; p < first + count; ++p) own[p] = {cs.u[p]};
        const auto window = ex_.exchange_windows(lc, own);
        for (int p = first; p < first + count; ++p) {
            const LocalCoarseGrid grid = hier_.local_grid(p);
            cs.u[p] = kernels::solve_window_forward(app_, lc, grid.lo,
                                                    window.at(grid.lo)[0], grid.size(), {});
        }
    }

    // Interpolate upward, one V-cycle per intermediate level.
    for (int l = lc - 1; l >= 0; --l) {
        const CfSplit& split = hier_.split(l);
        for (std::size_t j = ex_.first_c(l); j < ex_.first_c(l) + ex_.n_c(l); ++j) {
            state_.level(l).u[split.c_points[j]] = state_.level(l + 1).u[j];
        }
        f_relax_own(l);
        if (l >= 1) v_cycle(l);
    }
}

double CycleDriver::residual_norm() {
    setup();
    PhaseTimer t(*this, "norm");
    std::vector<StateVector>& r = r_scratch_[0];
    residual_own(0, r);
    const std::vector<double> sq =
        kernels::point_squares(r, ex_.first_point(0), ex_.n_points(0));
    return ex_.reduce_norm(0, sq);
}

double CycleDriver::stopping_norm(int iter) {
    (void)iter;
    if (cfg_.norm == NormKind::ResidualL2) return residual_norm();

    PhaseTimer t(*this, "norm");
    const CfSplit& split = hier_.split(0);
    double local_max = 0.0;
    std::size_t slot = 0;
    for (std::size_t j = ex_.first_c(0); j < ex_.first_c(0) + ex_.n_c(0); ++j, ++slot) {
        const double val = cfg_.functional(state_.level(0).u[split.c_points[j]]);
        const double prev = prev_functional_[slot];
        const double denom = std::max(std::abs(prev), 1e-300);
        local_max = std::max(local_max, std::abs(val - prev) / denom);
        prev_functional_[slot] = val;
    }
    return ex_.reduce_max(local_max);
}

ConvergenceReport CycleDriver::drive() {
    timings_.clear();
    const auto t_total = std::chrono::steady_clock::now();

    ConvergenceReport report;
    {
        PhaseTimer t(*this, "setup");
        setup();
        if (cfg_.mode == CycleMode::NestedV) nested_init();
    }

    for (int iter = 1; iter <= cfg_.max_iters; ++iter) {
        current_iter_ = iter;
        const auto t_iter = std::chrono::steady_clock::now();
        cycle();
        const double norm = stopping_norm(iter);
        report.iteration_seconds.push_back(std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t_iter).count());
        report.residual_norms.push_back(norm);
        report.iterations = iter;
        if (!std::isfinite(norm)) {
            report.stop_reason = StopReason::Diverged;
            throw DivergenceError(iter, "non-finite residual norm at iteration " +
                                            std::to_string(iter));
        }
        if (norm <= cfg_.tol) {
            report.converged = true;
            report.stop_reason = StopReason::Converged;
            break;
        }
    }
    if (!report.converged) report.stop_reason = StopReason::MaxIterations;

    report.timings = timings_;
    report.timings["total"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_total).count();
    return report;
}

// ---------------------------------------------------------------------------
// Sequential execution

SequentialExecution::SequentialExecution(const Hierarchy& hier, TraceSink trace)
    : hier_(hier), trace_(std::move(trace)) {}

int SequentialExecution::first_point(int) const { return 0; }

int SequentialExecution::n_points(int level) const { return hier_.level(level).n_points; }

std::size_t SequentialExecution::first_interval(int) const { return 0; }

std::size_t SequentialExecution::n_intervals(int level) const {
    return hier_.split(level).intervals.size();
}

std::size_t SequentialExecution::first_c(int) const { return 0; }

std::size_t SequentialExecution::n_c(int level) const {
    return hier_.split(level).c_points.size();
}

void SequentialExecution::sync_left_edge(int, std::vector<StateVector>&) {}

std::map<int, std::vector<StateVector>> SequentialExecution::exchange_windows(
    int, const std::map<int, std::vector<StateVector>>& own) {
    return own;
}

void SequentialExecution::chain_forward(const Application& app, int level,
                                        std::vector<StateVector>& u,
                                        const std::vector<StateVector>& g) {
    for (std::size_t i = 1; i < u.size(); ++i) {
        u[i] = app.step(level, static_cast<int>(i), u[i - 1]);
        u[i].add(g[i]);
    }
}

double SequentialExecution::reduce_norm(int, std::span<const double> own_squares) {
    return kernels::norm_from_squares(own_squares);
}

double SequentialExecution::reduce_max(double own) { return own; }

void SequentialExecution::record_phase(int iter, const std::string& phase, double seconds) {
    if (trace_) trace_(iter, 0, phase, seconds);
}

SolveResult solve(Application& app, const Hierarchy& hier, const SolverConfig& cfg,
                  TraceSink trace) {
    app.configure(make_level_specs(hier, cfg.coarse_substeps));
    SequentialExecution ex(hier, std::move(trace));
    CycleDriver driver(app, hier, cfg, ex);
    ConvergenceReport report = driver.drive();
    return SolveResult{std::move(driver.state()), std::move(report)};
}

} // namespace tempo
