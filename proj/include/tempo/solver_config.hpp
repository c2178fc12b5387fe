#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempo/state_vector.hpp"

namespace tempo {

enum class CycleMode {
    TwoLevel,  ///< residual-correction two-level sweep (linear problems)
    VCycle,    ///< multilevel FAS V-cycles
    NestedV,   ///< nested-iteration initial guess, then FAS V-cycles
};

enum class Relaxation { F, FCF };

enum class NormKind {
    ResidualL2,        ///< discrete 2-norm of the full space-time residual
    FunctionalChange,  ///< max over C-points of relative change of a scalar functional
};

enum class InitialGuess { Constant, Random, Provided };

enum class StopReason { Converged, MaxIterations, Diverged };

/// Solve-loop configuration. The local-grid distance k lives on the
/// Hierarchy, which owns the grid structure.
struct SolverConfig {
    CycleMode mode = CycleMode::TwoLevel;
    Relaxation relaxation = Relaxation::F;
    int nu = 1;  ///< number of CF sweeps when relaxation == FCF

    int max_iters = 100;
    double tol = 1e-7;

    NormKind norm = NormKind::ResidualL2;
    /// Scalar functional for NormKind::FunctionalChange.
    std::function<double(const StateVector&)> functional;

    InitialGuess initial_guess = InitialGuess::Constant;
    std::uint64_t seed = 0;
    /// Value used at every point for InitialGuess::Constant; defaults to the
    /// initial condition when unset.
    std::optional<StateVector> constant_value;
    /// Fine-grid values for InitialGuess::Provided (index 0 is overwritten by
    /// the initial condition).
    std::vector<StateVector> provided;

    int coarse_substeps = 1;  ///< sub-steps per coarsest-level step
};

struct ConvergenceReport {
    std::vector<double> residual_norms;    ///< one entry per iteration
    std::vector<double> iteration_seconds; ///< wall time per iteration
    int iterations = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::MaxIterations;
    std::map<std::string, double> timings;  ///< phase -> seconds
};

/// Structured per-phase timing record emitted by the drivers
/// (`iter,rank,phase,seconds`).
using TraceSink = std::function<void(int iter, int rank, const std::string& phase, double seconds)>;

} // namespace tempo
