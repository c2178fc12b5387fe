#pragma once

#include <stdexcept>
#include <string>

namespace tempo {

/// Invalid user configuration (grid exhausted, bad parameter, schema violation).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The iteration produced a non-finite residual norm.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int iteration, const std::string& what)
        : std::runtime_error(what), iteration_(iteration) {}

    int iteration() const { return iteration_; }

private:
    int iteration_;
};

/// A simulated-rank worker failed (timeout, dropped message, propagated panic).
class RuntimeFault : public std::runtime_error {
public:
    RuntimeFault(int rank, const std::string& what)
        : std::runtime_error("rank " + std::to_string(rank) + ": " + what), rank_(rank) {}

    int rank() const { return rank_; }

private:
    int rank_;
};

/// A nonlinear inner solve (Newton) failed to converge within its cap.
class NonlinearSolveError : public std::runtime_error {
public:
    explicit NonlinearSolveError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tempo
