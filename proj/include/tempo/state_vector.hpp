#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

#include "tempo/errors.hpp"

namespace tempo {

/// State of the solution at a single time point, a dense vector in R^n.
///
/// Value semantics throughout: copying is cloning, and vectors move freely
/// between worker threads. All operations are re-entrant.
class StateVector {
public:
    StateVector() = default;

    explicit StateVector(std::size_t n, double value = 0.0) : data_(n, value) {}

    explicit StateVector(std::vector<double> data) : data_(std::move(data)) {}

    static StateVector zeros(std::size_t n) { return StateVector(n, 0.0); }

    std::size_t size() const { return data_.size(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> span() { return data_; }
    std::span<const double> span() const { return data_; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    void fill(double value) {
        for (double& x : data_) x = value;
    }

    void scale(double a) {
        for (double& x : data_) x *= a;
    }

    void add(const StateVector& other) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    }

    void sub(const StateVector& other) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    }

    /// this += a * x
    void axpy(double a, const StateVector& x) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
    }

    /// Sum of squared entries; summation runs in index order so repeated
    /// evaluation is bit-identical.
    double norm2_squared() const {
        double s = 0.0;
        for (double x : data_) s += x * x;
        return s;
    }

    double norm2() const { return std::sqrt(norm2_squared()); }

    double max_abs() const {
        double s = 0.0;
        for (double x : data_) s = std::max(s, std::abs(x));
        return s;
    }

    bool all_finite() const {
        for (double x : data_) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    }

    bool operator==(const StateVector& other) const { return data_ == other.data_; }

private:
    std::vector<double> data_;
};

namespace detail {

/// splitmix64: fixed, documented generator so seeded fills are reproducible
/// for a given binary regardless of the standard library.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double unit_interval(std::uint64_t bits) {
    // top 53 bits -> [0, 1)
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Deterministic pseudorandom state vector with entries in [-1, 1).
/// The same seed always yields the same vector.
inline StateVector random_state(std::uint64_t seed, std::size_t n) {
    if (n == 0) {
        throw ConfigError("random_state: vector dimension must be at least 1");
    }
    StateVector v(n);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = 2.0 * detail::unit_interval(detail::splitmix64(state)) - 1.0;
    }
    return v;
}

} // namespace tempo
