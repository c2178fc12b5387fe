#include "tempo/problems/heat1d.hpp"

#include <cmath>

#include "tempo/errors.hpp"

namespace tempo::problems {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Heat1D::Heat1D(Options opt) : opt_(opt) {
    if (opt_.n_dof < 1) throw ConfigError("heat1d: need at least one spatial unknown");
    if (!(opt_.x1 > opt_.x0)) throw ConfigError("heat1d: x1 must exceed x0");
    h_ = (opt_.x1 - opt_.x0) / static_cast<double>(opt_.n_dof + 1);
    sin_profile_.resize(static_cast<std::size_t>(opt_.n_dof));
    for (int i = 0; i < opt_.n_dof; ++i) {
        const double x = opt_.x0 + h_ * (i + 1);
        sin_profile_[static_cast<std::size_t>(i)] = std::sin(kPi * x);
    }
}

void Heat1D::on_configure() {
    factor_.clear();
    factor_.reserve(levels_.size());
    for (const LevelSpec& spec : levels_) {
        Factorization f;
        f.sub_dt = spec.dt / spec.substeps;
        f.r = f.sub_dt / (h_ * h_);
        const double a = -f.r;          // sub/super diagonal of (I + dt L)
        const double b = 1.0 + 2.0 * f.r;
        const int n = opt_.n_dof;
        f.c_prime.resize(static_cast<std::size_t>(n));
        f.inv_den.resize(static_cast<std::size_t>(n));
        double prev_c = 0.0;
        for (int i = 0; i < n; ++i) {
            const double den = b - a * prev_c;
            f.inv_den[static_cast<std::size_t>(i)] = 1.0 / den;
            prev_c = a / den;
            f.c_prime[static_cast<std::size_t>(i)] = prev_c;
        }
        factor_.push_back(std::move(f));
    }
}

void Heat1D::tridiag_solve(const Factorization& f, std::vector<double>& x) const {
    const int n = opt_.n_dof;
    const double a = -f.r;
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        prev = (x[static_cast<std::size_t>(i)] - a * prev) *
               f.inv_den[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(i)] = prev;
    }
    for (int i = n - 2; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] -=
            f.c_prime[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + 1)];
    }
}

double Heat1D::forcing_time_factor(double t) const {
    return -(std::sin(t) - kPi * kPi * std::cos(t));
}

StateVector Heat1D::propagate(int level, int index, const StateVector& u_prev,
                              bool with_forcing) const {
    const Factorization& f = factor_.at(static_cast<std::size_t>(level));
    const LevelSpec& spec = this->level(level);
    StateVector u = u_prev;
    for (int s = 1; s <= spec.substeps; ++s) {
        if (with_forcing && opt_.manufactured_forcing) {
            const double t = time_at(level, index - 1) + f.sub_dt * s;
            const double theta = f.sub_dt * forcing_time_factor(t);
            for (int i = 0; i < opt_.n_dof; ++i) {
                u[static_cast<std::size_t>(i)] +=
                    theta * sin_profile_[static_cast<std::size_t>(i)];
            }
        }
        tridiag_solve(f, u.raw());
    }
    return u;
}

StateVector Heat1D::initial_condition() const {
    StateVector v(static_cast<std::size_t>(opt_.n_dof));
    for (int i = 0; i < opt_.n_dof; ++i) {
        v[static_cast<std::size_t>(i)] = sin_profile_[static_cast<std::size_t>(i)];
    }
    return v;
}

StateVector Heat1D::step(int level, int index, const StateVector& u_prev) const {
    return propagate(level, index, u_prev, opt_.folded);
}

StateVector Heat1D::forcing(int level, int index) const {
    return propagate(level, index, StateVector::zeros(static_cast<std::size_t>(opt_.n_dof)),
                     true);
}

StateVector Heat1D::exact_solution(double t) const {
    StateVector v(static_cast<std::size_t>(opt_.n_dof));
    const double ct = std::cos(t);
    for (int i = 0; i < opt_.n_dof; ++i) {
        v[static_cast<std::size_t>(i)] = sin_profile_[static_cast<std::size_t>(i)] * ct;
    }
    return v;
}

std::vector<double> Heat1D::step_multipliers(int level) const {
    const LevelSpec& spec = this->level(level);
    const double sub_dt = spec.dt / spec.substeps;
    std::vector<double> mult;
    mult.reserve(static_cast<std::size_t>(opt_.n_dof));
    const int n = opt_.n_dof;
    for (int j = 1; j <= n; ++j) {
        const double eig = (2.0 - 2.0 * std::cos(j * kPi / (n + 1))) / (h_ * h_);
        double m = 1.0 / (1.0 + sub_dt * eig);
        double out = m;
        for (int s = 1; s < spec.substeps; ++s) out *= m;
        mult.push_back(out);
    }
    return mult;
}

} // namespace tempo::problems
