#include "tempo/problems/gray_scott.hpp"

#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <string>

#include "tempo/errors.hpp"

namespace tempo::problems {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GrayScott::GrayScott(Options opt) : opt_(opt) {
    if (opt_.n < 4) throw ConfigError("gray-scott: grid must be at least 4x4");
    if (!(opt_.domain > 0.0)) throw ConfigError("gray-scott: domain size must be positive");
    h_ = opt_.domain / opt_.n;

    const int n = opt_.n;
    const int cells = n * n;
    north_.resize(cells);
    south_.resize(cells);
    east_.resize(cells);
    west_.resize(cells);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int c = i * n + j;
            north_[c] = ((i + 1) % n) * n + j;
            south_[c] = ((i - 1 + n) % n) * n + j;
            east_[c] = i * n + (j + 1) % n;
            west_[c] = i * n + (j - 1 + n) % n;
        }
    }
}

StateVector GrayScott::initial_condition() const {
    const int n = opt_.n;
    const int cells = n * n;
    StateVector w(static_cast<std::size_t>(2 * cells));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int c = i * n + j;
            const double x = (j + 0.5) * h_;
            const double y = (i + 0.5) * h_;
            double u = 1.0;
            double v = 0.0;
            if (x >= 1.0 && x <= 1.5 && y >= 1.0 && y <= 1.5) {
                const double sx = std::sin(4.0 * kPi * x);
                const double sy = std::sin(4.0 * kPi * y);
                const double bump = 0.25 * sx * sx * sy * sy;
                u = 1.0 - 2.0 * bump;
                v = bump;
            }
            w[static_cast<std::size_t>(c)] = u;
            w[static_cast<std::size_t>(cells + c)] = v;
        }
    }
    return w;
}

void GrayScott::reaction_terms(const std::vector<double>& w, std::vector<double>& f) const {
    const int cells = opt_.n * opt_.n;
    const double inv_h2 = 1.0 / (h_ * h_);

    for (int c = 0; c < cells; ++c) {
        const double u = w[static_cast<std::size_t>(c)];
        const double v = w[static_cast<std::size_t>(cells + c)];
        const double lap_u =
            (w[static_cast<std::size_t>(north_[c])] + w[static_cast<std::size_t>(south_[c])] +
             w[static_cast<std::size_t>(east_[c])] + w[static_cast<std::size_t>(west_[c])] -
             4.0 * u) * inv_h2;
        const double lap_v = (w[static_cast<std::size_t>(cells + north_[c])] +
                              w[static_cast<std::size_t>(cells + south_[c])] +
                              w[static_cast<std::size_t>(cells + east_[c])] +
                              w[static_cast<std::size_t>(cells + west_[c])] -
                              4.0 * v) * inv_h2;
        double fu = opt_.du * lap_u;
        double fv = opt_.dv * lap_v;
        if (opt_.reaction) {
            const double uvv = u * v * v;
            fu += -uvv + opt_.feed * (1.0 - u);
            fv += uvv - (opt_.feed + opt_.kill) * v;
        }
        f[static_cast<std::size_t>(c)] = fu;
        f[static_cast<std::size_t>(cells + c)] = fv;
    }
}

StateVector GrayScott::backward_euler_solve(double dt, const StateVector& w_prev) const {
    using Sparse = Eigen::SparseMatrix<double>;
    using Triplet = Eigen::Triplet<double>;

    const int cells = opt_.n * opt_.n;
    const int dim = 2 * cells;
    const double inv_h2 = 1.0 / (h_ * h_);

    std::vector<double> w = w_prev.raw();
    std::vector<double> f(static_cast<std::size_t>(dim));

    auto residual_norm = [&](const std::vector<double>& state, Eigen::VectorXd& res) {
        reaction_terms(state, f);
        for (int i = 0; i < dim; ++i) {
            res(i) = state[static_cast<std::size_t>(i)] -
                     w_prev[static_cast<std::size_t>(i)] - dt * f[static_cast<std::size_t>(i)];
        }
        return res.norm();
    };

    Eigen::VectorXd res(dim);
    const double norm0 = residual_norm(w, res);
    const double stop = std::max(opt_.newton_tol, opt_.newton_tol * norm0);
    if (norm0 <= stop) return StateVector(std::move(w));

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(dim) * 7);

    double norm = norm0;
    for (int it = 0; it < opt_.newton_max_iters; ++it) {
        // J = I - dt * f'(w)
        trip.clear();
        for (int c = 0; c < cells; ++c) {
            const double u = w[static_cast<std::size_t>(c)];
            const double v = w[static_cast<std::size_t>(cells + c)];

            const double off = -dt * opt_.du * inv_h2;
            const double off_v = -dt * opt_.dv * inv_h2;
            trip.emplace_back(c, north_[c], off);
            trip.emplace_back(c, south_[c], off);
            trip.emplace_back(c, east_[c], off);
            trip.emplace_back(c, west_[c], off);
            trip.emplace_back(cells + c, cells + north_[c], off_v);
            trip.emplace_back(cells + c, cells + south_[c], off_v);
            trip.emplace_back(cells + c, cells + east_[c], off_v);
            trip.emplace_back(cells + c, cells + west_[c], off_v);

            double duu = 1.0 + dt * 4.0 * opt_.du * inv_h2;
            double dvv = 1.0 + dt * 4.0 * opt_.dv * inv_h2;
            if (opt_.reaction) {
                duu += dt * (v * v + opt_.feed);
                dvv += dt * (opt_.feed + opt_.kill) - dt * 2.0 * u * v;
                trip.emplace_back(c, cells + c, dt * 2.0 * u * v);
                trip.emplace_back(cells + c, c, -dt * v * v);
            }
            trip.emplace_back(c, c, duu);
            trip.emplace_back(cells + c, cells + c, dvv);
        }
        Sparse jac(dim, dim);
        jac.setFromTriplets(trip.begin(), trip.end());

        Eigen::BiCGSTAB<Sparse> linear;
        linear.setTolerance(opt_.linear_tol);
        linear.compute(jac);
        const Eigen::VectorXd delta = linear.solve(res);
        if (linear.info() != Eigen::Success) {
            throw NonlinearSolveError("gray-scott: inner linear solve failed (dt = " +
                                      std::to_string(dt) + ")");
        }
        for (int i = 0; i < dim; ++i) w[static_cast<std::size_t>(i)] -= delta(i);

        norm = residual_norm(w, res);
        if (norm <= stop) return StateVector(std::move(w));
    }
    throw NonlinearSolveError("gray-scott: Newton did not reach " +
                              std::to_string(opt_.newton_tol) + " within " +
                              std::to_string(opt_.newton_max_iters) +
                              " iterations (dt = " + std::to_string(dt) +
                              "); consider more coarse sub-steps");
}

StateVector GrayScott::step(int level, int index, const StateVector& u_prev) const {
    (void)index;
    const LevelSpec& spec = this->level(level);
    const double dt = spec.dt / spec.substeps;
    StateVector w = u_prev;
    for (int s = 0; s < spec.substeps; ++s) w = backward_euler_solve(dt, w);

    if (opt_.bounds_check) {
        for (double x : w.raw()) {
            if (!(x >= opt_.bound_lo && x <= opt_.bound_hi)) {
                throw NonlinearSolveError(
                    "gray-scott: concentration left the bounding box [" +
                    std::to_string(opt_.bound_lo) + ", " + std::to_string(opt_.bound_hi) +
                    "]");
            }
        }
    }
    return w;
}

std::pair<double, double> GrayScott::mass(const StateVector& w) const {
    const int cells = opt_.n * opt_.n;
    double mu = 0.0, mv = 0.0;
    for (int c = 0; c < cells; ++c) {
        mu += w[static_cast<std::size_t>(c)];
        mv += w[static_cast<std::size_t>(cells + c)];
    }
    return {mu, mv};
}

} // namespace tempo::problems
