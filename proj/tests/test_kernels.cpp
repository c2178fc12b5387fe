#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "tempo/kernels.hpp"
#include "tempo/problems/heat1d.hpp"

using namespace tempo;
using tempo::testing::ScalarLinear;

namespace {

std::vector<StateVector> scalars(std::initializer_list<double> values) {
    std::vector<StateVector> out;
    for (double v : values) {
        StateVector s(1);
        s[0] = v;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<double> flatten(const std::vector<StateVector>& v) {
    std::vector<double> out;
    for (const StateVector& s : v) out.push_back(s[0]);
    return out;
}

ScalarLinear configured_scalar(double phi, double psi, int n_points, int m,
                               std::vector<double> forcing = {}) {
    ScalarLinear app({phi, psi}, 1.0, false, std::move(forcing));
    const Hierarchy h = build_hierarchy(TimeGrid::make(0.0, 1.0, n_points), {m}, 2);
    app.configure(make_level_specs(h, 1));
    return app;
}

} // namespace

TEST_CASE("f-relaxation sweeps each interval from its C-point") {
    ScalarLinear app = configured_scalar(0.5, 0.25, 5, 2);
    const CfSplit split = make_cf_split(5, 2);
    std::vector<StateVector> u = scalars({1, 9, 3, 9, 5});
    const std::vector<StateVector> g = scalars({0, 0, 0, 0, 0});

    kernels::f_relax(app, 0, split, u, g, 0, split.intervals.size());
    CHECK(flatten(u) == std::vector<double>{1, 0.5, 3, 1.5, 5});
}

TEST_CASE("f-relaxation with zero integrator leaves only the forcing") {
    ScalarLinear app = configured_scalar(0.0, 0.0, 5, 2);
    const CfSplit split = make_cf_split(5, 2);
    std::vector<StateVector> u = scalars({4, 7, -2, 9, 3});
    const std::vector<StateVector> g = scalars({1, 1, 1, 1, 1});

    kernels::f_relax(app, 0, split, u, g, 0, split.intervals.size());
    CHECK(flatten(u) == std::vector<double>{4, 1, -2, 1, 3});
}

TEST_CASE("f-relaxation of one interval matches sequential stepping bitwise") {
    problems::Heat1D::Options opt;
    opt.n_dof = 17;
    problems::Heat1D app(opt);
    const Hierarchy h = build_hierarchy(TimeGrid::make(0.0, 1.0, 9), {4}, 2);
    app.configure(make_level_specs(h, 1));
    const CfSplit& split = h.split(0);

    std::vector<StateVector> u(9, StateVector::zeros(17));
    std::vector<StateVector> g(9, StateVector::zeros(17));
    u[0] = app.initial_condition();
    for (int i = 1; i < 9; ++i) g[i] = app.forcing(0, i);

    // oracle: plain sequential stepping over the first interval
    std::vector<StateVector> expected{app.initial_condition()};
    for (int i = 1; i <= 3; ++i) {
        StateVector next = app.step(0, i, expected.back());
        next.add(g[i]);
        expected.push_back(next);
    }

    kernels::f_relax(app, 0, split, u, g, 0, 1);
    for (int i = 1; i <= 3; ++i) {
        CHECK(u[i].raw() == expected[static_cast<std::size_t>(i)].raw());
    }
}

TEST_CASE("cf-relaxation updates C-points from the pre-sweep state, then F-points") {
    ScalarLinear app = configured_scalar(0.5, 0.25, 5, 2);
    const CfSplit split = make_cf_split(5, 2);
    std::vector<StateVector> u = scalars({1, 0.5, 3, 1.5, 5});
    const std::vector<StateVector> g = scalars({0, 0, 0, 0, 0});

    kernels::c_relax(app, 0, split, u, g, 0, split.c_points.size());
    CHECK(flatten(u) == std::vector<double>{1, 0.5, 0.25, 1.5, 0.75});
    kernels::f_relax(app, 0, split, u, g, 0, split.intervals.size());
    CHECK(flatten(u) == std::vector<double>{1, 0.5, 0.25, 0.125, 0.75});
}

TEST_CASE("cf-relaxation with the identity integrator spreads the initial value") {
    ScalarLinear app = configured_scalar(1.0, 1.0, 5, 2);
    const CfSplit split = make_cf_split(5, 2);
    std::vector<StateVector> u = scalars({2, -1, 4, 0, 9});
    const std::vector<StateVector> g = scalars({0, 0, 0, 0, 0});

    for (int sweeps = 0; sweeps < 3; ++sweeps) {
        kernels::c_relax(app, 0, split, u, g, 0, split.c_points.size());
        kernels::f_relax(app, 0, split, u, g, 0, split.intervals.size());
    }
    CHECK(flatten(u) == std::vector<double>{2, 2, 2, 2, 2});
}

TEST_CASE("cf-relaxation leaves the exact solution unchanged") {
    std::vector<double> forcing{0.0, 0.3, -0.2, 0.7, 0.1};
    ScalarLinear app = configured_scalar(0.5, 0.25, 5, 2, forcing);
    const CfSplit split = make_cf_split(5, 2);

    std::vector<StateVector> u = tempo::testing::sequential_solution(app, 5);
    std::vector<StateVector> g;
    for (int i = 0; i < 5; ++i) g.push_back(app.forcing(0, i));
    g[0] = app.initial_condition();
    const std::vector<double> before = flatten(u);

    kernels::c_relax(app, 0, split, u, g, 0, split.c_points.size());
    kernels::f_relax(app, 0, split, u, g, 0, split.intervals.size());
    CHECK(flatten(u) == before);
}

TEST_CASE("residual of the exact solution vanishes") {
    std::vector<double> forcing{0.0, 1.0, 0.5, -2.0, 0.25};
    ScalarLinear app = configured_scalar(0.5, 0.25, 5, 2, forcing);

    std::vector<StateVector> u = tempo::testing::sequential_solution(app, 5);
    std::vector<StateVector> g;
    for (int i = 0; i < 5; ++i) g.push_back(app.forcing(0, i));
    g[0] = app.initial_condition();

    std::vector<StateVector> r(5);
    kernels::residual(app, 0, u, g, r, 0, 5);
    for (const StateVector& ri : r) CHECK(ri[0] == 0.0);
}

TEST_CASE("residual formula on a short chain") {
    ScalarLinear app = configured_scalar(0.5, 0.25, 3, 2);
    std::vector<StateVector> u = scalars({1, 0, 0});
    std::vector<StateVector> g = scalars({1, 0, 0});

    std::vector<StateVector> r(3);
    kernels::residual(app, 0, u, g, r, 0, 3);
    CHECK(flatten(r) == std::vector<double>{0, 0.5, 0});
}

TEST_CASE("residual is consistent with a dense forward solve of A u = g - r") {
    std::vector<double> forcing{0.0, 0.4, -0.3, 0.9, 0.2, -0.8, 0.15, 0.6, -0.1};
    ScalarLinear app = configured_scalar(0.7, 0.49, 9, 2, forcing);

    std::vector<StateVector> u;
    for (int i = 0; i < 9; ++i) u.push_back(random_state(100 + i, 1));
    std::vector<StateVector> g;
    for (int i = 0; i < 9; ++i) g.push_back(app.forcing(0, i));
    g[0] = app.initial_condition();

    std::vector<StateVector> r(9);
    kernels::residual(app, 0, u, g, r, 0, 9);

    // forward solve A w = g - r must recover u
    std::vector<double> w(9);
    w[0] = g[0][0] - r[0][0];
    for (int i = 1; i < 9; ++i) w[i] = 0.7 * w[i - 1] + g[i][0] - r[i][0];
    for (int i = 0; i < 9; ++i) CHECK(w[i] == doctest::Approx(u[i][0]).epsilon(1e-13));
}

TEST_CASE("injection picks C-point entries in order") {
    const std::vector<StateVector> values = scalars({10, 11, 12, 13, 14});
    const CfSplit split = make_cf_split(5, 2);
    const std::vector<StateVector> coarse =
        kernels::restrict_injection(values, split.c_points);
    CHECK(flatten(coarse) == std::vector<double>{10, 12, 14});
}

TEST_CASE("stride-1 coarsening is rejected") {
    CHECK_THROWS_AS(make_cf_split(5, 1), ConfigError);
}

TEST_CASE("zero-seeded window solve matches the global coarse solve when untruncated") {
    const double phi = 0.6, psi = 0.35;
    const int n_c = 7;
    ScalarLinear app({phi, psi}, 1.0, false);
    const Hierarchy h = build_hierarchy(TimeGrid::make(0.0, 1.0, 13), {2}, n_c);
    app.configure(make_level_specs(h, 1));

    std::vector<StateVector> r;
    for (int j = 0; j < n_c; ++j) r.push_back(random_state(7 + j, 1));

    // dense oracle: forward substitution over the whole coarse grid
    std::vector<double> e(n_c);
    e[0] = r[0][0];
    for (int j = 1; j < n_c; ++j) e[j] = psi * e[j - 1] + r[j][0];

    for (int p = 0; p < n_c; ++p) {
        const std::span<const StateVector> window(r.data(), static_cast<std::size_t>(p + 1));
        const StateVector got = kernels::solve_window_linear(app, 1, 0, window);
        CHECK(got[0] == doctest::Approx(e[p]).epsilon(1e-14));
    }
}

TEST_CASE("k=1 window solves reduce to the local residual update") {
    ScalarLinear app = configured_scalar(0.5, 0.25, 9, 2);
    StateVector r = random_state(3, 1);
    const StateVector e =
        kernels::solve_window_linear(app, 1, 4, std::span<const StateVector>(&r, 1));
    CHECK(e[0] == r[0]);

    StateVector v = random_state(4, 1);
    const StateVector u = kernels::solve_window_fas(app, 1, 4,
                                                    std::span<const StateVector>(&v, 1),
                                                    std::span<const StateVector>(&r, 1));
    CHECK(u[0] == v[0] + r[0]);
}

TEST_CASE("fas window equals linear correction for linear problems") {
    const double phi = 0.8, psi = 0.61;
    ScalarLinear app({phi, psi}, 1.0, false);
    const Hierarchy h = build_hierarchy(TimeGrid::make(0.0, 1.0, 17), {2}, 4);
    app.configure(make_level_specs(h, 1));

    std::vector<StateVector> v, r;
    for (int j = 0; j < 4; ++j) {
        v.push_back(random_state(40 + j, 1));
        r.push_back(random_state(50 + j, 1));
    }
    const StateVector u_new = kernels::solve_window_fas(app, 1, 2, v, r);
    const StateVector e = kernels::solve_window_linear(app, 1, 2, r);
    CHECK(u_new[0] - v[3][0] == doctest::Approx(e[0]).epsilon(1e-13));
}
