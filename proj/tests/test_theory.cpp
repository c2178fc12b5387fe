#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "support.hpp"
#include "tempo/state_vector.hpp"
#include "tempo/theory.hpp"

using namespace tempo;
using namespace tempo::theory;

namespace {

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// Deterministic values in (lo, hi) built on the library's seeded generator.
double sample(std::uint64_t seed, double lo, double hi) {
    const double unit = 0.5 * (random_state(seed, 1)[0] + 1.0);  // [0, 1)
    return lo + unit * (hi - lo);
}

} // namespace

TEST_CASE("exact-solve propagator has powers of phi on the k-th block subdiagonal") {
    // phi = 0.5, m = 2, k = 2, N_t = 8: nonzero entries are exactly
    // phi^4 and phi^5, in the C-columns k blocks back.
    const PropagatorMatrix e = error_propagator_exact(0.5, 2, 2, 8);
    REQUIRE(e.matrix.rows() == 9);

    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(9, 9);
    const double phi4 = std::pow(0.5, 4), phi5 = std::pow(0.5, 5);
    expected(4, 0) = phi4;
    expected(5, 0) = phi5;
    expected(6, 2) = phi4;
    expected(7, 2) = phi5;
    expected(8, 4) = phi4;
    CHECK(max_abs_diff(e.matrix, expected) == 0.0);
}

TEST_CASE("exact-solve propagator vanishes for the full window and for phi = 0") {
    CHECK(error_propagator_exact(0.7, 2, 5, 8).matrix.cwiseAbs().maxCoeff() == 0.0);
    CHECK(error_propagator_exact(0.0, 2, 2, 8).matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("approximate propagator matches the brute-force operator product") {
    const double phi = 0.6, psi = 0.3;
    const PropagatorMatrix ea = error_propagator_approx(phi, psi, 2, 2, 8);
    const Eigen::MatrixXd brute = tempo::testing::brute_force_propagator(phi, psi, 2, 2, 8);
    CHECK(max_abs_diff(ea.matrix, brute) < 1e-12);
}

TEST_CASE("approximate propagator reduces to the exact one when psi = phi^m") {
    for (int m : {2, 3}) {
        for (int k : {2, 3}) {
            const double phi = 0.8;
            const double psi = std::pow(phi, m);
            const int n_t = m * 7;
            const PropagatorMatrix ea = error_propagator_approx(phi, psi, m, k, n_t);
            const PropagatorMatrix ee = error_propagator_exact(phi, m, k, n_t);
            CHECK(max_abs_diff(ea.matrix, ee.matrix) < 1e-14);
        }
    }
}

TEST_CASE("approximate propagator equals brute force across (m, k, N_t) sweeps") {
    int checked = 0;
    for (int m : {2, 3, 4}) {
        for (int k : {2, 3, 4}) {
            for (int blocks = k + 1; m * blocks <= 24; ++blocks) {
                const int n_t = m * blocks;
                for (int trial = 0; trial < 5; ++trial) {
                    const std::uint64_t seed =
                        static_cast<std::uint64_t>(((m * 10 + k) * 100 + blocks) * 10 + trial);
                    const double phi = sample(seed, -0.95, 0.95);
                    const double psi = sample(seed + 5000, -0.95, 0.95);
                    const PropagatorMatrix ea = error_propagator_approx(phi, psi, m, k, n_t);
                    const Eigen::MatrixXd brute =
                        tempo::testing::brute_force_propagator(phi, psi, m, k, n_t);
                    CHECK(max_abs_diff(ea.matrix, brute) < 1e-12);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("matrix-valued integrators assemble consistently with scalars blockwise") {
    Eigen::MatrixXd phi(2, 2), psi(2, 2);
    phi << 0.5, 0.1, 0.0, 0.4;
    psi << 0.3, 0.05, 0.0, 0.2;
    const PropagatorMatrix ea = error_propagator_approx(phi, psi, 2, 2, 6);
    REQUIRE(ea.matrix.rows() == 14);

    // point (4, 2) sits at block distance 1: Phi^0 (Phi^2 - Psi)
    const Eigen::MatrixXd z0 = ea.matrix.block(8, 4, 2, 2);
    CHECK(max_abs_diff(z0, phi * phi - psi) < 1e-14);
    // point (4, 0) sits at block distance k = 2: Phi^0 Psi^{k-1} Phi^2
    const Eigen::MatrixXd w = ea.matrix.block(8, 0, 2, 2);
    CHECK(max_abs_diff(w, psi * phi * phi) < 1e-14);
    // one fine row below, everything is premultiplied by Phi
    const Eigen::MatrixXd z0_row1 = ea.matrix.block(10, 4, 2, 2);
    CHECK(max_abs_diff(z0_row1, phi * (phi * phi - psi)) < 1e-14);
}

TEST_CASE("cc block carries the documented Toeplitz subdiagonals") {
    const std::complex<double> lambda(0.9, 0.1), mu(0.5, -0.2);
    const int m = 3, k = 3, p = 8;
    const Eigen::MatrixXcd e = cc_block(lambda, mu, m, k, p);

    const std::complex<double> lam_m = std::pow(lambda, m);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            const int d = i - j;
            std::complex<double> expected(0.0, 0.0);
            if (d >= 1 && d < k) expected = std::pow(mu, d - 1) * (lam_m - mu);
            if (d == k) expected = std::pow(mu, k - 1) * lam_m;
            CHECK(std::abs(e(i, j) - expected) < 1e-15);
        }
    }
}

TEST_CASE("cc block degenerates as the defect or the coarse eigenvalue vanishes") {
    // lambda^m = mu: only the k-th subdiagonal survives
    const double lambda = 0.9;
    const double mu = std::pow(lambda, 2);
    const Eigen::MatrixXcd e = cc_block(lambda, mu, 2, 3, 6);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            const int d = i - j;
            if (d == 3) {
                CHECK(std::abs(e(i, j) - std::pow(mu, 2) * mu) < 1e-15);
            } else {
                CHECK(std::abs(e(i, j)) == 0.0);
            }
        }
    }

    // mu = 0: single first subdiagonal lambda^m, zero k-th subdiagonal
    const Eigen::MatrixXcd z = cc_block(0.9, 0.0, 2, 3, 6);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            const int d = i - j;
            if (d == 1) {
                CHECK(std::abs(z(i, j) - std::pow(0.9, 2)) < 1e-15);
            } else {
                CHECK(std::abs(z(i, j)) == 0.0);
            }
        }
    }
}

TEST_CASE("cc block is the C-point principal submatrix of the approximate propagator") {
    const double phi = 0.7, psi = 0.4;
    const int m = 2, k = 3, n_t = 14;  // blocks T_0..T_7
    const PropagatorMatrix ea = error_propagator_approx(phi, psi, m, k, n_t);
    const Eigen::MatrixXcd cc = cc_block(phi, psi, m, k, 8);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            CHECK(std::abs(ea.matrix(i * m, j * m) - cc(i, j).real()) < 1e-14);
        }
    }
}

TEST_CASE("bound formula: vanishing defect leaves the truncation term") {
    // lambda^m = mu with |mu| = 0.81, k = 3: bound = |mu|^{k-1} |lambda^m| = 0.81^3
    const double lambda = 0.9;
    EigenPair pair{lambda, lambda * lambda};
    const BoundTerms terms = cc_bound_terms(pair, 2, 3);
    CHECK(terms.reduction_term == doctest::Approx(0.0));
    CHECK(terms.truncation_term == doctest::Approx(std::pow(0.81, 3)).epsilon(1e-14));
}

TEST_CASE("bound formula at mu = 0 reduces to |lambda^m|") {
    EigenPair pair{0.9, 0.0};
    const BoundTerms terms = cc_bound_terms(pair, 4, 2);
    CHECK(terms.total() == doctest::Approx(std::pow(0.9, 4)).epsilon(1e-14));
}

TEST_CASE("bound rejects coarse eigenvalues on or outside the unit circle") {
    CHECK_THROWS_AS(cc_bound_terms(EigenPair{0.5, 1.0}, 2, 2), ConfigError);
    CHECK_THROWS_AS(cc_bound_terms(EigenPair{0.5, {0.8, 0.7}}, 2, 2), ConfigError);
}

TEST_CASE("truncation term reproduces 0.99^500 for km = 500 with matched operators") {
    // |lambda| = |mu^{1/m}| = 0.99, mu = lambda^m, m * k = 500
    const int m = 20, k = 25;
    const double lambda = 0.99;
    const std::complex<double> mu = std::pow(std::complex<double>(lambda, 0.0), m);
    const BoundTerms terms = cc_bound_terms(EigenPair{lambda, mu}, m, k);
    CHECK(terms.truncation_term ==
          doctest::Approx(std::pow(0.99, 500)).epsilon(1e-12));
    CHECK(terms.truncation_term == doctest::Approx(0.00657).epsilon(1e-3));
}

TEST_CASE("operator norm of the cc block never exceeds the bound") {
    int tested = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const double radius_l = sample(trial * 4 + 1, 0.0, 0.999);
        const double angle_l = sample(trial * 4 + 2, 0.0, 6.283185307179586);
        const double radius_m = sample(trial * 4 + 3, 0.0, 0.999);
        const double angle_m = sample(trial * 4 + 4, 0.0, 6.283185307179586);
        const EigenPair pair{std::polar(radius_l, angle_l), std::polar(radius_m, angle_m)};
        for (int m : {2, 8}) {
            for (int k : {2, 4}) {
                const double bound = cc_bound_terms(pair, m, k).total();
                const double norm = operator_norm(cc_block(pair.lambda, pair.mu, m, k, 16));
                CHECK(norm <= bound * (1.0 + 1e-12) + 1e-15);
                ++tested;
            }
        }
    }
    CHECK(tested == 800);
}

TEST_CASE("with matched operators the cc block is nilpotent within ceil(P/k) powers") {
    for (int p : {8, 16}) {
        for (int k : {2, 4}) {
            const double lambda = 0.97;
            const std::complex<double> mu = std::pow(std::complex<double>(lambda, 0.0), 2);
            const int ell = (p + k - 1) / k;
            CHECK(error_subdiagonal_cleared(lambda, mu, 2, k, p, ell));
            CHECK_FALSE(error_subdiagonal_cleared(lambda, mu, 2, k, p, ell - 1));
        }
    }
}

TEST_CASE("the full window clears the error subdiagonal immediately") {
    // k >= P + 1: no k-th subdiagonal fits inside the matrix
    CHECK(error_subdiagonal_cleared(0.9, 0.81, 2, 9, 8, 1));
}
