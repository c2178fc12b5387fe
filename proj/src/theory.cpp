#include "tempo/theory.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "tempo/errors.hpp"

namespace tempo::theory {

namespace {

void check_shape(const Eigen::MatrixXd& phi, int m, int k, int n_t) {
    if (phi.rows() != phi.cols()) throw ConfigError("propagator: Phi must be square");
    if (m < 2) throw ConfigError("propagator: m must exceed 1");
    if (k < 2) throw ConfigError("propagator: k must exceed 1");
    if (n_t < m) throw ConfigError("propagator: grid too small");
}

std::vector<Eigen::MatrixXd> powers(const Eigen::MatrixXd& a, int up_to) {
    std::vector<Eigen::MatrixXd> p;
    p.reserve(static_cast<std::size_t>(up_to) + 1);
    p.push_back(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    for (int i = 1; i <= up_to; ++i) p.push_back(p.back() * a);
    return p;
}

/// Writes `value` into the n x n block at fine point (row_pt, col_pt).
void put_block(Eigen::MatrixXd& dest, int n, int row_pt, int col_pt,
               const Eigen::MatrixXd& value) {
    dest.block(static_cast<Eigen::Index>(row_pt) * n, static_cast<Eigen::Index>(col_pt) * n,
               n, n) = value;
}

} // namespace

PropagatorMatrix error_propagator_exact(const Eigen::MatrixXd& phi, int m, int k, int n_t) {
    check_shape(phi, m, k, n_t);
    const int n = static_cast<int>(phi.rows());
    const int n_blocks = n_t / m + 1;  // C-point blocks, last one possibly short

    PropagatorMatrix out;
    out.m = m;
    out.k = k;
    out.n_t = n_t;
    out.n_block = n;
    out.kind = OperatorKind::ExactLocalSolves;
    out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_t + 1) * n,
                                       static_cast<Eigen::Index>(n_t + 1) * n);

    const auto phi_pow = powers(phi, k * m + m - 1);
    for (int p = k; p < n_blocks; ++p) {
        const int row_c = p * m;
        const int col_c = (p - k) * m;
        const int height = std::min(m, n_t + 1 - row_c);
        for (int a = 0; a < height; ++a) {
            put_block(out.matrix, n, row_c + a, col_c,
                      phi_pow[static_cast<std::size_t>(k * m + a)]);
        }
    }
    return out;
}

PropagatorMatrix error_propagator_approx(const Eigen::MatrixXd& phi,
                                         const Eigen::MatrixXd& psi, int m, int k,
                                         int n_t) {
    check_shape(phi, m, k, n_t);
    if (psi.rows() != phi.rows() || psi.cols() != phi.cols()) {
        throw ConfigError("propagator: Phi and Psi must have matching shape");
    }
    const int n = static_cast<int>(phi.rows());
    const int n_blocks = n_t / m + 1;

    PropagatorMatrix out;
    out.m = m;
    out.k = k;
    out.n_t = n_t;
    out.n_block = n;
    out.kind = OperatorKind::ApproximateLocalSolves;
    out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_t + 1) * n,
                                       static_cast<Eigen::Index>(n_t + 1) * n);

    const auto phi_pow = powers(phi, m);
    const auto psi_pow = powers(psi, k - 1);
    const Eigen::MatrixXd defect = phi_pow[static_cast<std::size_t>(m)] - psi;

    // Column payloads per subdiagonal distance, before the leading Phi^a.
    std::vector<Eigen::MatrixXd> payload(static_cast<std::size_t>(k) + 1);
    for (int d = 1; d < k; ++d) {
        payload[static_cast<std::size_t>(d)] = psi_pow[static_cast<std::size_t>(d - 1)] * defect;
    }
    payload[static_cast<std::size_t>(k)] =
        psi_pow[static_cast<std::size_t>(k - 1)] * phi_pow[static_cast<std::size_t>(m)];

    for (int p = 1; p < n_blocks; ++p) {
        const int row_c = p * m;
        const int height = std::min(m, n_t + 1 - row_c);
        for (int d = 1; d <= std::min(k, p); ++d) {
            const int col_c = (p - d) * m;
            for (int a = 0; a < height; ++a) {
                put_block(out.matrix, n, row_c + a, col_c,
                          phi_pow[static_cast<std::size_t>(a)] *
                              payload[static_cast<std::size_t>(d)]);
            }
        }
    }
    return out;
}

PropagatorMatrix error_propagator_exact(double phi, int m, int k, int n_t) {
    Eigen::MatrixXd p(1, 1);
    p(0, 0) = phi;
    return error_propagator_exact(p, m, k, n_t);
}

PropagatorMatrix error_propagator_approx(double phi, double psi, int m, int k, int n_t) {
    Eigen::MatrixXd p(1, 1), q(1, 1);
    p(0, 0) = phi;
    q(0, 0) = psi;
    return error_propagator_approx(p, q, m, k, n_t);
}

Eigen::MatrixXcd cc_block(std::complex<double> lambda, std::complex<double> mu, int m,
                          int k, int p_count) {
    if (k < 2) throw ConfigError("cc_block: k must exceed 1");
    if (m < 1) throw ConfigError("cc_block: m must be positive");
    if (p_count < 1) throw ConfigError("cc_block: empty matrix");

    const std::complex<double> lam_m = std::pow(lambda, m);
    const std::complex<double> defect = lam_m - mu;

    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(p_count, p_count);
    for (int i = 0; i < p_count; ++i) {
        for (int d = 1; d <= std::min(k, i); ++d) {
            if (d < k) {
                e(i, i - d) = std::pow(mu, d - 1) * defect;
            } else {
                e(i, i - d) = std::pow(mu, k - 1) * lam_m;
            }
        }
    }
    return e;
}

BoundTerms cc_bound_terms(const EigenPair& pair, int m, int k) {
    const double abs_mu = std::abs(pair.mu);
    if (abs_mu >= 1.0) {
        throw ConfigError("convergence bound requires |mu| < 1");
    }
    const std::complex<double> lam_m = std::pow(pair.lambda, m);
    BoundTerms t;
    t.reduction_term = std::abs(lam_m - pair.mu) *
                       (1.0 - std::pow(abs_mu, k - 1)) / (1.0 - abs_mu);
    t.truncation_term = std::abs(lam_m) * std::pow(abs_mu, k - 1);
    return t;
}

double cc_norm_bound(std::span<const EigenPair> pairs, int m, int k) {
    if (pairs.empty()) throw ConfigError("convergence bound needs at least one pair");
    double worst = 0.0;
    for (const EigenPair& p : pairs) {
        worst = std::max(worst, cc_bound_terms(p, m, k).total());
    }
    return worst;
}

// Largest singular value via the self-adjoint eigenproblem on A^H A.
// (JacobiSVD in Eigen 3.4 miscomputes singular values of some complex
// matrices; the self-adjoint route is reliable for the sizes used here.)
double operator_norm(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a,
                                                      Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().size() > 0 ? es.eigenvalues().maxCoeff() : 0.0;
    return std::sqrt(std::max(0.0, top));
}

double operator_norm(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.adjoint() * a,
                                                       Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().size() > 0 ? es.eigenvalues().maxCoeff() : 0.0;
    return std::sqrt(std::max(0.0, top));
}

bool error_subdiagonal_cleared(std::complex<double> lambda, std::complex<double> mu, int m,
                               int k, int p_count, int ell) {
    (void)mu;
    if (ell < 1) throw ConfigError("error_subdiagonal_cleared: ell must be positive");
    const std::complex<double> mu_star = std::pow(lambda, m);
    const Eigen::MatrixXcd e = cc_block(lambda, mu_star, m, k, p_count);
    Eigen::MatrixXcd power = e;
    for (int i = 1; i < ell; ++i) power = power * e;
    return power.cwiseAbs().maxCoeff() < 1e-14;
}

} // namespace tempo::theory
