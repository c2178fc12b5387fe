#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace tempo::theory {

/// Which two-level error operator a dense matrix represents.
enum class OperatorKind { ExactLocalSolves, ApproximateLocalSolves, CPointBlock };

/// Dense representation of a two-level error propagator on a grid of
/// N_t + 1 points with spatial block size n_block. A validation instrument:
/// intended for scalar and small-matrix integrators only.
struct PropagatorMatrix {
    Eigen::MatrixXd matrix;
    int m = 0;
    int k = 0;
    int n_t = 0;
    int n_block = 1;
    OperatorKind kind = OperatorKind::ExactLocalSolves;
};

/// Error propagator for two-level sweeps with exact local coarse solves
/// (coarse operator = Phi^m): C-block rows p >= k carry Phi^{km+a} in the
/// column of C-point p-k; everything else is zero.
PropagatorMatrix error_propagator_exact(const Eigen::MatrixXd& phi, int m, int k, int n_t);
PropagatorMatrix error_propagator_exact(double phi, int m, int k, int n_t);

/// Error propagator with the re-discretized coarse operator Psi: a block
/// lower-triangular Toeplitz band with Phi^a Psi^{d-1} (Phi^m - Psi) on
/// C-block subdiagonals d = 1..k-1 and Phi^a Psi^{k-1} Phi^m on the k-th.
PropagatorMatrix error_propagator_approx(const Eigen::MatrixXd& phi,
                                         const Eigen::MatrixXd& psi, int m, int k, int n_t);
PropagatorMatrix error_propagator_approx(double phi, double psi, int m, int k, int n_t);

/// Fine/coarse eigenvalue pair sharing an eigenvector.
struct EigenPair {
    std::complex<double> lambda;  ///< fine integrator eigenvalue
    std::complex<double> mu;      ///< coarse integrator eigenvalue
};

/// C-point principal submatrix of the error propagator for one eigenvalue
/// pair: lower-triangular Toeplitz with subdiagonals mu^{d-1}(lambda^m - mu)
/// for d < k and mu^{k-1} lambda^m at d = k.
Eigen::MatrixXcd cc_block(std::complex<double> lambda, std::complex<double> mu, int m,
                          int k, int p_count);

/// The two contributions to the convergence bound.
struct BoundTerms {
    double reduction_term = 0.0;   ///< |lambda^m - mu| (1 - |mu|^{k-1}) / (1 - |mu|)
    double truncation_term = 0.0;  ///< |lambda^m mu^{k-1}|

    double total() const { return reduction_term + truncation_term; }
};

/// Bound terms for a single stable pair; throws ConfigError when |mu| >= 1.
BoundTerms cc_bound_terms(const EigenPair& pair, int m, int k);

/// Norm bound over a set of eigenvalue pairs: the max of the per-pair totals.
double cc_norm_bound(std::span<const EigenPair> pairs, int m, int k);

/// Operator 2-norm (largest singular value) of a dense matrix.
double operator_norm(const Eigen::MatrixXd& a);
double operator_norm(const Eigen::MatrixXcd& a);

/// True iff every entry of cc_block(...)^ell carries at least one factor of
/// (lambda^m - mu). Checked structurally by substituting mu := lambda^m, which
/// zeroes all subdiagonals except the k-th, and testing that the ell-th power
/// vanishes (entries below 1e-14).
bool error_subdiagonal_cleared(std::complex<double> lambda, std::complex<double> mu, int m,
                               int k, int p_count, int ell);

} // namespace tempo::theory
