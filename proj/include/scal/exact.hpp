#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "scal/dataset.hpp"
#include "scal/kmeans.hpp"

namespace scal {

/// Eigenpairs sorted by descending eigenvalue; vectors have orthonormal columns.
struct EigenPairs {
    Eigen::VectorXd values;   // length r
    Eigen::MatrixXd vectors;  // n x r
};

/// Largest problem size the exact path accepts by default; the O(n^3)
/// eigendecomposition is only meant for small-instance verification.
inline constexpr int kDefaultOracleCap = 3000;

/// Full n x n Gaussian affinity, w_ij = exp(-||x_i - x_j||^2 / sigma).
/// Computed once per pair and mirrored; the diagonal is exactly 1.
Eigen::MatrixXd full_affinity(const Dataset& dataset, double sigma,
                              int cap = kDefaultOracleCap);

/// Median of the n(n-1)/2 pairwise squared distances (distinct pairs).
double median_pairwise_sq_distance(const Dataset& dataset);

/// Top-r eigenpairs of a symmetric matrix by cyclic Jacobi rotations, run
/// until the off-diagonal Frobenius norm falls below 1e-10 * ||A||_F.
/// Throws NumericalError after 100 sweeps without convergence.
EigenPairs symmetric_eigs(const Eigen::MatrixXd& a, int r);

/// Exact spectral clustering: full affinity (sigma defaults to the median
/// pairwise squared distance), normalized Laplacian D^(-1/2) W D^(-1/2),
/// top-k eigenvectors, rows normalized to unit length, then k-means with
/// restarts.
ClusterAssignment spectral_cluster_exact(const Dataset& dataset, int k,
                                         std::optional<double> sigma = std::nullopt,
                                         std::uint64_t seed = 0,
                                         int cap = kDefaultOracleCap);

} // namespace scal
